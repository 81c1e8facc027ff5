#pragma once

#include "icn/protocol.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace icn {

struct Diagnostic {
    /// JSON pointer to the offending field, e.g. "/events/3/node".
    std::string path;
    std::string message;
};

struct HyperNodeSetup {
    HyperNode hypernode;
    /// Staked from the operator account at genesis.
    TokenAmount stake;
};

struct ScenarioEvent {
    std::size_t index = 0;
    Epoch epoch = 0;
    std::string action;
    nlohmann::json args;
};

struct Scenario {
    std::uint64_t seed = 0;
    Epoch epochs = 1;
    std::map<AccountId, TokenAmount> genesis;
    ProtocolConfig config;
    std::vector<RegionEconomy> regions;
    std::vector<HardwareClass> classes;
    std::vector<Service> services;
    std::vector<ChallengeSpec> challenge_specs;
    std::vector<InstanceBlueprint> blueprints;
    std::vector<HyperNodeSetup> hypernodes;
    std::vector<ScenarioEvent> events;
};

/// Schema and referential checks. Empty iff the scenario is loadable.
std::vector<Diagnostic> validate_scenario(const nlohmann::json& doc);

/// Throws ProtocolError(ScenarioInvalid) carrying the first diagnostic.
Scenario load_scenario(const nlohmann::json& doc);

/// Reads and parses a JSON file; throws ProtocolError(ParseError).
nlohmann::json read_json_file(const std::filesystem::path& path);

/// Fresh protocol state at epoch 0 with the scenario catalog installed.
Protocol build_protocol(const Scenario& scenario);

/// Applies one scripted event.
void apply_event(Protocol& protocol, const ScenarioEvent& event);

}  // namespace icn
