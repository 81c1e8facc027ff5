#include "icn/json_io.hpp"
#include "icn/protocol.hpp"
#include "icn/scenario.hpp"
#include "icn/simulator.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace icn;
namespace jio = json_io;
using nlohmann::json;

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kBadInput = 2;

std::string read_bytes(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        fail(Errc::ParseError, "cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_bytes(const std::string& path, const std::string& bytes)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        fail(Errc::ParseError, "cannot write " + path);
    out << bytes;
}

Protocol load_state(const std::string& path)
{
    return Protocol::restore(read_json_file(path));
}

int cmd_simulate(const std::string& scenario_path, std::optional<std::uint64_t> seed,
                 std::optional<std::uint64_t> epochs, const std::string& out, bool serial)
{
    auto doc = read_json_file(scenario_path);
    auto diags = validate_scenario(doc);
    if (!diags.empty()) {
        for (const auto& d : diags)
            std::cerr << scenario_path << ':' << (d.path.empty() ? "/" : d.path) << ": " << d.message << '\n';
        return kBadInput;
    }
    RunOptions opts;
    opts.seed = seed;
    opts.epochs = epochs;
    opts.parallel = !serial;
    auto result = run_scenario(load_scenario(doc), opts);
    write_outputs(result, out);
    if (result.exit_status != 0) {
        std::cerr << "invariant violated at " << result.violation << '\n';
        return kFailed;
    }
    std::cout << "ran " << result.frames.size() << " epochs, seed " << result.seed << ", "
              << result.faults.size() << " faults, " << result.rejected.size()
              << " rejected events; conservation ok\n";
    return kOk;
}

int cmd_validate(const std::string& scenario_path)
{
    auto diags = validate_scenario(read_json_file(scenario_path));
    for (const auto& d : diags)
        std::cout << (d.path.empty() ? "/" : d.path) << ": " << d.message << '\n';
    if (!diags.empty())
        return kBadInput;
    std::cout << "ok\n";
    return kOk;
}

json node_view(const Protocol& p, const NodeId& id)
{
    const auto& reg = p.registry();
    json doc = reg.to_json();
    json node;
    for (const auto& n : doc.at("nodes"))
        if (n.at("id") == id)
            node = n;
    const auto& ledger = p.ledger();
    node["collateral"] = jio::amount(ledger.collateral_of(id));
    node["min_collateral"] = jio::amount(reg.min_collateral(id));
    node["stake"] = jio::amount(ledger.stake_of(id));
    node["security"] = jio::amount(ledger.security_of(id));
    if (auto nft = ledger.staked_nft(id))
        node["staked_nft"] = *nft;
    json instances = json::array();
    for (const auto& [iid, inst] : p.pool().instances())
        for (const auto& u : inst.allocations)
            if (u.node == id)
                instances.push_back({{"instance", iid}, {"type", u.type.to_string()},
                                     {"quantity", jio::u64(u.quantity)}});
    node["units"] = instances;
    const auto& aggs = p.enforcement().latest_aggregates();
    if (auto it = aggs.find(id); it != aggs.end())
        node["latest_aggregate"] = it->second.to_json();
    return node;
}

int cmd_inspect(const std::string& state_path, const std::string& region, const std::string& node)
{
    auto p = load_state(state_path);
    json out;
    if (!node.empty()) {
        p.registry().node(node);
        out = node_view(p, node);
    } else if (!region.empty()) {
        const auto& r = p.registry().region(region);
        json nodes = json::array();
        for (const auto& [id, n] : p.registry().nodes())
            if (n.region == r.id)
                nodes.push_back({{"id", id}, {"status", std::string(status_name(n.status))}});
        out = {{"id", r.id},
               {"target_capacity", jio::capacity(r.target_capacity)},
               {"bootstrap_end", jio::u64(r.bootstrap_end)},
               {"bootstrap_emission_per_epoch", jio::amount(r.bootstrap_emission_per_epoch)},
               {"free_capacity", jio::capacity(p.registry().capability_map(r.id))},
               {"nodes", nodes}};
    } else {
        const auto& l = p.ledger();
        std::map<std::string, std::size_t> by_status;
        for (const auto& [id, n] : p.registry().nodes())
            ++by_status[std::string(status_name(n.status))];
        out = {{"epoch", jio::u64(l.current_epoch())},
               {"regions", p.registry().regions().size()},
               {"nodes", by_status},
               {"instances", p.pool().instances().size()},
               {"anchors", l.anchors().size()},
               {"genesis_supply", jio::amount(l.genesis_supply())},
               {"emitted_total", jio::amount(l.emitted_total())},
               {"burned_total", jio::amount(l.burned_total())},
               {"conservation", l.conservation_holds() ? "ok" : "violated"}};
    }
    std::cout << out.dump(2) << '\n';
    return kOk;
}

int cmd_verify(const std::string& report_path, const std::string& proof_path, std::uint64_t anchor,
               const std::string& state_path)
{
    auto bytes = read_bytes(report_path);
    auto proof = MerkleProof::from_json(read_json_file(proof_path));
    auto p = load_state(state_path);
    if (anchor >= p.ledger().anchors().size())
        fail(Errc::UnknownAnchor, std::to_string(anchor));
    // Trailing newlines are not part of the canonical form.
    while (!bytes.empty() && (bytes.back() == '\n' || bytes.back() == '\r'))
        bytes.pop_back();
    bool ok = verify_report_bytes(bytes, proof, anchor, p.ledger());
    if (!ok) {
        // A non-canonical but equivalent rendering is re-canonicalized.
        try {
            ok = verify_report(PerformanceReport::from_json(json::parse(bytes)), proof, anchor, p.ledger());
        } catch (const std::exception&) {
            ok = false;
        }
    }
    std::cout << (ok ? "verified" : "rejected") << '\n';
    return ok ? kOk : kFailed;
}

int cmd_export(const std::string& state_path, std::uint64_t anchor, std::size_t leaf,
               const std::string& report_out, const std::string& proof_out)
{
    auto p = load_state(state_path);
    p.ledger().anchor(anchor);
    const auto* batch = p.enforcement().batch_for(anchor);
    if (!batch) {
        std::cerr << "anchor " << anchor << " is past retention; its reports were evicted\n";
        return kFailed;
    }
    auto proof = p.enforcement().proof_for(anchor, leaf);
    if (!proof) {
        std::cerr << "anchor " << anchor << " has " << batch->leaves.size() << " leaves\n";
        return kBadInput;
    }
    write_bytes(report_out, batch->leaves[leaf]);
    write_bytes(proof_out, proof->to_json().dump(2) + "\n");
    std::cout << "leaf " << leaf << " of " << batch->leaves.size() << " for " << batch->subject
              << " at epoch " << batch->epoch << '\n';
    return kOk;
}

int cmd_deploy(const std::string& state_path, const std::string& owner, const std::string& blueprint,
               std::uint64_t duration, const std::string& out, bool quote_only)
{
    auto p = load_state(state_path);
    if (quote_only) {
        auto plan = p.quote_price(DeploySpec{blueprint}, {}, duration);
        json units = json::array();
        for (const auto& u : plan.allocations)
            units.push_back({{"node", u.node}, {"type", u.type.to_string()}, {"quantity", jio::u64(u.quantity)}});
        std::cout << json{{"per_epoch_fee", jio::amount(plan.per_epoch_fee)}, {"units", units}}.dump(2) << '\n';
        return kOk;
    }
    const auto& inst = p.deploy(owner, DeploySpec{blueprint}, duration);
    json units = json::array();
    for (const auto& u : inst.allocations)
        units.push_back({{"node", u.node}, {"type", u.type.to_string()}, {"quantity", jio::u64(u.quantity)}});
    std::cout << json{{"instance", inst.id},
                      {"per_epoch_fee", jio::amount(inst.per_epoch_fee())},
                      {"booked_until", jio::u64(inst.booked_until)},
                      {"units", units}}
                     .dump(2)
              << '\n';
    if (!out.empty())
        write_bytes(out, p.snapshot().dump(2) + "\n");
    return kOk;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Decentralized compute network protocol simulator"};
    app.require_subcommand(1);

    std::string scenario, out = "out", state, region, node, report, proof, owner, blueprint;
    std::optional<std::uint64_t> seed, epochs;
    std::uint64_t anchor = 0, duration = 1;
    std::size_t leaf = 0;
    bool serial = false, quote_only = false;
    std::string report_out = "report.json", proof_out = "proof.json";

    auto* sim = app.add_subcommand("simulate", "Run a scenario through the epoch loop");
    sim->add_option("--scenario", scenario, "Scenario JSON")->required();
    sim->add_option("--seed", seed, "Override the scenario seed");
    sim->add_option("--epochs", epochs, "Override the scenario length");
    sim->add_option("--out", out, "Output directory");
    sim->add_flag("--serial", serial, "Run challenges on the serial reference path");

    auto* val = app.add_subcommand("validate", "Check a scenario and list diagnostics");
    val->add_option("--scenario", scenario, "Scenario JSON")->required();

    auto* insp = app.add_subcommand("inspect-state", "Summarize a state snapshot");
    insp->add_option("--state", state, "final_state.json")->required();
    auto* region_opt = insp->add_option("--region", region, "Show one region");
    insp->add_option("--node", node, "Show one node")->excludes(region_opt);

    auto* ver = app.add_subcommand("verify-report", "Check a report against an anchored root");
    ver->add_option("--report", report, "Report file (canonical JSON)")->required();
    ver->add_option("--proof", proof, "Merkle proof JSON")->required();
    ver->add_option("--anchor", anchor, "Anchor id")->required();
    ver->add_option("--state", state, "State snapshot holding the anchor (default out/final_state.json)");

    auto* exp = app.add_subcommand("export-proof", "Write a committed leaf and its inclusion proof");
    exp->add_option("--state", state, "State snapshot")->required();
    exp->add_option("--anchor", anchor, "Anchor id")->required();
    exp->add_option("--leaf", leaf, "Leaf index; the last leaf is the aggregate record");
    exp->add_option("--report-out", report_out, "Where to write the leaf bytes");
    exp->add_option("--proof-out", proof_out, "Where to write the proof");

    auto* dep = app.add_subcommand("deploy", "Deploy a blueprint against a state snapshot");
    dep->add_option("--state", state, "State snapshot")->required();
    dep->add_option("--blueprint", blueprint, "Blueprint id")->required();
    dep->add_option("--duration", duration, "Booking length in epochs");
    dep->add_option("--owner", owner, "Paying account");
    dep->add_option("--out", out, "Write the updated snapshot here");
    dep->add_flag("--quote", quote_only, "Only print the quote");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*sim)
            return cmd_simulate(scenario, seed, epochs, out, serial);
        if (*val)
            return cmd_validate(scenario);
        if (*insp)
            return cmd_inspect(state, region, node);
        if (*ver)
            return cmd_verify(report, proof, anchor, state.empty() ? "out/final_state.json" : state);
        if (*exp)
            return cmd_export(state, anchor, leaf, report_out, proof_out);
        if (*dep) {
            if (!quote_only && owner.empty()) {
                std::cerr << "--owner is required unless --quote is given\n";
                return kBadInput;
            }
            return cmd_deploy(state, owner, blueprint, duration, dep->count("--out") ? out : "", quote_only);
        }
    } catch (const ProtocolError& e) {
        std::cerr << e.what() << '\n';
        return kBadInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kBadInput;
    }
    return kBadInput;
}
