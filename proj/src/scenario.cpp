#include "icn/scenario.hpp"

#include "icn/json_io.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace icn {

namespace jio = json_io;
using nlohmann::json;

namespace {

enum class Field {
    Str,
    U64,
    I64,
    Amount,
    Ratio,
    Type,
    Capacity,
    Kpis,
    Account,
    Node,
    Region,
    Class,
    Blueprint,
    Instance,
    Nft,
    Subject,
    StakeTarget,
    NodeList,
    Requirements,
};

struct FieldSpec {
    const char* name;
    Field kind;
    bool required = true;
};

const std::map<std::string, std::vector<FieldSpec>>& action_schema()
{
    static const std::map<std::string, std::vector<FieldSpec>> schema = {
        {"register_node",
         {{"id", Field::Str},
          {"provider", Field::Account},
          {"class", Field::Class},
          {"region", Field::Region},
          {"capacity", Field::Capacity, false},
          {"rewards_share", Field::Ratio},
          {"reservation_price", Field::Amount},
          {"max_booking_duration", Field::U64},
          {"commitment_end", Field::U64},
          {"true_profile", Field::Kpis, false}}},
        {"lock_collateral",
         {{"node", Field::Node},
          {"owner", Field::Account, false},
          {"amount", Field::Amount},
          {"until", Field::U64}}},
        {"release_collateral", {{"lock", Field::U64}}},
        {"activate", {{"node", Field::Node}}},
        {"deploy",
         {{"owner", Field::Account},
          {"blueprint", Field::Blueprint, false},
          {"requirements", Field::Requirements, false},
          {"duration", Field::U64},
          {"id", Field::Str, false}}},
        {"scale", {{"instance", Field::Instance}, {"type", Field::Type}, {"delta", Field::I64}}},
        {"release", {{"instance", Field::Instance}}},
        {"extend",
         {{"instance", Field::Instance}, {"extra", Field::U64}, {"declined", Field::NodeList, false}}},
        {"stake", {{"staker", Field::Account}, {"target", Field::StakeTarget}, {"amount", Field::Amount}}},
        {"mint_nft",
         {{"owner", Field::Account},
          {"id", Field::Str, false},
          {"initial_sink", Field::Amount},
          {"timelock", Field::U64}}},
        {"stake_nft", {{"nft", Field::Nft}, {"target", Field::StakeTarget}}},
        {"inject_fault", {{"subject", Field::Subject}, {"multiplier", Field::Ratio}, {"duration", Field::U64}}},
        {"retire", {{"node", Field::Node}}},
        {"set_price", {{"node", Field::Node}, {"price", Field::Amount}}},
        {"transfer", {{"from", Field::Account}, {"to", Field::Str}, {"amount", Field::Amount}}},
    };
    return schema;
}

class Loader {
public:
    std::vector<Diagnostic> diags;

    void add(std::string path, std::string message)
    {
        diags.push_back({std::move(path), std::move(message)});
    }

    // Runs `parse`; any exception becomes a diagnostic at `path`.
    template <class F>
    bool attempt(const std::string& path, F&& parse)
    {
        try {
            parse();
            return true;
        } catch (const std::exception& e) {
            add(path, e.what());
            return false;
        }
    }

    const json* get(const json& obj, const std::string& path, const char* key, bool required = true)
    {
        if (!obj.is_object()) {
            add(path, "expected an object");
            return nullptr;
        }
        auto it = obj.find(key);
        if (it == obj.end()) {
            if (required)
                add(path + "/" + key, "missing required field");
            return nullptr;
        }
        return &*it;
    }

    const json* array(const json& doc, const char* key, bool required = false)
    {
        const json* a = get(doc, "", key, required);
        if (a && !a->is_array()) {
            add(std::string("/") + key, "expected an array");
            return nullptr;
        }
        return a;
    }

    std::string str(const json& obj, const std::string& path, const char* key)
    {
        const json* v = get(obj, path, key);
        if (!v)
            return {};
        if (!v->is_string() || v->get_ref<const std::string&>().empty()) {
            add(path + "/" + key, "expected a non-empty string");
            return {};
        }
        return v->get<std::string>();
    }

    template <class T, class F>
    T read(const json& obj, const std::string& path, const char* key, F&& reader, T fallback = {},
           bool required = true)
    {
        const json* v = get(obj, path, key, required);
        if (!v)
            return fallback;
        T out = fallback;
        attempt(path + "/" + key, [&] { out = reader(*v); });
        return out;
    }

    Scenario parse(const json& doc);

private:
    void parse_events(const json& doc, Scenario& s);
    void check_field(const FieldSpec& f, const json& value, const std::string& path);

    std::set<AccountId> accounts_;
    std::set<RegionId> regions_;
    std::set<ClassId> classes_;
    std::set<std::string> services_;
    std::set<std::string> blueprints_;
    std::set<std::string> spec_kinds_;
    std::set<HyperNodeId> hypernodes_;
    std::set<NodeId> nodes_;
    std::set<NodeId> all_registered_;
    std::set<InstanceId> instances_;
    std::set<NftId> nfts_;
};

std::optional<ElasticBounds> read_elastic(const json& j)
{
    if (j.is_null())
        return std::nullopt;
    return ElasticBounds{jio::read_ratio(j.at("min_factor")), jio::read_ratio(j.at("max_factor"))};
}

std::vector<Requirement> read_requirements(const json& j)
{
    if (!j.is_array() || j.empty())
        fail(Errc::ParseError, "requirements must be a non-empty array");
    std::vector<Requirement> out;
    for (const auto& r : j)
        out.push_back(requirement_from_json(r));
    return out;
}

Scenario Loader::parse(const json& doc)
{
    Scenario s;
    if (!doc.is_object()) {
        add("", "scenario must be a JSON object");
        return s;
    }
    s.seed = read<std::uint64_t>(doc, "", "seed", jio::read_u64);
    s.epochs = read<std::uint64_t>(doc, "", "epochs", jio::read_u64, 1);
    if (s.epochs == 0)
        add("/epochs", "must be positive");

    if (const json* g = get(doc, "", "genesis")) {
        if (!g->is_object() || g->empty())
            add("/genesis", "expected a non-empty object of account balances");
        else
            for (const auto& [account, amount] : g->items()) {
                attempt("/genesis/" + account, [&] { s.genesis[account] = jio::read_amount(amount); });
                accounts_.insert(account);
            }
    }
    if (const json* supply = get(doc, "", "genesis_supply", false)) {
        TokenAmount total;
        bool ok = attempt("/genesis", [&] {
            for (const auto& [a, v] : s.genesis)
                total += v;
        });
        attempt("/genesis_supply", [&] {
            if (ok && jio::read_amount(*supply) != total)
                fail(Errc::ParseError, "genesis_supply " + supply->dump()
                                           + " differs from the sum of balances " + total.to_string());
        });
    }

    auto& ec = s.config.enforcement;
    ec.seed = s.seed;
    ec.replication_factor = read<std::uint64_t>(doc, "", "replication_factor", jio::read_u64, 3, false);
    if (ec.replication_factor == 0)
        add("/replication_factor", "must be positive");
    ec.noise_amplitude = read<Ratio>(doc, "", "noise_amplitude", jio::read_ratio, Ratio::zero(), false);
    if (!(ec.noise_amplitude < Ratio::one()))
        add("/noise_amplitude", "must be below 1");
    ec.retention_epochs = read<std::uint64_t>(doc, "", "retention_epochs", jio::read_u64, 16, false);
    if (ec.retention_epochs == 0)
        add("/retention_epochs", "must be positive");
    ec.challenger_slash_rate =
        read<Ratio>(doc, "", "challenger_slash_rate", jio::read_ratio, Ratio::zero(), false);
    if (!ec.challenger_slash_rate.in_unit_interval())
        add("/challenger_slash_rate", "must lie in [0,1]");
    if (const json* w = get(doc, "", "weights", false)) {
        auto& sw = s.config.weights;
        sw.perf = read<Ratio>(*w, "/weights", "perf", jio::read_ratio, Ratio::one());
        sw.price = read<Ratio>(*w, "/weights", "price", jio::read_ratio, Ratio::one());
        sw.avail = read<Ratio>(*w, "/weights", "avail", jio::read_ratio, Ratio::one());
    }

    if (const json* regions = array(doc, "regions", true)) {
        for (std::size_t i = 0; i < regions->size(); ++i) {
            const auto& j = (*regions)[i];
            std::string p = "/regions/" + std::to_string(i);
            RegionEconomy r;
            r.id = str(j, p, "id");
            r.target_capacity = read<CapacityVector>(j, p, "target_capacity", jio::read_capacity, {}, false);
            r.bootstrap_end = read<std::uint64_t>(j, p, "bootstrap_end", jio::read_u64, 0, false);
            r.bootstrap_emission_per_epoch = read<TokenAmount>(
                j, p, "bootstrap_emission_per_epoch", jio::read_amount, TokenAmount{}, false);
            if (const json* rates = get(j, p, "per_unit_collateral_rates", false)) {
                attempt(p + "/per_unit_collateral_rates", [&] {
                    for (const auto& [type, rate] : rates->items())
                        r.per_unit_collateral_rates[ResourceType::parse(type)] = jio::read_amount(rate);
                });
            }
            if (!r.id.empty() && !regions_.insert(r.id).second)
                add(p + "/id", "duplicate region " + r.id);
            s.regions.push_back(std::move(r));
        }
    }

    // Challenge kinds are needed to check class challenge sets.
    const json* specs = array(doc, "challenge_specs");
    if (specs)
        for (const auto& j : *specs)
            if (j.is_object() && j.contains("kind") && j["kind"].is_string())
                spec_kinds_.insert(j["kind"].get<std::string>());

    if (const json* classes = array(doc, "hardware_classes", true)) {
        for (std::size_t i = 0; i < classes->size(); ++i) {
            const auto& j = (*classes)[i];
            std::string p = "/hardware_classes/" + std::to_string(i);
            HardwareClass c;
            c.id = str(j, p, "id");
            c.capacity_template = read<CapacityVector>(j, p, "capacity_template", jio::read_capacity);
            if (capacity_is_zero(c.capacity_template) && get(j, p, "capacity_template", false))
                add(p + "/capacity_template", "template must be non-zero");
            c.performance_profile = read<KpiMap>(j, p, "performance_profile", jio::read_kpis);
            if (const json* set = get(j, p, "challenge_set", false)) {
                for (std::size_t k = 0; set->is_array() && k < set->size(); ++k) {
                    const auto& kind = (*set)[k];
                    if (!kind.is_string() || !spec_kinds_.contains(kind.get<std::string>()))
                        add(p + "/challenge_set/" + std::to_string(k),
                            "unknown challenge kind " + kind.dump());
                    else
                        c.challenge_set.push_back(kind.get<std::string>());
                }
            }
            if (!c.id.empty() && !classes_.insert(c.id).second)
                add(p + "/id", "duplicate hardware class " + c.id);
            s.classes.push_back(std::move(c));
        }
    }

    if (const json* services = array(doc, "services")) {
        for (std::size_t i = 0; i < services->size(); ++i) {
            const auto& j = (*services)[i];
            std::string p = "/services/" + std::to_string(i);
            Service svc;
            svc.id = str(j, p, "id");
            svc.host_node = str(j, p, "host_node");
            svc.performance_profile = read<KpiMap>(j, p, "performance_profile", jio::read_kpis);
            if (!svc.id.empty() && !services_.insert(svc.id).second)
                add(p + "/id", "duplicate service " + svc.id);
            s.services.push_back(std::move(svc));
        }
    }

    if (specs) {
        for (std::size_t i = 0; i < specs->size(); ++i) {
            const auto& j = (*specs)[i];
            std::string p = "/challenge_specs/" + std::to_string(i);
            ChallengeSpec spec;
            spec.kind = str(j, p, "kind");
            spec.subject = str(j, p, "subject");
            if (!spec.subject.empty() && !classes_.contains(spec.subject) && !services_.contains(spec.subject))
                add(p + "/subject", "unknown class or service " + spec.subject);
            spec.kpis = read<std::vector<std::string>>(
                j, p, "kpis", [](const json& v) { return v.get<std::vector<std::string>>(); });
            if (spec.kpis.empty() && get(j, p, "kpis", false))
                add(p + "/kpis", "must list at least one KPI");
            if (const json* th = get(j, p, "pass_thresholds")) {
                attempt(p + "/pass_thresholds", [&] {
                    for (const auto& [kpi, t] : th->items())
                        spec.pass_thresholds[kpi] = jio::read_ratio(t);
                });
            }
            for (const auto& kpi : spec.kpis) {
                auto t = spec.pass_thresholds.find(kpi);
                if (t == spec.pass_thresholds.end())
                    add(p + "/pass_thresholds", "no threshold for " + kpi);
                else if (t->second.is_zero() || !t->second.in_unit_interval())
                    add(p + "/pass_thresholds/" + kpi, "threshold must lie in (0,1]");
            }
            s.challenge_specs.push_back(std::move(spec));
        }
    }

    if (const json* bps = array(doc, "blueprints")) {
        for (std::size_t i = 0; i < bps->size(); ++i) {
            const auto& j = (*bps)[i];
            std::string p = "/blueprints/" + std::to_string(i);
            InstanceBlueprint bp;
            bp.id = str(j, p, "id");
            bp.requirements = read<std::vector<Requirement>>(j, p, "requirements", read_requirements);
            for (std::size_t r = 0; r < bp.requirements.size(); ++r)
                for (const auto& region : bp.requirements[r].locality)
                    if (!regions_.contains(region))
                        add(p + "/requirements/" + std::to_string(r) + "/locality",
                            "unknown region " + region);
            if (const json* e = get(j, p, "elastic", false))
                attempt(p + "/elastic", [&] { bp.elastic = read_elastic(*e); });
            if (const json* svcs = get(j, p, "services", false)) {
                for (std::size_t k = 0; svcs->is_array() && k < svcs->size(); ++k) {
                    const auto& id = (*svcs)[k];
                    if (!id.is_string() || !services_.contains(id.get<std::string>()))
                        add(p + "/services/" + std::to_string(k), "unknown service " + id.dump());
                    else
                        bp.services.push_back(id.get<std::string>());
                }
            }
            if (!bp.id.empty() && !blueprints_.insert(bp.id).second)
                add(p + "/id", "duplicate blueprint " + bp.id);
            s.blueprints.push_back(std::move(bp));
        }
    }

    if (const json* hns = array(doc, "hypernodes")) {
        for (std::size_t i = 0; i < hns->size(); ++i) {
            const auto& j = (*hns)[i];
            std::string p = "/hypernodes/" + std::to_string(i);
            HyperNodeSetup h;
            h.hypernode.id = str(j, p, "id");
            h.hypernode.operator_account = str(j, p, "operator");
            if (!h.hypernode.operator_account.empty() && !accounts_.contains(h.hypernode.operator_account))
                add(p + "/operator", "unknown account " + h.hypernode.operator_account);
            h.stake = read<TokenAmount>(j, p, "stake", jio::read_amount, TokenAmount{}, false);
            h.hypernode.report_bias =
                read<Ratio>(j, p, "report_bias", jio::read_ratio, Ratio::one(), false);
            if (!h.hypernode.id.empty() && !hypernodes_.insert(h.hypernode.id).second)
                add(p + "/id", "duplicate hypernode " + h.hypernode.id);
            s.hypernodes.push_back(std::move(h));
        }
    }

    parse_events(doc, s);

    for (std::size_t i = 0; i < s.services.size(); ++i)
        if (!s.services[i].host_node.empty() && !all_registered_.contains(s.services[i].host_node))
            add("/services/" + std::to_string(i) + "/host_node",
                "no event registers node " + s.services[i].host_node);
    return s;
}

void Loader::check_field(const FieldSpec& f, const json& v, const std::string& path)
{
    auto ref = [&](const std::set<std::string>& known, const char* what) {
        if (!v.is_string())
            add(path, std::string("expected ") + what + " id string");
        else if (!known.contains(v.get<std::string>()))
            add(path, std::string("unknown ") + what + " " + v.get<std::string>());
    };
    switch (f.kind) {
    case Field::Str:
        if (!v.is_string() || v.get_ref<const std::string&>().empty())
            add(path, "expected a non-empty string");
        break;
    case Field::U64: attempt(path, [&] { jio::read_u64(v); }); break;
    case Field::I64: attempt(path, [&] { jio::read_i64(v); }); break;
    case Field::Amount: attempt(path, [&] { jio::read_amount(v); }); break;
    case Field::Ratio: attempt(path, [&] { jio::read_ratio(v); }); break;
    case Field::Type: attempt(path, [&] { ResourceType::parse(v.get<std::string>()); }); break;
    case Field::Capacity: attempt(path, [&] { jio::read_capacity(v); }); break;
    case Field::Kpis: attempt(path, [&] { jio::read_kpis(v); }); break;
    case Field::Requirements: {
        std::vector<Requirement> reqs;
        attempt(path, [&] { reqs = read_requirements(v); });
        for (const auto& r : reqs)
            for (const auto& region : r.locality)
                if (!regions_.contains(region))
                    add(path, "unknown region " + region);
        break;
    }
    case Field::Account: ref(accounts_, "account"); break;
    case Field::Node: ref(nodes_, "node"); break;
    case Field::Region: ref(regions_, "region"); break;
    case Field::Class: ref(classes_, "hardware class"); break;
    case Field::Blueprint: ref(blueprints_, "blueprint"); break;
    case Field::Instance: ref(instances_, "instance"); break;
    case Field::Nft: ref(nfts_, "nft"); break;
    case Field::Subject: {
        std::set<std::string> subjects = nodes_;
        subjects.insert(services_.begin(), services_.end());
        ref(subjects, "subject");
        break;
    }
    case Field::StakeTarget: {
        std::set<std::string> targets = nodes_;
        targets.insert(hypernodes_.begin(), hypernodes_.end());
        ref(targets, "stake target");
        break;
    }
    case Field::NodeList:
        if (!v.is_array()) {
            add(path, "expected an array of node ids");
            break;
        }
        for (std::size_t k = 0; k < v.size(); ++k)
            check_field({f.name, Field::Node}, v[k], path + "/" + std::to_string(k));
        break;
    }
}

void Loader::parse_events(const json& doc, Scenario& s)
{
    const json* events = array(doc, "events");
    if (!events)
        return;
    std::optional<std::pair<std::size_t, Epoch>> prev;
    for (std::size_t i = 0; i < events->size(); ++i) {
        const auto& j = (*events)[i];
        std::string p = "/events/" + std::to_string(i);
        ScenarioEvent ev;
        ev.index = i;
        ev.epoch = read<std::uint64_t>(j, p, "epoch", jio::read_u64);
        ev.action = str(j, p, "action");
        if (!j.is_object())
            continue;
        if (prev && ev.epoch < prev->second)
            add(p + "/epoch", "event " + std::to_string(i) + " at epoch " + std::to_string(ev.epoch)
                                  + " precedes event " + std::to_string(prev->first) + " at epoch "
                                  + std::to_string(prev->second));
        else
            prev = {i, ev.epoch};
        if (ev.epoch >= s.epochs && s.epochs > 0)
            add(p + "/epoch", "beyond the last epoch " + std::to_string(s.epochs - 1));

        auto schema = action_schema().find(ev.action);
        if (schema == action_schema().end()) {
            if (!ev.action.empty())
                add(p + "/action", "unknown action " + ev.action);
            continue;
        }
        for (const auto& [key, value] : j.items())
            if (key != "epoch" && key != "action") {
                bool known = false;
                for (const auto& f : schema->second)
                    known = known || key == f.name;
                if (!known)
                    add(p + "/" + key, "unexpected field for " + ev.action);
            }
        for (const auto& f : schema->second) {
            const json* v = get(j, p, f.name, f.required);
            if (v)
                check_field(f, *v, p + "/" + f.name);
        }

        if (ev.action == "register_node") {
            if (j.contains("id") && j["id"].is_string()) {
                std::string id = j["id"];
                if (nodes_.contains(id) || hypernodes_.contains(id))
                    add(p + "/id", "duplicate node " + id);
                nodes_.insert(id);
                all_registered_.insert(id);
            }
        } else if (ev.action == "deploy") {
            if (j.contains("blueprint") == j.contains("requirements"))
                add(p, "deploy needs exactly one of blueprint or requirements");
            if (j.contains("id") && j["id"].is_string()) {
                if (!instances_.insert(j["id"].get<std::string>()).second)
                    add(p + "/id", "duplicate instance " + j["id"].get<std::string>());
            }
        } else if (ev.action == "mint_nft") {
            if (j.contains("id") && j["id"].is_string())
                if (!nfts_.insert(j["id"].get<std::string>()).second)
                    add(p + "/id", "duplicate nft " + j["id"].get<std::string>());
        } else if (ev.action == "transfer") {
            if (j.contains("to") && j["to"].is_string())
                accounts_.insert(j["to"].get<std::string>());
        }

        json args = j;
        args.erase("epoch");
        args.erase("action");
        ev.args = std::move(args);
        s.events.push_back(std::move(ev));
    }
}

}  // namespace

std::vector<Diagnostic> validate_scenario(const json& doc)
{
    Loader loader;
    loader.parse(doc);
    return loader.diags;
}

Scenario load_scenario(const json& doc)
{
    Loader loader;
    Scenario s = loader.parse(doc);
    if (!loader.diags.empty()) {
        const auto& d = loader.diags.front();
        fail(Errc::ScenarioInvalid, (d.path.empty() ? "/" : d.path) + ": " + d.message
                                        + (loader.diags.size() > 1
                                               ? " (+" + std::to_string(loader.diags.size() - 1) + " more)"
                                               : ""));
    }
    return s;
}

json read_json_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        fail(Errc::ParseError, "cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return json::parse(buf.str());
    } catch (const json::parse_error& e) {
        fail(Errc::ParseError, path.string() + ": " + e.what());
    }
}

Protocol build_protocol(const Scenario& s)
{
    std::map<AccountId, TokenAmount> genesis = s.genesis;
    genesis.try_emplace(ResourcePool::kEscrowAccount);
    Protocol p(s.config, genesis);
    for (const auto& r : s.regions)
        p.add_region(r);
    for (const auto& c : s.classes)
        p.add_class(c);
    for (const auto& svc : s.services)
        p.add_service(svc);
    for (const auto& spec : s.challenge_specs)
        p.register_challenge_spec(spec);
    for (const auto& bp : s.blueprints)
        p.add_blueprint(bp);
    for (const auto& h : s.hypernodes) {
        p.add_hypernode(h.hypernode);
        if (!h.stake.is_zero())
            p.stake(h.hypernode.operator_account, h.hypernode.id, h.stake);
    }
    return p;
}

void apply_event(Protocol& p, const ScenarioEvent& ev)
{
    const json& a = ev.args;
    auto s = [&](const char* key) { return a.at(key).get<std::string>(); };
    auto u = [&](const char* key) { return jio::read_u64(a.at(key)); };
    auto amt = [&](const char* key) { return jio::read_amount(a.at(key)); };

    const std::string& act = ev.action;
    if (act == "register_node") {
        NodeRegistration reg;
        reg.id = s("id");
        reg.provider = s("provider");
        reg.hardware_class = s("class");
        reg.region = s("region");
        reg.capacity = a.contains("capacity")
                           ? jio::read_capacity(a.at("capacity"))
                           : p.registry().hardware_class(reg.hardware_class).capacity_template;
        reg.rewards_share = jio::read_ratio(a.at("rewards_share"));
        reg.reservation_price = amt("reservation_price");
        reg.max_booking_duration = u("max_booking_duration");
        reg.commitment_end = u("commitment_end");
        if (a.contains("true_profile"))
            reg.true_profile = jio::read_kpis(a.at("true_profile"));
        p.register_node(reg);
    } else if (act == "lock_collateral") {
        NodeId node = s("node");
        AccountId owner = a.contains("owner") ? s("owner") : p.registry().node(node).provider;
        p.lock_collateral(owner, node, amt("amount"), u("until"));
    } else if (act == "release_collateral") {
        p.release_collateral(u("lock"));
    } else if (act == "activate") {
        p.activate(s("node"));
    } else if (act == "deploy") {
        DeploySpec spec = a.contains("blueprint")
                              ? DeploySpec{s("blueprint")}
                              : DeploySpec{read_requirements(a.at("requirements"))};
        std::optional<InstanceId> id;
        if (a.contains("id"))
            id = s("id");
        p.deploy(s("owner"), spec, u("duration"), id);
    } else if (act == "scale") {
        p.scale(s("instance"), ResourceType::parse(s("type")), jio::read_i64(a.at("delta")));
    } else if (act == "release") {
        p.release(s("instance"));
    } else if (act == "extend") {
        std::map<NodeId, bool> accepts;
        if (a.contains("declined"))
            for (const auto& n : a.at("declined"))
                accepts[n.get<std::string>()] = false;
        const auto& inst = p.pool().instance(s("instance"));
        for (const auto& unit : inst.allocations)
            accepts.try_emplace(unit.node, true);
        p.extend_reservation(s("instance"), u("extra"), accepts);
    } else if (act == "stake") {
        p.stake(s("staker"), s("target"), amt("amount"));
    } else if (act == "mint_nft") {
        std::optional<NftId> id;
        if (a.contains("id"))
            id = s("id");
        p.mint_nft(s("owner"), amt("initial_sink"), u("timelock"), id);
    } else if (act == "stake_nft") {
        p.stake_nft(s("nft"), s("target"));
    } else if (act == "inject_fault") {
        p.inject_fault(s("subject"), jio::read_ratio(a.at("multiplier")), u("duration"));
    } else if (act == "retire") {
        p.retire(s("node"));
    } else if (act == "set_price") {
        p.set_reservation_price(s("node"), amt("price"));
    } else if (act == "transfer") {
        p.transfer(s("from"), s("to"), amt("amount"));
    } else {
        fail(Errc::ScenarioInvalid, "unknown action " + act);
    }
}

}  // namespace icn
