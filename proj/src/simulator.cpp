#include "icn/simulator.hpp"

#include "icn/json_io.hpp"

#include <fstream>
#include <sstream>

namespace icn {

namespace jio = json_io;
using nlohmann::json;

namespace {

std::string residual_field(const std::map<RegionId, CapacityVector>& residual)
{
    std::string out;
    for (const auto& [region, cap] : residual) {
        if (!out.empty())
            out += ';';
        out += region + '[';
        bool first = true;
        for (const auto& [type, qty] : cap) {
            if (!first)
                out += '|';
            first = false;
            out += type.to_string() + '=' + std::to_string(qty);
        }
        out += ']';
    }
    return out;
}

void write_text(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        fail(Errc::ParseError, "cannot write " + path.string());
    out << text;
}

}  // namespace

std::string metrics_header()
{
    return "record,epoch,node,source,gross,provider_cut,staker_total,region_residual,live_instances,"
           "bootstrap_rewards,access_fee_rewards,burned_total,emitted_total,faults,rejected_events,"
           "conservation";
}

std::vector<std::string> InvariantMonitor::after_challenges(const Protocol& p,
                                                            const ChallengeRound& round,
                                                            const std::vector<SubjectId>& subjects,
                                                            std::size_t expected_reports) const
{
    std::vector<std::string> out;
    if (round.skipped)
        return out;
    const auto& store = p.enforcement().store();
    for (const auto& subject : subjects) {
        auto n = store.reports_for(round.epoch, subject).size();
        if (n != expected_reports)
            out.push_back("report completeness: " + subject + " has " + std::to_string(n)
                          + " reports, expected " + std::to_string(expected_reports));
    }
    std::size_t faults = 0;
    for (const auto& o : round.outcomes) {
        if (!o.fault)
            continue;
        ++faults;
        if (!o.fault->severity.in_unit_interval())
            out.push_back("severity bounds: " + o.fault->subject + " severity "
                          + o.fault->severity.to_string());
    }
    if (faults != round.fault_slashes.size())
        out.push_back("fault-slash coupling: " + std::to_string(faults) + " faults but "
                      + std::to_string(round.fault_slashes.size()) + " slashes");
    for (const auto& rec : round.fault_slashes)
        if (rec.outcome.severity != rec.fault.severity || rec.outcome.node != rec.fault.node)
            out.push_back("fault-slash coupling: slash of " + rec.outcome.node
                          + " does not match its fault");
    return out;
}

std::vector<std::string> InvariantMonitor::after_settlement(const Protocol& p,
                                                            const SettlementResult& result,
                                                            TokenAmount emitted_before) const
{
    std::vector<std::string> out;
    TokenAmount access_paid;
    TokenAmount bootstrap_paid;
    for (const auto& st : result.statements) {
        if (st.provider_cut + st.staker_total() != st.gross)
            out.push_back("split exactness: " + st.node + " " + std::string(source_name(st.source))
                          + " gross " + st.gross.to_string());
        (st.source == RewardSource::AccessFee ? access_paid : bootstrap_paid) += st.gross;
    }
    if (result.fees_charged != access_paid + result.fees_burned)
        out.push_back("billing conservation: charged " + result.fees_charged.to_string() + " != paid "
                      + access_paid.to_string() + " + burned " + result.fees_burned.to_string());
    if (bootstrap_paid != result.bootstrap_emitted
        || p.ledger().emitted_total() != emitted_before + result.bootstrap_emitted)
        out.push_back("emission accounting: emitted " + result.bootstrap_emitted.to_string()
                      + " does not match bootstrap statements");
    return out;
}

std::vector<std::string> InvariantMonitor::end_of_epoch(const Protocol& p)
{
    std::vector<std::string> out = p.check_state_invariants();

    const auto& anchors = p.ledger().anchors();
    if (anchors.size() < anchors_.size())
        out.push_back("anchor append-only: anchor log shrank");
    for (std::size_t i = 0; i < anchors_.size() && i < anchors.size(); ++i)
        if (anchors[i].id != anchors_[i].first || anchors[i].root != anchors_[i].second)
            out.push_back("anchor append-only: anchor " + std::to_string(anchors_[i].first) + " changed");
    for (std::size_t i = anchors_.size(); i < anchors.size(); ++i)
        anchors_.emplace_back(anchors[i].id, anchors[i].root);

    for (const auto& [id, pass] : p.ledger().nfts()) {
        if (pass.sink_value > pass.initial_sink)
            out.push_back("nft monotonicity: " + id + " sink exceeds its initial value");
        auto [it, inserted] = sinks_.try_emplace(id, pass.sink_value);
        if (!inserted) {
            if (pass.sink_value > it->second)
                out.push_back("nft monotonicity: " + id + " sink grew from " + it->second.to_string()
                              + " to " + pass.sink_value.to_string());
            it->second = pass.sink_value;
        }
    }
    return out;
}

RunResult run_scenario(Scenario scenario, const RunOptions& options)
{
    if (options.seed) {
        scenario.seed = *options.seed;
        scenario.config.enforcement.seed = *options.seed;
    }
    if (options.epochs) {
        if (*options.epochs == 0)
            fail(Errc::ScenarioInvalid, "epochs must be positive");
        scenario.epochs = *options.epochs;
    }

    RunResult result;
    result.seed = scenario.seed;
    result.epochs = scenario.epochs;
    Protocol p = build_protocol(scenario);
    InvariantMonitor monitor;
    std::ostringstream csv;
    csv << metrics_header() << '\n';

    std::size_t next_event = 0;
    std::size_t deploys = 0;
    Epoch epochs_run = 0;
    for (Epoch e = 0; e < scenario.epochs; ++e) {
        std::vector<std::string> violations;
        p.begin_epoch();

        std::size_t rejected_now = 0;
        for (; next_event < scenario.events.size() && scenario.events[next_event].epoch <= e; ++next_event) {
            const auto& ev = scenario.events[next_event];
            try {
                apply_event(p, ev);
                deploys += ev.action == "deploy";
            } catch (const ProtocolError& err) {
                result.rejected.push_back({e, ev.index, ev.action, err.code(), err.what()});
                ++rejected_now;
            }
        }

        auto subjects = p.enforcement().active_subjects(p.registry());
        std::size_t expected = std::min<std::size_t>(
            p.config().enforcement.replication_factor,
            p.enforcement().eligible_hypernodes(p.ledger()).size());
        auto round = p.run_challenges(options.parallel);
        auto v1 = monitor.after_challenges(p, round, subjects, expected);
        violations.insert(violations.end(), v1.begin(), v1.end());
        for (const auto& rec : round.fault_slashes)
            result.faults.push_back(rec.fault);

        TokenAmount emitted_before = p.ledger().emitted_total();
        auto settlement = p.settle();
        auto v2 = monitor.after_settlement(p, settlement, emitted_before);
        violations.insert(violations.end(), v2.begin(), v2.end());

        p.end_epoch();
        auto v3 = monitor.end_of_epoch(p);
        violations.insert(violations.end(), v3.begin(), v3.end());

        MetricsFrame f;
        f.epoch = e;
        for (const auto& [id, region] : p.registry().regions())
            f.region_residual[id] = p.registry().capability_map(id);
        f.live_instances = p.pool().instances().size();
        for (const auto& st : settlement.statements)
            (st.source == RewardSource::Bootstrap ? f.bootstrap_rewards : f.access_fee_rewards) += st.gross;
        f.burned_total = p.ledger().burned_total();
        f.emitted_total = p.ledger().emitted_total();
        f.faults = round.fault_slashes.size();
        f.rejected_events = rejected_now;
        f.conservation = p.ledger().conservation_holds();

        csv << "frame," << e << ",,,,,," << residual_field(f.region_residual) << ','
            << f.live_instances << ',' << f.bootstrap_rewards.value() << ','
            << f.access_fee_rewards.value() << ',' << f.burned_total.value() << ','
            << f.emitted_total.value() << ',' << f.faults << ',' << f.rejected_events << ','
            << (f.conservation ? "ok" : "violated") << '\n';
        for (const auto& st : settlement.statements)
            csv << "reward," << e << ',' << st.node << ',' << source_name(st.source) << ','
                << st.gross.value() << ',' << st.provider_cut.value() << ','
                << st.staker_total().value() << ",,,,,,,,,\n";

        result.frames.push_back(std::move(f));
        result.statements.insert(result.statements.end(), settlement.statements.begin(),
                                 settlement.statements.end());
        epochs_run = e + 1;
        if (!violations.empty()) {
            result.exit_status = 1;
            result.violation = "epoch " + std::to_string(e) + ": " + violations.front();
            break;
        }
    }

    result.metrics_csv = csv.str();
    result.final_state = p.snapshot();

    json rejected = json::array();
    for (const auto& r : result.rejected)
        rejected.push_back({{"epoch", r.epoch},
                            {"index", r.index},
                            {"action", r.action},
                            {"error", std::string(errc_name(r.code))},
                            {"message", r.message}});
    TokenAmount bootstrap_total;
    TokenAmount fee_total;
    for (const auto& st : result.statements)
        (st.source == RewardSource::Bootstrap ? bootstrap_total : fee_total) += st.gross;
    const auto& ledger = p.ledger();
    result.summary = {
        {"seed", result.seed},
        {"epochs", result.epochs},
        {"epochs_run", epochs_run},
        {"exit_status", result.exit_status},
        {"violation", result.violation.empty() ? json(nullptr) : json(result.violation)},
        {"conservation", ledger.conservation_holds() ? "ok" : "violated"},
        {"genesis_supply", ledger.genesis_supply().value()},
        {"emitted_total", ledger.emitted_total().value()},
        {"burned_total", ledger.burned_total().value()},
        {"accounted_total", ledger.accounted_total().value()},
        {"rewards", {{"Bootstrap", bootstrap_total.value()}, {"AccessFee", fee_total.value()}}},
        {"faults", result.faults.size()},
        {"anchors", ledger.anchors().size()},
        {"deploys", deploys},
        {"live_instances", p.pool().instances().size()},
        {"nodes", p.registry().nodes().size()},
        {"rejected_events", rejected},
    };
    return result;
}

void write_outputs(const RunResult& result, const std::filesystem::path& dir)
{
    std::filesystem::create_directories(dir);
    write_text(dir / "metrics.csv", result.metrics_csv);
    write_text(dir / "summary.json", result.summary.dump(2) + "\n");
    write_text(dir / "final_state.json", result.final_state.dump(2) + "\n");
}

}  // namespace icn
