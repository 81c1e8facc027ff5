#include "icn/enforcement.hpp"

#include "icn/json_io.hpp"
#include "icn/rng.hpp"

#include <algorithm>

namespace icn {

namespace jio = json_io;
using nlohmann::json;

std::int64_t median(std::vector<std::int64_t> values)
{
    if (values.empty())
        fail(Errc::ReportsMissing, "median of nothing");
    std::sort(values.begin(), values.end());
    std::size_t mid = values.size() / 2;
    if (values.size() % 2 == 1)
        return values[mid];
    __int128 sum = static_cast<__int128>(values[mid - 1]) + values[mid];
    return static_cast<std::int64_t>(sum >= 0 ? sum / 2 : (sum - 1) / 2);
}

SatelliteStore::SatelliteStore(std::uint64_t retention_epochs) : retention_(retention_epochs)
{
    if (retention_ == 0)
        fail(Errc::InvalidParameters, "retention must be positive");
}

void SatelliteStore::put(const PerformanceReport& report)
{
    Key key{report.epoch, report.subject, report.challenger};
    if (entries_.contains(key))
        fail(Errc::DuplicateId, "report already published for " + report.subject);
    entries_.emplace(std::move(key), report);
}

std::optional<PerformanceReport> SatelliteStore::get(Epoch epoch, const SubjectId& subject,
                                                     const HyperNodeId& challenger) const
{
    auto it = entries_.find(Key{epoch, subject, challenger});
    if (it == entries_.end())
        return std::nullopt;
    return it->second;
}

std::vector<PerformanceReport> SatelliteStore::reports_for(Epoch epoch,
                                                           const SubjectId& subject) const
{
    std::vector<PerformanceReport> out;
    for (auto it = entries_.lower_bound(Key{epoch, subject, {}});
         it != entries_.end() && std::get<0>(it->first) == epoch && std::get<1>(it->first) == subject;
         ++it)
        out.push_back(it->second);
    return out;
}

void SatelliteStore::evict(Epoch now)
{
    std::erase_if(entries_, [&](const auto& kv) {
        Epoch e = std::get<0>(kv.first);
        return now >= e && now - e >= retention_;
    });
}

PerformanceEnforcement::PerformanceEnforcement(EnforcementConfig config)
    : config_(config), store_(config.retention_epochs)
{
    if (config_.replication_factor == 0)
        fail(Errc::InvalidParameters, "replication factor must be positive");
    if (!config_.challenger_slash_rate.in_unit_interval())
        fail(Errc::InvalidParameters, "challenger slash rate must lie in [0,1]");
}

void PerformanceEnforcement::add_hypernode(HyperNode hypernode, Ledger& ledger)
{
    if (hypernodes_.contains(hypernode.id))
        fail(Errc::DuplicateId, hypernode.id);
    ledger.authorize_submitter(hypernode.operator_account);
    hypernodes_.emplace(hypernode.id, std::move(hypernode));
}

void PerformanceEnforcement::add_service(Service service)
{
    if (services_.contains(service.id))
        fail(Errc::DuplicateId, service.id);
    services_.emplace(service.id, std::move(service));
}

std::string PerformanceEnforcement::register_challenge_spec(const ChallengeSpec& spec,
                                                            const HardwareRegistry& registry)
{
    if (spec.kind.empty())
        fail(Errc::MalformedSpec, "challenge kind is empty");
    if (specs_.contains(spec.kind))
        fail(Errc::DuplicateId, spec.kind);
    const KpiMap* profile = nullptr;
    if (registry.has_class(spec.subject))
        profile = &registry.hardware_class(spec.subject).performance_profile;
    else if (auto it = services_.find(spec.subject); it != services_.end())
        profile = &it->second.performance_profile;
    else
        fail(Errc::UnknownSubject, spec.subject);

    if (spec.kpis.empty())
        fail(Errc::MalformedSpec, spec.kind + " lists no KPIs");
    for (const auto& kpi : spec.kpis) {
        auto t = spec.pass_thresholds.find(kpi);
        if (t == spec.pass_thresholds.end())
            fail(Errc::MalformedSpec, spec.kind + " has no threshold for " + kpi);
        if (t->second.is_zero() || !t->second.in_unit_interval())
            fail(Errc::MalformedSpec, spec.kind + " threshold for " + kpi + " outside (0,1]");
        if (!profile->contains(kpi))
            fail(Errc::MalformedSpec, kpi + " is not in the subject's profile");
    }
    specs_.emplace(spec.kind, spec);
    return spec.kind;
}

void PerformanceEnforcement::inject_fault(const SubjectId& subject, Ratio multiplier, Epoch from,
                                          Epoch duration)
{
    faults_[subject] = FaultWindow{multiplier, from, from + duration};
}

Ratio PerformanceEnforcement::fault_multiplier(const SubjectId& subject, Epoch epoch) const
{
    auto it = faults_.find(subject);
    if (it == faults_.end() || epoch < it->second.from || epoch >= it->second.until)
        return Ratio::one();
    return it->second.multiplier;
}

std::optional<PerformanceEnforcement::SubjectProfile>
PerformanceEnforcement::profile(const SubjectId& subject, const HardwareRegistry& registry) const
{
    SubjectProfile p;
    std::string spec_subject;
    if (registry.has_node(subject)) {
        const auto& node = registry.node(subject);
        if (node.status != NodeStatus::Active)
            return std::nullopt;
        p.host = subject;
        p.nominal = registry.hardware_class(node.hardware_class).performance_profile;
        p.actual = node.true_profile;
        spec_subject = node.hardware_class;
    } else if (auto it = services_.find(subject); it != services_.end()) {
        const auto& svc = it->second;
        if (!registry.has_node(svc.host_node)
            || registry.node(svc.host_node).status != NodeStatus::Active)
            return std::nullopt;
        p.host = svc.host_node;
        p.nominal = svc.performance_profile;
        p.actual = svc.performance_profile;
        spec_subject = svc.id;
    } else {
        return std::nullopt;
    }
    for (const auto& [kind, spec] : specs_) {
        if (spec.subject != spec_subject)
            continue;
        p.kinds.push_back(kind);
        for (const auto& kpi : spec.kpis) {
            const auto& t = spec.pass_thresholds.at(kpi);
            auto [it, inserted] = p.thresholds.emplace(kpi, t);
            if (!inserted && it->second < t)
                it->second = t;
        }
    }
    if (p.kinds.empty())
        return std::nullopt;
    return p;
}

NoiseModel PerformanceEnforcement::noise() const
{
    std::uint64_t amp = config_.noise_amplitude.floor_mul(1'000'000);
    return NoiseModel{config_.seed, std::min<std::uint64_t>(amp, 1'000'000)};
}

std::vector<HyperNodeId> PerformanceEnforcement::eligible_hypernodes(const Ledger& ledger) const
{
    std::vector<HyperNodeId> out;
    for (const auto& [id, hn] : hypernodes_)
        if (!ledger.security_of(id).is_zero())
            out.push_back(id);
    return out;
}

std::vector<SubjectId> PerformanceEnforcement::active_subjects(const HardwareRegistry& registry) const
{
    std::vector<SubjectId> out;
    for (const auto& [id, node] : registry.nodes())
        if (profile(id, registry))
            out.push_back(id);
    for (const auto& [id, svc] : services_)
        if (!registry.has_node(id) && profile(id, registry))
            out.push_back(id);
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<Assignment> PerformanceEnforcement::schedule_challenges(Epoch epoch,
                                                                    const HardwareRegistry& registry,
                                                                    const Ledger& ledger) const
{
    auto eligible = eligible_hypernodes(ledger);
    auto subjects = active_subjects(registry);
    if (subjects.empty())
        return {};
    if (eligible.empty())
        fail(Errc::NoEligibleHyperNodes, "epoch " + std::to_string(epoch));

    std::size_t k = std::min<std::size_t>(config_.replication_factor, eligible.size());
    std::vector<Assignment> out;
    for (const auto& subject : subjects) {
        auto kinds = profile(subject, registry)->kinds;
        Stream stream(config_.seed, "schedule", epoch, subject);
        auto pool = eligible;
        for (std::size_t i = 0; i < k; ++i) {
            std::size_t j = i + static_cast<std::size_t>(stream.below(pool.size() - i));
            std::swap(pool[i], pool[j]);
            out.push_back(Assignment{epoch, pool[i], subject, kinds});
        }
    }
    std::sort(out.begin(), out.end(), [](const Assignment& a, const Assignment& b) {
        return std::tie(a.hypernode, a.subject) < std::tie(b.hypernode, b.subject);
    });
    return out;
}

ChallengeTask PerformanceEnforcement::build_task(const Assignment& assignment,
                                                 const HardwareRegistry& registry) const
{
    auto p = profile(assignment.subject, registry);
    if (!p)
        fail(Errc::SubjectInactive, assignment.subject);
    ChallengeTask task;
    task.epoch = assignment.epoch;
    task.hypernode = assignment.hypernode;
    task.subject = assignment.subject;
    task.fault_multiplier = fault_multiplier(assignment.subject, assignment.epoch);
    if (auto it = hypernodes_.find(assignment.hypernode); it != hypernodes_.end())
        task.report_bias = it->second.report_bias;
    for (const auto& [kpi, threshold] : p->thresholds) {
        KpiProbe probe;
        probe.name = kpi;
        probe.nominal = p->nominal.at(kpi);
        auto actual = p->actual.find(kpi);
        probe.true_value = actual == p->actual.end() ? probe.nominal : actual->second;
        probe.threshold = threshold;
        task.probes.push_back(std::move(probe));
    }
    return task;
}

PerformanceReport PerformanceEnforcement::execute_challenge(const Assignment& assignment,
                                                            const HardwareRegistry& registry) const
{
    return execute_task(build_task(assignment, registry), noise());
}

AggregateOutcome PerformanceEnforcement::aggregate_and_commit(
    Epoch epoch, const SubjectId& subject, const std::vector<HyperNodeId>& challengers,
    const HardwareRegistry& registry, Ledger& ledger)
{
    if (challengers.empty())
        fail(Errc::ReportsMissing, subject + " has no assigned challengers");
    auto p = profile(subject, registry);
    if (!p)
        fail(Errc::SubjectInactive, subject);

    std::vector<HyperNodeId> ordered = challengers;
    std::sort(ordered.begin(), ordered.end());
    std::vector<PerformanceReport> reports;
    for (const auto& hn : ordered) {
        auto r = store_.get(epoch, subject, hn);
        if (!r)
            fail(Errc::ReportsMissing, subject + " from " + hn);
        reports.push_back(std::move(*r));
    }

    AggregateOutcome out;
    auto& rec = out.record;
    rec.epoch = epoch;
    rec.subject = subject;
    for (const auto& [kpi, threshold] : p->thresholds) {
        std::vector<std::int64_t> values;
        for (const auto& r : reports) {
            auto it = r.kpis.find(kpi);
            if (it == r.kpis.end())
                fail(Errc::ReportsMissing, kpi + " absent from report by " + r.challenger);
            values.push_back(it->second);
        }
        std::int64_t med = median(values);
        rec.medians[kpi] = med;
        std::int64_t nominal = p->nominal.at(kpi);
        // target = threshold * nominal, compared exactly as med * den >= num * nominal
        __int128 lhs = static_cast<__int128>(med) * threshold.den();
        __int128 rhs = static_cast<__int128>(threshold.num()) * nominal;
        bool pass = lhs >= rhs;
        rec.verdict[kpi] = pass;
        if (!pass && rhs > 0) {
            __int128 shortfall = rhs - (lhs > 0 ? lhs : 0);
            if (shortfall > rhs)
                shortfall = rhs;
            if (rhs > static_cast<__int128>(UINT64_MAX))
                fail(Errc::Overflow, "severity for " + kpi);
            Ratio s(static_cast<std::uint64_t>(shortfall), static_cast<std::uint64_t>(rhs));
            if (s > rec.severity)
                rec.severity = s;
        }
    }

    std::vector<std::string> leaves;
    for (const auto& r : reports)
        leaves.push_back(r.canonical());
    leaves.push_back(rec.canonical());
    MerkleTree tree(leaves);
    const auto& submitter = hypernodes_.at(ordered.front()).operator_account;
    out.anchor = ledger.record_proof_anchor(submitter, subject, epoch, tree.root());
    batches_[out.anchor] = CommittedBatch{epoch, subject, out.anchor, std::move(leaves)};
    latest_kpis_[subject] = rec.medians;
    latest_aggregates_[subject] = rec;

    if (!rec.passed())
        out.fault = FaultEvent{epoch, subject, p->host, rec.severity};

    auto amp = noise().amplitude_ppm;
    if (amp < 1'000'000) {
        for (const auto& r : reports) {
            for (const auto& [kpi, med] : rec.medians) {
                // honest readings sit within 2a/(1-a) * median of each other
                __int128 envelope = static_cast<__int128>(med < 0 ? 0 : med) * 2 * amp
                                        / (1'000'000 - amp)
                                    + 1;
                __int128 diff = static_cast<__int128>(r.kpis.at(kpi)) - med;
                if (diff < 0)
                    diff = -diff;
                if (diff > envelope) {
                    out.misreporters.push_back(r.challenger);
                    break;
                }
            }
        }
    }
    return out;
}

std::vector<AggregateOutcome> PerformanceEnforcement::run_round(Epoch epoch,
                                                                const HardwareRegistry& registry,
                                                                Ledger& ledger, bool parallel)
{
    last_assignments_ = schedule_challenges(epoch, registry, ledger);
    std::vector<ChallengeTask> tasks;
    tasks.reserve(last_assignments_.size());
    for (const auto& a : last_assignments_)
        tasks.push_back(build_task(a, registry));
    auto reports = parallel ? execute_challenges_parallel(tasks, noise())
                            : execute_challenges_serial(tasks, noise());
    std::map<SubjectId, std::vector<HyperNodeId>> by_subject;
    for (const auto& r : reports) {
        store_.put(r);
        by_subject[r.subject].push_back(r.challenger);
    }
    std::vector<AggregateOutcome> out;
    for (const auto& [subject, challengers] : by_subject)
        out.push_back(aggregate_and_commit(epoch, subject, challengers, registry, ledger));
    return out;
}

void PerformanceEnforcement::evict(Epoch now)
{
    store_.evict(now);
    std::erase_if(batches_, [&](const auto& kv) {
        Epoch e = kv.second.epoch;
        return now >= e && now - e >= store_.retention();
    });
}

const CommittedBatch* PerformanceEnforcement::batch_for(AnchorId anchor) const
{
    auto it = batches_.find(anchor);
    return it == batches_.end() ? nullptr : &it->second;
}

std::optional<MerkleProof> PerformanceEnforcement::proof_for(AnchorId anchor, std::size_t leaf) const
{
    const auto* batch = batch_for(anchor);
    if (!batch || leaf >= batch->leaves.size())
        return std::nullopt;
    return MerkleTree(batch->leaves).proof(leaf);
}

bool verify_report_bytes(std::string_view report_bytes, const MerkleProof& proof, AnchorId anchor,
                         const Ledger& ledger)
{
    const auto& a = ledger.anchor(anchor);
    if (merkle_leaf_hash(report_bytes) != proof.leaf_hash)
        return false;
    return proof.fold() == a.root;
}

bool verify_report(const PerformanceReport& report, const MerkleProof& proof, AnchorId anchor,
                   const Ledger& ledger)
{
    return verify_report_bytes(report.canonical(), proof, anchor, ledger);
}

json PerformanceEnforcement::to_json() const
{
    json doc;
    doc["config"] = {{"seed", jio::u64(config_.seed)},
                     {"replication_factor", jio::u64(config_.replication_factor)},
                     {"noise_amplitude", jio::ratio(config_.noise_amplitude)},
                     {"retention_epochs", jio::u64(config_.retention_epochs)},
                     {"challenger_slash_rate", jio::ratio(config_.challenger_slash_rate)}};

    json specs = json::array();
    for (const auto& [kind, s] : specs_) {
        json th = json::object();
        for (const auto& [k, t] : s.pass_thresholds)
            th[k] = jio::ratio(t);
        specs.push_back({{"kind", kind}, {"subject", s.subject}, {"kpis", s.kpis}, {"pass_thresholds", th}});
    }
    doc["challenge_specs"] = specs;

    json services = json::array();
    for (const auto& [id, s] : services_)
        services.push_back({{"id", id},
                            {"host_node", s.host_node},
                            {"performance_profile", jio::kpis(s.performance_profile)}});
    doc["services"] = services;

    json hns = json::array();
    for (const auto& [id, h] : hypernodes_)
        hns.push_back({{"id", id},
                       {"operator", h.operator_account},
                       {"report_bias", jio::ratio(h.report_bias)}});
    doc["hypernodes"] = hns;

    json faults = json::object();
    for (const auto& [subject, f] : faults_)
        faults[subject] = {{"multiplier", jio::ratio(f.multiplier)},
                           {"from", jio::u64(f.from)},
                           {"until", jio::u64(f.until)}};
    doc["faults"] = faults;

    json reports = json::array();
    for (const auto& [key, r] : store_.entries())
        reports.push_back(r.to_json());
    doc["satellite_store"] = reports;

    json batches = json::array();
    for (const auto& [id, b] : batches_)
        batches.push_back({{"anchor", jio::u64(id)},
                           {"epoch", jio::u64(b.epoch)},
                           {"subject", b.subject},
                           {"leaves", b.leaves}});
    doc["committed_batches"] = batches;

    json assignments = json::array();
    for (const auto& a : last_assignments_)
        assignments.push_back({{"epoch", jio::u64(a.epoch)},
                               {"hypernode", a.hypernode},
                               {"subject", a.subject},
                               {"kinds", a.kinds}});
    doc["last_assignments"] = assignments;

    json aggregates = json::object();
    for (const auto& [subject, rec] : latest_aggregates_)
        aggregates[subject] = rec.to_json();
    doc["latest_aggregates"] = aggregates;
    return doc;
}

PerformanceEnforcement PerformanceEnforcement::from_json(const json& doc)
{
    const auto& c = doc.at("config");
    EnforcementConfig config;
    config.seed = jio::read_u64(c.at("seed"));
    config.replication_factor = jio::read_u64(c.at("replication_factor"));
    config.noise_amplitude = jio::read_ratio(c.at("noise_amplitude"));
    config.retention_epochs = jio::read_u64(c.at("retention_epochs"));
    config.challenger_slash_rate = jio::read_ratio(c.at("challenger_slash_rate"));
    PerformanceEnforcement pe(config);

    for (const auto& j : doc.at("challenge_specs")) {
        ChallengeSpec s;
        s.kind = j.at("kind");
        s.subject = j.at("subject");
        s.kpis = j.at("kpis").get<std::vector<std::string>>();
        for (const auto& [k, t] : j.at("pass_thresholds").items())
            s.pass_thresholds[k] = jio::read_ratio(t);
        pe.specs_.emplace(s.kind, std::move(s));
    }
    for (const auto& j : doc.at("services"))
        pe.services_.emplace(j.at("id"), Service{j.at("id"), j.at("host_node"),
                                                 jio::read_kpis(j.at("performance_profile"))});
    for (const auto& j : doc.at("hypernodes"))
        pe.hypernodes_.emplace(j.at("id"), HyperNode{j.at("id"), j.at("operator"),
                                                     jio::read_ratio(j.at("report_bias"))});
    for (const auto& [subject, f] : doc.at("faults").items())
        pe.faults_[subject] = FaultWindow{jio::read_ratio(f.at("multiplier")),
                                          jio::read_u64(f.at("from")), jio::read_u64(f.at("until"))};
    for (const auto& j : doc.at("satellite_store"))
        pe.store_.put(PerformanceReport::from_json(j));
    for (const auto& j : doc.at("committed_batches")) {
        CommittedBatch b{jio::read_u64(j.at("epoch")), j.at("subject"), jio::read_u64(j.at("anchor")),
                         j.at("leaves").get<std::vector<std::string>>()};
        pe.batches_.emplace(b.anchor, std::move(b));
    }
    for (const auto& j : doc.at("last_assignments"))
        pe.last_assignments_.push_back(Assignment{jio::read_u64(j.at("epoch")), j.at("hypernode"),
                                                  j.at("subject"),
                                                  j.at("kinds").get<std::vector<std::string>>()});
    for (const auto& [subject, rec] : doc.at("latest_aggregates").items()) {
        auto r = AggregateRecord::from_json(rec);
        pe.latest_kpis_[subject] = r.medians;
        pe.latest_aggregates_.emplace(subject, std::move(r));
    }
    return pe;
}

}  // namespace icn
