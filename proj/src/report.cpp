#include "icn/report.hpp"

#include "icn/json_io.hpp"

namespace icn {

using nlohmann::json;

namespace {

json verdict_json(const std::map<KpiName, bool>& verdict)
{
    json out = json::object();
    for (const auto& [k, ok] : verdict)
        out[k] = ok ? "pass" : "fail";
    return out;
}

std::map<KpiName, bool> read_verdict(const json& doc)
{
    std::map<KpiName, bool> out;
    for (const auto& [k, v] : doc.items()) {
        auto s = v.get<std::string>();
        if (s != "pass" && s != "fail")
            fail(Errc::ParseError, "verdict must be pass or fail");
        out[k] = s == "pass";
    }
    return out;
}

json int_kpis(const KpiMap& kpis)
{
    json out = json::object();
    for (const auto& [k, v] : kpis)
        out[k] = v;
    return out;
}

KpiMap read_int_kpis(const json& doc)
{
    KpiMap out;
    for (const auto& [k, v] : doc.items()) {
        if (!v.is_number_integer())
            fail(Errc::ParseError, "kpi values must be integers");
        out[k] = v.get<std::int64_t>();
    }
    return out;
}

bool all_pass(const std::map<KpiName, bool>& verdict)
{
    for (const auto& [k, ok] : verdict)
        if (!ok)
            return false;
    return true;
}

}  // namespace

bool PerformanceReport::passed() const
{
    return all_pass(verdict);
}

json PerformanceReport::to_json() const
{
    return {{"challenger", challenger},
            {"epoch", epoch},
            {"kpis", int_kpis(kpis)},
            {"subject", subject},
            {"verdict", verdict_json(verdict)}};
}

std::string PerformanceReport::canonical() const
{
    return to_json().dump();
}

PerformanceReport PerformanceReport::from_json(const json& doc)
{
    PerformanceReport r;
    r.challenger = doc.at("challenger").get<std::string>();
    if (!doc.at("epoch").is_number_unsigned())
        fail(Errc::ParseError, "report epoch must be an unsigned integer");
    r.epoch = doc.at("epoch").get<Epoch>();
    r.kpis = read_int_kpis(doc.at("kpis"));
    r.subject = doc.at("subject").get<std::string>();
    r.verdict = read_verdict(doc.at("verdict"));
    return r;
}

bool AggregateRecord::passed() const
{
    return all_pass(verdict);
}

json AggregateRecord::to_json() const
{
    return {{"epoch", epoch},
            {"kind", "aggregate"},
            {"medians", int_kpis(medians)},
            {"severity", severity.to_string()},
            {"subject", subject},
            {"verdict", verdict_json(verdict)}};
}

std::string AggregateRecord::canonical() const
{
    return to_json().dump();
}

AggregateRecord AggregateRecord::from_json(const json& doc)
{
    AggregateRecord a;
    a.epoch = doc.at("epoch").get<Epoch>();
    a.subject = doc.at("subject").get<std::string>();
    a.medians = read_int_kpis(doc.at("medians"));
    a.verdict = read_verdict(doc.at("verdict"));
    a.severity = Ratio::parse(doc.at("severity").get<std::string>());
    return a;
}

}  // namespace icn
