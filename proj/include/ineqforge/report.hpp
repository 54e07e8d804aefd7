#pragma once
/// JSON serialization of results and the acceptance report. Requires
/// nlohmann/json on the include path.

#include <chrono>
#include <cstdint>
#include <ctime>
#include <string>
#include <vector>

#include <json.hpp>

#include "ineqforge/acceptance.hpp"
#include "ineqforge/constants.hpp"
#include "ineqforge/criteria.hpp"
#include "ineqforge/isoperimetry.hpp"
#include "ineqforge/transport.hpp"

namespace ineqforge {

using Json = nlohmann::ordered_json;

inline constexpr const char* kSchemaVersion = "1.0";
inline constexpr const char* kToolVersion = "0.1.0";

/// Non-finite numbers have no JSON form; they become strings.
inline Json number(double v) {
    if (std::isfinite(v)) return v;
    if (std::isnan(v)) return "nan";
    return v > 0 ? "inf" : "-inf";
}

inline std::string utc_timestamp() {
    std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

/// Envelope shared by every command's report.
inline Json make_envelope(const std::string& command, Json config, bool timestamp) {
    Json j;
    j["schema_version"] = kSchemaVersion;
    j["tool"] = "ineqforge";
    j["tool_version"] = kToolVersion;
    j["command"] = command;
    j["config"] = std::move(config);
    if (timestamp) j["timestamp"] = utc_timestamp();
    return j;
}

inline Json to_json(const InequalityReport& r) {
    Json j;
    j["inequality"] = r.name;
    j["B"] = number(r.B);
    j["C"] = number(r.C);
    j["lhs"] = number(r.lhs);
    j["rhs"] = number(r.rhs);
    j["margin"] = number(r.margin);
    j["witness"] = r.witness.label;
    return j;
}

inline Json to_json(const ConstantEstimate& e) {
    Json j;
    j["family"] = e.family;
    Json p = Json::array();
    for (double v : e.params) p.push_back(number(v));
    j["params"] = p;
    j["evaluations"] = e.evaluations;
    j["budget"] = e.budget;
    j["seed"] = e.seed;
    j["report"] = to_json(e.report);
    return j;
}

inline Json to_json(const CriterionVerdict& v) {
    Json j;
    j["criterion"] = v.name;
    j["holds"] = std::string(to_string(v.holds));
    Json p = Json::object();
    for (const auto& [k, val] : v.params) p[k] = number(val);
    j["params"] = p;
    Json w = Json::array();
    for (double x : v.witness) w.push_back(number(x));
    j["witness"] = w;
    j["violation"] = number(v.violation);
    if (!v.witness.empty()) j["reverified_violation"] = number(static_cast<double>(v.reverify()));
    j["scan_points"] = v.scan_points;
    j["detail"] = v.detail;
    return j;
}

inline Json to_json(const CriterionResult& r, bool timing) {
    Json j;
    j["id"] = r.id;
    j["name"] = r.name;
    j["pass"] = r.pass;
    Json m = Json::object();
    for (const auto& [k, v] : r.metrics) m[k] = number(v);
    j["metrics"] = m;
    if (!r.detail.empty()) j["detail"] = r.detail;
    if (timing) j["seconds"] = r.seconds;
    return j;
}

inline Json criteria_json(const std::vector<CriterionResult>& rs, bool timing) {
    Json a = Json::array();
    for (const auto& r : rs) a.push_back(to_json(r, timing));
    return a;
}

/// Criteria 1-11, then optionally criterion 12: a second run whose
/// serialized results must match the first byte for byte.
inline std::vector<CriterionResult> run_acceptance_suite(std::uint64_t seed, bool determinism) {
    auto fns = acceptance::numeric_criteria();
    auto run_all = [&] {
        std::vector<CriterionResult> out;
        for (std::size_t i = 0; i < fns.size(); ++i) out.push_back(acceptance::run_timed(fns[i], seed, static_cast<int>(i + 1)));
        return out;
    };
    auto first = run_all();
    if (!determinism) return first;
    auto t0 = std::chrono::steady_clock::now();
    auto second = run_all();
    std::string a = criteria_json(first, false).dump(2), b = criteria_json(second, false).dump(2);
    CriterionResult d;
    d.id = 12;
    d.name = "deterministic-report";
    d.pass = a == b;
    d.metrics = {{"bytes", static_cast<double>(a.size())}, {"seed", static_cast<double>(seed)}};
    d.detail = d.pass ? "two runs serialize identically" : "serialized results differ between runs";
    d.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    first.push_back(d);
    return first;
}

}  // namespace ineqforge
