#pragma once

#include <cstdint>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

namespace orrw {

enum class Verdict { pass, fail, vacuous, reported };

inline const char* to_string(Verdict v) {
    switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::vacuous: return "vacuous";
    case Verdict::reported: return "reported";
    }
    return "?";
}

// Result of one proposition check at one parameter point: the empirical (or
// exact) estimate with its confidence interval, the bound being tested, and
// the verdict. A bound of at least one for a probability is vacuous.
struct BoundCheckReport {
    std::string name;
    double estimate = 0;
    double ci_low = 0;
    double ci_high = 0;
    double bound = 0;
    bool vacuous = false;
    Verdict verdict = Verdict::reported;
    std::uint64_t replications = 0;
    double wall_clock_ms = 0;
    std::map<std::string, double> params; // parameter point echo and extras

    nlohmann::json to_json(bool include_timing = true) const {
        nlohmann::json j{
            {"name", name},         {"estimate", estimate}, {"ci_low", ci_low},
            {"ci_high", ci_high},   {"bound", bound},       {"vacuous", vacuous},
            {"verdict", to_string(verdict)},                {"replications", replications},
            {"params", params},
        };
        if (include_timing) j["wall_clock_ms"] = wall_clock_ms;
        return j;
    }
};

struct ShapePoint {
    std::uint64_t n = 0;
    double t_steps = 0;   // mean detection step over replicas
    double x_center = 0;  // mean range midpoint
    double overhang = 0;  // mean overhang
    std::uint64_t replicas_used = 0;
    bool dropped = false; // cap exhausted at this n
};

struct ShapeReport {
    std::string name;
    std::vector<ShapePoint> points;
    double fitted_exponent = 0;
    double exponent_ci_low = 0;
    double exponent_ci_high = 0;
    Verdict verdict = Verdict::reported;
    double wall_clock_ms = 0;
    std::map<std::string, double> params;

    nlohmann::json to_json(bool include_timing = true) const {
        nlohmann::json pts = nlohmann::json::array();
        for (const auto& p : points)
            pts.push_back({{"n", p.n},
                           {"t_steps", p.t_steps},
                           {"x_center", p.x_center},
                           {"overhang", p.overhang},
                           {"replicas_used", p.replicas_used},
                           {"dropped", p.dropped}});
        nlohmann::json j{{"name", name},
                         {"points", pts},
                         {"fitted_exponent", fitted_exponent},
                         {"exponent_ci_low", exponent_ci_low},
                         {"exponent_ci_high", exponent_ci_high},
                         {"verdict", to_string(verdict)},
                         {"params", params}};
        if (include_timing) j["wall_clock_ms"] = wall_clock_ms;
        return j;
    }
};

struct ReturnTimePoint {
    int index = 0;                  // excursion index i
    std::uint64_t samples = 0;      // replicas with this excursion resolved
    std::uint64_t capped = 0;       // replicas lost to the cap at this index
    double moment1 = 0, moment2 = 0, moment3 = 0;
    double mean_ci_low = 0, mean_ci_high = 0;
};

struct ReturnTimeReport {
    std::string name;
    std::vector<ReturnTimePoint> points;
    double max_level_tail_exponent = 0; // fitted decay of the level-doubling tail
    Verdict verdict = Verdict::reported;
    double wall_clock_ms = 0;
    std::map<std::string, double> params;

    nlohmann::json to_json(bool include_timing = true) const {
        nlohmann::json pts = nlohmann::json::array();
        for (const auto& p : points)
            pts.push_back({{"index", p.index},
                           {"samples", p.samples},
                           {"capped", p.capped},
                           {"moment1", p.moment1},
                           {"moment2", p.moment2},
                           {"moment3", p.moment3},
                           {"mean_ci_low", p.mean_ci_low},
                           {"mean_ci_high", p.mean_ci_high}});
        nlohmann::json j{{"name", name},
                         {"points", pts},
                         {"max_level_tail_exponent", max_level_tail_exponent},
                         {"verdict", to_string(verdict)},
                         {"params", params}};
        if (include_timing) j["wall_clock_ms"] = wall_clock_ms;
        return j;
    }
};

// One experiment run: a list of per-parameter-point checks plus optional
// shape / return-time payloads.
struct ExperimentResult {
    std::string experiment;
    std::vector<BoundCheckReport> checks;
    std::vector<ShapeReport> shapes;
    std::vector<ReturnTimeReport> return_times;

    bool all_asserted_pass() const {
        for (const auto& c : checks)
            if (c.verdict == Verdict::fail) return false;
        for (const auto& s : shapes)
            if (s.verdict == Verdict::fail) return false;
        for (const auto& r : return_times)
            if (r.verdict == Verdict::fail) return false;
        return true;
    }

    nlohmann::json to_json(bool include_timing = true) const {
        nlohmann::json reports = nlohmann::json::array();
        for (const auto& c : checks) reports.push_back(c.to_json(include_timing));
        for (const auto& s : shapes) reports.push_back(s.to_json(include_timing));
        for (const auto& r : return_times) reports.push_back(r.to_json(include_timing));
        return nlohmann::json{{"experiment", experiment}, {"reports", reports}};
    }

    // Flat CSV: one row per (experiment, parameter point).
    void append_csv(std::ostream& out, bool header) const {
        if (header)
            out << "experiment,name,estimate,ci_low,ci_high,bound,vacuous,verdict,"
                   "replications,wall_clock_ms,params\n";
        auto param_str = [](const std::map<std::string, double>& params) {
            std::ostringstream ss;
            bool first = true;
            for (const auto& [k, v] : params) {
                if (!first) ss << ';';
                first = false;
                ss << k << '=' << v;
            }
            return ss.str();
        };
        for (const auto& c : checks)
            out << experiment << ',' << c.name << ',' << c.estimate << ',' << c.ci_low << ','
                << c.ci_high << ',' << c.bound << ',' << (c.vacuous ? 1 : 0) << ','
                << to_string(c.verdict) << ',' << c.replications << ',' << c.wall_clock_ms << ','
                << '"' << param_str(c.params) << '"' << '\n';
        for (const auto& s : shapes)
            for (const auto& p : s.points)
                out << experiment << ',' << s.name << ":n" << p.n << ',' << p.overhang
                    << ",,,,0," << to_string(s.verdict) << ',' << p.replicas_used << ','
                    << s.wall_clock_ms << ',' << '"' << param_str(s.params) << '"' << '\n';
        for (const auto& r : return_times)
            for (const auto& p : r.points)
                out << experiment << ',' << r.name << ":i" << p.index << ',' << p.moment1 << ','
                    << p.mean_ci_low << ',' << p.mean_ci_high << ",,0,"
                    << to_string(r.verdict) << ',' << p.samples << ',' << r.wall_clock_ms << ','
                    << '"' << param_str(r.params) << '"' << '\n';
    }
};

} // namespace orrw
