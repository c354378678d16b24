#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>

#include "orrw/fiber.hpp"
#include "orrw/rational.hpp"

namespace orrw {

// Shared configuration for the experiment drivers. Geometry parameters that
// a given experiment does not use are simply ignored by it.
struct ExperimentConfig {
    std::string fiber_spec = "point";
    Rational delta{0, 1};

    int wall_width = 8;     // D, the wall window width
    double alpha = 0.30;    // in (1/4, 1/2)
    double beta = 0.60;     // in (1/2, 1)
    double epsilon = 0.5;   // in (0, 1)
    std::int64_t x = 50;    // target level for ruin-type runs
    std::int64_t r = 100;   // far level for crossing-type runs
    std::int64_t d = 10;    // designated-level count
    std::int64_t k = 25;    // local-time threshold
    double eta = 0.1;       // shunt conductance

    std::uint64_t replications = 1000;
    double confidence = 0.99;
    std::uint64_t seed = 1;
    std::uint64_t horizon = 10000;              // fixed-horizon runs
    std::uint64_t step_cap = 100'000'000ULL;    // per-replica safety cap
    std::uint64_t samples = 50;                 // instance count in deterministic sweeps
    int i_max = 5;                              // excursion count for return-time runs
    bool calibrated = false;                    // assert at flagged grid points
    std::map<std::string, double> constant_overrides;

    FiberGraph fiber() const { return FiberGraph::from_spec(fiber_spec); }

    void validate() const {
        auto fail = [](const std::string& what) {
            throw std::invalid_argument("config: " + what);
        };
        if (replications < 1) fail("replications must be >= 1");
        if (!(confidence > 0 && confidence < 1)) fail("confidence must lie in (0,1)");
        if (!(alpha > 0.25 && alpha < 0.5)) fail("alpha must lie in (1/4,1/2)");
        if (!(beta > 0.5 && beta < 1.0)) fail("beta must lie in (1/2,1)");
        if (!(epsilon > 0 && epsilon < 1)) fail("epsilon must lie in (0,1)");
        if (wall_width < 1) fail("D must be a positive integer");
        if (k < 1) fail("k must be >= 1");
        if (eta <= 0) fail("eta must be positive");
        if (step_cap < 1) fail("step cap must be positive");
        if (i_max < 1) fail("imax must be >= 1");
        (void)fiber(); // validates the fiber spec
    }

    // Key-value assignment shared by the config file and flag overrides.
    void set(const std::string& key, const std::string& value) {
        try {
            if (key == "fiber") fiber_spec = value;
            else if (key == "delta") delta = Rational::parse(value);
            else if (key == "D") wall_width = std::stoi(value);
            else if (key == "alpha") alpha = std::stod(value);
            else if (key == "beta") beta = std::stod(value);
            else if (key == "epsilon") epsilon = std::stod(value);
            else if (key == "x") x = std::stoll(value);
            else if (key == "r") r = std::stoll(value);
            else if (key == "d") d = std::stoll(value);
            else if (key == "k") k = std::stoll(value);
            else if (key == "eta") eta = std::stod(value);
            else if (key == "reps") replications = std::stoull(value);
            else if (key == "confidence") confidence = std::stod(value);
            else if (key == "seed") seed = std::stoull(value);
            else if (key == "horizon") horizon = std::stoull(value);
            else if (key == "cap") step_cap = std::stoull(value);
            else if (key == "samples") samples = std::stoull(value);
            else if (key == "imax") i_max = std::stoi(value);
            else if (key == "calibrated") calibrated = (value == "1" || value == "true");
            else if (key.rfind("const.", 0) == 0) constant_overrides[key.substr(6)] = std::stod(value);
            else throw std::invalid_argument("config: unknown key '" + key + "'");
        } catch (const std::invalid_argument&) {
            throw;
        } catch (const std::exception&) {
            throw std::invalid_argument("config: bad value for key '" + key + "': " + value);
        }
    }

    double constant_or(const std::string& name, double fallback) const {
        auto it = constant_overrides.find(name);
        return it == constant_overrides.end() ? fallback : it->second;
    }

    // Exact key-value snapshot; feeding it back through set() reproduces the
    // configuration, which is what makes manifest replay reproducible.
    std::map<std::string, std::string> snapshot() const {
        auto fmt = [](double v) {
            std::ostringstream ss;
            ss.precision(17);
            ss << v;
            return ss.str();
        };
        std::map<std::string, std::string> kv{
            {"fiber", fiber_spec},
            {"delta", delta.str()},
            {"D", std::to_string(wall_width)},
            {"alpha", fmt(alpha)},
            {"beta", fmt(beta)},
            {"epsilon", fmt(epsilon)},
            {"x", std::to_string(x)},
            {"r", std::to_string(r)},
            {"d", std::to_string(d)},
            {"k", std::to_string(k)},
            {"eta", fmt(eta)},
            {"reps", std::to_string(replications)},
            {"confidence", fmt(confidence)},
            {"seed", std::to_string(seed)},
            {"horizon", std::to_string(horizon)},
            {"cap", std::to_string(step_cap)},
            {"samples", std::to_string(samples)},
            {"imax", std::to_string(i_max)},
            {"calibrated", calibrated ? "1" : "0"},
        };
        for (const auto& [name, value] : constant_overrides) kv["const." + name] = fmt(value);
        return kv;
    }

    static ExperimentConfig from_snapshot(const std::map<std::string, std::string>& kv) {
        ExperimentConfig cfg;
        for (const auto& [key, value] : kv) cfg.set(key, value);
        return cfg;
    }
};

// Flat INI-style config: optional [section] headers, "key = value" lines,
// '#' or ';' comments. The unnamed leading section applies to every
// experiment; a named section applies to that experiment only.
struct ConfigFile {
    std::map<std::string, std::map<std::string, std::string>> sections;

    static ConfigFile load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("config: cannot open " + path);
        ConfigFile cfg;
        std::string line, section;
        int line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            auto comment = line.find_first_of("#;");
            if (comment != std::string::npos) line = line.substr(0, comment);
            auto strip = [](std::string s) {
                auto b = s.find_first_not_of(" \t\r");
                auto e = s.find_last_not_of(" \t\r");
                return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
            };
            line = strip(line);
            if (line.empty()) continue;
            if (line.front() == '[') {
                if (line.back() != ']')
                    throw std::runtime_error("config: malformed section at line " +
                                             std::to_string(line_no));
                section = strip(line.substr(1, line.size() - 2));
                continue;
            }
            auto eq = line.find('=');
            if (eq == std::string::npos)
                throw std::runtime_error("config: expected key=value at line " +
                                         std::to_string(line_no));
            cfg.sections[section][strip(line.substr(0, eq))] = strip(line.substr(eq + 1));
        }
        return cfg;
    }

    // Applies the global section then the named one.
    void apply(ExperimentConfig& config, const std::string& experiment) const {
        for (const std::string& name : {std::string(), experiment}) {
            auto it = sections.find(name);
            if (it == sections.end()) continue;
            for (const auto& [k, v] : it->second) config.set(k, v);
        }
    }
};

} // namespace orrw
