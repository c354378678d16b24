#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>

#include "orrw/registry.hpp"

using namespace orrw;

namespace {

ExperimentConfig small_config() {
    ExperimentConfig cfg;
    cfg.seed = 7;
    cfg.replications = 400;
    cfg.samples = 6;
    cfg.step_cap = 2'000'000;
    return cfg;
}

} // namespace

TEST_CASE("catalog integrity") {
    const auto& catalog = experiment_catalog();
    REQUIRE(catalog.size() >= 12);
    for (const auto& info : catalog) {
        REQUIRE(info.anchor != nullptr);
        REQUIRE(info.run != nullptr);
        REQUIRE(find_experiment(info.name) == &info);
    }
    REQUIRE(find_experiment("no-such-experiment") == nullptr);
}

TEST_CASE("balance experiment passes deterministically") {
    ExperimentConfig cfg = small_config();
    cfg.fiber_spec = "path3";
    cfg.delta = Rational(10, 1);
    ExperimentResult res = exp_balance(cfg);
    REQUIRE(res.checks.size() == 1);
    REQUIRE(res.checks[0].verdict == Verdict::pass);
    REQUIRE(res.checks[0].estimate <= 1e-8);
}

TEST_CASE("crossings experiment at reduced scale") {
    ExperimentConfig cfg = small_config();
    cfg.samples = 2;
    cfg.replications = 30000;
    ExperimentResult res = exp_current_crossings(cfg);
    REQUIRE(res.checks.size() == 6);
    for (const auto& c : res.checks) REQUIRE(c.verdict == Verdict::pass);
}

TEST_CASE("commute and network laws") {
    ExperimentConfig cfg = small_config();
    cfg.samples = 12;
    REQUIRE(exp_commute(cfg).checks[0].verdict == Verdict::pass);
    ExperimentResult laws = exp_network_laws(cfg);
    REQUIRE(laws.checks.size() == 2);
    for (const auto& c : laws.checks) REQUIRE(c.verdict == Verdict::pass);
}

TEST_CASE("flow decomposition experiment") {
    ExperimentConfig cfg = small_config();
    cfg.samples = 30;
    ExperimentResult res = exp_flow_decomposition(cfg);
    REQUIRE(res.checks[0].verdict == Verdict::pass);
}

TEST_CASE("shunt experiment: vacuous and non-vacuous points") {
    ExperimentConfig cfg = small_config();
    cfg.fiber_spec = "path2";
    cfg.d = 20;
    cfg.r = 25;
    cfg.eta = 0.05; // bound = 8 / (0.05 * 400) = 0.4
    ExperimentResult res = exp_shunt(cfg);
    REQUIRE(res.checks[0].bound == Catch::Approx(0.4));
    REQUIRE(!res.checks[0].vacuous);
    REQUIRE(res.checks[0].verdict == Verdict::pass);

    cfg.eta = 0.001; // bound = 20: vacuous
    ExperimentResult vac = exp_shunt(cfg);
    REQUIRE(vac.checks[0].vacuous);
    REQUIRE(vac.checks[0].verdict == Verdict::vacuous);

    cfg.d = 0;
    REQUIRE_THROWS_AS(exp_shunt(cfg), std::invalid_argument);
}

TEST_CASE("local time experiment headline point") {
    ExperimentConfig cfg = small_config();
    cfg.fiber_spec = "point";
    cfg.d = 100;
    cfg.k = 25;
    cfg.replications = 200; // forced-zero estimate needs no precision
    ExperimentResult res = exp_local_time(cfg);
    REQUIRE(res.checks.size() == 2);
    const auto& diffusive = res.checks[0];
    REQUIRE(diffusive.bound == Catch::Approx(std::sqrt(200.0) / 100.0));
    REQUIRE(diffusive.estimate == 0.0); // the crossing must touch every level
    REQUIRE(diffusive.verdict == Verdict::pass);
}

TEST_CASE("hitfront experiment on the two-vertex fiber") {
    ExperimentConfig cfg = small_config();
    cfg.fiber_spec = "path2";
    cfg.replications = 300;
    ExperimentResult res = exp_hitfront(cfg);
    REQUIRE(res.checks[0].verdict == Verdict::pass);
    REQUIRE(res.checks[0].estimate >= 0.5);
}

TEST_CASE("outbound experiment rejects the one-vertex fiber") {
    ExperimentConfig cfg = small_config();
    cfg.fiber_spec = "point";
    cfg.d = 10;
    REQUIRE_THROWS_AS(exp_outbound(cfg), std::invalid_argument);
}

TEST_CASE("outbound experiment reports small-d estimates") {
    ExperimentConfig cfg = small_config();
    cfg.fiber_spec = "path2";
    cfg.delta = Rational(0, 1);
    cfg.d = 4;
    cfg.replications = 2000;
    ExperimentResult res = exp_outbound(cfg);
    REQUIRE(res.checks[0].vacuous); // bound >= 1 at this scale
    REQUIRE(res.checks[0].estimate < 0.5);
}

TEST_CASE("exit direction experiment validates the delta window") {
    ExperimentConfig cfg = small_config();
    cfg.fiber_spec = "path2";
    cfg.d = 16;
    cfg.delta = Rational(1, 1); // below d^{3/2}
    REQUIRE_THROWS_AS(exp_exit_direction(cfg), std::invalid_argument);
    cfg.delta = Rational(256, 1);
    cfg.replications = 500;
    ExperimentResult res = exp_exit_direction(cfg);
    REQUIRE(res.checks.size() == 2);
    for (const auto& c : res.checks) REQUIRE(c.verdict == Verdict::pass);
}

TEST_CASE("dwall experiment: trivially certain on the line") {
    ExperimentConfig cfg = small_config();
    cfg.fiber_spec = "point";
    cfg.x = 2;
    cfg.wall_width = 4;
    cfg.replications = 50;
    cfg.calibrated = true;
    ExperimentResult res = exp_dwall(cfg);
    REQUIRE(res.checks.size() == 3); // width grid D/2, D, 2D
    for (const auto& rep : res.checks) {
        REQUIRE(rep.estimate == 1.0); // every visited line level is complete
        if (rep.params.at("D") == 4.0)
            REQUIRE(rep.verdict == Verdict::pass); // the calibrated center point
        else
            REQUIRE(rep.verdict == Verdict::reported);
        REQUIRE(rep.params.at("frontier_width") == 2.0);
    }
}

TEST_CASE("gambler's ruin control matches the classical value") {
    ExperimentConfig cfg = small_config();
    cfg.fiber_spec = "point";
    cfg.delta = Rational(0, 1);
    cfg.x = 12;
    cfg.replications = 3000;
    cfg.step_cap = 4'000'000;
    ExperimentResult res = exp_gamblers_ruin(cfg);
    const BoundCheckReport* control = nullptr;
    for (const auto& c : res.checks)
        if (c.name == "srw-control") control = &c;
    REQUIRE(control != nullptr);
    REQUIRE(control->verdict == Verdict::pass);
    REQUIRE(control->estimate == Catch::Approx(0.5).margin(0.05));
}

TEST_CASE("martingale experiment is unbiased at small scale") {
    ExperimentConfig cfg = small_config();
    cfg.fiber_spec = "cycle4";
    cfg.delta = Rational(3, 1);
    cfg.horizon = 400;
    cfg.replications = 4000;
    ExperimentResult res = exp_martingale(cfg);
    REQUIRE(res.checks[0].verdict == Verdict::pass);
    REQUIRE(res.checks[0].params.at("recompute_failures") == 0.0);
}

TEST_CASE("shape experiment on the line produces the deterministic overhang") {
    ExperimentConfig cfg = small_config();
    cfg.fiber_spec = "point";
    cfg.delta = Rational(20, 1);
    cfg.x = 64; // n grid 4..64
    cfg.replications = 4;
    cfg.step_cap = 50'000'000;
    ExperimentResult res = exp_shape(cfg);
    REQUIRE(res.shapes.size() == 1);
    const ShapeReport& shape = res.shapes[0];
    REQUIRE(shape.points.size() == 5);
    for (const ShapePoint& pt : shape.points) {
        REQUIRE(!pt.dropped);
        // With a one-vertex fiber the range is an interval of exactly 3n
        // vertices at detection, so the overhang is (n-1)/2 identically.
        REQUIRE(pt.overhang == Catch::Approx((pt.n - 1.0) / 2.0).margin(1e-12));
    }
    REQUIRE(shape.fitted_exponent > 0.9);
}

TEST_CASE("return-time experiment bookkeeping") {
    ExperimentConfig cfg = small_config();
    cfg.fiber_spec = "point";
    cfg.delta = Rational(50, 1);
    cfg.replications = 60;
    cfg.i_max = 4;
    cfg.step_cap = 500'000;
    ExperimentResult res = exp_return_times(cfg);
    REQUIRE(res.return_times.size() == 1);
    const ReturnTimeReport& rt = res.return_times[0];
    REQUIRE(rt.points.size() == 4);
    std::uint64_t last = cfg.replications;
    for (const auto& pt : rt.points) {
        REQUIRE(pt.samples <= last); // sample counts shrink only through caps
        last = pt.samples;
        if (pt.samples > 0) REQUIRE(pt.moment1 >= 1.0);
    }
}

TEST_CASE("experiments are reproducible and thread-count independent") {
    ExperimentConfig cfg = small_config();
    cfg.fiber_spec = "cycle4";
    cfg.delta = Rational(2, 1);
    cfg.horizon = 200;
    cfg.replications = 500;

    setenv("ORRW_THREADS", "1", 1);
    auto first = exp_martingale(cfg).to_json(/*include_timing=*/false).dump();
    setenv("ORRW_THREADS", "4", 1);
    auto second = exp_martingale(cfg).to_json(false).dump();
    unsetenv("ORRW_THREADS");
    auto third = exp_martingale(cfg).to_json(false).dump();
    REQUIRE(first == second);
    REQUIRE(first == third);
}
