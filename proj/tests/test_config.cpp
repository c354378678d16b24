#include <catch2/catch_amalgamated.hpp>

#include <fstream>

#include "orrw/config.hpp"
#include "orrw/rational.hpp"

using namespace orrw;

TEST_CASE("rational parsing and exactness") {
    REQUIRE(Rational::parse("10") == Rational(10, 1));
    REQUIRE(Rational::parse("3/7") == Rational(3, 7));
    REQUIRE(Rational::parse("6/4") == Rational(3, 2));
    REQUIRE(Rational::parse("0.5") == Rational(1, 2));
    REQUIRE(Rational::parse("0.25").value() == 0.25);
    REQUIRE(Rational::from_double(1000.0) == Rational(1000, 1));
    REQUIRE_THROWS_AS(Rational(1, 0), std::invalid_argument);
    REQUIRE_THROWS_AS(Rational(-1, 2), std::invalid_argument);
    REQUIRE(Rational(0, 5).is_zero());
}

TEST_CASE("config keys, domains, and snapshots") {
    ExperimentConfig cfg;
    cfg.set("fiber", "path3");
    cfg.set("delta", "1000");
    cfg.set("x", "50");
    cfg.set("reps", "123");
    cfg.set("alpha", "0.3");
    cfg.validate();
    REQUIRE(cfg.fiber().size() == 3);
    REQUIRE(cfg.delta == Rational(1000, 1));
    REQUIRE(cfg.replications == 123);

    SECTION("unknown keys are rejected") {
        REQUIRE_THROWS_AS(cfg.set("bogus", "1"), std::invalid_argument);
    }
    SECTION("domain violations name the constraint") {
        ExperimentConfig bad = cfg;
        bad.set("alpha", "0.6");
        REQUIRE_THROWS_WITH(bad.validate(), Catch::Matchers::ContainsSubstring("alpha"));
        bad = cfg;
        bad.set("epsilon", "1.5");
        REQUIRE_THROWS_WITH(bad.validate(), Catch::Matchers::ContainsSubstring("epsilon"));
        bad = cfg;
        bad.set("confidence", "2");
        REQUIRE_THROWS_WITH(bad.validate(), Catch::Matchers::ContainsSubstring("confidence"));
    }
    SECTION("constant overrides") {
        cfg.set("const.window_lo", "1e-5");
        REQUIRE(cfg.constant_or("window_lo", 0) == 1e-5);
        REQUIRE(cfg.constant_or("missing", 7.0) == 7.0);
    }
    SECTION("snapshot round-trips exactly") {
        cfg.set("delta", "7/3");
        cfg.set("const.c", "0.125");
        ExperimentConfig copy = ExperimentConfig::from_snapshot(cfg.snapshot());
        REQUIRE(copy.snapshot() == cfg.snapshot());
        REQUIRE(copy.delta == Rational(7, 3));
    }
}

TEST_CASE("ini config files") {
    const std::string path = "/tmp/orrw_config_test.ini";
    {
        std::ofstream out(path);
        out << "# global defaults\n"
               "seed = 99\n"
               "fiber = cycle4\n"
               "\n"
               "[martingale]\n"
               "delta = 1/2   ; exact rational\n"
               "horizon = 500\n";
    }
    ConfigFile file = ConfigFile::load(path);

    ExperimentConfig cfg;
    file.apply(cfg, "martingale");
    REQUIRE(cfg.seed == 99);
    REQUIRE(cfg.fiber_spec == "cycle4");
    REQUIRE(cfg.delta == Rational(1, 2));
    REQUIRE(cfg.horizon == 500);

    ExperimentConfig other;
    file.apply(other, "balance"); // only the global section applies
    REQUIRE(other.seed == 99);
    REQUIRE(other.horizon == 10000);

    SECTION("malformed lines carry the line number") {
        const std::string bad = "/tmp/orrw_config_bad.ini";
        {
            std::ofstream out(bad);
            out << "seed = 1\nnot a key value\n";
        }
        REQUIRE_THROWS_WITH(ConfigFile::load(bad), Catch::Matchers::ContainsSubstring("line 2"));
    }
}
