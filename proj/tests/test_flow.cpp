#include <catch2/catch_amalgamated.hpp>

#include "orrw/flow.hpp"
#include "orrw/instances.hpp"

using namespace orrw;

TEST_CASE("flow storage is antisymmetric by construction") {
    Flow f;
    f.set(2, 5, 1.25);
    REQUIRE(f.get(2, 5) == 1.25);
    REQUIRE(f.get(5, 2) == -1.25);
    f.set(7, 3, 0.5);
    REQUIRE(f.get(3, 7) == -0.5);
    REQUIRE(f.get(0, 1) == 0.0);
}

TEST_CASE("decomposition of simple flows") {
    SECTION("flow already aimed at b is returned unchanged") {
        // a=0 -> 1 -> b=2, z=3 untouched.
        Flow f;
        f.set(0, 1, 1.0);
        f.set(1, 2, 1.0);
        FlowDecomposition dec = decompose_flow(f, 0, 2, 3);
        REQUIRE(dec.to_b.get(0, 1) == 1.0);
        REQUIRE(dec.to_b.get(1, 2) == 1.0);
        dec.to_z.for_each([](int, int, double v) { REQUIRE(v == 0.0); });
    }
    SECTION("disjoint paths split cleanly") {
        // a=0 feeds b=3 via 1 and z=4 via 2.
        Flow f;
        f.set(0, 1, 0.75);
        f.set(1, 3, 0.75);
        f.set(0, 2, 0.25);
        f.set(2, 4, 0.25);
        FlowDecomposition dec = decompose_flow(f, 0, 3, 4);
        REQUIRE(dec.to_b.get(0, 1) == 0.75);
        REQUIRE(dec.to_b.get(1, 3) == 0.75);
        REQUIRE(dec.to_b.get(0, 2) == 0.0);
        REQUIRE(dec.to_z.get(2, 4) == 0.25);
        REQUIRE(dec.to_z.get(0, 1) == 0.0);
    }
    SECTION("a cycle is rejected") {
        Flow f;
        f.set(0, 1, 1.0);
        f.set(1, 2, 1.0);
        f.set(2, 0, 1.0);
        REQUIRE_THROWS_AS(decompose_flow(f, 3, 4, 5), std::invalid_argument);
    }
    SECTION("flow into the source is rejected") {
        Flow f;
        f.set(1, 0, 1.0); // enters a=0
        f.set(0, 2, 1.0);
        REQUIRE_THROWS_AS(decompose_flow(f, 0, 2, 3), std::invalid_argument);
    }
}

TEST_CASE("decomposition properties on random currents") {
    for (std::uint64_t s = 0; s < 25; ++s) {
        RngStream rng(77, s);
        int n = 6 + static_cast<int>(rng.below(7));
        Network net = random_connected_network(n, 5 + static_cast<int>(rng.below(n)), 4, rng);
        int a = 0, b = n - 2, z = n - 1;
        UnitCurrent uc = solve_unit_current(net, a, std::vector<int>{b, z});
        FlowDecomposition dec = decompose_flow(uc.current, a, b, z);

        double strength_b = -dec.to_b.divergence(net, b);
        double strength_z = -dec.to_z.divergence(net, z);
        REQUIRE(strength_b + strength_z == Catch::Approx(1.0).margin(1e-9));

        // (a) identical values on the edges into b.
        for (auto [w, c] : net.neighbors(b)) REQUIRE(dec.to_b.get(w, b) == uc.current.get(w, b));
        // (b) nothing through z.
        for (auto [w, c] : net.neighbors(z)) REQUIRE(dec.to_b.get(w, z) == 0.0);
        // (c) same direction and (d) dominated edgewise, exactly.
        uc.current.for_each([&](int u, int v, double value) {
            double jb = dec.to_b.get(u, v);
            REQUIRE(jb * value >= 0.0);
            REQUIRE(std::abs(jb) <= std::abs(value));
            // (e) no edge beyond the strength of the a->b part.
            REQUIRE(std::abs(jb) <= strength_b + 1e-9);
        });
        // Both parts conserve flow away from their terminals.
        for (int v = 0; v < n; ++v) {
            if (v != a && v != b)
                REQUIRE(dec.to_b.divergence(net, v) == Catch::Approx(0.0).margin(1e-9));
            if (v != a && v != z)
                REQUIRE(dec.to_z.divergence(net, v) == Catch::Approx(0.0).margin(1e-9));
        }
    }
}
