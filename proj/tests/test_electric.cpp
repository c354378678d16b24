#include <catch2/catch_amalgamated.hpp>

#include "orrw/instances.hpp"
#include "orrw/network.hpp"
#include "orrw/solve.hpp"
#include "oracle_rational.hpp"

using namespace orrw;

namespace {

Network series_path(int edges) {
    Network net;
    for (int i = 0; i <= edges; ++i) net.add_vertex();
    for (int i = 0; i < edges; ++i) net.add_conductance(i, i + 1, 1.0);
    return net;
}

} // namespace

TEST_CASE("reinforced-window conductances") {
    FiberGraph fiber = FiberGraph::path(2);
    Subgraph window = build_cylinder_window(fiber, 0, 2);

    SECTION("zero reinforcement gives the all-ones network") {
        Subgraph a;
        a.add_edge({0, 0}, {1, 0}, fiber);
        Network net = orrw_conductances(a, window, 0.0);
        for (auto [u, v, c] : net.edges()) REQUIRE(c == 1.0);
    }
    SECTION("a fully reinforced window") {
        Network net = orrw_conductances(window, window, 2.5);
        for (auto [u, v, c] : net.edges()) REQUIRE(c == 3.5);
    }
    SECTION("one reinforced edge at delta = 9") {
        Subgraph a;
        a.add_edge({0, 0}, {1, 0}, fiber);
        Network net = orrw_conductances(a, window, 9.0);
        int u = net.index_of({0, 0}), v = net.index_of({1, 0});
        REQUIRE(net.conductance(u, v) == 10.0);
        int count10 = 0;
        for (auto [x, y, c] : net.edges()) {
            REQUIRE((c == 1.0 || c == 10.0));
            count10 += (c == 10.0);
        }
        REQUIRE(count10 == 1);
    }
    SECTION("subgraph outside the window is rejected") {
        Subgraph a;
        a.add_edge({5, 0}, {6, 0}, fiber);
        REQUIRE_THROWS_AS(orrw_conductances(a, window, 1.0), std::invalid_argument);
    }
}

TEST_CASE("unit current on textbook networks") {
    SECTION("series of three unit edges") {
        Network net = series_path(3);
        UnitCurrent uc = solve_unit_current(net, 0, 3);
        REQUIRE(uc.voltage.value[0] == Catch::Approx(3.0).margin(1e-12));
        for (int i = 0; i < 3; ++i)
            REQUIRE(uc.current.get(i, i + 1) == Catch::Approx(1.0).margin(1e-12));
    }
    SECTION("two parallel unit edges") {
        Network net;
        net.add_vertex();
        net.add_vertex();
        net.add_conductance(0, 1, 1.0);
        net.add_conductance(0, 1, 1.0); // aggregates to conductance 2
        UnitCurrent uc = solve_unit_current(net, 0, 1);
        REQUIRE(uc.voltage.value[0] == Catch::Approx(0.5).margin(1e-12));
        REQUIRE(effective_conductance(net, 0, {1}) == Catch::Approx(2.0).margin(1e-12));
    }
    SECTION("error paths") {
        Network net = series_path(2);
        REQUIRE_THROWS_AS(solve_unit_current(net, 0, 0), std::invalid_argument);
        REQUIRE_THROWS_AS(solve_unit_current(net, 0, std::vector<int>{}), std::invalid_argument);
        Network split;
        split.add_vertex();
        split.add_vertex();
        split.add_vertex();
        split.add_conductance(0, 1, 1.0);
        REQUIRE_THROWS_AS(solve_unit_current(split, 0, 2), std::invalid_argument);
    }
}

TEST_CASE("solver matches the exact rational oracle on random networks") {
    for (std::uint64_t s = 0; s < 12; ++s) {
        RngStream rng(99, s);
        int n = 6 + static_cast<int>(rng.below(7)); // up to 12 vertices
        Network net = random_connected_network(n, static_cast<int>(rng.below(2 * n)), 4, rng);
        std::vector<int> sinks{n - 1};
        if (n > 7) sinks.push_back(n - 2);
        UnitCurrent uc = solve_unit_current(net, 0, sinks);
        std::vector<double> exact = oracle::unit_current_voltages(net, 0, sinks);
        for (int v = 0; v < n; ++v)
            REQUIRE(uc.voltage.value[v] == Catch::Approx(exact[v]).margin(1e-8));
        for (auto [u, v, c] : net.edges())
            REQUIRE(uc.current.get(u, v) ==
                    Catch::Approx(c * (exact[u] - exact[v])).margin(1e-8));
    }
}

TEST_CASE("effective conductance laws") {
    SECTION("series of n unit edges has conductance 1/n") {
        for (int n : {2, 5, 9}) {
            Network net = series_path(n);
            REQUIRE(effective_conductance(net, 0, {n}) ==
                    Catch::Approx(1.0 / n).margin(1e-12));
        }
    }
    SECTION("unit current strength and bounded edge currents") {
        RngStream rng(5, 3);
        Network net = random_connected_network(10, 12, 4, rng);
        UnitCurrent uc = solve_unit_current(net, 0, 9);
        REQUIRE(uc.current.divergence(net, 0) == Catch::Approx(1.0).margin(1e-10));
        uc.current.for_each([&](int u, int v, double j) { REQUIRE(std::abs(j) <= 1.0 + 1e-10); });
    }
}

TEST_CASE("expected hitting times") {
    SECTION("single edge") {
        Network net = series_path(1);
        REQUIRE(expected_hitting_time(net, 0, 1) == Catch::Approx(1.0).margin(1e-10));
    }
    SECTION("line of three edges, end to end") {
        Network net = series_path(3);
        REQUIRE(expected_hitting_time(net, 0, 3) == Catch::Approx(9.0).margin(1e-10));
    }
    SECTION("commute-time identity on random networks") {
        for (std::uint64_t s = 0; s < 10; ++s) {
            RngStream rng(17, s);
            int n = 5 + static_cast<int>(rng.below(8));
            Network net = random_connected_network(n, static_cast<int>(rng.below(12)), 4, rng);
            double commute = expected_hitting_time(net, 0, n - 1) +
                             expected_hitting_time(net, n - 1, 0);
            double identity = effective_resistance(net, 0, {n - 1}) * net.total_pi();
            REQUIRE(commute == Catch::Approx(identity).margin(1e-8));
        }
    }
}

TEST_CASE("flow energy") {
    Network net = series_path(3);
    SECTION("zero flow has zero energy") {
        Flow flow;
        REQUIRE(flow_energy(net, flow) == 0.0);
    }
    SECTION("unit current energy equals the resistance") {
        UnitCurrent uc = solve_unit_current(net, 0, 3);
        REQUIRE(flow_energy(net, uc.current) == Catch::Approx(3.0).margin(1e-10));
    }
}

TEST_CASE("exit-edge distribution") {
    FiberGraph fiber = FiberGraph::path(2);

    SECTION("probabilities sum to one and respect symmetry") {
        // One horizontal edge: mirror symmetry swaps the endpoints' exits.
        Subgraph a;
        a.add_edge({0, 0}, {0, 1}, fiber); // one vertical edge, start at either end
        ExitDistribution dist = exit_edge_distribution(a, 4.0, {0, 0}, fiber);
        double total = 0;
        for (double p : dist.probability) total += p;
        REQUIRE(total == Catch::Approx(1.0).margin(1e-10));
        // The two horizontal exits of the start vertex are symmetric.
        double left = -1, right = -1;
        for (std::size_t i = 0; i < dist.edges.size(); ++i) {
            if (dist.edges[i].tail == CylinderVertex{0, 0} &&
                dist.edges[i].head == CylinderVertex{-1, 0})
                left = dist.probability[i];
            if (dist.edges[i].tail == CylinderVertex{0, 0} &&
                dist.edges[i].head == CylinderVertex{1, 0})
                right = dist.probability[i];
        }
        REQUIRE(left == Catch::Approx(right).margin(1e-12));
    }

    SECTION("matches the absorbing-chain oracle on random subgraphs") {
        FiberGraph cyc = FiberGraph::cycle(4);
        for (std::uint64_t s = 0; s < 8; ++s) {
            RngStream rng(23, s);
            Rational delta(1 + static_cast<std::int64_t>(rng.below(20)),
                           1 + static_cast<std::int64_t>(rng.below(4)));
            Subgraph a = random_connected_subgraph(cyc, 3, 4 + rng.below(10), rng);
            if (a.vertex_count() > 12) continue;
            CylinderVertex start = a.vertices()[rng.below(a.vertex_count())];
            ExitDistribution dist = exit_edge_distribution(a, delta.value(), start, cyc);
            auto exact = oracle::exit_distribution(a, delta, start, cyc);
            REQUIRE(dist.edges.size() == exact.size());
            for (std::size_t i = 0; i < dist.edges.size(); ++i) {
                double expect = exact.at(oracle::directed_edge_key(dist.edges[i]));
                REQUIRE(dist.probability[i] == Catch::Approx(expect).margin(1e-8));
            }
        }
    }

    SECTION("empty boundary is rejected") {
        // No boundary needs an infinite range; a self-check: every finite
        // subgraph has one, so reject only the degenerate empty subgraph.
        Subgraph a;
        REQUIRE_THROWS(exit_edge_distribution(a, 1.0, {0, 0}, fiber));
    }
}

TEST_CASE("balance inequality for exit edges") {
    SECTION("random subgraphs at several reinforcement strengths") {
        FiberGraph fiber = FiberGraph::path(3);
        for (double delta : {1.0, 10.0, 100.0}) {
            RngStream rng(31, static_cast<std::uint64_t>(delta));
            for (int trial = 0; trial < 6; ++trial) {
                Subgraph a = random_connected_subgraph(fiber, 4, 5 + rng.below(25), rng);
                CylinderVertex start = a.vertices()[rng.below(a.vertex_count())];
                BalanceCheckResult res = check_balance_inequality(a, delta, start, fiber);
                INFO("delta=" << delta << " trial=" << trial);
                REQUIRE(res.pass);
            }
        }
    }
    SECTION("symmetric boundary pair has zero difference, giving full slack") {
        FiberGraph fiber = FiberGraph::point();
        Subgraph a;
        a.add_edge({0, 0}, {1, 0}, fiber);
        a.add_edge({1, 0}, {2, 0}, fiber);
        BalanceCheckResult res = check_balance_inequality(a, 3.0, {1, 0}, fiber);
        REQUIRE(res.pass);
        // Two boundary edges, tails at distance 2: slack = 2/(1+3) - 0.
        REQUIRE(res.worst_slack == Catch::Approx(0.5).margin(1e-12));
    }
}

TEST_CASE("shunt networks") {
    FiberGraph fiber = FiberGraph::path(2);
    Subgraph window = build_cylinder_window(fiber, 0, 10);

    SECTION("no shunt levels: the walk always meets the far level") {
        ShuntNetwork shunt = build_shunt_network(window, {0, 0}, {}, 10, 0.5, fiber);
        UnitCurrent uc = solve_unit_current(shunt.net, shunt.source,
                                            std::vector<int>{shunt.sink_b, shunt.sink_z});
        REQUIRE(-uc.current.divergence(shunt.net, shunt.sink_b) ==
                Catch::Approx(1.0).margin(1e-10));
    }
    SECTION("absorption at the shunt grows with eta") {
        double previous = 1.0;
        for (double eta : {0.01, 0.1, 1.0, 10.0}) {
            ShuntNetwork shunt =
                build_shunt_network(window, {0, 0}, {3, 4, 5, 6}, 10, eta, fiber);
            UnitCurrent uc = solve_unit_current(shunt.net, shunt.source,
                                                std::vector<int>{shunt.sink_b, shunt.sink_z});
            double p_far = -uc.current.divergence(shunt.net, shunt.sink_b);
            REQUIRE(p_far < previous);
            previous = p_far;
        }
    }
    SECTION("crossing bound holds deterministically") {
        // d = 8 shunted levels on a 2-rail window: bound 2*4/(eta*64).
        Subgraph wide = build_cylinder_window(fiber, 0, 20);
        std::vector<int> levels{1, 2, 3, 4, 5, 6, 7, 8};
        for (double eta : {0.2, 0.5, 2.0}) {
            ShuntNetwork shunt = build_shunt_network(wide, {0, 0}, levels, 20, eta, fiber);
            UnitCurrent uc = solve_unit_current(shunt.net, shunt.source,
                                                std::vector<int>{shunt.sink_b, shunt.sink_z});
            double p_far = -uc.current.divergence(shunt.net, shunt.sink_b);
            double bound = 2.0 * 4.0 / (eta * 64.0);
            REQUIRE(p_far <= bound + 1e-10);
        }
    }
    SECTION("geometry errors") {
        REQUIRE_THROWS_AS(build_shunt_network(window, {0, 0}, {3}, 12, 0.5, fiber),
                          std::invalid_argument); // no vertex at level 12
        REQUIRE_THROWS_AS(build_shunt_network(window, {0, 0}, {10}, 10, 0.5, fiber),
                          std::invalid_argument); // shunt level not strictly inside
        REQUIRE_THROWS_AS(build_shunt_network(window, {0, 0}, {3}, 10, -1.0, fiber),
                          std::invalid_argument);
    }
}
