#include <catch2/catch_amalgamated.hpp>

#include <set>
#include <unordered_set>

#include "orrw/cylinder.hpp"
#include "orrw/instances.hpp"
#include "orrw/rng.hpp"

using namespace orrw;

TEST_CASE("flat hash set agrees with std::unordered_set") {
    detail::U64Set mine;
    std::unordered_set<std::uint64_t> ref;
    RngStream rng(42, 0);
    for (int i = 0; i < 20000; ++i) {
        std::uint64_t key = rng.below(5000);
        if (rng.bernoulli(0.7)) {
            REQUIRE(mine.insert(key) == ref.insert(key).second);
        } else {
            REQUIRE(mine.contains(key) == (ref.count(key) > 0));
        }
    }
    REQUIRE(mine.size() == ref.size());
}

TEST_CASE("edge keys are canonical and reversible") {
    CylinderEdge horizontal{{-3, 2}, {-2, 2}};
    CylinderEdge vertical{{7, 1}, {7, 4}};
    REQUIRE(edge_key(horizontal.a, horizontal.b) == edge_key(horizontal.b, horizontal.a));
    REQUIRE(edge_key(vertical.a, vertical.b) == edge_key(vertical.b, vertical.a));
    REQUIRE(edge_from_key(edge_key(horizontal)) == horizontal);
    REQUIRE(edge_from_key(edge_key(vertical)) == vertical);
    REQUIRE(edge_key(horizontal) != edge_key(vertical));
}

TEST_CASE("fiber families") {
    REQUIRE(FiberGraph::point().size() == 1);
    REQUIRE(FiberGraph::point().edge_count() == 0);
    REQUIRE(FiberGraph::path(3).edge_count() == 2);
    REQUIRE(FiberGraph::cycle(4).edge_count() == 4);
    REQUIRE(FiberGraph::complete(5).edge_count() == 10);
    REQUIRE_THROWS_AS(FiberGraph(3, {{0, 1}}, "disconnected"), std::invalid_argument);
    REQUIRE_THROWS_AS(FiberGraph(2, {{0, 0}}, "loop"), std::invalid_argument);
    REQUIRE_THROWS_AS(FiberGraph(2, {{0, 1}, {1, 0}}, "dup"), std::invalid_argument);
}

TEST_CASE("cylinder windows") {
    SECTION("degenerate point window") {
        Subgraph w = build_cylinder_window(FiberGraph::point(), 0, 0);
        REQUIRE(w.vertex_count() == 1);
        REQUIRE(w.edge_count() == 0);
    }
    SECTION("two levels over a single edge") {
        Subgraph w = build_cylinder_window(FiberGraph::path(2), 0, 1);
        REQUIRE(w.vertex_count() == 4);
        REQUIRE(w.edge_count() == 4); // 2 horizontal + 2 vertical
    }
    SECTION("eleven levels over the three-path") {
        // 33 vertices; 11 levels x 2 vertical edges + 10 gaps x 3 horizontal.
        Subgraph w = build_cylinder_window(FiberGraph::path(3), 0, 10);
        REQUIRE(w.vertex_count() == 33);
        REQUIRE(w.edge_count() == 52);
        REQUIRE(w.connected(FiberGraph::path(3)));
    }
    SECTION("bad level order is rejected") {
        REQUIRE_THROWS_AS(build_cylinder_window(FiberGraph::point(), 1, 0),
                          std::invalid_argument);
    }
}

TEST_CASE("edge boundary") {
    SECTION("single vertex on the line") {
        FiberGraph fiber = FiberGraph::point();
        Subgraph a;
        a.add_vertex({0, 0});
        auto boundary = edge_boundary(a, fiber);
        REQUIRE(boundary.size() == 2);
        REQUIRE(vertex_boundary(a, fiber).size() == 1);
    }
    SECTION("single horizontal edge over a one-edge fiber") {
        FiberGraph fiber = FiberGraph::path(2);
        Subgraph a;
        a.add_edge({0, 0}, {1, 0}, fiber);
        auto boundary = edge_boundary(a, fiber);
        REQUIRE(boundary.size() == 4); // one horizontal and one vertical exit per endpoint
        for (const DirectedEdge& e : boundary) REQUIRE(a.has_vertex(e.tail));
    }
    SECTION("full window boundary is the horizontal exits at both ends") {
        FiberGraph fiber = FiberGraph::path(3);
        Subgraph a = build_cylinder_window(fiber, 0, 2);
        auto boundary = edge_boundary(a, fiber);
        REQUIRE(boundary.size() == 6);
        for (const DirectedEdge& e : boundary) {
            REQUIRE((e.tail.level == 0 || e.tail.level == 2));
            REQUIRE((e.head.level == -1 || e.head.level == 3));
        }
    }
    SECTION("vertex boundary equals the set of boundary tails") {
        FiberGraph fiber = FiberGraph::cycle(4);
        RngStream rng(7, 0);
        for (int trial = 0; trial < 10; ++trial) {
            Subgraph a = random_connected_subgraph(fiber, 5, 4 + rng.below(30), rng);
            std::set<CylinderVertex> tails;
            for (const DirectedEdge& e : edge_boundary(a, fiber)) tails.insert(e.tail);
            auto vb = vertex_boundary(a, fiber);
            std::set<CylinderVertex> vbset(vb.begin(), vb.end());
            REQUIRE(tails == vbset);
            for (CylinderVertex v : vb) REQUIRE(a.has_vertex(v));
        }
    }
}

TEST_CASE("intrinsic distance") {
    FiberGraph fiber = FiberGraph::path(2);
    SECTION("zero at equal endpoints") {
        Subgraph a = build_cylinder_window(fiber, 0, 1);
        REQUIRE(intrinsic_distance(a, {0, 0}, {0, 0}, fiber) == 0);
    }
    SECTION("line of five edges") {
        FiberGraph point = FiberGraph::point();
        Subgraph a = build_cylinder_window(point, 0, 5);
        REQUIRE(intrinsic_distance(a, {0, 0}, {5, 0}, point) == 5);
    }
    SECTION("detour: ambient neighbors, intrinsic distance three") {
        // C-shape: the edge between (0,0) and (1,0) is not part of A.
        Subgraph a;
        a.add_edge({0, 0}, {0, 1}, fiber);
        a.add_edge({0, 1}, {1, 1}, fiber);
        a.add_edge({1, 1}, {1, 0}, fiber);
        REQUIRE(intrinsic_distance(a, {0, 0}, {1, 0}, fiber) == 3);
    }
    SECTION("unreachable in a disconnected subgraph") {
        Subgraph a;
        a.add_vertex({0, 0});
        a.add_vertex({5, 0});
        REQUIRE(!intrinsic_distance(a, {0, 0}, {5, 0}, fiber).has_value());
    }
    SECTION("rejects vertices outside the subgraph") {
        Subgraph a;
        a.add_vertex({0, 0});
        REQUIRE_THROWS_AS(intrinsic_distance(a, {0, 0}, {9, 0}, fiber), std::invalid_argument);
    }
    SECTION("at least the ambient distance on random subgraphs") {
        FiberGraph cyc = FiberGraph::cycle(4);
        RngStream rng(11, 0);
        for (int trial = 0; trial < 10; ++trial) {
            Subgraph a = random_connected_subgraph(cyc, 4, 6 + rng.below(25), rng);
            auto verts = a.vertices();
            CylinderVertex u = verts[rng.below(verts.size())];
            CylinderVertex v = verts[rng.below(verts.size())];
            auto d = intrinsic_distance(a, u, v, cyc);
            REQUIRE(d.has_value());
            int ambient = std::abs(u.level - v.level); // cylinder distance is at least this
            REQUIRE(*d >= ambient);
        }
    }
}

TEST_CASE("level completeness") {
    SECTION("one visited vertex completes a point level") {
        FiberGraph fiber = FiberGraph::point();
        Subgraph a;
        a.add_vertex({3, 0});
        REQUIRE(level_complete(a, 3, fiber));
        REQUIRE(!level_complete(a, 4, fiber));
    }
    SECTION("vertices alone are not enough: vertical edges count") {
        FiberGraph fiber = FiberGraph::path(3);
        Subgraph a;
        a.add_vertex({0, 0});
        a.add_vertex({0, 1});
        a.add_vertex({0, 2});
        a.add_edge({0, 0}, {0, 1}, fiber);
        REQUIRE(!level_complete(a, 0, fiber)); // edge {1,2} missing
        a.add_edge({0, 1}, {0, 2}, fiber);
        REQUIRE(level_complete(a, 0, fiber));
    }
    SECTION("full windows complete every level") {
        FiberGraph fiber = FiberGraph::cycle(4);
        Subgraph a = build_cylinder_window(fiber, -2, 2);
        for (int z = -2; z <= 2; ++z) REQUIRE(level_complete(a, z, fiber));
    }
    SECTION("monotone under adding edges") {
        FiberGraph fiber = FiberGraph::path(2);
        Subgraph a;
        a.add_edge({0, 0}, {0, 1}, fiber);
        REQUIRE(level_complete(a, 0, fiber));
        a.add_edge({0, 0}, {1, 0}, fiber);
        a.add_edge({1, 0}, {1, 1}, fiber);
        REQUIRE(level_complete(a, 0, fiber)); // unchanged by growth elsewhere
    }
}

TEST_CASE("incomplete level distance") {
    FiberGraph fiber = FiberGraph::path(2);
    SECTION("zero on a complete level") {
        Subgraph a = build_cylinder_window(fiber, 0, 0);
        REQUIRE(incomplete_level_distance(a, {0, 0}, {0, 1}, fiber) == 0);
    }
    SECTION("all levels count when none is complete") {
        Subgraph a;
        for (int z = 0; z < 4; ++z) a.add_edge({z, 0}, {z + 1, 0}, fiber);
        REQUIRE(incomplete_level_distance(a, {0, 0}, {4, 0}, fiber) == 5);
    }
    SECTION("mixed case: two of five levels complete") {
        Subgraph a;
        for (int z = 0; z < 4; ++z) {
            a.add_edge({z, 0}, {z + 1, 0}, fiber);
            a.add_edge({z, 1}, {z + 1, 1}, fiber);
        }
        a.add_edge({1, 0}, {1, 1}, fiber);
        a.add_edge({3, 0}, {3, 1}, fiber);
        REQUIRE(incomplete_level_distance(a, {0, 0}, {4, 0}, fiber) == 3);
    }
    SECTION("never exceeds the level span plus one") {
        FiberGraph cyc = FiberGraph::cycle(4);
        RngStream rng(13, 0);
        for (int trial = 0; trial < 10; ++trial) {
            Subgraph a = random_connected_subgraph(cyc, 4, 6 + rng.below(30), rng);
            auto verts = a.vertices();
            CylinderVertex u = verts[rng.below(verts.size())];
            CylinderVertex v = verts[rng.below(verts.size())];
            int d = incomplete_level_distance(a, u, v, cyc);
            REQUIRE(d <= std::abs(u.level - v.level) + 1);
        }
    }
}

TEST_CASE("fiber edge-list file loading") {
    SECTION("comments, blank lines, and count from max index") {
        std::string path = "/tmp/orrw_fiber_test.txt";
        {
            std::ofstream out(path);
            out << "# triangle\n\n0 1\n1 2  # second edge\n2 0\n";
        }
        FiberGraph fiber = FiberGraph::from_edge_list_file(path);
        REQUIRE(fiber.size() == 3);
        REQUIRE(fiber.edge_count() == 3);
    }
    SECTION("malformed line is rejected") {
        std::string path = "/tmp/orrw_fiber_bad.txt";
        {
            std::ofstream out(path);
            out << "0 1\n2\n";
        }
        REQUIRE_THROWS(FiberGraph::from_edge_list_file(path));
    }
    SECTION("spec strings") {
        REQUIRE(FiberGraph::from_spec("path5").size() == 5);
        REQUIRE(FiberGraph::from_spec("cycle6").edge_count() == 6);
        REQUIRE_THROWS_AS(FiberGraph::from_spec("blob3"), std::invalid_argument);
    }
}
