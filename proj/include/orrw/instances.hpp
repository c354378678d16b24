#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "orrw/cylinder.hpp"
#include "orrw/network.hpp"
#include "orrw/rng.hpp"

namespace orrw {

// Grows a connected random subgraph of the cylinder by a seeded randomized
// attachment process from the origin: repeatedly pick a random candidate
// edge with at least one endpoint already inside, restricted to levels in
// [-half_width, half_width], until the target edge count is reached. The
// result is connected by construction and reproducible from the generator
// state. Inequality checks must hold for every subgraph, so uniformity over
// subgraphs is not needed.
inline Subgraph random_connected_subgraph(const FiberGraph& fiber, int half_width,
                                          std::size_t target_edges, RngStream& rng) {
    if (half_width < 1) throw std::invalid_argument("random subgraph: half_width must be >= 1");
    Subgraph a;
    CylinderVertex origin{0, 0};
    a.add_vertex(origin);

    std::vector<DirectedEdge> candidates;
    std::vector<CylinderVertex> nbrs;
    auto push_candidates = [&](CylinderVertex v) {
        ambient_neighbors(v, fiber, nbrs);
        for (CylinderVertex w : nbrs)
            if (w.level >= -half_width && w.level <= half_width) candidates.push_back({v, w});
    };
    push_candidates(origin);

    while (a.edge_count() < target_edges && !candidates.empty()) {
        std::size_t i = static_cast<std::size_t>(rng.below(candidates.size()));
        DirectedEdge e = candidates[i];
        candidates[i] = candidates.back();
        candidates.pop_back();
        if (a.has_edge(e.tail, e.head)) continue;
        bool head_is_new = !a.has_vertex(e.head);
        a.add_edge(e.tail, e.head, fiber);
        if (head_is_new) push_candidates(e.head);
    }
    return a;
}

// Ladder-style subgraph on levels [z_min, z_max]: every horizontal edge of
// every rail, but vertical edges only at the single rung level. For a fiber
// with at least one edge this leaves a boundary vertex at every level, the
// geometry needed by the designated-level experiments.
inline Subgraph rail_ladder(const FiberGraph& fiber, int z_min, int z_max, int rung_level) {
    if (fiber.edge_count() < 1)
        throw std::invalid_argument("rail ladder: fiber needs at least one edge");
    if (z_min > z_max || rung_level < z_min || rung_level > z_max)
        throw std::invalid_argument("rail ladder: rung level outside the window");
    Subgraph a;
    const std::size_t levels = static_cast<std::size_t>(z_max - z_min + 1);
    a.reserve(levels * fiber.size(), levels * fiber.size() + fiber.edge_count());
    for (int f = 0; f < fiber.size(); ++f) {
        a.add_vertex({z_min, f});
        for (int z = z_min; z < z_max; ++z) a.add_edge({z, f}, {z + 1, f}, fiber);
    }
    for (auto [u, v] : fiber.edges()) a.add_edge({rung_level, u}, {rung_level, v}, fiber);
    return a;
}

// Random connected abstract network: a random attachment tree plus extra
// chords, with integer conductances in 1..max_conductance (kept integral so
// exact rational oracles can reproduce the solves).
inline Network random_connected_network(int n, int extra_edges, int max_conductance,
                                        RngStream& rng) {
    if (n < 2) throw std::invalid_argument("random network: need at least 2 vertices");
    Network net;
    for (int i = 0; i < n; ++i) net.add_vertex();
    auto random_conductance = [&] {
        return static_cast<double>(1 + rng.below(static_cast<std::uint64_t>(max_conductance)));
    };
    for (int i = 1; i < n; ++i)
        net.add_conductance(i, static_cast<int>(rng.below(i)), random_conductance());
    for (int e = 0; e < extra_edges; ++e) {
        int u = static_cast<int>(rng.below(n));
        int v = static_cast<int>(rng.below(n));
        if (u == v) continue;
        if (net.conductance(u, v) > 0) continue; // parallel edges would aggregate anyway
        net.add_conductance(u, v, random_conductance());
    }
    return net;
}

} // namespace orrw
