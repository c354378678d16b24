#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "orrw/cylinder.hpp"

namespace orrw {

// A finite electrical network: dense vertex indices, positive conductances,
// parallel edges pre-aggregated by conductance summation. Vertices may be
// cylinder vertices or free-standing auxiliaries (cemetery, merged sinks).
class Network {
public:
    int add_vertex() {
        adjacency_.emplace_back();
        return static_cast<int>(adjacency_.size()) - 1;
    }

    // Idempotent: one dense index per distinct cylinder vertex.
    int add_cylinder_vertex(CylinderVertex v) {
        auto [slot, fresh] = cyl_index_.insert(vertex_key(v), 0);
        if (fresh) *slot = add_vertex();
        return *slot;
    }

    // Index of a previously added cylinder vertex, or -1.
    int index_of(CylinderVertex v) const {
        const int* slot = cyl_index_.find(vertex_key(v));
        return slot ? *slot : -1;
    }

    // Adds conductance c between u and v, summing with any existing edge.
    void add_conductance(int u, int v, double c) {
        if (u == v) return; // self-loops carry no current and no information
        if (c <= 0) throw std::invalid_argument("network: conductance must be positive");
        check_index(u);
        check_index(v);
        for (auto& [w, cw] : adjacency_[u])
            if (w == v) {
                cw += c;
                for (auto& [x, cx] : adjacency_[v])
                    if (x == u) cx += c;
                return;
            }
        adjacency_[u].emplace_back(v, c);
        adjacency_[v].emplace_back(u, c);
    }

    int size() const noexcept { return static_cast<int>(adjacency_.size()); }

    const std::vector<std::pair<int, double>>& neighbors(int v) const {
        check_index(v);
        return adjacency_[v];
    }

    double conductance(int u, int v) const {
        for (auto [w, c] : neighbors(u))
            if (w == v) return c;
        return 0.0;
    }

    // Total conductance at a vertex (the reversible measure).
    double pi(int v) const {
        double s = 0;
        for (auto [w, c] : neighbors(v)) s += c;
        return s;
    }

    double total_pi() const {
        double s = 0;
        for (int v = 0; v < size(); ++v) s += pi(v);
        return s;
    }

    // Canonical undirected edge list (u < v).
    std::vector<std::tuple<int, int, double>> edges() const {
        std::vector<std::tuple<int, int, double>> out;
        for (int u = 0; u < size(); ++u)
            for (auto [v, c] : adjacency_[u])
                if (u < v) out.emplace_back(u, v, c);
        return out;
    }

private:
    void check_index(int v) const {
        if (v < 0 || v >= size()) throw std::out_of_range("network: bad vertex index");
    }

    std::vector<std::vector<std::pair<int, double>>> adjacency_;
    detail::U64Map<int> cyl_index_;
};

// Network on a window with conductance 1+delta on edges of A, 1 elsewhere.
// A must be contained in the window (vertices and edges).
inline Network orrw_conductances(const Subgraph& A, const Subgraph& window, double delta) {
    if (delta < 0) throw std::invalid_argument("orrw_conductances: delta must be >= 0");
    Network net;
    for (CylinderVertex v : window.vertices()) net.add_cylinder_vertex(v);
    A.for_each_vertex([&](CylinderVertex v) {
        if (!window.has_vertex(v))
            throw std::invalid_argument("orrw_conductances: A not contained in window");
    });
    for (const CylinderEdge& e : A.edges())
        if (!window.has_edge(e.a, e.b))
            throw std::invalid_argument("orrw_conductances: A not contained in window");
    for (const CylinderEdge& e : window.edges()) {
        double c = A.has_edge(e.a, e.b) ? 1.0 + delta : 1.0;
        net.add_conductance(net.index_of(e.a), net.index_of(e.b), c);
    }
    return net;
}

// Cemetery augmentation of a finite connected subgraph: interior edges get
// weight 1+delta, and every boundary directed edge contributes one unit edge
// from its tail to an absorbing vertex (parallel edges aggregated).
struct CemeteryNetwork {
    Network net;
    int cemetery = -1;
    std::vector<DirectedEdge> boundary; // the original boundary edges, sorted
};

inline CemeteryNetwork build_cemetery_network(const Subgraph& A, double delta,
                                              const FiberGraph& fiber) {
    CemeteryNetwork out;
    for (CylinderVertex v : A.vertices()) out.net.add_cylinder_vertex(v);
    for (const CylinderEdge& e : A.edges())
        out.net.add_conductance(out.net.index_of(e.a), out.net.index_of(e.b), 1.0 + delta);
    out.cemetery = out.net.add_vertex();
    out.boundary = edge_boundary(A, fiber);
    if (out.boundary.empty())
        throw std::invalid_argument("cemetery network: subgraph has empty edge boundary");
    for (const DirectedEdge& e : out.boundary)
        out.net.add_conductance(out.net.index_of(e.tail), out.cemetery, 1.0);
    return out;
}

// Shunt modification: unit conductances on the edges of A left of level r,
// all vertices of A at level r merged into a single sink b, and an auxiliary
// vertex z attached with conductance eta to every A-vertex at a level in S.
struct ShuntNetwork {
    Network net;
    int source = -1; // a
    int sink_b = -1; // merged level-r vertices
    int sink_z = -1; // auxiliary shunt vertex
};

inline ShuntNetwork build_shunt_network(const Subgraph& A, CylinderVertex a,
                                        const std::vector<int>& shunt_levels, int r, double eta,
                                        const FiberGraph& fiber) {
    if (eta <= 0) throw std::invalid_argument("shunt network: eta must be positive");
    if (!A.has_vertex(a)) throw std::invalid_argument("shunt network: source not in subgraph");
    if (a.level >= r) throw std::invalid_argument("shunt network: source must be left of level r");
    for (int s : shunt_levels)
        if (s <= a.level || s >= r)
            throw std::invalid_argument("shunt network: shunt levels must lie strictly between "
                                        "the source level and r");
    bool has_level_r = false;
    A.for_each_vertex([&](CylinderVertex v) { has_level_r |= (v.level == r); });
    if (!has_level_r) throw std::invalid_argument("shunt network: no vertex at level r");

    ShuntNetwork out;
    out.sink_b = out.net.add_vertex();
    // Vertices at levels beyond r are unreachable before the walk meets b.
    auto resolve = [&](CylinderVertex v) {
        return v.level >= r ? out.sink_b : out.net.add_cylinder_vertex(v);
    };
    for (const CylinderEdge& e : A.edges()) {
        if (e.a.level >= r && e.b.level >= r) continue;
        out.net.add_conductance(resolve(e.a), resolve(e.b), 1.0);
    }
    out.sink_z = out.net.add_vertex();
    detail::U64Set shunted;
    for (int s : shunt_levels) shunted.insert(static_cast<std::uint32_t>(s));
    A.for_each_vertex([&](CylinderVertex v) {
        if (v.level < r && shunted.contains(static_cast<std::uint32_t>(v.level))) {
            int idx = out.net.index_of(v);
            if (idx >= 0) out.net.add_conductance(idx, out.sink_z, eta);
        }
    });
    out.source = out.net.index_of(a);
    if (out.source < 0) throw std::invalid_argument("shunt network: source vanished from network");
    return out;
}

} // namespace orrw
