#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <optional>
#include <stdexcept>
#include <vector>

#include "orrw/detail/hash.hpp"
#include "orrw/fiber.hpp"

namespace orrw {

// A vertex of the cylinder: an integer level plus a fiber index.
struct CylinderVertex {
    std::int32_t level = 0;
    std::int32_t fiber = 0;

    friend bool operator==(CylinderVertex a, CylinderVertex b) noexcept {
        return a.level == b.level && a.fiber == b.fiber;
    }
    friend bool operator<(CylinderVertex a, CylinderVertex b) noexcept {
        return a.level != b.level ? a.level < b.level : a.fiber < b.fiber;
    }
};

inline std::uint64_t vertex_key(CylinderVertex v) noexcept {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(v.level)) << 32) |
           static_cast<std::uint32_t>(v.fiber);
}

inline CylinderVertex vertex_from_key(std::uint64_t key) noexcept {
    return {static_cast<std::int32_t>(key >> 32),
            static_cast<std::int32_t>(static_cast<std::uint32_t>(key))};
}

// Undirected cylinder edge. Either horizontal (levels differ by one, same
// fiber index) or vertical (same level, fiber pair is an edge of the fiber).
struct CylinderEdge {
    CylinderVertex a, b;

    bool horizontal() const noexcept { return a.level != b.level; }

    friend bool operator==(const CylinderEdge& x, const CylinderEdge& y) noexcept {
        return (x.a == y.a && x.b == y.b) || (x.a == y.b && x.b == y.a);
    }
};

struct DirectedEdge {
    CylinderVertex tail, head;

    CylinderEdge undirected() const noexcept { return {tail, head}; }

    friend bool operator==(const DirectedEdge& x, const DirectedEdge& y) noexcept {
        return x.tail == y.tail && x.head == y.head;
    }
    friend bool operator<(const DirectedEdge& x, const DirectedEdge& y) noexcept {
        if (!(x.tail == y.tail)) return x.tail < y.tail;
        return x.head < y.head;
    }
};

// Canonical 64-bit key of an undirected edge:
//   horizontal {(z,f),(z+1,f)}  -> [min level z : 32][f : 16][0xffff : 16]
//   vertical   {(z,f),(z,g)}    -> [level z : 32][min(f,g) : 16][max(f,g) : 16]
// Fiber indices are < 4096, so the 0xffff marker cannot collide.
inline std::uint64_t edge_key(CylinderVertex a, CylinderVertex b) {
    if (a.level != b.level) {
        std::int32_t z = std::min(a.level, b.level);
        return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(z)) << 32) |
               (static_cast<std::uint64_t>(static_cast<std::uint16_t>(a.fiber)) << 16) | 0xffffULL;
    }
    std::uint16_t f = static_cast<std::uint16_t>(std::min(a.fiber, b.fiber));
    std::uint16_t g = static_cast<std::uint16_t>(std::max(a.fiber, b.fiber));
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a.level)) << 32) |
           (static_cast<std::uint64_t>(f) << 16) | g;
}

inline std::uint64_t edge_key(const CylinderEdge& e) { return edge_key(e.a, e.b); }

inline CylinderEdge edge_from_key(std::uint64_t key) {
    std::int32_t z = static_cast<std::int32_t>(key >> 32);
    std::uint16_t f = static_cast<std::uint16_t>(key >> 16);
    std::uint16_t g = static_cast<std::uint16_t>(key);
    if (g == 0xffff) return {{z, f}, {z + 1, f}};
    return {{z, f}, {z, g}};
}

// Checks the horizontal/vertical shape constraint against a fiber.
inline bool valid_cylinder_edge(const CylinderEdge& e, const FiberGraph& fiber) {
    if (e.a.fiber < 0 || e.a.fiber >= fiber.size() || e.b.fiber < 0 || e.b.fiber >= fiber.size())
        return false;
    if (e.a.level == e.b.level) return fiber.has_edge(e.a.fiber, e.b.fiber);
    if (std::abs(e.a.level - e.b.level) != 1) return false;
    return e.a.fiber == e.b.fiber;
}

// Enumerates the ambient cylinder neighbors of a vertex in a fixed order:
// level-1, level+1, then fiber neighbors in increasing index order.
inline void ambient_neighbors(CylinderVertex v, const FiberGraph& fiber,
                              std::vector<CylinderVertex>& out) {
    out.clear();
    out.push_back({v.level - 1, v.fiber});
    out.push_back({v.level + 1, v.fiber});
    for (int g : fiber.neighbors(v.fiber)) out.push_back({v.level, g});
}

// A finite subgraph of the cylinder: a vertex set plus a subset of the
// cylinder edges spanned by it. Immutable use is thread-safe.
class Subgraph {
public:
    Subgraph() = default;

    void reserve(std::size_t vertices, std::size_t edges) {
        vertices_.reserve(vertices);
        edges_.reserve(edges);
    }

    bool add_vertex(CylinderVertex v) { return vertices_.insert(vertex_key(v)); }

    // Inserts an edge and both endpoints; rejects ill-shaped pairs.
    bool add_edge(CylinderVertex a, CylinderVertex b, const FiberGraph& fiber) {
        if (!valid_cylinder_edge({a, b}, fiber))
            throw std::invalid_argument("subgraph: not a cylinder edge");
        vertices_.insert(vertex_key(a));
        vertices_.insert(vertex_key(b));
        return edges_.insert(edge_key(a, b));
    }

    bool has_vertex(CylinderVertex v) const { return vertices_.contains(vertex_key(v)); }
    bool has_edge(CylinderVertex a, CylinderVertex b) const {
        return edges_.contains(edge_key(a, b));
    }
    bool has_edge_key(std::uint64_t k) const { return edges_.contains(k); }

    std::size_t vertex_count() const { return vertices_.size(); }
    std::size_t edge_count() const { return edges_.size(); }

    std::vector<CylinderVertex> vertices() const {
        std::vector<CylinderVertex> out;
        out.reserve(vertices_.size());
        vertices_.for_each([&](std::uint64_t k) { out.push_back(vertex_from_key(k)); });
        std::sort(out.begin(), out.end());
        return out;
    }

    std::vector<CylinderEdge> edges() const {
        std::vector<std::uint64_t> keys = edges_.to_vector();
        std::sort(keys.begin(), keys.end());
        std::vector<CylinderEdge> out;
        out.reserve(keys.size());
        for (std::uint64_t k : keys) out.push_back(edge_from_key(k));
        return out;
    }

    template <typename Fn>
    void for_each_vertex(Fn&& fn) const {
        vertices_.for_each([&](std::uint64_t k) { fn(vertex_from_key(k)); });
    }

    // Neighbors of v inside the subgraph (edges of the subgraph only).
    void neighbors_in(CylinderVertex v, const FiberGraph& fiber,
                      std::vector<CylinderVertex>& out) const {
        out.clear();
        auto try_add = [&](CylinderVertex w) {
            if (edges_.contains(edge_key(v, w))) out.push_back(w);
        };
        try_add({v.level - 1, v.fiber});
        try_add({v.level + 1, v.fiber});
        for (int g : fiber.neighbors(v.fiber)) try_add({v.level, g});
    }

    bool connected(const FiberGraph& fiber) const {
        if (vertices_.empty()) return false;
        std::vector<CylinderVertex> verts = vertices();
        detail::U64Set seen(verts.size());
        std::deque<CylinderVertex> queue{verts.front()};
        seen.insert(vertex_key(verts.front()));
        std::size_t reached = 1;
        std::vector<CylinderVertex> nbrs;
        while (!queue.empty()) {
            CylinderVertex u = queue.front();
            queue.pop_front();
            neighbors_in(u, fiber, nbrs);
            for (CylinderVertex w : nbrs)
                if (seen.insert(vertex_key(w))) {
                    ++reached;
                    queue.push_back(w);
                }
        }
        return reached == vertices_.size();
    }

private:
    detail::U64Set vertices_;
    detail::U64Set edges_;
};

// Full window on levels z_min..z_max with every horizontal and vertical edge.
inline Subgraph build_cylinder_window(const FiberGraph& fiber, int z_min, int z_max) {
    if (z_min > z_max) throw std::invalid_argument("window: z_min must be <= z_max");
    Subgraph out;
    const int levels = z_max - z_min + 1;
    out.reserve(static_cast<std::size_t>(levels) * fiber.size(),
                static_cast<std::size_t>(levels) * (fiber.size() + fiber.edge_count()));
    for (int z = z_min; z <= z_max; ++z) {
        for (int f = 0; f < fiber.size(); ++f) out.add_vertex({z, f});
        for (auto [u, v] : fiber.edges()) out.add_edge({z, u}, {z, v}, fiber);
        if (z < z_max)
            for (int f = 0; f < fiber.size(); ++f) out.add_edge({z, f}, {z + 1, f}, fiber);
    }
    return out;
}

// Directed edges of the ambient cylinder whose tail lies in A but whose
// undirected pair is not an edge of A. Heads may or may not lie in A.
inline std::vector<DirectedEdge> edge_boundary(const Subgraph& A, const FiberGraph& fiber) {
    std::vector<DirectedEdge> out;
    std::vector<CylinderVertex> nbrs;
    for (CylinderVertex v : A.vertices()) {
        ambient_neighbors(v, fiber, nbrs);
        for (CylinderVertex w : nbrs)
            if (!A.has_edge(v, w)) out.push_back({v, w});
    }
    std::sort(out.begin(), out.end());
    return out;
}

// Tails of the edge boundary; always a subset of A's vertices.
inline std::vector<CylinderVertex> vertex_boundary(const Subgraph& A, const FiberGraph& fiber) {
    std::vector<CylinderVertex> out;
    std::vector<CylinderVertex> nbrs;
    for (CylinderVertex v : A.vertices()) {
        ambient_neighbors(v, fiber, nbrs);
        for (CylinderVertex w : nbrs)
            if (!A.has_edge(v, w)) {
                out.push_back(v);
                break;
            }
    }
    return out;
}

// Minimal number of A-edges on a path from u to v staying inside A.
// Empty result means u and v lie in different components of A.
inline std::optional<int> intrinsic_distance(const Subgraph& A, CylinderVertex u, CylinderVertex v,
                                             const FiberGraph& fiber) {
    if (!A.has_vertex(u) || !A.has_vertex(v))
        throw std::invalid_argument("intrinsic_distance: vertex not in subgraph");
    if (u == v) return 0;
    detail::U64Map<std::int32_t> dist;
    dist.insert(vertex_key(u), 0);
    std::deque<CylinderVertex> queue{u};
    std::vector<CylinderVertex> nbrs;
    while (!queue.empty()) {
        CylinderVertex x = queue.front();
        queue.pop_front();
        std::int32_t d = *dist.find(vertex_key(x));
        A.neighbors_in(x, fiber, nbrs);
        for (CylinderVertex w : nbrs) {
            auto [slot, fresh] = dist.insert(vertex_key(w), d + 1);
            if (fresh) {
                if (w == v) return d + 1;
                queue.push_back(w);
            }
        }
    }
    return std::nullopt;
}

// True iff all fiber vertices at level z and all vertical edges of that level
// belong to A (inclusion as graphs, not just vertex sets).
inline bool level_complete(const Subgraph& A, int z, const FiberGraph& fiber) {
    for (int f = 0; f < fiber.size(); ++f)
        if (!A.has_vertex({z, f})) return false;
    for (auto [u, v] : fiber.edges())
        if (!A.has_edge({z, u}, {z, v})) return false;
    return true;
}

// Number of levels between u and v (inclusive span) whose full level set is
// not contained in A.
inline int incomplete_level_distance(const Subgraph& A, CylinderVertex u, CylinderVertex v,
                                     const FiberGraph& fiber) {
    if (!A.has_vertex(u) || !A.has_vertex(v))
        throw std::invalid_argument("incomplete_level_distance: vertex not in subgraph");
    int lo = std::min(u.level, v.level);
    int hi = std::max(u.level, v.level);
    int count = 0;
    for (int z = lo; z <= hi; ++z)
        if (!level_complete(A, z, fiber)) ++count;
    return count;
}

} // namespace orrw
