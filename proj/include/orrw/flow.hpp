#pragma once

#include <algorithm>
#include <queue>
#include <stdexcept>
#include <vector>

#include "orrw/solve.hpp"

namespace orrw {

// Splits a cycle-free flow from a to the pair {b, z} into two flows:
// one from a to b (nothing enters or exits z) and one from a to z (nothing
// enters or exits b), with the same edgewise direction as the input and
// such that their sum is the input flow.
//
// Requirements on the input flow:
//   - every edge at a flows out of a; every edge at b and z flows in;
//   - the positively-oriented support contains no cycle.
//
// The a->b part is built backward from the sinks: a vertex is resolved once
// all its outgoing edges carry a defined value; its incoming edges then get
// the proportional share (outgoing total over incoming total). Among the
// resolvable vertices the smallest index is processed first, which makes the
// decomposition deterministic (it is not unique in general).
struct FlowDecomposition {
    Flow to_b;
    Flow to_z;
};

inline FlowDecomposition decompose_flow(const Flow& flow, int a, int b, int z) {
    if (a == b || a == z || b == z)
        throw std::invalid_argument("decompose_flow: a, b, z must be distinct");

    // Orient the support: an edge with positive value points tail -> head.
    // Values at roundoff scale relative to the largest edge are numerical
    // zeros; keeping them would fabricate sign violations and cycles.
    double max_abs = 0;
    flow.for_each([&](int, int, double value) { max_abs = std::max(max_abs, std::abs(value)); });
    const double zero_cut = max_abs * 1e-12;

    struct Arc {
        int tail, head;
        double value; // positive
    };
    std::vector<Arc> arcs;
    std::vector<std::pair<std::pair<int, int>, double>> dropped;
    int max_vertex = std::max({a, b, z});
    flow.for_each([&](int u, int v, double value) {
        if (std::abs(value) <= zero_cut) {
            if (value != 0) dropped.push_back({{u, v}, value});
            return;
        }
        if (value > 0)
            arcs.push_back({u, v, value});
        else
            arcs.push_back({v, u, -value});
        max_vertex = std::max({max_vertex, u, v});
    });
    const int n = max_vertex + 1;

    std::vector<std::vector<int>> out_arcs(n), in_arcs(n);
    for (int i = 0; i < static_cast<int>(arcs.size()); ++i) {
        out_arcs[arcs[i].tail].push_back(i);
        in_arcs[arcs[i].head].push_back(i);
    }

    if (!in_arcs[a].empty())
        throw std::invalid_argument("decompose_flow: flow enters the source");
    if (!out_arcs[b].empty())
        throw std::invalid_argument("decompose_flow: flow leaves sink b");
    if (!out_arcs[z].empty())
        throw std::invalid_argument("decompose_flow: flow leaves sink z");

    // Cycle rejection via Kahn's algorithm on the oriented support.
    {
        std::vector<int> indegree(n, 0);
        for (const Arc& arc : arcs) ++indegree[arc.head];
        std::vector<int> stack;
        for (int v = 0; v < n; ++v)
            if (indegree[v] == 0) stack.push_back(v);
        int processed = 0;
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            ++processed;
            for (int i : out_arcs[v])
                if (--indegree[arcs[i].head] == 0) stack.push_back(arcs[i].head);
        }
        if (processed != n) throw std::invalid_argument("decompose_flow: flow has a cycle");
    }

    // Value of the a->b component per arc; -1 marks undefined.
    std::vector<double> j(arcs.size(), -1.0);
    std::vector<int> undefined_out(n, 0);
    for (int v = 0; v < n; ++v) undefined_out[v] = static_cast<int>(out_arcs[v].size());

    std::priority_queue<int, std::vector<int>, std::greater<int>> ready;
    std::vector<char> queued(n, 0), done(n, 0);
    auto mark_ready = [&](int v) {
        if (undefined_out[v] == 0 && !queued[v] && v != b && v != z) {
            queued[v] = 1;
            ready.push(v);
        }
    };

    auto resolve_sink_edges = [&](int sink, bool keep) {
        for (int i : in_arcs[sink]) {
            j[i] = keep ? arcs[i].value : 0.0;
            --undefined_out[arcs[i].tail];
            mark_ready(arcs[i].tail);
        }
        done[sink] = 1;
    };
    resolve_sink_edges(b, /*keep=*/true);
    resolve_sink_edges(z, /*keep=*/false);
    for (int v = 0; v < n; ++v)
        if (v != b && v != z && !in_arcs[v].empty()) mark_ready(v);

    while (!ready.empty()) {
        int x = ready.top();
        ready.pop();
        if (done[x]) continue;
        done[x] = 1;
        double out_total = 0;
        for (int i : out_arcs[x]) out_total += j[i];
        double in_total = 0;
        for (int i : in_arcs[x]) in_total += arcs[i].value;
        // Conservation gives out <= in exactly; clamp away summation fuzz so
        // the edgewise dominance j <= i survives in floating point.
        double ratio = in_total > 0 ? std::min(1.0, std::max(0.0, out_total / in_total)) : 0.0;
        for (int i : in_arcs[x]) {
            j[i] = ratio * arcs[i].value;
            --undefined_out[arcs[i].tail];
            mark_ready(arcs[i].tail);
        }
    }

    for (double v : j)
        if (v < 0) throw std::logic_error("decompose_flow: exploration failed to resolve an edge");

    FlowDecomposition result;
    for (std::size_t i = 0; i < arcs.size(); ++i) {
        result.to_b.set(arcs[i].tail, arcs[i].head, j[i]);
        result.to_z.set(arcs[i].tail, arcs[i].head, arcs[i].value - j[i]);
    }
    // Numerical zeros still honor the exact edge identities: edges at b stay
    // in the a->b part, everything else goes to the a->z part.
    for (const auto& [edge, value] : dropped) {
        bool at_b = edge.first == b || edge.second == b;
        result.to_b.set(edge.first, edge.second, at_b ? value : 0.0);
        result.to_z.set(edge.first, edge.second, at_b ? 0.0 : value);
    }
    return result;
}

} // namespace orrw
