#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "orrw/network.hpp"

namespace orrw {

struct SolveOptions {
    double residual_tolerance = 1e-10;
    double max_condition_warn = 1e12;
};

// Antisymmetric edge function stored once per undirected edge with the
// canonical low-index -> high-index orientation.
class Flow {
public:
    void set(int u, int v, double value) {
        if (u == v) throw std::invalid_argument("flow: self-loop");
        if (u < v)
            values_[key(u, v)] = value;
        else
            values_[key(v, u)] = -value;
    }

    void add(int u, int v, double value) { set(u, v, get(u, v) + value); }

    double get(int u, int v) const {
        if (u < v) {
            auto it = values_.find(key(u, v));
            return it == values_.end() ? 0.0 : it->second;
        }
        auto it = values_.find(key(v, u));
        return it == values_.end() ? 0.0 : -it->second;
    }

    // Net flow out of a vertex, given the network adjacency.
    double divergence(const Network& net, int v) const {
        double s = 0;
        for (auto [w, c] : net.neighbors(v)) s += get(v, w);
        return s;
    }

    // fn(u, v, value) with u < v.
    template <typename Fn>
    void for_each(Fn&& fn) const {
        for (auto& [k, value] : values_) fn(static_cast<int>(k >> 32),
                                           static_cast<int>(static_cast<std::uint32_t>(k)), value);
    }

    std::size_t support_size() const { return values_.size(); }

private:
    static std::uint64_t key(int u, int v) {
        return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(u)) << 32) |
               static_cast<std::uint32_t>(v);
    }
    std::unordered_map<std::uint64_t, double> values_;
};

struct VoltagePotential {
    std::vector<double> value; // indexed by network vertex
    int source = -1;
    std::vector<int> sinks;
};

struct UnitCurrent {
    VoltagePotential voltage;
    Flow current;
};

namespace detail_solve {

// Vertices reachable from a in the network.
inline std::vector<int> component_of(const Network& net, int a) {
    std::vector<char> seen(net.size(), 0);
    std::deque<int> queue{a};
    seen[a] = 1;
    std::vector<int> out{a};
    while (!queue.empty()) {
        int u = queue.front();
        queue.pop_front();
        for (auto [v, c] : net.neighbors(u))
            if (!seen[v]) {
                seen[v] = 1;
                out.push_back(v);
                queue.push_back(v);
            }
    }
    return out;
}

} // namespace detail_solve

// Voltage of the unit current from a to Z: harmonic outside {a} u Z, zero on
// Z, v(a) equal to the effective resistance. Solved by dense LU with partial
// pivoting; window sizes in this project stay small enough for that.
inline UnitCurrent solve_unit_current(const Network& net, int a, const std::vector<int>& sinks,
                                      const SolveOptions& opts = {}) {
    if (sinks.empty()) throw std::invalid_argument("solve: sink set must be nonempty");
    std::vector<char> is_sink(net.size(), 0);
    for (int z : sinks) {
        if (z < 0 || z >= net.size()) throw std::out_of_range("solve: bad sink index");
        if (z == a) throw std::invalid_argument("solve: source belongs to sink set");
        is_sink[z] = 1;
    }

    std::vector<int> comp = detail_solve::component_of(net, a);
    bool touches_sink = false;
    for (int v : comp) touches_sink |= (is_sink[v] != 0);
    if (!touches_sink) throw std::invalid_argument("solve: source not connected to sinks");

    // Unknowns: component vertices that are not sinks.
    std::vector<int> unknown_of(net.size(), -1);
    std::vector<int> vertex_of;
    for (int v : comp)
        if (!is_sink[v]) {
            unknown_of[v] = static_cast<int>(vertex_of.size());
            vertex_of.push_back(v);
        }
    const int n = static_cast<int>(vertex_of.size());

    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    for (int row = 0; row < n; ++row) {
        int x = vertex_of[row];
        double px = 0;
        for (auto [y, c] : net.neighbors(x)) {
            px += c;
            if (unknown_of[y] >= 0) L(row, unknown_of[y]) -= c;
        }
        L(row, row) += px;
    }
    rhs(unknown_of[a]) = 1.0;

    Eigen::PartialPivLU<Eigen::MatrixXd> lu(L);
    Eigen::VectorXd x = lu.solve(rhs);

    VoltagePotential voltage;
    voltage.value.assign(net.size(), 0.0);
    voltage.source = a;
    voltage.sinks = sinks;
    for (int row = 0; row < n; ++row) voltage.value[vertex_of[row]] = x(row);

    // Residual check of the harmonic equations at interior vertices.
    for (int v : comp) {
        if (v == a || is_sink[v]) continue;
        double res = 0, pv = 0;
        for (auto [w, c] : net.neighbors(v)) {
            res += c * (voltage.value[v] - voltage.value[w]);
            pv += c;
        }
        if (std::abs(res) > opts.residual_tolerance * std::max(1.0, pv))
            throw std::runtime_error("solve: harmonic residual exceeds tolerance");
    }

    UnitCurrent out;
    out.voltage = std::move(voltage);
    for (int u : comp)
        for (auto [v, c] : net.neighbors(u))
            if (u < v) out.current.set(u, v, c * (out.voltage.value[u] - out.voltage.value[v]));

    double strength = out.current.divergence(net, a);
    if (std::abs(strength - 1.0) > 1e-8)
        throw std::runtime_error("solve: unit current strength check failed");
    return out;
}

inline UnitCurrent solve_unit_current(const Network& net, int a, int z,
                                      const SolveOptions& opts = {}) {
    return solve_unit_current(net, a, std::vector<int>{z}, opts);
}

// pi(a) * P_a[hit Z before returning to a]; the reciprocal of the voltage at
// the source under the unit current.
inline double effective_conductance(const Network& net, int a, const std::vector<int>& sinks,
                                    const SolveOptions& opts = {}) {
    UnitCurrent uc = solve_unit_current(net, a, sinks, opts);
    return 1.0 / uc.voltage.value[a];
}

inline double effective_resistance(const Network& net, int a, const std::vector<int>& sinks,
                                   const SolveOptions& opts = {}) {
    return 1.0 / effective_conductance(net, a, sinks, opts);
}

// Expected number of steps for the network walk from a to reach z, from the
// first-step equations with z absorbing.
inline double expected_hitting_time(const Network& net, int a, int z) {
    if (a == z) return 0.0;
    std::vector<int> comp = detail_solve::component_of(net, z);
    std::vector<int> unknown_of(net.size(), -1);
    std::vector<int> vertex_of;
    for (int v : comp)
        if (v != z) {
            unknown_of[v] = static_cast<int>(vertex_of.size());
            vertex_of.push_back(v);
        }
    if (a < 0 || a >= net.size() || unknown_of[a] < 0)
        throw std::invalid_argument("hitting time: source not connected to target");

    const int n = static_cast<int>(vertex_of.size());
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    for (int row = 0; row < n; ++row) {
        int x = vertex_of[row];
        double px = net.pi(x);
        M(row, row) = 1.0;
        for (auto [y, c] : net.neighbors(x))
            if (unknown_of[y] >= 0) M(row, unknown_of[y]) -= c / px;
        rhs(row) = 1.0;
    }
    Eigen::VectorXd h = Eigen::PartialPivLU<Eigen::MatrixXd>(M).solve(rhs);
    return h(unknown_of[a]);
}

// Energy dissipated by a flow: (1/2) sum over directed edges of r(e) j(e)^2.
inline double flow_energy(const Network& net, const Flow& flow) {
    double energy = 0;
    flow.for_each([&](int u, int v, double j) {
        if (j == 0) return;
        double c = net.conductance(u, v);
        if (c <= 0) throw std::invalid_argument("flow energy: flow on a missing edge");
        energy += j * j / c;
    });
    return energy;
}

// Probability, for each boundary directed edge of A, that the walk on the
// reinforced network exits A through that edge. Computed from the cemetery
// construction: the exit probability through e equals the voltage at the
// tail of e under the unit current from a to the cemetery.
struct ExitDistribution {
    std::vector<DirectedEdge> edges;
    std::vector<double> probability; // aligned with edges
};

inline ExitDistribution exit_edge_distribution(const Subgraph& A, double delta, CylinderVertex a,
                                               const FiberGraph& fiber,
                                               const SolveOptions& opts = {}) {
    if (!A.has_vertex(a)) throw std::invalid_argument("exit distribution: start not in subgraph");
    CemeteryNetwork cem = build_cemetery_network(A, delta, fiber);
    UnitCurrent uc = solve_unit_current(cem.net, cem.net.index_of(a), cem.cemetery, opts);

    ExitDistribution out;
    out.edges = cem.boundary;
    out.probability.reserve(out.edges.size());
    double total = 0;
    for (const DirectedEdge& e : out.edges) {
        double p = uc.voltage.value[cem.net.index_of(e.tail)];
        out.probability.push_back(p);
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-8)
        throw std::runtime_error("exit distribution: probabilities do not sum to one");
    return out;
}

// Deterministic all-pairs check of the exit-edge balance inequality
//   |P(exit via f1) - P(exit via f2)| <= d_A(f1.tail, f2.tail) / (1 + delta).
struct BalanceCheckResult {
    bool pass = true;
    double worst_slack = std::numeric_limits<double>::infinity(); // bound - |diff|, minimized
    std::size_t pairs_checked = 0;
};

inline BalanceCheckResult check_balance_inequality(const Subgraph& A, double delta,
                                                   CylinderVertex a, const FiberGraph& fiber,
                                                   double tolerance = 1e-8) {
    ExitDistribution dist = exit_edge_distribution(A, delta, a, fiber);

    // Intrinsic distances between distinct boundary tails, one BFS per tail.
    std::vector<CylinderVertex> tails;
    for (const DirectedEdge& e : dist.edges) tails.push_back(e.tail);
    std::vector<CylinderVertex> unique_tails = tails;
    std::sort(unique_tails.begin(), unique_tails.end());
    unique_tails.erase(std::unique(unique_tails.begin(), unique_tails.end()), unique_tails.end());

    std::unordered_map<std::uint64_t, std::unordered_map<std::uint64_t, int>> dists;
    for (CylinderVertex t : unique_tails) {
        detail::U64Map<std::int32_t> dist_map;
        dist_map.insert(vertex_key(t), 0);
        std::deque<CylinderVertex> queue{t};
        std::vector<CylinderVertex> nbrs;
        while (!queue.empty()) {
            CylinderVertex x = queue.front();
            queue.pop_front();
            std::int32_t d = *dist_map.find(vertex_key(x));
            A.neighbors_in(x, fiber, nbrs);
            for (CylinderVertex w : nbrs)
                if (dist_map.insert(vertex_key(w), d + 1).second) queue.push_back(w);
        }
        auto& row = dists[vertex_key(t)];
        for (CylinderVertex u : unique_tails) {
            const std::int32_t* d = dist_map.find(vertex_key(u));
            if (!d) throw std::runtime_error("balance check: subgraph must be connected");
            row[vertex_key(u)] = *d;
        }
    }

    BalanceCheckResult result;
    for (std::size_t i = 0; i < dist.edges.size(); ++i)
        for (std::size_t j = i + 1; j < dist.edges.size(); ++j) {
            double diff = std::abs(dist.probability[i] - dist.probability[j]);
            int d = dists[vertex_key(tails[i])][vertex_key(tails[j])];
            double bound = static_cast<double>(d) / (1.0 + delta);
            double slack = bound - diff;
            result.worst_slack = std::min(result.worst_slack, slack);
            if (slack < -tolerance) result.pass = false;
            ++result.pairs_checked;
        }
    return result;
}

} // namespace orrw
