#pragma once

#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <deque>
#include <vector>

#include "orrw/config.hpp"
#include "orrw/flow.hpp"
#include "orrw/instances.hpp"
#include "orrw/parallel.hpp"
#include "orrw/report.hpp"
#include "orrw/solve.hpp"
#include "orrw/stats.hpp"
#include "orrw/walk.hpp"

namespace orrw {

namespace detail_exp {

class Stopwatch {
public:
    double ms() const {
        auto now = std::chrono::steady_clock::now();
        return std::chrono::duration<double, std::milli>(now - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

// Random start vertex inside a subgraph, by sorted vertex order.
inline CylinderVertex random_vertex(const Subgraph& a, RngStream& rng) {
    std::vector<CylinderVertex> verts = a.vertices();
    return verts[rng.below(verts.size())];
}

} // namespace detail_exp

// Deterministic all-pairs verification of the exit-edge balance inequality
// over seeded random connected subgraphs: for all boundary edges f1, f2,
//   |P(exit via f1) - P(exit via f2)| <= d_A(f1.tail, f2.tail) / (1 + delta).
inline ExperimentResult exp_balance(const ExperimentConfig& cfg) {
    cfg.validate();
    detail_exp::Stopwatch timer;
    const FiberGraph fiber = cfg.fiber();
    const double delta = cfg.delta.value();
    const double tolerance = 1e-8;

    RngStream rng(cfg.seed, 0);
    double worst_violation = -std::numeric_limits<double>::infinity();
    std::uint64_t pairs = 0;
    for (std::uint64_t s = 0; s < cfg.samples; ++s) {
        std::size_t target = 3 + rng.below(40);
        Subgraph a = random_connected_subgraph(fiber, 8, target, rng);
        CylinderVertex start = detail_exp::random_vertex(a, rng);
        BalanceCheckResult res = check_balance_inequality(a, delta, start, fiber, tolerance);
        worst_violation = std::max(worst_violation, -res.worst_slack);
        pairs += res.pairs_checked;
    }

    BoundCheckReport rep;
    rep.name = "balance";
    rep.estimate = worst_violation; // max over pairs of |diff| - bound
    rep.ci_low = rep.ci_high = worst_violation;
    rep.bound = 0.0;
    rep.verdict = worst_violation <= tolerance ? Verdict::pass : Verdict::fail;
    rep.replications = cfg.samples;
    rep.wall_clock_ms = timer.ms();
    rep.params = {{"delta", delta},
                  {"pairs_checked", static_cast<double>(pairs)},
                  {"gamma_size", static_cast<double>(fiber.size())},
                  {"tolerance", tolerance}};

    ExperimentResult result;
    result.experiment = "balance";
    result.checks.push_back(std::move(rep));
    return result;
}

// Monte Carlo check that the expected net crossings of an edge before
// absorption equal the unit current through it. One row per sampled edge.
inline ExperimentResult exp_current_crossings(const ExperimentConfig& cfg) {
    cfg.validate();
    ExperimentResult result;
    result.experiment = "crossings";

    const int n = 20;
    const int edges_per_network = 3;
    for (std::uint64_t s = 0; s < cfg.samples; ++s) {
        detail_exp::Stopwatch timer;
        RngStream setup(cfg.seed, 1000 + s);
        Network net = random_connected_network(n, 15, 4, setup);
        const int source = 0;
        const int sink = n - 1;
        UnitCurrent uc = solve_unit_current(net, source, sink);

        auto all_edges = net.edges();
        std::vector<std::pair<int, int>> chosen;
        while (chosen.size() < static_cast<std::size_t>(edges_per_network)) {
            auto [u, v, c] = all_edges[setup.below(all_edges.size())];
            bool dup = false;
            for (auto [cu, cv] : chosen) dup |= (cu == u && cv == v);
            if (!dup) chosen.emplace_back(u, v);
        }

        // One walk per replica; per-edge signed crossing counts.
        std::vector<std::array<std::int64_t, 3>> counts(cfg.replications);
        parallel_replicas(cfg.replications, [&](std::uint64_t rep) {
            RngStream rng(cfg.seed, (s << 32) ^ rep);
            std::array<std::int64_t, 3> c{0, 0, 0};
            int pos = source;
            while (pos != sink) {
                int nxt = network_walk_step(net, pos, rng);
                for (int e = 0; e < edges_per_network; ++e) {
                    if (pos == chosen[e].first && nxt == chosen[e].second) ++c[e];
                    if (pos == chosen[e].second && nxt == chosen[e].first) --c[e];
                }
                pos = nxt;
            }
            counts[rep] = c;
        });

        for (int e = 0; e < edges_per_network; ++e) {
            std::vector<double> xs(cfg.replications);
            for (std::uint64_t rep = 0; rep < cfg.replications; ++rep)
                xs[rep] = static_cast<double>(counts[rep][e]);
            SampleSummary sum = summarize(xs);
            double current = uc.current.get(chosen[e].first, chosen[e].second);

            BoundCheckReport rep_out;
            rep_out.name = "crossings";
            rep_out.estimate = sum.mean;
            // Zero-current edges (dead-end branches) have zero sample
            // variance; the band keeps a floor at the solver's noise scale.
            double half = std::max(4 * sum.standard_error, 1e-9);
            rep_out.ci_low = sum.mean - half;
            rep_out.ci_high = sum.mean + half;
            rep_out.bound = current;
            rep_out.verdict = (current >= rep_out.ci_low && current <= rep_out.ci_high)
                                  ? Verdict::pass
                                  : Verdict::fail;
            rep_out.replications = cfg.replications;
            rep_out.wall_clock_ms = timer.ms();
            rep_out.params = {{"network", static_cast<double>(s)},
                              {"edge_u", static_cast<double>(chosen[e].first)},
                              {"edge_v", static_cast<double>(chosen[e].second)},
                              {"z_factor", 4.0}};
            result.checks.push_back(std::move(rep_out));
        }
    }
    return result;
}

// Commute-time identity on random networks:
//   E_a[H_z] + E_z[H_a] = R(a <-> z) * sum_x pi(x), checked to 1e-8.
inline ExperimentResult exp_commute(const ExperimentConfig& cfg) {
    cfg.validate();
    detail_exp::Stopwatch timer;
    double worst = 0;
    for (std::uint64_t s = 0; s < cfg.samples; ++s) {
        RngStream rng(cfg.seed, 2000 + s);
        int n = 5 + static_cast<int>(rng.below(8));
        Network net = random_connected_network(n, static_cast<int>(rng.below(2 * n)), 4, rng);
        int a = 0, z = n - 1;
        double commute = expected_hitting_time(net, a, z) + expected_hitting_time(net, z, a);
        double identity = effective_resistance(net, a, {z}) * net.total_pi();
        worst = std::max(worst, std::abs(commute - identity));
    }

    BoundCheckReport rep;
    rep.name = "commute";
    rep.estimate = worst;
    rep.ci_low = rep.ci_high = worst;
    rep.bound = 1e-8;
    rep.verdict = worst <= 1e-8 ? Verdict::pass : Verdict::fail;
    rep.replications = cfg.samples;
    rep.wall_clock_ms = timer.ms();

    ExperimentResult result;
    result.experiment = "commute";
    result.checks.push_back(std::move(rep));
    return result;
}

// Monotonicity of the effective conductance under raising one conductance,
// and minimality of the unit current's energy among unit flows.
inline ExperimentResult exp_network_laws(const ExperimentConfig& cfg) {
    cfg.validate();
    ExperimentResult result;
    result.experiment = "network-laws";
    const double tol = 1e-10;

    {
        detail_exp::Stopwatch timer;
        double worst_drop = std::numeric_limits<double>::infinity();
        for (std::uint64_t s = 0; s < cfg.samples; ++s) {
            RngStream rng(cfg.seed, 3000 + s);
            int n = 6 + static_cast<int>(rng.below(8));
            Network net = random_connected_network(n, static_cast<int>(rng.below(2 * n)), 4, rng);
            int a = 0, z = n - 1;
            double base = effective_conductance(net, a, {z});

            auto edges = net.edges();
            auto [u, v, c] = edges[rng.below(edges.size())];
            double factor = 1.0 + rng.next_double();
            Network raised;
            for (int i = 0; i < net.size(); ++i) raised.add_vertex();
            for (auto [eu, ev, ec] : edges)
                raised.add_conductance(eu, ev, (eu == u && ev == v) ? ec * factor : ec);
            double after = effective_conductance(raised, a, {z});
            worst_drop = std::min(worst_drop, after - base);
        }
        BoundCheckReport rep;
        rep.name = "rayleigh-monotonicity";
        rep.estimate = worst_drop; // most negative observed change
        rep.ci_low = rep.ci_high = worst_drop;
        rep.bound = 0.0;
        rep.verdict = worst_drop >= -tol ? Verdict::pass : Verdict::fail;
        rep.replications = cfg.samples;
        rep.wall_clock_ms = timer.ms();
        result.checks.push_back(std::move(rep));
    }

    {
        detail_exp::Stopwatch timer;
        double worst_gap = std::numeric_limits<double>::infinity();
        for (std::uint64_t s = 0; s < cfg.samples; ++s) {
            RngStream rng(cfg.seed, 4000 + s);
            int n = 6 + static_cast<int>(rng.below(8));
            Network net = random_connected_network(n, 4 + static_cast<int>(rng.below(2 * n)), 4,
                                                   rng);
            int a = 0, z = n - 1;
            UnitCurrent uc = solve_unit_current(net, a, z);
            double base_energy = flow_energy(net, uc.current);

            // Perturb with a small flow around a cycle (tree path + chord).
            std::vector<int> parent(net.size(), -1);
            std::vector<char> seen(net.size(), 0);
            std::deque<int> queue{0};
            seen[0] = 1;
            while (!queue.empty()) {
                int x = queue.front();
                queue.pop_front();
                for (auto [y, c] : net.neighbors(x))
                    if (!seen[y]) {
                        seen[y] = 1;
                        parent[y] = x;
                        queue.push_back(y);
                    }
            }
            auto edges = net.edges();
            std::vector<std::pair<int, int>> chords;
            for (auto [u, v, c] : edges)
                if (parent[u] != v && parent[v] != u) chords.emplace_back(u, v);
            if (chords.empty()) continue;
            auto [cu, cv] = chords[rng.below(chords.size())];

            auto path_to_root = [&](int x) {
                std::vector<int> path{x};
                while (parent[path.back()] >= 0) path.push_back(parent[path.back()]);
                return path;
            };
            std::vector<int> pu = path_to_root(cu), pv = path_to_root(cv);
            while (pu.size() > 1 && pv.size() > 1 && pu[pu.size() - 2] == pv[pv.size() - 2]) {
                pu.pop_back();
                pv.pop_back();
            }
            // Circulation around the cycle chord + tree path: cu -> cv along
            // the chord, cv up to the meeting point, then down to cu.
            double eps = (0.05 + 0.45 * rng.next_double()) * (rng.bernoulli(0.5) ? 1 : -1);
            Flow perturbed = uc.current;
            perturbed.add(cu, cv, eps);
            for (std::size_t i = 0; i + 1 < pv.size(); ++i) perturbed.add(pv[i], pv[i + 1], eps);
            for (std::size_t i = 0; i + 1 < pu.size(); ++i) perturbed.add(pu[i + 1], pu[i], eps);

            // Still a unit flow; its energy cannot go below the current's.
            for (int v = 0; v < n; ++v) {
                double want = v == a ? 1.0 : (v == z ? -1.0 : 0.0);
                if (std::abs(perturbed.divergence(net, v) - want) > 1e-9)
                    throw std::logic_error("thomson check: cycle flow broke conservation");
            }
            worst_gap = std::min(worst_gap, flow_energy(net, perturbed) - base_energy);
        }
        BoundCheckReport rep;
        rep.name = "thomson-minimality";
        rep.estimate = worst_gap;
        rep.ci_low = rep.ci_high = worst_gap;
        rep.bound = 0.0;
        rep.verdict = worst_gap >= -tol ? Verdict::pass : Verdict::fail;
        rep.replications = cfg.samples;
        rep.wall_clock_ms = timer.ms();
        result.checks.push_back(std::move(rep));
    }
    return result;
}

// Property verification of the cycle-free flow decomposition on random
// inputs: half unit currents, half superpositions of random forward paths
// on random acyclic orientations.
inline ExperimentResult exp_flow_decomposition(const ExperimentConfig& cfg) {
    cfg.validate();
    detail_exp::Stopwatch timer;
    std::uint64_t failures = 0;
    double worst_excess = 0; // worst violation of the dominance inequalities

    for (std::uint64_t s = 0; s < cfg.samples; ++s) {
        RngStream rng(cfg.seed, 5000 + s);
        int n = 6 + static_cast<int>(rng.below(8));
        int a = 0, b = n - 2, z = n - 1;
        Flow input;
        Network net = random_connected_network(n, 6 + static_cast<int>(rng.below(n)), 4, rng);

        if (s % 2 == 0) {
            // A unit current into {b, z} satisfies the source/sink sign
            // conditions and cannot have a cycle.
            UnitCurrent uc = solve_unit_current(net, a, std::vector<int>{b, z});
            input = uc.current;
        } else {
            // Random acyclic orientation: vertices in index order, edges
            // forward; every non-sink vertex gets an outgoing edge, then
            // random unit path flows are pushed from the source.
            std::vector<std::vector<int>> out(n);
            for (auto [u, v, c] : net.edges())
                if (u != b && u != z) out[u].push_back(v); // canonical u < v orients forward
            int committed = 0;
            for (int attempt = 0; attempt < 64 && committed < 8; ++attempt) {
                int pos = a;
                double amount = 0.25 + rng.next_double();
                std::vector<std::pair<int, int>> path;
                while (pos != b && pos != z && !out[pos].empty()) {
                    int nxt = out[pos][rng.below(out[pos].size())];
                    path.emplace_back(pos, nxt);
                    pos = nxt;
                }
                if (pos != b && pos != z) continue; // dead end off the sinks
                for (auto [u, v] : path) input.add(u, v, amount);
                ++committed;
            }
            if (committed == 0) continue; // degenerate draw, skip the sample
        }

        FlowDecomposition dec = decompose_flow(input, a, b, z);
        double strength_b = -dec.to_b.divergence(net, b);

        bool ok = true;
        // (a) the a->b part matches the input on every edge into b.
        for (auto [w, c] : net.neighbors(b))
            ok &= dec.to_b.get(w, b) == input.get(w, b);
        // (b) nothing flows in or out of z in the a->b part.
        for (auto [w, c] : net.neighbors(z)) ok &= dec.to_b.get(w, z) == 0.0;
        // (c)+(d) same direction, dominated magnitude, for both parts.
        input.for_each([&](int u, int v, double value) {
            double jb = dec.to_b.get(u, v), jz = dec.to_z.get(u, v);
            ok &= value * jb >= 0.0 && value * jz >= 0.0;
            ok &= std::abs(jb) <= std::abs(value) && std::abs(jz) <= std::abs(value);
            ok &= jb + jz == value || std::abs(jb + jz - value) <= 1e-15 * std::abs(value);
            // (e) no edge value of the a->b part above its strength.
            double excess = std::abs(jb) - strength_b;
            worst_excess = std::max(worst_excess, excess);
            ok &= excess <= 1e-9 * std::max(1.0, strength_b);
        });
        // The a->b part is a flow: conserved off {a, b}.
        for (int v = 0; v < n; ++v) {
            if (v == a || v == b) continue;
            ok &= std::abs(dec.to_b.divergence(net, v)) <= 1e-9;
        }
        if (!ok) ++failures;
    }

    BoundCheckReport rep;
    rep.name = "flow-decomposition";
    rep.estimate = static_cast<double>(failures);
    rep.ci_low = rep.ci_high = rep.estimate;
    rep.bound = 0.0;
    rep.verdict = failures == 0 ? Verdict::pass : Verdict::fail;
    rep.replications = cfg.samples;
    rep.wall_clock_ms = timer.ms();
    rep.params = {{"worst_strength_excess", worst_excess}};

    ExperimentResult result;
    result.experiment = "flowdecomp";
    result.checks.push_back(std::move(rep));
    return result;
}

// Deterministic shunt-network inequality: the solver probability of meeting
// the merged far level before the shunt vertex is at most
// 2 |Gamma|^2 / (eta d^2).
inline ExperimentResult exp_shunt(const ExperimentConfig& cfg) {
    cfg.validate();
    detail_exp::Stopwatch timer;
    const FiberGraph fiber = cfg.fiber();
    if (cfg.d < 1) throw std::invalid_argument("shunt: d must be >= 1");
    if (cfg.r < cfg.d + 1) throw std::invalid_argument("shunt: need r >= d + 1");

    Subgraph a = build_cylinder_window(fiber, 0, static_cast<int>(cfg.r));
    std::vector<int> shunt_levels;
    for (int s = 1; s <= static_cast<int>(cfg.d); ++s) shunt_levels.push_back(s);
    ShuntNetwork shunt =
        build_shunt_network(a, {0, 0}, shunt_levels, static_cast<int>(cfg.r), cfg.eta, fiber);
    UnitCurrent uc = solve_unit_current(shunt.net, shunt.source,
                                        std::vector<int>{shunt.sink_b, shunt.sink_z});
    double p_hit_b = -uc.current.divergence(shunt.net, shunt.sink_b);

    double gamma = static_cast<double>(fiber.size());
    double d = static_cast<double>(cfg.d);
    double bound = 2.0 * gamma * gamma / (cfg.eta * d * d);

    BoundCheckReport rep;
    rep.name = "shunt";
    rep.estimate = p_hit_b;
    rep.ci_low = rep.ci_high = p_hit_b;
    rep.bound = bound;
    rep.vacuous = bound >= 1.0;
    rep.verdict = rep.vacuous ? Verdict::vacuous
                              : (p_hit_b <= bound + 1e-10 ? Verdict::pass : Verdict::fail);
    rep.replications = 1;
    rep.wall_clock_ms = timer.ms();
    rep.params = {{"gamma_size", gamma}, {"d", d}, {"eta", cfg.eta},
                  {"r", static_cast<double>(cfg.r)}};

    ExperimentResult result;
    result.experiment = "shunt";
    result.checks.push_back(std::move(rep));
    return result;
}

} // namespace orrw
