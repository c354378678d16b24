#pragma once

#include <bit>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "orrw/cylinder.hpp"
#include "orrw/rational.hpp"
#include "orrw/rng.hpp"

namespace orrw {

// One step of the reversible walk on a conductance network: the neighbor is
// chosen with probability proportional to the edge weight.
template <typename Net>
inline int network_walk_step(const Net& net, int position, RngStream& rng) {
    const auto& nbrs = net.neighbors(position);
    if (nbrs.empty()) throw std::invalid_argument("network walk: isolated vertex");
    double total = 0;
    for (auto [w, c] : nbrs) total += c;
    double r = rng.next_double() * total;
    for (std::size_t i = 0; i + 1 < nbrs.size(); ++i) {
        if (r < nbrs[i].second) return nbrs[i].first;
        r -= nbrs[i].second;
    }
    return nbrs.back().first;
}

// Once-reinforced walk on the cylinder. An edge weighs 1 until its first
// crossing and 1+delta afterwards; delta is kept as an exact rational so the
// one-step law and the crossing martingale are computed in integers.
//
// Per visited vertex the walker stores a bitmask of crossed incident edges,
// indexed by the fixed neighbor order: slot 0 = level-1, slot 1 = level+1,
// slots 2+ = fiber neighbors in increasing index order. One hash lookup per
// step keeps the loop fast enough for the billion-step experiment runs.
class OrrwWalker {
public:
    struct TraceEvent {
        std::uint64_t step;
        DirectedEdge edge; // first crossing, oriented as taken
    };

    // The walker keeps a reference to the fiber; a temporary would dangle.
    OrrwWalker(FiberGraph&& fiber, Rational delta, CylinderVertex start) = delete;

    OrrwWalker(const FiberGraph& fiber, Rational delta, CylinderVertex start)
        : fiber_(&fiber), delta_(delta), pos_(start) {
        if (fiber.max_degree() + 2 > 32)
            throw std::invalid_argument("walker: fiber degree too large for edge masks");
        if (start.fiber < 0 || start.fiber >= fiber.size())
            throw std::invalid_argument("walker: start vertex outside the cylinder");
        weight_fresh_ = static_cast<std::uint64_t>(delta_.den());
        weight_bonus_ = static_cast<std::uint64_t>(delta_.num());
        masks_.insert(vertex_key(start), 0u);
        min_level_ = max_level_ = start.level;
        bump_level_visit(start.level);
    }

    const FiberGraph& fiber() const noexcept { return *fiber_; }
    Rational delta() const noexcept { return delta_; }
    CylinderVertex position() const noexcept { return pos_; }
    std::uint64_t step_count() const noexcept { return steps_; }
    std::uint64_t crossed_edge_count() const noexcept { return crossed_edges_; }
    std::uint64_t vertex_count() const noexcept { return masks_.size(); }
    std::int32_t left_extent() const noexcept { return min_level_; }
    std::int32_t right_extent() const noexcept { return max_level_; }

    // Signed count of first crossings of horizontal edges (rightward minus
    // leftward); the accumulated drift equals delta times this count.
    std::int64_t signed_horizontal_crossings() const noexcept { return signed_horizontal_; }
    double drift_total() const noexcept {
        return delta_.value() * static_cast<double>(signed_horizontal_);
    }

    // Martingale value: level coordinate plus delta times the signed count
    // of first crossings of horizontal edges. Exact as a rational with the
    // denominator of delta.
    std::int64_t martingale_numerator() const noexcept {
        return delta_.den() * static_cast<std::int64_t>(pos_.level) +
               delta_.num() * signed_horizontal_;
    }
    double martingale() const noexcept {
        return static_cast<double>(martingale_numerator()) / static_cast<double>(delta_.den());
    }

    void enable_event_log() { log_enabled_ = true; }
    const std::vector<TraceEvent>& event_log() const noexcept { return events_; }

    bool visited(CylinderVertex v) const { return masks_.find(vertex_key(v)) != nullptr; }

    bool has_crossed(CylinderVertex u, CylinderVertex v) const {
        const std::uint32_t* mask = masks_.find(vertex_key(u));
        if (!mask) return false;
        int slot = slot_of(u, v);
        return slot >= 0 && ((*mask >> slot) & 1u);
    }

    // True iff every fiber vertex at this level is visited and every vertical
    // edge of the level is crossed. A single-vertex fiber has no vertical
    // edges, so one visit completes the level.
    bool level_is_complete(std::int32_t z) const {
        const std::uint64_t* stats = levels_.find(level_key(z));
        if (!stats) return false;
        return is_complete_value(*stats);
    }

    // Levels that became complete during the most recent step.
    const std::vector<std::int32_t>& newly_completed_levels() const noexcept {
        return newly_completed_;
    }

    // Performs one reinforced step; returns the directed edge taken and
    // whether it was a first crossing.
    std::pair<DirectedEdge, bool> step(RngStream& rng) {
        newly_completed_.clear();
        std::uint32_t* mask = masks_.find(vertex_key(pos_));
        const std::vector<int>& fnb = fiber_->neighbors(pos_.fiber);
        const unsigned deg = 2 + static_cast<unsigned>(fnb.size());
        const std::uint64_t total =
            weight_fresh_ * deg + weight_bonus_ * std::popcount(*mask);

        std::uint64_t r = rng.below(total);
        unsigned slot = 0;
        while (true) {
            std::uint64_t w = weight_fresh_ + ((*mask >> slot) & 1u) * weight_bonus_;
            if (r < w || slot + 1 == deg) break;
            r -= w;
            ++slot;
        }

        CylinderVertex next = slot == 0   ? CylinderVertex{pos_.level - 1, pos_.fiber}
                              : slot == 1 ? CylinderVertex{pos_.level + 1, pos_.fiber}
                                          : CylinderVertex{pos_.level, fnb[slot - 2]};
        const bool fresh = ((*mask >> slot) & 1u) == 0;
        ++steps_;
        DirectedEdge taken{pos_, next};
        if (fresh) record_first_crossing(mask, slot, taken);
        pos_ = next;
        return {taken, fresh};
    }

    // Rebuilds the range as an explicit subgraph (visited vertices plus
    // crossed edges).
    Subgraph export_range() const {
        Subgraph out;
        out.reserve(masks_.size(), crossed_edges_);
        masks_.for_each([&](std::uint64_t key, std::uint32_t mask) {
            CylinderVertex v = vertex_from_key(key);
            out.add_vertex(v);
            if (mask & 1u) out.add_edge(v, {v.level - 1, v.fiber}, *fiber_);
            if (mask & 2u) out.add_edge(v, {v.level + 1, v.fiber}, *fiber_);
            const std::vector<int>& fnb = fiber_->neighbors(v.fiber);
            for (std::size_t i = 0; i < fnb.size(); ++i)
                if ((mask >> (2 + i)) & 1u) out.add_edge(v, {v.level, fnb[i]}, *fiber_);
        });
        return out;
    }

private:
    static std::uint64_t level_key(std::int32_t z) noexcept {
        return static_cast<std::uint32_t>(z);
    }

    bool is_complete_value(std::uint64_t stats) const noexcept {
        std::uint32_t visited = static_cast<std::uint32_t>(stats >> 32);
        std::uint32_t vertical = static_cast<std::uint32_t>(stats);
        return visited == static_cast<std::uint32_t>(fiber_->size()) &&
               vertical == static_cast<std::uint32_t>(fiber_->edge_count());
    }

    int slot_of(CylinderVertex u, CylinderVertex v) const {
        if (v.level == u.level - 1 && v.fiber == u.fiber) return 0;
        if (v.level == u.level + 1 && v.fiber == u.fiber) return 1;
        if (v.level == u.level) {
            const std::vector<int>& fnb = fiber_->neighbors(u.fiber);
            for (std::size_t i = 0; i < fnb.size(); ++i)
                if (fnb[i] == v.fiber) return static_cast<int>(2 + i);
        }
        return -1;
    }

    void bump_level_visit(std::int32_t z) {
        auto [stats, fresh] = levels_.insert(level_key(z), 0);
        *stats += (1ULL << 32);
        if (is_complete_value(*stats)) newly_completed_.push_back(z);
    }
    void bump_level_vertical(std::int32_t z) {
        auto [stats, fresh] = levels_.insert(level_key(z), 0);
        *stats += 1;
        if (is_complete_value(*stats)) newly_completed_.push_back(z);
    }

    void record_first_crossing(std::uint32_t* mask, unsigned slot, const DirectedEdge& taken) {
        *mask |= (1u << slot); // before any rehash can invalidate the pointer
        ++crossed_edges_;
        if (slot <= 1) {
            signed_horizontal_ += (slot == 1) ? 1 : -1;
        } else {
            bump_level_vertical(taken.tail.level);
        }
        int reverse = slot_of(taken.head, taken.tail);
        auto [head_mask, new_vertex] = masks_.insert(vertex_key(taken.head), 0u);
        *head_mask |= (1u << reverse);
        if (new_vertex) {
            min_level_ = std::min(min_level_, taken.head.level);
            max_level_ = std::max(max_level_, taken.head.level);
            bump_level_visit(taken.head.level);
        }
        if (log_enabled_) events_.push_back({steps_, taken});
    }

    const FiberGraph* fiber_;
    Rational delta_;
    std::uint64_t weight_fresh_ = 1; // den(delta)
    std::uint64_t weight_bonus_ = 0; // num(delta)

    CylinderVertex pos_;
    std::uint64_t steps_ = 0;
    std::uint64_t crossed_edges_ = 0;
    std::int64_t signed_horizontal_ = 0;
    std::int32_t min_level_ = 0, max_level_ = 0;

    detail::U64Map<std::uint32_t> masks_;  // visited vertex -> crossed-edge bitmask
    detail::U64Map<std::uint64_t> levels_; // level -> (visited count, vertical crossings)
    std::vector<std::int32_t> newly_completed_;

    bool log_enabled_ = false;
    std::vector<TraceEvent> events_;
};

// Recomputes the martingale value of a walk from its first-crossing event
// log; must match the incrementally maintained value exactly.
inline std::int64_t martingale_numerator_from_log(const std::vector<OrrwWalker::TraceEvent>& log,
                                                  CylinderVertex final_position, Rational delta) {
    std::int64_t signed_horizontal = 0;
    for (const auto& ev : log) {
        int d = ev.edge.head.level - ev.edge.tail.level;
        signed_horizontal += d;
    }
    return delta.den() * static_cast<std::int64_t>(final_position.level) +
           delta.num() * signed_horizontal;
}

// Stopping rules for a walk run. max_steps acts as the safety cap and must
// always be present in a condition list.
struct StoppingCondition {
    enum class Kind {
        hit_level,             // reach a given level
        return_to_level,       // reach return_level after having reached arm_level
        exit_subgraph,         // cross a directed edge leaving the given subgraph
        level_complete_window, // some level in [window_start, window_start + width) complete
        max_steps,             // executed steps in this run reach the cap
    };

    Kind kind;
    std::int32_t level = 0;        // hit_level target / return_level
    std::int32_t arm_level = 0;    // return_to_level arming level
    std::int32_t window_start = 0; // level_complete_window
    std::int32_t window_width = 0;
    std::uint64_t cap = 0;
    const Subgraph* subgraph = nullptr;

    static StoppingCondition hit_level(std::int32_t r) {
        StoppingCondition c{Kind::hit_level};
        c.level = r;
        return c;
    }
    static StoppingCondition return_to_level(std::int32_t arm, std::int32_t back) {
        StoppingCondition c{Kind::return_to_level};
        c.arm_level = arm;
        c.level = back;
        return c;
    }
    static StoppingCondition exit_subgraph(const Subgraph& a) {
        StoppingCondition c{Kind::exit_subgraph};
        c.subgraph = &a;
        return c;
    }
    static StoppingCondition level_complete_window(std::int32_t x, std::int32_t width) {
        StoppingCondition c{Kind::level_complete_window};
        c.window_start = x;
        c.window_width = width;
        return c;
    }
    static StoppingCondition max_steps(std::uint64_t cap) {
        StoppingCondition c{Kind::max_steps};
        c.cap = cap;
        return c;
    }
};

struct TraceRecord {
    int fired_index = -1; // index into the condition list
    StoppingCondition::Kind fired_kind = StoppingCondition::Kind::max_steps;
    std::uint64_t steps_taken = 0;      // steps executed during this run
    std::uint64_t total_steps = 0;      // walker step count at stop
    CylinderVertex final_position{};
    std::int64_t martingale_numerator = 0;
    std::int64_t martingale_denominator = 1;
    std::uint64_t vertex_count = 0;
    std::int32_t left_extent = 0;
    std::int32_t right_extent = 0;

    bool capped() const noexcept {
        return fired_kind == StoppingCondition::Kind::max_steps;
    }
};

// Runs the walker until the first condition fires; conditions are checked in
// list order, on entry and after every step. Requires a max_steps cap.
inline TraceRecord run_until(OrrwWalker& walker, const std::vector<StoppingCondition>& conditions,
                             RngStream& rng,
                             const std::function<void(std::uint64_t, CylinderVertex, bool)>&
                                 step_sink = nullptr) {
    if (conditions.empty())
        throw std::invalid_argument("run_until: needs at least one stopping condition");
    bool has_cap = false;
    for (const auto& c : conditions) has_cap |= (c.kind == StoppingCondition::Kind::max_steps);
    if (!has_cap) throw std::invalid_argument("run_until: a max_steps cap is required");

    const std::uint64_t start_steps = walker.step_count();
    std::vector<char> armed(conditions.size(), 0);

    auto finish = [&](int index) {
        TraceRecord tr;
        tr.fired_index = index;
        tr.fired_kind = conditions[index].kind;
        tr.steps_taken = walker.step_count() - start_steps;
        tr.total_steps = walker.step_count();
        tr.final_position = walker.position();
        tr.martingale_numerator = walker.martingale_numerator();
        tr.martingale_denominator = walker.delta().den();
        tr.vertex_count = walker.vertex_count();
        tr.left_extent = walker.left_extent();
        tr.right_extent = walker.right_extent();
        return tr;
    };

    auto check = [&](int i, const DirectedEdge* last_edge,
                     bool entry) -> bool {
        const StoppingCondition& c = conditions[i];
        switch (c.kind) {
        case StoppingCondition::Kind::hit_level:
            return walker.position().level == c.level;
        case StoppingCondition::Kind::return_to_level:
            if (walker.position().level == c.arm_level) armed[i] = 1;
            return armed[i] && walker.position().level == c.level &&
                   !(entry && c.arm_level == c.level);
        case StoppingCondition::Kind::exit_subgraph:
            return last_edge && c.subgraph->has_vertex(last_edge->tail) &&
                   !c.subgraph->has_edge(last_edge->tail, last_edge->head);
        case StoppingCondition::Kind::level_complete_window: {
            if (entry) {
                for (std::int32_t z = c.window_start; z < c.window_start + c.window_width; ++z)
                    if (walker.level_is_complete(z)) return true;
                return false;
            }
            for (std::int32_t z : walker.newly_completed_levels())
                if (z >= c.window_start && z < c.window_start + c.window_width) return true;
            return false;
        }
        case StoppingCondition::Kind::max_steps:
            return walker.step_count() - start_steps >= c.cap;
        }
        return false;
    };

    for (std::size_t i = 0; i < conditions.size(); ++i)
        if (check(static_cast<int>(i), nullptr, true)) return finish(static_cast<int>(i));

    while (true) {
        auto [edge, fresh] = walker.step(rng);
        if (step_sink) step_sink(walker.step_count(), walker.position(), fresh);
        for (std::size_t i = 0; i < conditions.size(); ++i)
            if (check(static_cast<int>(i), &edge, false)) return finish(static_cast<int>(i));
    }
}

// True iff the walk, stopped at its first visit to level x + width, had some
// complete level inside [x, x + width); a run that never reached x + width
// (the cap fired instead) also counts.
inline bool begins_dwall(const OrrwWalker& walker, const TraceRecord& trace, std::int32_t x,
                         std::int32_t width) {
    if (width <= 0) throw std::invalid_argument("begins_dwall: width must be positive");
    if (trace.capped()) return true;
    if (trace.fired_kind != StoppingCondition::Kind::hit_level)
        throw std::invalid_argument("begins_dwall: trace must stop at the far level or cap");
    for (std::int32_t z = x; z < x + width; ++z)
        if (walker.level_is_complete(z)) return true;
    return false;
}

} // namespace orrw
