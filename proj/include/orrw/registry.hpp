#pragma once

#include <string>
#include <vector>

#include "orrw/experiments_network.hpp"
#include "orrw/experiments_walk.hpp"

namespace orrw {

struct ExperimentInfo {
    const char* name;
    const char* anchor;     // which quantitative statement the run checks
    const char* parameters; // flags the experiment reads
    ExperimentResult (*run)(const ExperimentConfig&);
};

inline const std::vector<ExperimentInfo>& experiment_catalog() {
    static const std::vector<ExperimentInfo> catalog{
        {"balance", "exit-edge balance inequality (deterministic all-pairs solver check)",
         "--fiber --delta --samples --seed", &exp_balance},
        {"crossings", "expected net edge crossings equal the unit current",
         "--samples --reps --seed", &exp_current_crossings},
        {"commute", "commute-time identity on random networks", "--samples --seed", &exp_commute},
        {"network-laws", "conductance monotonicity and energy minimality of the unit current",
         "--samples --seed", &exp_network_laws},
        {"flowdecomp", "cycle-free flow decomposition properties", "--samples --seed",
         &exp_flow_decomposition},
        {"shunt", "shunt-network crossing bound 2|G|^2/(eta d^2) (deterministic solve)",
         "--fiber --d --r --eta", &exp_shunt},
        {"localtime", "designated-level local-time bounds |G|sqrt(8k)/d and 3exp(-d/(16|G|sqrt(k)))",
         "--fiber --d --k --r --reps --seed --cap", &exp_local_time},
        {"hitfront", "same-level hitting probability within horizon 4^6|G|^6 is at least 1/2",
         "--fiber --reps --seed", &exp_hitfront},
        {"outbound", "far-level crossing before range exit, stretched-exponential bound",
         "--fiber --delta --d --reps --seed --cap", &exp_outbound},
        {"exitdir", "exit-before-return rate and fresh-level exit share (implied constants)",
         "--fiber --delta --d --reps --seed --cap", &exp_exit_direction},
        {"dwall", "frequency of covered-level walls of width D",
         "--fiber --delta --x --D --reps --seed --cap --calibrated", &exp_dwall},
        {"gamblers", "ruin estimates for doubling the reached level",
         "--fiber --delta --x --epsilon --alpha --beta --reps --seed --cap", &exp_gamblers_ruin},
        {"martingale", "zero drift of the crossing martingale at a fixed horizon",
         "--fiber --delta --horizon --reps --seed", &exp_martingale},
        {"shape", "range shape: overhang exponent across a dyadic n grid",
         "--fiber --delta --x(=n_max) --reps --seed --cap --calibrated", &exp_shape},
        {"returntime", "moments of successive return times to level zero",
         "--fiber --delta --imax --reps --seed --cap", &exp_return_times},
    };
    return catalog;
}

inline const ExperimentInfo* find_experiment(const std::string& name) {
    for (const ExperimentInfo& info : experiment_catalog())
        if (name == info.name) return &info;
    return nullptr;
}

} // namespace orrw
