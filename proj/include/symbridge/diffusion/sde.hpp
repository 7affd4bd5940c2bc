#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "symbridge/common/parallel.hpp"
#include "symbridge/diffusion/drift.hpp"
#include "symbridge/measure/measure.hpp"

namespace symbridge {

struct SdeOptions {
    // Keep every k-th state in the trajectory; 0 keeps none.
    std::size_t record_every = 0;
    // Fraction of rejected proposals above which the run is flagged.
    double rejection_flag_rate = 0.5;
};

struct SdeResult {
    DiscreteMeasure occupation;
    std::vector<double> trajectory;  // rows of (t, x_0, .., x_{d-1})
    std::size_t steps = 0;
    std::size_t rejections = 0;
    double rejection_rate = 0.0;
    bool rejection_flag = false;
};

// Euler-Maruyama for dX = drift(X) dt + sqrt(2) dB started from a node drawn
// from init. A proposal leaving the domain box is rejected and its noise
// redrawn. The occupation histogram counts the initial state and every step,
// binned to the nearest node. Requires dt <= h^2/4.
SdeResult simulate_ergodic_sde(const DriftField& drift, const DiscreteMeasure& init, double T_total, double dt,
                               std::uint64_t seed, const SdeOptions& opts = {});

struct SdeEnsembleResult {
    std::vector<double> times;
    std::vector<DiscreteMeasure> slices;  // histogram of X_t across paths
    std::size_t rejections = 0;
    double rejection_rate = 0.0;
    bool rejection_flag = false;
};

// Independent copies of the same diffusion, histogrammed at the requested times.
SdeEnsembleResult simulate_sde_ensemble(const DriftField& drift, const DiscreteMeasure& init, double dt,
                                        std::size_t n_paths, const std::vector<double>& slice_times,
                                        std::uint64_t seed, const Exec& exec = {});

}  // namespace symbridge
