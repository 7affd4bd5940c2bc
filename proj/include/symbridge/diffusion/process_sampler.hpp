#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "symbridge/bridge/bridge.hpp"
#include "symbridge/bridge/fk_kernel.hpp"
#include "symbridge/bridge/potential.hpp"
#include "symbridge/common/parallel.hpp"
#include "symbridge/measure/measure.hpp"

namespace symbridge {

struct ProcessSamplerOptions {
    std::size_t oversampling = 10;
    double low_ess_fraction = 0.1;
    bool wall_crossing_correction = true;
};

struct ProcessSample {
    std::vector<PathSample> paths;  // equally weighted after resampling
    std::size_t proposals = 0;
    double effective_sample_size = 0.0;
    bool low_ess_flag = false;
};

// Endpoints (x,y) ~ q*, a bridge x -> y, importance weight
// exp(-int W) / (K(x,y)/p_beta(x,y)), then systematic resampling down to n_paths.
ProcessSample schrodinger_process_sampler(const PairMeasure& q_star, const FKKernel& K, const TrapPotential& W,
                                          double beta, std::size_t M, std::size_t n_paths, std::uint64_t seed,
                                          const Exec& exec = {}, const ProcessSamplerOptions& opts = {});

// Histogram of path positions at mesh step k, binned to the nearest node.
DiscreteMeasure path_marginal(const std::vector<PathSample>& paths, const Grid& grid, std::size_t step);
// Joint histogram of (position at step k0, position at step k1).
PairMeasure path_pair_marginal(const std::vector<PathSample>& paths, const Grid& grid, std::size_t k0, std::size_t k1);

}  // namespace symbridge
