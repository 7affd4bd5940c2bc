#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "symbridge/bridge/bridge.hpp"
#include "symbridge/bridge/potential.hpp"
#include "symbridge/common/parallel.hpp"
#include "symbridge/common/rng.hpp"
#include "symbridge/measure/measure.hpp"

namespace symbridge {

// Optional log pair weight log g(x_i, x_sigma(i)) on start nodes, used to
// reweight a proposal start measure towards another (m, g) pair.
using LogPairWeight = std::function<double(std::size_t from_node, std::size_t to_node)>;

struct EnsembleSample {
    std::vector<std::size_t> permutation;
    std::vector<std::size_t> cycle_type;
    std::vector<std::size_t> start_nodes;
    std::vector<PathSample> paths;  // path i runs from start i to start sigma(i)
    double log_weight = 0.0;
};

// Draw sigma uniformly, starts i.i.d. from m (at grid nodes), then bridges
// start[i] -> start[sigma(i)] with their Feynman-Kac log weights.
EnsembleSample sample_sym_ensemble(const DiscreteMeasure& m, std::size_t N, double beta, std::size_t M,
                                   const TrapPotential& W, Rng& rng, const LogPairWeight& log_pair = {});

struct EnsembleEstimates {
    McEstimate Z_hat;
    double log_Z_hat = 0.0;
    double effective_sample_size = 0.0;
    std::vector<double> times;
    std::vector<DiscreteMeasure> L_marginals;
    DiscreteMeasure Y_hat;
    std::size_t n_samples = 0;
    std::uint64_t seed = 0;
};

// Self-normalized weighted histograms of path positions. Weights are kept
// relative to the running maximum log weight so merging never overflows.
class EnsembleAccumulator {
  public:
    EnsembleAccumulator(Grid grid, double beta, std::size_t M, std::vector<double> time_marks);

    void add(const EnsembleSample& s);
    void merge(const EnsembleAccumulator& other);
    // Throws EstimationError when every weight is zero.
    EnsembleEstimates estimates(std::uint64_t seed = 0) const;

    std::size_t count() const noexcept { return count_; }

  private:
    void rescale(double new_shift);

    Grid grid_;
    double beta_;
    std::size_t M_;
    std::vector<double> times_;
    std::vector<std::size_t> mark_steps_;
    std::vector<double> time_weights_;
    double log_shift_;
    double w_sum_ = 0.0;
    double w_sq_ = 0.0;
    std::size_t count_ = 0;
    std::vector<std::vector<double>> l_hist_;
    std::vector<double> y_hist_;
};

EnsembleEstimates ensemble_estimates(std::span<const EnsembleSample> samples, const Grid& grid,
                                     const std::vector<double>& time_marks);

struct EnsembleProblem {
    DiscreteMeasure m;
    std::size_t N = 1;
    double beta = 1.0;
    std::size_t M = 32;
    TrapPotential W;
    LogPairWeight log_pair;
};

// Chunked sampling and accumulation; each chunk uses make_stream(seed, chunk).
EnsembleEstimates simulate_ensemble(const EnsembleProblem& problem, const Grid& grid,
                                    const std::vector<double>& time_marks, std::size_t n_samples,
                                    std::uint64_t seed, const Exec& exec = {});

}  // namespace symbridge
