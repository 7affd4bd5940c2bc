#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "symbridge/bridge/potential.hpp"
#include "symbridge/common/parallel.hpp"
#include "symbridge/common/rng.hpp"

namespace symbridge {

// (4 pi beta)^{-d/2} exp(-|x-y|^2 / (4 beta)): transition density of the
// diffusion with generator Laplacian (variance 2t per coordinate).
double gauss_kernel(std::span<const double> x, std::span<const double> y, double beta);
double log_gauss_kernel(std::span<const double> x, std::span<const double> y, double beta);

// Time-discretized path on the uniform mesh t_k = k beta / M.
struct PathSample {
    std::size_t dim = 1;
    std::vector<double> times;
    std::vector<double> positions;  // (M+1) x dim, row-major
    double log_weight = 0.0;

    std::size_t steps() const noexcept { return times.empty() ? 0 : times.size() - 1; }
    std::span<const double> position(std::size_t k) const noexcept { return {positions.data() + k * dim, dim}; }
    std::span<double> position(std::size_t k) noexcept { return {positions.data() + k * dim, dim}; }
};

// Exact Gaussian bridge from x to y over [0, beta] on M steps; endpoints pinned.
// log_weight is left at 0.
PathSample sample_bridge(std::span<const double> x, std::span<const double> y, double beta, std::size_t M, Rng& rng);
// Free path from x (no pinning at the end).
PathSample sample_free_path(std::span<const double> x, double beta, std::size_t M, Rng& rng);

// Trapezoid estimate of -int_0^beta f(omega_s) ds for the node values f_k along the mesh.
double trapezoid_log_weight(std::span<const double> times, std::span<const double> values);

// -int W along the path (trapezoid); -inf iff the path visits {W = inf}.
double fk_log_weight(const PathSample& path, const TrapPotential& W);
double feynman_kac_weight(const PathSample& path, const TrapPotential& W);
// Stores fk_log_weight in path.log_weight and returns it.
double attach_weight(PathSample& path, const TrapPotential& W);
// log of the probability that a bridge of the variance-2t diffusion between
// consecutive mesh points never leaves the box.
double wall_survival_log(const PathSample& path, const std::vector<Interval>& box);

struct McEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t n = 0;
};

// Running (sum, sum of squares, count) triple; merges associatively.
struct MomentAccumulator {
    double sum = 0.0;
    double sum_sq = 0.0;
    std::size_t count = 0;

    void add(double v) noexcept {
        sum += v;
        sum_sq += v * v;
        ++count;
    }
    void merge(const MomentAccumulator& o) noexcept {
        sum += o.sum;
        sum_sq += o.sum_sq;
        count += o.count;
    }
    McEstimate estimate() const;
};

// Monte Carlo estimate of E^beta_{x,y}[exp(-int W)] under the normalized bridge.
McEstimate bridge_fk_mc(std::span<const double> x, std::span<const double> y, double beta, const TrapPotential& W,
                        std::size_t n_samples, std::uint64_t seed, std::size_t M = 64, const Exec& exec = {});

}  // namespace symbridge
