#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

#include "symbridge/bridge/bridge.hpp"
#include "symbridge/bridge/potential.hpp"
#include "symbridge/common/parallel.hpp"
#include "symbridge/spectral/eigen.hpp"

namespace symbridge {

struct GirsanovOptions {
    // For hard walls, multiply by the probability that the Brownian bridge
    // between consecutive mesh points stays inside the box, so killing is
    // continuous rather than monitored at mesh times only.
    bool wall_crossing_correction = true;
};

// log of exp(-int (W - lambda)) phi(end)/phi(start) with the trapezoid rule.
// Throws std::domain_error when phi(start) is not positive.
double girsanov_log_density(const PathSample& path, double lambda, const SpectralResult& phi, const TrapPotential& W,
                            const GirsanovOptions& opts = {});
double girsanov_density(const PathSample& path, double lambda, const SpectralResult& phi, const TrapPotential& W,
                        const GirsanovOptions& opts = {});

// E_x[D_beta] over free paths (variance 2t per coordinate) on M steps.
McEstimate martingale_check(std::span<const double> x, double beta, double lambda, const SpectralResult& phi,
                            const TrapPotential& W, std::size_t n_samples, std::uint64_t seed, std::size_t M = 200,
                            const Exec& exec = {}, const GirsanovOptions& opts = {});

}  // namespace symbridge
