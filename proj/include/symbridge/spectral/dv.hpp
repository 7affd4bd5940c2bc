#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "symbridge/bridge/potential.hpp"
#include "symbridge/measure/measure.hpp"

namespace symbridge {

// sum |grad_h sqrt(p)|^2 h^d + sum W p h^d with forward differences over every
// grid edge, including edges to zero ghost nodes past the grid boundary.
// +inf when p charges {W = inf} or the wall of a hard-wall box.
double dv_rate(const DiscreteMeasure& p, const TrapPotential& W, const Grid& grid);

struct DualityOptions {
    std::size_t starts = 5;
    std::uint64_t seed = 1;
    // Stop when the eigen-residual of the ascent iterate falls below this.
    double residual_tol = 1e-7;
    std::size_t max_iterations = 2000000;
};

struct DualityResult {
    double lambda_minus = 0.0;    // bottom eigenvalue of -Laplacian + W - f
    double sup_value = 0.0;       // sup_p <f,p> - dv_rate(p), direct optimization
    double gap = 0.0;             // |(-lambda_minus) - sup_value|
    double identity_gap = 0.0;    // |dv_rate(phi_f^2) - (lambda_minus + <f, phi_f^2>)|
    double rate_at_optimizer = 0.0;
    std::size_t iterations = 0;   // of the best start
};

// Compares the Legendre transform of the rate with the spectral side.
// Throws ConvergenceError if an ascent run hits its cap.
DualityResult dv_duality_check(std::span<const double> f, const TrapPotential& W, const Grid& grid,
                               const DualityOptions& opts = {});

}  // namespace symbridge
