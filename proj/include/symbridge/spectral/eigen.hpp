#pragma once

#include <cstddef>
#include <vector>

#include "symbridge/measure/measure.hpp"
#include "symbridge/spectral/hamiltonian.hpp"

namespace symbridge {

struct SpectralResult {
    Grid grid;
    double lambda = 0.0;
    // Ground state on every grid node (zero on Dirichlet nodes), sum phi^2 h^d = 1.
    std::vector<double> phi;
    // Grid-weighted L2 norm of (H phi - lambda phi).
    double residual = 0.0;
    std::size_t iterations = 0;

    DiscreteMeasure density() const;  // phi^2 as a probability measure
};

struct EigenOptions {
    double rel_tol = 1e-12;
    std::size_t max_iterations = 20000;
};

// Bottom eigenpair by inverse iteration with shift min(W) - 1, which lies
// strictly below the spectrum. Throws ConvergenceError at the iteration cap.
SpectralResult principal_eigenpair(const HamiltonianOperator& op, const EigenOptions& opts = {});

}  // namespace symbridge
