#pragma once

#include <cstddef>
#include <filesystem>

#include "symbridge/bridge/potential.hpp"
#include "symbridge/linalg/matrix.hpp"
#include "symbridge/measure/grid.hpp"

namespace symbridge {

// Grid approximation of the unnormalized bridge kernel
// K(x,y) = p_beta(x,y) E^beta_{x,y}[exp(-int W)], a density in y.
struct FKKernel {
    Grid grid;
    double beta = 0.0;
    std::size_t steps = 0;
    linalg::Matrix matrix;
    // Set when one step's diffusion length sqrt(2 beta/steps) is below the grid spacing.
    bool coarse_warning = false;

    // K * h^d: the kernel as an operator on grid functions.
    linalg::Matrix weighted() const;
};

// max(100, ceil(beta / h^2)) capped at 10^4.
std::size_t default_steps(double beta, const Grid& grid);

// Symmetric split product (E G E)^steps with E = diag(exp(-delta W / 2)) and G the
// Gaussian step restricted to the grid. For hard walls G is the killed (Dirichlet)
// heat kernel of the box, so the walls are continuous, not only monitored at the
// step times. steps = 0 selects default_steps.
FKKernel fk_kernel_grid(const TrapPotential& W, double beta, const Grid& grid, std::size_t steps = 0);

// Heat kernel on [lower, upper] killed at both ends, by the method of images.
double dirichlet_heat_kernel_1d(double x, double y, double t, const Interval& box);

void write_kernel(const std::filesystem::path& path, const FKKernel& k);
FKKernel read_kernel(const std::filesystem::path& path);

}  // namespace symbridge
