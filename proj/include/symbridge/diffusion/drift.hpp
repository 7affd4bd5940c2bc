#pragma once

#include <optional>
#include <span>
#include <vector>

#include "symbridge/bridge/potential.hpp"
#include "symbridge/measure/grid.hpp"
#include "symbridge/spectral/eigen.hpp"

namespace symbridge {

// Ground-state drift 2 grad(phi)/phi tabulated on grid nodes.
struct DriftField {
    Grid grid;
    std::vector<double> values;  // node-major, dim entries per node
    double phi_floor = 0.0;
    // Box the diffusion must stay in: the hard wall, else the grid itself.
    std::vector<Interval> domain;
    bool hard_wall = false;

    // Multilinear interpolation; x is clamped into the grid.
    void evaluate(std::span<const double> x, std::span<double> out) const;
    Point operator()(std::span<const double> x) const;
    std::span<const double> at_node(std::size_t node) const noexcept {
        return {values.data() + node * grid.dim(), grid.dim()};
    }
};

// Central differences; where phi < 1e-12 max(phi) the drift is clamped to
// magnitude 2/h along the sign of the gradient. Throws std::invalid_argument
// if phi <= 0 at an active node of W.
DriftField ground_state_drift(const SpectralResult& phi, const TrapPotential& W);

}  // namespace symbridge
