#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "symbridge/bridge/potential.hpp"
#include "symbridge/linalg/matrix.hpp"
#include "symbridge/measure/grid.hpp"

namespace symbridge {

// Compressed sparse row matrix.
struct CsrMatrix {
    std::size_t rows = 0;
    std::vector<std::size_t> row_ptr;
    std::vector<std::size_t> col;
    std::vector<double> val;

    std::vector<double> apply(std::span<const double> x) const;
    linalg::Matrix dense() const;
    bool symmetric() const;
};

// Finite-difference -Laplacian + W on the active nodes of a grid. Inactive
// nodes (the grid boundary, and for a hard wall every node on or outside the
// wall) carry homogeneous Dirichlet values and are eliminated.
struct HamiltonianOperator {
    Grid grid;
    std::vector<std::size_t> active_nodes;
    std::vector<long> active_index;  // per grid node; -1 when inactive
    std::vector<double> potential;   // W on active nodes
    CsrMatrix matrix;

    std::size_t size() const noexcept { return active_nodes.size(); }
    // Active-node vector -> full grid vector with zeros on inactive nodes.
    std::vector<double> to_grid(std::span<const double> active_values) const;
    std::vector<double> to_active(std::span<const double> grid_values) const;
};

HamiltonianOperator discretize_hamiltonian(const TrapPotential& W, const Grid& grid);
// General form: W given per grid node, active mask per grid node.
HamiltonianOperator discretize_hamiltonian(const Grid& grid, std::span<const double> node_potential,
                                           const std::vector<bool>& active);
// Same operator with W replaced by W - f (f per grid node).
HamiltonianOperator subtract_potential(const HamiltonianOperator& op, std::span<const double> f);

// Active-node mask used for W: interior grid nodes, further restricted to the
// open box for hard walls.
std::vector<bool> active_mask(const TrapPotential& W, const Grid& grid);

}  // namespace symbridge
