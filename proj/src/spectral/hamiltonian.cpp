#include "symbridge/spectral/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace symbridge {

std::vector<double> CsrMatrix::apply(std::span<const double> x) const {
    std::vector<double> y(rows, 0.0);
    for (std::size_t r = 0; r < rows; ++r) {
        double acc = 0.0;
        for (std::size_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k) acc += val[k] * x[col[k]];
        y[r] = acc;
    }
    return y;
}

linalg::Matrix CsrMatrix::dense() const {
    linalg::Matrix m(rows, rows);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k) m(r, col[k]) = val[k];
    return m;
}

bool CsrMatrix::symmetric() const {
    const linalg::Matrix m = dense();
    return m == m.transposed();
}

std::vector<double> HamiltonianOperator::to_grid(std::span<const double> active_values) const {
    std::vector<double> out(grid.size(), 0.0);
    for (std::size_t k = 0; k < active_nodes.size(); ++k) out[active_nodes[k]] = active_values[k];
    return out;
}

std::vector<double> HamiltonianOperator::to_active(std::span<const double> grid_values) const {
    std::vector<double> out(active_nodes.size());
    for (std::size_t k = 0; k < active_nodes.size(); ++k) out[k] = grid_values[active_nodes[k]];
    return out;
}

std::vector<bool> active_mask(const TrapPotential& W, const Grid& grid) {
    std::vector<bool> active(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) active[i] = !grid.on_boundary(i);
    if (const auto& box = W.hard_wall_box()) {
        if (box->size() != grid.dim()) throw std::invalid_argument("hard wall box and grid dimensions differ");
        for (std::size_t a = 0; a < grid.dim(); ++a) {
            for (double face : {(*box)[a].lower, (*box)[a].upper}) {
                const double k = (face - grid.bounds()[a].lower) / grid.spacing(a);
                if (k < -1e-9 || k > static_cast<double>(grid.points_per_axis() - 1) + 1e-9 ||
                    std::abs(k - std::round(k)) > 1e-9) {
                    throw std::invalid_argument("hard wall box faces must coincide with grid nodes");
                }
            }
        }
        const auto inside = interior_mask(grid, *box);
        for (std::size_t i = 0; i < grid.size(); ++i) active[i] = active[i] && inside[i];
    }
    return active;
}

HamiltonianOperator discretize_hamiltonian(const TrapPotential& W, const Grid& grid) {
    const auto w = W.on_grid(grid);
    const auto active = active_mask(W, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (active[i] && std::isinf(w[i])) {
            throw std::invalid_argument("potential is infinite at an interior node that is not behind a hard wall");
        }
    }
    return discretize_hamiltonian(grid, w, active);
}

HamiltonianOperator discretize_hamiltonian(const Grid& grid, std::span<const double> node_potential,
                                           const std::vector<bool>& active) {
    if (node_potential.size() != grid.size() || active.size() != grid.size()) {
        throw std::invalid_argument("discretize_hamiltonian: one value per node required");
    }
    HamiltonianOperator op{grid, {}, std::vector<long>(grid.size(), -1), {}, {}};
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!active[i]) continue;
        if (!std::isfinite(node_potential[i])) throw std::invalid_argument("discretize_hamiltonian: W must be finite on active nodes");
        op.active_index[i] = static_cast<long>(op.active_nodes.size());
        op.active_nodes.push_back(i);
        op.potential.push_back(node_potential[i]);
    }
    if (op.active_nodes.empty()) throw std::invalid_argument("discretize_hamiltonian: no active nodes");

    const std::size_t d = grid.dim();
    const std::size_t n = grid.points_per_axis();
    CsrMatrix& m = op.matrix;
    m.rows = op.active_nodes.size();
    m.row_ptr.push_back(0);
    for (std::size_t r = 0; r < m.rows; ++r) {
        const std::size_t node = op.active_nodes[r];
        const auto mi = grid.multi_index(node);
        double diag = op.potential[r];
        // Entries are emitted in increasing column order: axis-0 neighbours are
        // the farthest in the lexicographic order.
        std::vector<std::pair<std::size_t, double>> entries;
        for (std::size_t a = 0; a < d; ++a) {
            const double inv_h2 = 1.0 / (grid.spacing(a) * grid.spacing(a));
            diag += 2.0 * inv_h2;
            for (int dir : {-1, 1}) {
                if ((dir < 0 && mi[a] == 0) || (dir > 0 && mi[a] + 1 == n)) continue;
                auto nb = mi;
                nb[a] = dir < 0 ? mi[a] - 1 : mi[a] + 1;
                const long k = op.active_index[grid.node_index(std::span<const std::size_t>(nb.data(), d))];
                if (k >= 0) entries.emplace_back(static_cast<std::size_t>(k), -inv_h2);
            }
        }
        entries.emplace_back(r, diag);
        std::sort(entries.begin(), entries.end());
        for (const auto& [c, v] : entries) {
            m.col.push_back(c);
            m.val.push_back(v);
        }
        m.row_ptr.push_back(m.col.size());
    }
    return op;
}

HamiltonianOperator subtract_potential(const HamiltonianOperator& op, std::span<const double> f) {
    if (f.size() != op.grid.size()) throw std::invalid_argument("subtract_potential: one value per node required");
    HamiltonianOperator out = op;
    for (std::size_t r = 0; r < out.size(); ++r) {
        const double df = f[out.active_nodes[r]];
        if (!std::isfinite(df)) throw std::invalid_argument("subtract_potential: f must be finite");
        out.potential[r] -= df;
        for (std::size_t k = out.matrix.row_ptr[r]; k < out.matrix.row_ptr[r + 1]; ++k) {
            if (out.matrix.col[k] == r) out.matrix.val[k] -= df;
        }
    }
    return out;
}

}  // namespace symbridge
