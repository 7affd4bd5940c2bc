#include "symbridge/diffusion/drift.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "symbridge/spectral/hamiltonian.hpp"

namespace symbridge {

void DriftField::evaluate(std::span<const double> x, std::span<double> out) const {
    const std::size_t d = grid.dim();
    std::array<std::size_t, Grid::kMaxDim> lo{};
    std::array<double, Grid::kMaxDim> frac{};
    for (std::size_t a = 0; a < d; ++a) {
        const Interval& b = grid.bounds()[a];
        const double t = (std::clamp(x[a], b.lower, b.upper) - b.lower) / grid.spacing(a);
        auto k = static_cast<std::size_t>(std::floor(t));
        if (k + 1 >= grid.points_per_axis()) k = grid.points_per_axis() - 2;
        lo[a] = k;
        frac[a] = t - static_cast<double>(k);
    }
    for (std::size_t a = 0; a < d; ++a) out[a] = 0.0;
    for (std::size_t c = 0; c < (std::size_t{1} << d); ++c) {
        double w = 1.0;
        std::array<std::size_t, Grid::kMaxDim> idx{};
        for (std::size_t a = 0; a < d; ++a) {
            const bool up = (c >> a) & 1u;
            idx[a] = lo[a] + (up ? 1 : 0);
            w *= up ? frac[a] : 1.0 - frac[a];
        }
        if (w == 0.0) continue;
        const std::size_t node = grid.node_index(std::span<const std::size_t>(idx.data(), d));
        for (std::size_t a = 0; a < d; ++a) out[a] += w * values[node * d + a];
    }
}

Point DriftField::operator()(std::span<const double> x) const {
    Point out(grid.dim());
    evaluate(x, out);
    return out;
}

DriftField ground_state_drift(const SpectralResult& phi, const TrapPotential& W) {
    const Grid& grid = phi.grid;
    const std::size_t d = grid.dim();
    const std::size_t n = grid.points_per_axis();
    const auto active = active_mask(W, grid);
    const double phi_max = *std::max_element(phi.phi.begin(), phi.phi.end());
    const double floor = 1e-12 * phi_max;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (active[i] && !(phi.phi[i] > 0.0)) {
            throw std::invalid_argument("ground_state_drift: phi must be positive on the interior");
        }
    }

    DriftField f{grid, std::vector<double>(grid.size() * d, 0.0), floor, {}, false};
    if (const auto& box = W.hard_wall_box()) {
        f.domain = *box;
        f.hard_wall = true;
    } else {
        f.domain = grid.bounds();
    }
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto mi = grid.multi_index(i);
        for (std::size_t a = 0; a < d; ++a) {
            const double h = grid.spacing(a);
            auto value_at = [&](int dir) {
                if ((dir < 0 && mi[a] == 0) || (dir > 0 && mi[a] + 1 == n)) return 0.0;
                auto nb = mi;
                nb[a] = dir < 0 ? mi[a] - 1 : mi[a] + 1;
                return phi.phi[grid.node_index(std::span<const std::size_t>(nb.data(), d))];
            };
            const double grad = (value_at(1) - value_at(-1)) / (2.0 * h);
            double v;
            if (phi.phi[i] < floor) {
                v = grad > 0.0 ? 2.0 / h : (grad < 0.0 ? -2.0 / h : 0.0);
            } else {
                v = 2.0 * grad / phi.phi[i];
            }
            f.values[i * d + a] = v;
        }
    }
    return f;
}

}  // namespace symbridge
