#include "symbridge/spectral/dv.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "symbridge/common/error.hpp"
#include "symbridge/common/rng.hpp"
#include "symbridge/spectral/eigen.hpp"
#include "symbridge/spectral/hamiltonian.hpp"

namespace symbridge {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Dirichlet form sum over edges (including ghost edges) of (dphi)^2 / h^2, times h^d.
double dirichlet_energy(const Grid& grid, std::span<const double> phi) {
    const std::size_t d = grid.dim();
    const std::size_t n = grid.points_per_axis();
    double e = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto mi = grid.multi_index(i);
        for (std::size_t a = 0; a < d; ++a) {
            const double inv_h2 = 1.0 / (grid.spacing(a) * grid.spacing(a));
            double next = 0.0;
            if (mi[a] + 1 < n) {
                auto nb = mi;
                ++nb[a];
                next = phi[grid.node_index(std::span<const std::size_t>(nb.data(), d))];
            }
            e += (next - phi[i]) * (next - phi[i]) * inv_h2;
            if (mi[a] == 0) e += phi[i] * phi[i] * inv_h2;
        }
    }
    return e * grid.cell_volume();
}

// Gradient of phi^T (H - f) phi on active nodes via the explicit stencil.
struct Stencil {
    const Grid& grid;
    std::vector<bool> active;
    std::vector<double> diag_potential;  // W - f per grid node (active only)

    void apply(std::span<const double> phi, std::span<double> out) const {
        const std::size_t d = grid.dim();
        const std::size_t n = grid.points_per_axis();
        for (std::size_t i = 0; i < grid.size(); ++i) {
            if (!active[i]) {
                out[i] = 0.0;
                continue;
            }
            const auto mi = grid.multi_index(i);
            double v = diag_potential[i] * phi[i];
            for (std::size_t a = 0; a < d; ++a) {
                const double inv_h2 = 1.0 / (grid.spacing(a) * grid.spacing(a));
                double lap = -2.0 * phi[i];
                if (mi[a] > 0) {
                    auto nb = mi;
                    --nb[a];
                    lap += phi[grid.node_index(std::span<const std::size_t>(nb.data(), d))];
                }
                if (mi[a] + 1 < n) {
                    auto nb = mi;
                    ++nb[a];
                    lap += phi[grid.node_index(std::span<const std::size_t>(nb.data(), d))];
                }
                v -= lap * inv_h2;
            }
            out[i] = v;
        }
    }
};

double weighted_dot(std::span<const double> a, std::span<const double> b, double vol) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s * vol;
}

}  // namespace

double dv_rate(const DiscreteMeasure& p, const TrapPotential& W, const Grid& grid) {
    if (!(p.grid() == grid)) throw std::invalid_argument("dv_rate: grid mismatch");
    const auto w = W.on_grid(grid);
    std::vector<bool> wall(grid.size(), false);
    if (const auto& box = W.hard_wall_box()) {
        const auto inside = interior_mask(grid, *box);
        for (std::size_t i = 0; i < grid.size(); ++i) wall[i] = !inside[i];
    }
    std::vector<double> phi(grid.size());
    double potential = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double dens = p.density(i);
        if (dens > 0.0 && (std::isinf(w[i]) || wall[i])) return kInf;
        phi[i] = std::sqrt(dens);
        if (dens > 0.0) potential += w[i] * dens;
    }
    return dirichlet_energy(grid, phi) + potential * grid.cell_volume();
}

DualityResult dv_duality_check(std::span<const double> f, const TrapPotential& W, const Grid& grid,
                               const DualityOptions& opts) {
    if (f.size() != grid.size()) throw std::invalid_argument("dv_duality_check: one f value per node required");
    for (double v : f)
        if (!std::isfinite(v)) throw std::invalid_argument("dv_duality_check: f must be bounded");

    const HamiltonianOperator base = discretize_hamiltonian(W, grid);
    const HamiltonianOperator shifted = subtract_potential(base, f);
    const SpectralResult spec = principal_eigenpair(shifted);

    DualityResult res;
    res.lambda_minus = spec.lambda;

    const double vol = grid.cell_volume();
    const auto w = W.on_grid(grid);
    Stencil st{grid, std::vector<bool>(grid.size(), false), std::vector<double>(grid.size(), 0.0)};
    for (std::size_t i : base.active_nodes) {
        st.active[i] = true;
        st.diag_potential[i] = w[i] - f[i];
    }
    // Gershgorin bound on the top of the spectrum sets the ascent step.
    double lo = kInf, hi = -kInf;
    for (std::size_t i : base.active_nodes) {
        double off = 0.0;
        for (std::size_t a = 0; a < grid.dim(); ++a) off += 2.0 / (grid.spacing(a) * grid.spacing(a));
        hi = std::max(hi, st.diag_potential[i] + 2.0 * off);
        lo = std::min(lo, st.diag_potential[i]);
    }
    // Work with A - lo so the step map I - A/L is nonnegative on the spectrum.
    const double L = hi - lo;

    auto objective = [&](std::span<const double> phi, std::span<const double> aphi) {
        return -weighted_dot(phi, aphi, vol);  // <f,phi^2> - dv_rate(phi^2)
    };

    double best = -kInf;
    std::vector<double> best_phi;
    std::vector<double> phi(grid.size()), aphi(grid.size());
    for (std::size_t s = 0; s < opts.starts; ++s) {
        Rng rng = make_stream(opts.seed, s);
        std::uniform_real_distribution<double> u(0.1, 1.0);
        for (std::size_t i = 0; i < grid.size(); ++i) phi[i] = st.active[i] ? u(rng) : 0.0;
        double nrm = std::sqrt(weighted_dot(phi, phi, vol));
        for (double& v : phi) v /= nrm;

        bool converged = false;
        std::size_t it = 0;
        double rho = 0.0, resid = kInf;
        for (; it < opts.max_iterations; ++it) {
            st.apply(phi, aphi);
            rho = weighted_dot(phi, aphi, vol);
            if (it % 16 == 0) {
                double r2 = 0.0;
                for (std::size_t i = 0; i < grid.size(); ++i) r2 += (aphi[i] - rho * phi[i]) * (aphi[i] - rho * phi[i]);
                resid = std::sqrt(r2 * vol);
                if (resid <= opts.residual_tol) {
                    converged = true;
                    break;
                }
            }
            // Ascent step on -phi^T A phi followed by projection back to the unit sphere.
            for (std::size_t i = 0; i < grid.size(); ++i) phi[i] -= (aphi[i] - lo * phi[i]) / L;
            nrm = std::sqrt(weighted_dot(phi, phi, vol));
            for (double& v : phi) v /= nrm;
        }
        if (!converged) throw ConvergenceError("dv_duality_check: ascent did not converge", phi, resid);
        st.apply(phi, aphi);
        const double value = objective(phi, aphi);
        if (value > best) {
            best = value;
            best_phi = phi;
            res.iterations = it;
        }
    }
    res.sup_value = best;
    res.gap = std::abs(-res.lambda_minus - best);

    std::vector<double> dens(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) dens[i] = spec.phi[i] * spec.phi[i];
    const DiscreteMeasure p = DiscreteMeasure::normalized(grid, dens);
    res.rate_at_optimizer = dv_rate(p, W, grid);
    double fp = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) fp += f[i] * p.mass(i);
    res.identity_gap = std::abs(res.rate_at_optimizer - (res.lambda_minus + fp));
    return res;
}

}  // namespace symbridge
