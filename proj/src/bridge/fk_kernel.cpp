#include "symbridge/bridge/fk_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>
#include <string>

#include "symbridge/measure/csv.hpp"

namespace symbridge {
namespace {

double gauss_1d(double z, double t) { return std::exp(-z * z / (4.0 * t)) / std::sqrt(4.0 * std::numbers::pi * t); }

void check_box_alignment(const Grid& grid, const std::vector<Interval>& box) {
    if (box.size() != grid.dim()) throw std::invalid_argument("hard wall box and grid dimensions differ");
    for (std::size_t a = 0; a < grid.dim(); ++a) {
        const double h = grid.spacing(a);
        for (double face : {box[a].lower, box[a].upper}) {
            const double k = (face - grid.bounds()[a].lower) / h;
            if (k < -1e-9 || k > static_cast<double>(grid.points_per_axis() - 1) + 1e-9 ||
                std::abs(k - std::round(k)) > 1e-9) {
                throw std::invalid_argument("hard wall box faces must coincide with grid nodes");
            }
        }
    }
}

// h * sum over the infinite lattice hZ of the Gaussian; 1 up to exp(-2 pi^2 (2t)/h^2).
double lattice_mass(double h, double t) {
    const long kmax = static_cast<long>(std::ceil(40.0 * std::sqrt(2.0 * t) / h)) + 1;
    double s = 0.0;
    for (long k = -kmax; k <= kmax; ++k) s += gauss_1d(static_cast<double>(k) * h, t);
    return h * s;
}

}  // namespace

linalg::Matrix FKKernel::weighted() const {
    linalg::Matrix t = matrix;
    t *= grid.cell_volume();
    return t;
}

std::size_t default_steps(double beta, const Grid& grid) {
    const double h = grid.min_spacing();
    const double s = std::ceil(beta / (h * h));
    const double capped = std::min(s, 1e4);
    return std::max<std::size_t>(100, static_cast<std::size_t>(capped));
}

double dirichlet_heat_kernel_1d(double x, double y, double t, const Interval& box) {
    const double a = box.lower;
    const double L = box.length();
    const double reach = L + 40.0 * std::sqrt(2.0 * t);
    const long kmax = static_cast<long>(std::ceil(reach / (2.0 * L))) + 1;
    double v = 0.0;
    for (long k = -kmax; k <= kmax; ++k) {
        const double shift = 2.0 * static_cast<double>(k) * L;
        v += gauss_1d(x - y + shift, t) - gauss_1d(x + y - 2.0 * a + shift, t);
    }
    return std::max(v, 0.0);
}

FKKernel fk_kernel_grid(const TrapPotential& W, double beta, const Grid& grid, std::size_t steps) {
    if (!(beta > 0.0) || !std::isfinite(beta)) throw std::invalid_argument("fk_kernel_grid: beta must be > 0");
    if (W.dim() != grid.dim()) throw std::invalid_argument("fk_kernel_grid: potential/grid dimension mismatch");
    if (steps == 0) steps = default_steps(beta, grid);
    const double delta = beta / static_cast<double>(steps);
    const std::size_t n = grid.size();
    const std::size_t d = grid.dim();
    const double vol = grid.cell_volume();

    const std::vector<double> w = W.on_grid(grid);
    std::vector<double> e(n);
    for (std::size_t i = 0; i < n; ++i) e[i] = std::isinf(w[i]) ? 0.0 : std::exp(-0.5 * delta * w[i]);

    const auto& box = W.hard_wall_box();
    std::vector<bool> active(n, true);
    if (box) {
        check_box_alignment(grid, *box);
        active = interior_mask(grid, *box);
    }

    // Per-axis one-step factors; the d-dimensional step is their product.
    // Each factor is normalized to unit mass on the infinite lattice, so a
    // step conserves mass even when sqrt(2 delta) < h.
    const std::size_t m = grid.points_per_axis();
    std::vector<linalg::Matrix> axis_step;
    for (std::size_t a = 0; a < d; ++a) {
        const double norm = lattice_mass(grid.spacing(a), delta);
        linalg::Matrix g(m, m);
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = 0; j <= i; ++j) {
                const double xi = grid.coordinate(a, i);
                const double xj = grid.coordinate(a, j);
                const double v =
                    (box ? dirichlet_heat_kernel_1d(xi, xj, delta, (*box)[a]) : gauss_1d(xi - xj, delta)) / norm;
                g(i, j) = v;
                g(j, i) = v;
            }
        }
        axis_step.push_back(std::move(g));
    }

    linalg::Matrix step(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!active[i] || e[i] == 0.0) continue;
        const auto mi = grid.multi_index(i);
        for (std::size_t j = 0; j <= i; ++j) {
            if (!active[j] || e[j] == 0.0) continue;
            const auto mj = grid.multi_index(j);
            double g = vol;
            for (std::size_t a = 0; a < d; ++a) g *= axis_step[a](mi[a], mj[a]);
            const double v = g * (e[i] * e[j]);
            step(i, j) = v;
            step(j, i) = v;
        }
    }

    linalg::Matrix k = linalg::symmetrized(linalg::power(step, steps));
    k *= 1.0 / vol;

    FKKernel out{grid, beta, steps, std::move(k), std::sqrt(2.0 * delta) < grid.min_spacing()};
    return out;
}

void write_kernel(const std::filesystem::path& path, const FKKernel& k) {
    csv::Metadata meta = csv::grid_metadata(k.grid);
    meta.emplace_back("kind", "fk_kernel");
    meta.emplace_back("beta", csv::format_double(k.beta));
    meta.emplace_back("steps", std::to_string(k.steps));
    meta.emplace_back("coarse_warning", k.coarse_warning ? "1" : "0");
    csv::write_matrix(path, k.matrix, meta);
}

FKKernel read_kernel(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    csv::MatrixFile f = csv::read_matrix(in);
    Grid grid = csv::grid_from_metadata(f.meta);
    if (f.matrix.rows() != grid.size() || f.matrix.cols() != grid.size()) {
        throw std::runtime_error("kernel file shape does not match its grid metadata");
    }
    return FKKernel{grid, csv::parse_double(csv::metadata_value(f.meta, "beta")),
                    std::stoul(csv::metadata_value(f.meta, "steps")), std::move(f.matrix),
                    csv::metadata_value(f.meta, "coarse_warning") == "1"};
}

}  // namespace symbridge
