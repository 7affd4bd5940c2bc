#include "symbridge/measure/measure.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace symbridge {
namespace {

void require_same_grid(const Grid& a, const Grid& b, const char* what) {
    if (!(a == b)) throw std::invalid_argument(std::string(what) + ": measures live on different grids");
}

void require_probability_mass(double mass, const char* what) {
    if (std::fabs(mass - 1.0) > 1e-9) {
        throw std::invalid_argument(std::string(what) + ": expected a probability measure, total mass " +
                                    std::to_string(mass));
    }
}

double entropy_sum(std::span<const double> q, std::span<const double> r) {
    double h = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) {
        if (q[i] == 0.0) continue;
        if (r[i] == 0.0) return std::numeric_limits<double>::infinity();
        h += q[i] * std::log(q[i] / r[i]);
    }
    return h;
}

}  // namespace

DiscreteMeasure::DiscreteMeasure(Grid grid, std::vector<double> densities, bool is_probability)
    : grid_(std::move(grid)), densities_(std::move(densities)), is_probability_(is_probability) {
    if (densities_.size() != grid_.size()) {
        throw std::invalid_argument("discrete measure: expected " + std::to_string(grid_.size()) + " weights, got " +
                                    std::to_string(densities_.size()));
    }
    for (double w : densities_) {
        if (!(w >= 0.0) || !std::isfinite(w)) throw std::invalid_argument("discrete measure: weights must be finite and >= 0");
    }
    if (is_probability_ && std::fabs(total_mass() - 1.0) > kProbabilityTolerance) {
        throw std::invalid_argument("discrete measure: probability weights sum to " + std::to_string(total_mass()));
    }
}

DiscreteMeasure DiscreteMeasure::normalized(Grid grid, std::vector<double> densities) {
    double total = 0.0;
    for (double w : densities) total += w;
    total *= grid.cell_volume();
    if (!(total > 0.0) || !std::isfinite(total)) throw std::invalid_argument("discrete measure: cannot normalize zero mass");
    for (double& w : densities) w /= total;
    return DiscreteMeasure(std::move(grid), std::move(densities), true);
}

DiscreteMeasure DiscreteMeasure::lebesgue(const Grid& grid) {
    return DiscreteMeasure(grid, std::vector<double>(grid.size(), 1.0), false);
}

DiscreteMeasure DiscreteMeasure::point_mass(const Grid& grid, std::size_t node) {
    std::vector<double> w(grid.size(), 0.0);
    w.at(node) = 1.0 / grid.cell_volume();
    return DiscreteMeasure(grid, std::move(w), true);
}

std::vector<double> DiscreteMeasure::masses() const {
    std::vector<double> m(densities_);
    for (double& v : m) v *= grid_.cell_volume();
    return m;
}

double DiscreteMeasure::total_mass() const {
    double s = 0.0;
    for (double w : densities_) s += w;
    return s * grid_.cell_volume();
}

PairMeasure::PairMeasure(Grid grid, linalg::Matrix densities) : grid_(std::move(grid)), densities_(std::move(densities)) {
    if (densities_.rows() != grid_.size() || densities_.cols() != grid_.size()) {
        throw std::invalid_argument("pair measure: matrix shape does not match grid");
    }
    for (double w : densities_.data()) {
        if (!(w >= 0.0) || !std::isfinite(w)) throw std::invalid_argument("pair measure: entries must be finite and >= 0");
    }
}

PairMeasure PairMeasure::from_masses(Grid grid, linalg::Matrix masses) {
    const double vol = grid.cell_volume();
    masses *= 1.0 / (vol * vol);
    return PairMeasure(std::move(grid), std::move(masses));
}

linalg::Matrix PairMeasure::masses() const {
    linalg::Matrix m = densities_;
    m *= grid_.cell_volume() * grid_.cell_volume();
    return m;
}

double PairMeasure::total_mass() const { return densities_.sum() * grid_.cell_volume() * grid_.cell_volume(); }

bool PairMeasure::is_symmetric(double rel_tol) const {
    const double scale = densities_.max_abs();
    for (std::size_t i = 0; i < densities_.rows(); ++i) {
        for (std::size_t j = i + 1; j < densities_.cols(); ++j) {
            if (std::fabs(densities_(i, j) - densities_(j, i)) > rel_tol * scale) return false;
        }
    }
    return true;
}

PairMeasure PairMeasure::transposed() const { return PairMeasure(grid_, densities_.transposed()); }

PairMeasure product_measure(const DiscreteMeasure& a, const DiscreteMeasure& b) {
    require_same_grid(a.grid(), b.grid(), "product_measure");
    const std::size_t n = a.grid().size();
    linalg::Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m(i, j) = a.density(i) * b.density(j);
    return PairMeasure(a.grid(), std::move(m));
}

double relative_entropy(const PairMeasure& q, const PairMeasure& r) {
    require_same_grid(q.grid(), r.grid(), "relative_entropy");
    require_probability_mass(q.total_mass(), "relative_entropy");
    require_probability_mass(r.total_mass(), "relative_entropy");
    // Densities share the volume element, so density ratios equal mass ratios.
    const auto qm = q.masses();
    const auto rm = r.masses();
    return entropy_sum(qm.data(), rm.data());
}

double relative_entropy(const DiscreteMeasure& q, const DiscreteMeasure& r) {
    require_same_grid(q.grid(), r.grid(), "relative_entropy");
    require_probability_mass(q.total_mass(), "relative_entropy");
    require_probability_mass(r.total_mass(), "relative_entropy");
    return entropy_sum(q.masses(), r.masses());
}

std::pair<DiscreteMeasure, DiscreteMeasure> marginals(const PairMeasure& q) {
    const Grid& g = q.grid();
    const std::size_t n = g.size();
    const double vol = g.cell_volume();
    std::vector<double> first(n, 0.0), second(n, 0.0);
    const auto& d = q.densities();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            first[i] += d(i, j);
            second[j] += d(i, j);
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        first[i] *= vol;
        second[i] *= vol;
    }
    const bool prob = std::fabs(q.total_mass() - 1.0) <= kProbabilityTolerance;
    return {DiscreteMeasure(g, std::move(first), prob), DiscreteMeasure(g, std::move(second), prob)};
}

MeasureDistance measure_distance(const DiscreteMeasure& p, const DiscreteMeasure& r) {
    require_same_grid(p.grid(), r.grid(), "measure_distance");
    MeasureDistance out;
    const auto pm = p.masses();
    const auto rm = r.masses();
    double l1 = 0.0;
    for (std::size_t i = 0; i < pm.size(); ++i) l1 += std::fabs(pm[i] - rm[i]);
    out.total_variation = 0.5 * l1;
    if (p.grid().dim() == 1) {
        double cdf_gap = 0.0, w1 = 0.0;
        const double h = p.grid().spacing(0);
        for (std::size_t i = 0; i + 1 < pm.size(); ++i) {
            cdf_gap += pm[i] - rm[i];
            w1 += std::fabs(cdf_gap) * h;
        }
        out.wasserstein1 = w1;
    }
    return out;
}

double total_variation(const PairMeasure& a, const PairMeasure& b) {
    require_same_grid(a.grid(), b.grid(), "total_variation");
    const double vol2 = a.grid().cell_volume() * a.grid().cell_volume();
    double l1 = 0.0;
    const auto da = a.densities().data();
    const auto db = b.densities().data();
    for (std::size_t i = 0; i < da.size(); ++i) l1 += std::fabs(da[i] - db[i]);
    return 0.5 * l1 * vol2;
}

double l1_distance(const DiscreteMeasure& p, const DiscreteMeasure& r) {
    return 2.0 * measure_distance(p, r).total_variation;
}

}  // namespace symbridge
