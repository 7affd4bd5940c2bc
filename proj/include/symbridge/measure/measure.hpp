#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "symbridge/linalg/matrix.hpp"
#include "symbridge/measure/grid.hpp"

namespace symbridge {

// Tolerance on total mass for measures flagged as probabilities.
inline constexpr double kProbabilityTolerance = 1e-12;

// Nonnegative measure on grid nodes. Weights are densities with respect to
// the volume element h^d, so the mass at a node is density * h^d.
class DiscreteMeasure {
  public:
    DiscreteMeasure(Grid grid, std::vector<double> densities, bool is_probability);

    // Rescales nonnegative densities to total mass one.
    static DiscreteMeasure normalized(Grid grid, std::vector<double> densities);
    // Unit density at every node (grid Lebesgue measure).
    static DiscreteMeasure lebesgue(const Grid& grid);
    static DiscreteMeasure point_mass(const Grid& grid, std::size_t node);

    const Grid& grid() const noexcept { return grid_; }
    std::span<const double> densities() const noexcept { return densities_; }
    double density(std::size_t node) const noexcept { return densities_[node]; }
    double mass(std::size_t node) const noexcept { return densities_[node] * grid_.cell_volume(); }
    std::vector<double> masses() const;
    double total_mass() const;
    bool is_probability() const noexcept { return is_probability_; }

  private:
    Grid grid_;
    std::vector<double> densities_;
    bool is_probability_;
};

// Nonnegative measure on node pairs; densities are taken against h^{2d}.
class PairMeasure {
  public:
    PairMeasure(Grid grid, linalg::Matrix densities);
    static PairMeasure from_masses(Grid grid, linalg::Matrix masses);

    const Grid& grid() const noexcept { return grid_; }
    const linalg::Matrix& densities() const noexcept { return densities_; }
    double mass(std::size_t i, std::size_t j) const noexcept {
        return densities_(i, j) * grid_.cell_volume() * grid_.cell_volume();
    }
    linalg::Matrix masses() const;
    double total_mass() const;
    bool is_symmetric(double rel_tol = 0.0) const;
    PairMeasure transposed() const;

  private:
    Grid grid_;
    linalg::Matrix densities_;
};

PairMeasure product_measure(const DiscreteMeasure& a, const DiscreteMeasure& b);

// sum q log(q/r) in nats, with 0 log 0 = 0 and +inf when q charges a node r misses.
double relative_entropy(const PairMeasure& q, const PairMeasure& r);
double relative_entropy(const DiscreteMeasure& q, const DiscreteMeasure& r);

// Row-sum and column-sum measures.
std::pair<DiscreteMeasure, DiscreteMeasure> marginals(const PairMeasure& q);

struct MeasureDistance {
    double total_variation = 0.0;
    std::optional<double> wasserstein1;  // d = 1 only
};

MeasureDistance measure_distance(const DiscreteMeasure& p, const DiscreteMeasure& r);
// Total variation between pair measures (half the L1 distance of masses).
double total_variation(const PairMeasure& a, const PairMeasure& b);
// L1 distance of masses, sum |p - r|.
double l1_distance(const DiscreteMeasure& p, const DiscreteMeasure& r);

}  // namespace symbridge
