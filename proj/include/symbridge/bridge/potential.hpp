#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "symbridge/measure/grid.hpp"

namespace symbridge {

// Nonnegative trap potential W : R^d -> [0, +inf].
class TrapPotential {
  public:
    enum class Kind { hard_wall, quadratic, tabulated };

    // W = offset inside the closed box, +inf outside.
    static TrapPotential hard_wall(std::vector<Interval> box, double offset = 0.0);
    // W(x) = offset + sum_k a_k (x_k - c_k)^2. Zero coefficients are allowed
    // for constant test potentials, which are not confining.
    static TrapPotential quadratic(std::vector<double> coefficients, std::vector<double> center = {},
                                   double offset = 0.0);
    static TrapPotential constant(double value, std::size_t dim);
    // Node values on a grid (+inf allowed), multilinear in between, +inf off the grid.
    static TrapPotential tabulated(Grid grid, std::vector<double> values);

    Kind kind() const noexcept { return kind_; }
    std::size_t dim() const noexcept { return dim_; }
    double offset() const noexcept { return offset_; }
    const std::vector<double>& coefficients() const noexcept { return coefficients_; }
    const std::vector<double>& center() const noexcept { return center_; }
    const std::optional<std::vector<Interval>>& hard_wall_box() const noexcept { return box_; }

    double operator()(std::span<const double> x) const;
    std::vector<double> on_grid(const Grid& grid) const;

    // True when inf_{|x|>R} W(x) -> inf as R -> inf.
    bool confining() const noexcept;
    // W + c; c >= -min W keeps the potential nonnegative.
    TrapPotential shifted(double c) const;

    std::string describe() const;

  private:
    TrapPotential() = default;

    Kind kind_ = Kind::quadratic;
    std::size_t dim_ = 1;
    double offset_ = 0.0;
    std::vector<double> coefficients_;
    std::vector<double> center_;
    std::optional<std::vector<Interval>> box_;
    std::optional<Grid> table_grid_;
    std::vector<double> table_;
};

// Box of a hard wall expressed as a node mask: true for nodes strictly inside.
std::vector<bool> interior_mask(const Grid& grid, const std::vector<Interval>& box);

}  // namespace symbridge
