#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace symbridge {

using Point = std::vector<double>;

struct Interval {
    double lower = 0.0;
    double upper = 0.0;

    double length() const noexcept { return upper - lower; }
    friend bool operator==(const Interval&, const Interval&) = default;
};

// Uniform tensor grid on a box in R^d, d in {1, 2}. Nodes are ordered
// lexicographically with axis 0 varying slowest.
class Grid {
  public:
    static constexpr std::size_t kMaxDim = 2;

    Grid(std::vector<Interval> bounds, std::size_t points_per_axis);

    std::size_t dim() const noexcept { return bounds_.size(); }
    std::size_t points_per_axis() const noexcept { return n_; }
    std::size_t size() const noexcept { return size_; }
    const std::vector<Interval>& bounds() const noexcept { return bounds_; }

    double spacing(std::size_t axis) const noexcept { return spacing_[axis]; }
    double min_spacing() const noexcept;
    // h^d: the volume element every density is taken against.
    double cell_volume() const noexcept { return cell_volume_; }

    // k-th coordinate along an axis; the last node equals the upper bound exactly.
    double coordinate(std::size_t axis, std::size_t k) const noexcept;

    std::array<std::size_t, kMaxDim> multi_index(std::size_t node) const noexcept;
    std::size_t node_index(std::span<const std::size_t> multi) const noexcept;

    Point node(std::size_t index) const;
    void node(std::size_t index, std::span<double> out) const noexcept;

    bool contains(std::span<const double> x) const noexcept;
    bool on_boundary(std::size_t node) const noexcept;
    // Nearest node, coordinates clamped into the box.
    std::size_t nearest_node(std::span<const double> x) const noexcept;

    friend bool operator==(const Grid& a, const Grid& b) { return a.n_ == b.n_ && a.bounds_ == b.bounds_; }

  private:
    std::vector<Interval> bounds_;
    std::size_t n_;
    std::size_t size_;
    std::array<double, kMaxDim> spacing_{};
    double cell_volume_;
};

Grid build_grid(std::vector<Interval> bounds, std::size_t points_per_axis);

// Multilinear interpolation of node values at x; `outside` off the grid.
double interpolate(const Grid& grid, std::span<const double> values, std::span<const double> x, double outside = 0.0);

}  // namespace symbridge
