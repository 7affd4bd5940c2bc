#include "symbridge/measure/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace symbridge {

Grid::Grid(std::vector<Interval> bounds, std::size_t points_per_axis)
    : bounds_(std::move(bounds)), n_(points_per_axis), size_(0), cell_volume_(1.0) {
    if (bounds_.empty() || bounds_.size() > kMaxDim) {
        throw std::invalid_argument("grid: dimension must be 1 or 2, got " + std::to_string(bounds_.size()));
    }
    if (n_ < 2) throw std::invalid_argument("grid: points per axis must be at least 2, got " + std::to_string(n_));
    size_ = 1;
    for (std::size_t a = 0; a < bounds_.size(); ++a) {
        const auto& iv = bounds_[a];
        if (!std::isfinite(iv.lower) || !std::isfinite(iv.upper) || !(iv.lower < iv.upper)) {
            throw std::invalid_argument("grid: degenerate interval on axis " + std::to_string(a));
        }
        spacing_[a] = (iv.upper - iv.lower) / static_cast<double>(n_ - 1);
        cell_volume_ *= spacing_[a];
        size_ *= n_;
    }
}

double Grid::min_spacing() const noexcept {
    double h = spacing_[0];
    for (std::size_t a = 1; a < dim(); ++a) h = std::min(h, spacing_[a]);
    return h;
}

double Grid::coordinate(std::size_t axis, std::size_t k) const noexcept {
    if (k + 1 == n_) return bounds_[axis].upper;
    return bounds_[axis].lower + static_cast<double>(k) * spacing_[axis];
}

std::array<std::size_t, Grid::kMaxDim> Grid::multi_index(std::size_t node) const noexcept {
    std::array<std::size_t, kMaxDim> idx{};
    for (std::size_t a = dim(); a-- > 0;) {
        idx[a] = node % n_;
        node /= n_;
    }
    return idx;
}

std::size_t Grid::node_index(std::span<const std::size_t> multi) const noexcept {
    std::size_t idx = 0;
    for (std::size_t a = 0; a < dim(); ++a) idx = idx * n_ + multi[a];
    return idx;
}

Point Grid::node(std::size_t index) const {
    Point p(dim());
    node(index, p);
    return p;
}

void Grid::node(std::size_t index, std::span<double> out) const noexcept {
    const auto idx = multi_index(index);
    for (std::size_t a = 0; a < dim(); ++a) out[a] = coordinate(a, idx[a]);
}

bool Grid::contains(std::span<const double> x) const noexcept {
    for (std::size_t a = 0; a < dim(); ++a) {
        if (x[a] < bounds_[a].lower || x[a] > bounds_[a].upper) return false;
    }
    return true;
}

bool Grid::on_boundary(std::size_t node) const noexcept {
    const auto idx = multi_index(node);
    for (std::size_t a = 0; a < dim(); ++a) {
        if (idx[a] == 0 || idx[a] + 1 == n_) return true;
    }
    return false;
}

std::size_t Grid::nearest_node(std::span<const double> x) const noexcept {
    std::array<std::size_t, kMaxDim> idx{};
    for (std::size_t a = 0; a < dim(); ++a) {
        const double t = std::round((x[a] - bounds_[a].lower) / spacing_[a]);
        idx[a] = static_cast<std::size_t>(std::clamp(t, 0.0, static_cast<double>(n_ - 1)));
    }
    return node_index(idx);
}

Grid build_grid(std::vector<Interval> bounds, std::size_t points_per_axis) {
    return Grid(std::move(bounds), points_per_axis);
}

double interpolate(const Grid& grid, std::span<const double> values, std::span<const double> x, double outside) {
    if (!grid.contains(x)) return outside;
    const std::size_t d = grid.dim();
    std::array<std::size_t, Grid::kMaxDim> lo{};
    std::array<double, Grid::kMaxDim> frac{};
    for (std::size_t a = 0; a < d; ++a) {
        const double t = (x[a] - grid.bounds()[a].lower) / grid.spacing(a);
        auto k = static_cast<std::size_t>(std::floor(t));
        if (k + 1 >= grid.points_per_axis()) k = grid.points_per_axis() - 2;
        lo[a] = k;
        frac[a] = t - static_cast<double>(k);
    }
    double v = 0.0;
    for (std::size_t c = 0; c < (std::size_t{1} << d); ++c) {
        double w = 1.0;
        std::array<std::size_t, Grid::kMaxDim> idx{};
        for (std::size_t a = 0; a < d; ++a) {
            const bool up = (c >> a) & 1u;
            idx[a] = lo[a] + (up ? 1 : 0);
            w *= up ? frac[a] : 1.0 - frac[a];
        }
        if (w != 0.0) v += w * values[grid.node_index(std::span<const std::size_t>(idx.data(), d))];
    }
    return v;
}

}  // namespace symbridge
