#include "symbridge/bridge/potential.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "symbridge/measure/csv.hpp"

namespace symbridge {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

TrapPotential TrapPotential::hard_wall(std::vector<Interval> box, double offset) {
    if (box.empty() || box.size() > Grid::kMaxDim) throw std::invalid_argument("hard wall: box dimension must be 1 or 2");
    for (const auto& iv : box) {
        if (!(iv.lower < iv.upper)) throw std::invalid_argument("hard wall: degenerate box");
    }
    if (!(offset >= 0.0) || !std::isfinite(offset)) throw std::invalid_argument("hard wall: offset must be finite and >= 0");
    TrapPotential w;
    w.kind_ = Kind::hard_wall;
    w.dim_ = box.size();
    w.offset_ = offset;
    w.box_ = std::move(box);
    return w;
}

TrapPotential TrapPotential::quadratic(std::vector<double> coefficients, std::vector<double> center, double offset) {
    if (coefficients.empty() || coefficients.size() > Grid::kMaxDim) {
        throw std::invalid_argument("quadratic potential: dimension must be 1 or 2");
    }
    if (center.empty()) center.assign(coefficients.size(), 0.0);
    if (center.size() != coefficients.size()) throw std::invalid_argument("quadratic potential: center dimension mismatch");
    for (double a : coefficients) {
        if (!(a >= 0.0) || !std::isfinite(a)) throw std::invalid_argument("quadratic potential: coefficients must be >= 0");
    }
    if (!(offset >= 0.0) || !std::isfinite(offset)) throw std::invalid_argument("quadratic potential: offset must be >= 0");
    TrapPotential w;
    w.kind_ = Kind::quadratic;
    w.dim_ = coefficients.size();
    w.coefficients_ = std::move(coefficients);
    w.center_ = std::move(center);
    w.offset_ = offset;
    return w;
}

TrapPotential TrapPotential::constant(double value, std::size_t dim) {
    return quadratic(std::vector<double>(dim, 0.0), {}, value);
}

TrapPotential TrapPotential::tabulated(Grid grid, std::vector<double> values) {
    if (values.size() != grid.size()) throw std::invalid_argument("tabulated potential: one value per node required");
    for (double v : values) {
        if (!(v >= 0.0)) throw std::invalid_argument("tabulated potential: values must be >= 0");
    }
    TrapPotential w;
    w.kind_ = Kind::tabulated;
    w.dim_ = grid.dim();
    w.table_grid_ = std::move(grid);
    w.table_ = std::move(values);
    return w;
}

double TrapPotential::operator()(std::span<const double> x) const {
    switch (kind_) {
        case Kind::hard_wall: {
            for (std::size_t a = 0; a < dim_; ++a) {
                if (x[a] < (*box_)[a].lower || x[a] > (*box_)[a].upper) return kInf;
            }
            return offset_;
        }
        case Kind::quadratic: {
            double w = offset_;
            for (std::size_t a = 0; a < dim_; ++a) {
                const double d = x[a] - center_[a];
                w += coefficients_[a] * d * d;
            }
            return w;
        }
        case Kind::tabulated: {
            const Grid& g = *table_grid_;
            if (!g.contains(x)) return kInf;
            std::array<std::size_t, Grid::kMaxDim> lo{};
            std::array<double, Grid::kMaxDim> frac{};
            for (std::size_t a = 0; a < dim_; ++a) {
                const double t = (x[a] - g.bounds()[a].lower) / g.spacing(a);
                auto k = static_cast<std::size_t>(std::floor(t));
                if (k + 1 >= g.points_per_axis()) k = g.points_per_axis() - 2;
                lo[a] = k;
                frac[a] = t - static_cast<double>(k);
            }
            double w = 0.0;
            const std::size_t corners = std::size_t{1} << dim_;
            for (std::size_t c = 0; c < corners; ++c) {
                double weight = 1.0;
                std::array<std::size_t, Grid::kMaxDim> idx{};
                for (std::size_t a = 0; a < dim_; ++a) {
                    const bool up = (c >> a) & 1u;
                    idx[a] = lo[a] + (up ? 1 : 0);
                    weight *= up ? frac[a] : 1.0 - frac[a];
                }
                if (weight == 0.0) continue;
                const double v = table_[g.node_index(idx)];
                if (std::isinf(v)) return kInf;
                w += weight * v;
            }
            return w;
        }
    }
    return kInf;
}

std::vector<double> TrapPotential::on_grid(const Grid& grid) const {
    if (grid.dim() != dim_) throw std::invalid_argument("potential/grid dimension mismatch");
    std::vector<double> values(grid.size());
    Point p(grid.dim());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        grid.node(i, p);
        values[i] = (*this)(p);
    }
    return values;
}

bool TrapPotential::confining() const noexcept {
    switch (kind_) {
        case Kind::hard_wall:
        case Kind::tabulated: return true;
        case Kind::quadratic:
            for (double a : coefficients_)
                if (a <= 0.0) return false;
            return true;
    }
    return false;
}

TrapPotential TrapPotential::shifted(double c) const {
    TrapPotential w = *this;
    if (kind_ == Kind::tabulated) {
        for (double& v : w.table_) v += c;
    } else {
        w.offset_ += c;
    }
    return w;
}

std::string TrapPotential::describe() const {
    std::ostringstream os;
    switch (kind_) {
        case Kind::hard_wall:
            os << "hard_wall box=";
            for (const auto& iv : *box_) os << '[' << csv::format_double(iv.lower) << ',' << csv::format_double(iv.upper) << ']';
            break;
        case Kind::quadratic:
            os << "quadratic coefficients=";
            for (double a : coefficients_) os << csv::format_double(a) << ' ';
            os << "center=";
            for (double c : center_) os << csv::format_double(c) << ' ';
            break;
        case Kind::tabulated: os << "tabulated nodes=" << table_.size(); break;
    }
    os << " offset=" << csv::format_double(offset_);
    return os.str();
}

std::vector<bool> interior_mask(const Grid& grid, const std::vector<Interval>& box) {
    std::vector<bool> mask(grid.size());
    Point p(grid.dim());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        grid.node(i, p);
        bool inside = true;
        for (std::size_t a = 0; a < grid.dim(); ++a) {
            const double tol = 1e-9 * grid.spacing(a);
            if (!(p[a] > box[a].lower + tol && p[a] < box[a].upper - tol)) inside = false;
        }
        mask[i] = inside;
    }
    return mask;
}

}  // namespace symbridge
