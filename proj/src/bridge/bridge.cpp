#include "symbridge/bridge/bridge.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace symbridge {
namespace {

void check_beta(double beta) {
    if (!(beta > 0.0) || !std::isfinite(beta)) throw std::invalid_argument("beta must be finite and > 0");
}

void check_same_dim(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.empty()) throw std::invalid_argument("endpoint dimension mismatch");
}

std::vector<double> uniform_times(double beta, std::size_t M) {
    std::vector<double> t(M + 1);
    for (std::size_t k = 0; k <= M; ++k) t[k] = beta * static_cast<double>(k) / static_cast<double>(M);
    t[M] = beta;
    return t;
}

}  // namespace

double log_gauss_kernel(std::span<const double> x, std::span<const double> y, double beta) {
    check_beta(beta);
    check_same_dim(x, y);
    double r2 = 0.0;
    for (std::size_t a = 0; a < x.size(); ++a) r2 += (x[a] - y[a]) * (x[a] - y[a]);
    const double d = static_cast<double>(x.size());
    return -0.5 * d * std::log(4.0 * std::numbers::pi * beta) - r2 / (4.0 * beta);
}

double gauss_kernel(std::span<const double> x, std::span<const double> y, double beta) {
    return std::exp(log_gauss_kernel(x, y, beta));
}

PathSample sample_bridge(std::span<const double> x, std::span<const double> y, double beta, std::size_t M, Rng& rng) {
    check_beta(beta);
    check_same_dim(x, y);
    if (M < 1) throw std::invalid_argument("sample_bridge: M must be >= 1");
    const std::size_t d = x.size();
    PathSample p;
    p.dim = d;
    p.times = uniform_times(beta, M);
    p.positions.assign((M + 1) * d, 0.0);
    for (std::size_t a = 0; a < d; ++a) p.positions[a] = x[a];
    // Sequential conditional Gaussian steps of the bridge pinned at (beta, y).
    for (std::size_t k = 0; k + 1 < M; ++k) {
        const double remaining = beta - p.times[k];
        const double dt = p.times[k + 1] - p.times[k];
        const double frac = dt / remaining;
        const double sd = std::sqrt(2.0 * dt * (beta - p.times[k + 1]) / remaining);
        for (std::size_t a = 0; a < d; ++a) {
            const double cur = p.positions[k * d + a];
            p.positions[(k + 1) * d + a] = cur + frac * (y[a] - cur) + sd * standard_normal(rng);
        }
    }
    for (std::size_t a = 0; a < d; ++a) p.positions[M * d + a] = y[a];
    return p;
}

PathSample sample_free_path(std::span<const double> x, double beta, std::size_t M, Rng& rng) {
    check_beta(beta);
    if (M < 1) throw std::invalid_argument("sample_free_path: M must be >= 1");
    const std::size_t d = x.size();
    PathSample p;
    p.dim = d;
    p.times = uniform_times(beta, M);
    p.positions.assign((M + 1) * d, 0.0);
    for (std::size_t a = 0; a < d; ++a) p.positions[a] = x[a];
    for (std::size_t k = 0; k < M; ++k) {
        const double sd = std::sqrt(2.0 * (p.times[k + 1] - p.times[k]));
        for (std::size_t a = 0; a < d; ++a) {
            p.positions[(k + 1) * d + a] = p.positions[k * d + a] + sd * standard_normal(rng);
        }
    }
    return p;
}

double trapezoid_log_weight(std::span<const double> times, std::span<const double> values) {
    if (times.size() != values.size()) throw std::invalid_argument("trapezoid: size mismatch");
    for (double v : values) {
        if (v == std::numeric_limits<double>::infinity()) return -std::numeric_limits<double>::infinity();
    }
    double integral = 0.0;
    for (std::size_t k = 0; k + 1 < times.size(); ++k) {
        integral += 0.5 * (times[k + 1] - times[k]) * (values[k] + values[k + 1]);
    }
    return -integral;
}

double fk_log_weight(const PathSample& path, const TrapPotential& W) {
    if (path.dim != W.dim()) throw std::invalid_argument("path/potential dimension mismatch");
    std::vector<double> w(path.times.size());
    for (std::size_t k = 0; k < w.size(); ++k) w[k] = W(path.position(k));
    return trapezoid_log_weight(path.times, w);
}

double feynman_kac_weight(const PathSample& path, const TrapPotential& W) { return std::exp(fk_log_weight(path, W)); }

double attach_weight(PathSample& path, const TrapPotential& W) {
    path.log_weight = fk_log_weight(path, W);
    return path.log_weight;
}

double wall_survival_log(const PathSample& path, const std::vector<Interval>& box) {
    double log_p = 0.0;
    const std::size_t d = path.dim;
    for (std::size_t k = 0; k + 1 < path.times.size(); ++k) {
        const double delta = path.times[k + 1] - path.times[k];
        const auto x = path.position(k);
        const auto y = path.position(k + 1);
        for (std::size_t a = 0; a < d; ++a) {
            for (double face : {box[a].lower, box[a].upper}) {
                const double u = (x[a] - face) * (y[a] - face);
                if (u <= 0.0) return -std::numeric_limits<double>::infinity();
                log_p += std::log1p(-std::exp(-u / delta));
            }
        }
    }
    return log_p;
}

McEstimate MomentAccumulator::estimate() const {
    McEstimate e;
    e.n = count;
    if (count == 0) return e;
    const double n = static_cast<double>(count);
    e.mean = sum / n;
    if (count > 1) {
        const double var = std::max(0.0, (sum_sq - n * e.mean * e.mean) / (n - 1.0));
        e.std_error = std::sqrt(var / n);
    }
    return e;
}

McEstimate bridge_fk_mc(std::span<const double> x, std::span<const double> y, double beta, const TrapPotential& W,
                        std::size_t n_samples, std::uint64_t seed, std::size_t M, const Exec& exec) {
    if (n_samples < 1) throw std::invalid_argument("bridge_fk_mc: n_samples must be >= 1");
    check_beta(beta);
    const MomentAccumulator acc = map_reduce_chunks<MomentAccumulator>(
        n_samples, exec,
        [&](const ChunkRange& c) {
            Rng rng = make_stream(seed, c.index);
            MomentAccumulator local;
            for (std::size_t i = c.begin; i < c.end; ++i) {
                local.add(feynman_kac_weight(sample_bridge(x, y, beta, M, rng), W));
            }
            return local;
        },
        [](MomentAccumulator& total, const MomentAccumulator& part) { total.merge(part); });
    return acc.estimate();
}

}  // namespace symbridge
