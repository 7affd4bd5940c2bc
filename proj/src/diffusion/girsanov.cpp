#include "symbridge/diffusion/girsanov.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace symbridge {

double girsanov_log_density(const PathSample& path, double lambda, const SpectralResult& phi, const TrapPotential& W,
                            const GirsanovOptions& opts) {
    if (path.dim != phi.grid.dim()) throw std::invalid_argument("girsanov: path/grid dimension mismatch");
    const double phi0 = interpolate(phi.grid, phi.phi, path.position(0));
    if (!(phi0 > 0.0)) throw std::domain_error("girsanov: phi vanishes at the path start");
    const double phi1 = interpolate(phi.grid, phi.phi, path.position(path.steps()));
    if (!(phi1 > 0.0)) return -std::numeric_limits<double>::infinity();

    std::vector<double> w(path.times.size());
    for (std::size_t k = 0; k < w.size(); ++k) w[k] = W(path.position(k)) - lambda;
    double log_d = trapezoid_log_weight(path.times, w);
    if (log_d == -std::numeric_limits<double>::infinity()) return log_d;
    if (opts.wall_crossing_correction) {
        if (const auto& box = W.hard_wall_box()) log_d += wall_survival_log(path, *box);
    }
    return log_d + std::log(phi1) - std::log(phi0);
}

double girsanov_density(const PathSample& path, double lambda, const SpectralResult& phi, const TrapPotential& W,
                        const GirsanovOptions& opts) {
    return std::exp(girsanov_log_density(path, lambda, phi, W, opts));
}

McEstimate martingale_check(std::span<const double> x, double beta, double lambda, const SpectralResult& phi,
                            const TrapPotential& W, std::size_t n_samples, std::uint64_t seed, std::size_t M,
                            const Exec& exec, const GirsanovOptions& opts) {
    if (n_samples < 1) throw std::invalid_argument("martingale_check: n_samples must be >= 1");
    const MomentAccumulator acc = map_reduce_chunks<MomentAccumulator>(
        n_samples, exec,
        [&](const ChunkRange& c) {
            Rng rng = make_stream(seed, c.index);
            MomentAccumulator local;
            for (std::size_t i = c.begin; i < c.end; ++i) {
                local.add(girsanov_density(sample_free_path(x, beta, M, rng), lambda, phi, W, opts));
            }
            return local;
        },
        [](MomentAccumulator& total, const MomentAccumulator& part) { total.merge(part); });
    return acc.estimate();
}

}  // namespace symbridge
