#include "symbridge/diffusion/process_sampler.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "symbridge/common/rng.hpp"
#include "symbridge/diffusion/girsanov.hpp"

namespace symbridge {

ProcessSample schrodinger_process_sampler(const PairMeasure& q_star, const FKKernel& K, const TrapPotential& W,
                                          double beta, std::size_t M, std::size_t n_paths, std::uint64_t seed,
                                          const Exec& exec, const ProcessSamplerOptions& opts) {
    if (M < 2) throw std::invalid_argument("process sampler: M must be >= 2");
    if (n_paths < 1) throw std::invalid_argument("process sampler: n_paths must be >= 1");
    if (std::abs(q_star.total_mass() - 1.0) > 1e-9) throw std::invalid_argument("process sampler: q* must be a probability");
    if (!(q_star.grid() == K.grid)) throw std::invalid_argument("process sampler: grid mismatch");
    const Grid& grid = K.grid;
    const std::size_t n = grid.size();
    const linalg::Matrix qm = q_star.masses();
    const std::size_t proposals = n_paths * opts.oversampling;

    struct Partial {
        std::vector<PathSample> paths;
        std::vector<double> log_w;
    };
    const auto chunks = make_chunks(proposals, exec.chunk_size);
    std::vector<Partial> parts(chunks.size());
    for_each_chunk(chunks, exec, [&](const ChunkRange& c) {
        Rng rng = make_stream(seed, c.index);
        std::discrete_distribution<std::size_t> pick(qm.data().begin(), qm.data().end());
        Partial& p = parts[c.index];
        for (std::size_t s = c.begin; s < c.end; ++s) {
            const std::size_t cell = pick(rng);
            const std::size_t i = cell / n, j = cell % n;
            const Point x = grid.node(i), y = grid.node(j);
            PathSample path = sample_bridge(x, y, beta, M, rng);
            double lw = fk_log_weight(path, W);
            if (opts.wall_crossing_correction && W.hard_wall_box() && lw > -std::numeric_limits<double>::infinity()) {
                lw += wall_survival_log(path, *W.hard_wall_box());
            }
            const double k = K.matrix(i, j);
            lw = k > 0.0 ? lw - (std::log(k) - log_gauss_kernel(x, y, beta)) : -std::numeric_limits<double>::infinity();
            path.log_weight = lw;
            p.log_w.push_back(lw);
            p.paths.push_back(std::move(path));
        }
    });

    std::vector<PathSample> pool;
    std::vector<double> log_w;
    for (auto& p : parts) {
        for (auto& path : p.paths) pool.push_back(std::move(path));
        log_w.insert(log_w.end(), p.log_w.begin(), p.log_w.end());
    }
    double mx = -std::numeric_limits<double>::infinity();
    for (double v : log_w) mx = std::max(mx, v);
    if (mx == -std::numeric_limits<double>::infinity()) throw std::runtime_error("process sampler: every proposal has zero weight");
    std::vector<double> w(log_w.size());
    double sw = 0.0, sw2 = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        w[i] = std::exp(log_w[i] - mx);
        sw += w[i];
        sw2 += w[i] * w[i];
    }

    ProcessSample out;
    out.proposals = proposals;
    out.effective_sample_size = sw * sw / sw2;
    out.low_ess_flag = out.effective_sample_size < opts.low_ess_fraction * static_cast<double>(n_paths);

    // Systematic resampling with one uniform offset from a dedicated stream.
    Rng rng = make_stream(seed, chunks.size());
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double step = sw / static_cast<double>(n_paths);
    double target = u(rng) * step;
    double cum = 0.0;
    std::size_t idx = 0;
    out.paths.reserve(n_paths);
    for (std::size_t k = 0; k < n_paths; ++k) {
        while (idx + 1 < w.size() && cum + w[idx] <= target) cum += w[idx++];
        PathSample p = pool[idx];
        p.log_weight = 0.0;
        out.paths.push_back(std::move(p));
        target += step;
    }
    return out;
}

DiscreteMeasure path_marginal(const std::vector<PathSample>& paths, const Grid& grid, std::size_t step) {
    if (paths.empty()) throw std::invalid_argument("path_marginal: no paths");
    std::vector<double> h(grid.size(), 0.0);
    for (const auto& p : paths) h[grid.nearest_node(p.position(step))] += 1.0;
    for (double& v : h) v /= grid.cell_volume();
    return DiscreteMeasure::normalized(grid, std::move(h));
}

PairMeasure path_pair_marginal(const std::vector<PathSample>& paths, const Grid& grid, std::size_t k0, std::size_t k1) {
    if (paths.empty()) throw std::invalid_argument("path_pair_marginal: no paths");
    linalg::Matrix h(grid.size(), grid.size());
    for (const auto& p : paths) h(grid.nearest_node(p.position(k0)), grid.nearest_node(p.position(k1))) += 1.0;
    h *= 1.0 / static_cast<double>(paths.size());
    return PairMeasure::from_masses(grid, std::move(h));
}

}  // namespace symbridge
