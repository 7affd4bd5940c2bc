#include "symbridge/ensemble/ensemble.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <stdexcept>

#include "symbridge/common/error.hpp"
#include "symbridge/ensemble/permutation.hpp"

namespace symbridge {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::discrete_distribution<std::size_t> start_distribution(const DiscreteMeasure& m) {
    const auto masses = m.masses();
    return std::discrete_distribution<std::size_t>(masses.begin(), masses.end());
}

EnsembleSample draw(const DiscreteMeasure& m, std::discrete_distribution<std::size_t>& starts, std::size_t N,
                    double beta, std::size_t M, const TrapPotential& W, Rng& rng, const LogPairWeight& log_pair) {
    if (N < 1) throw std::invalid_argument("ensemble: N must be >= 1");
    EnsembleSample s;
    PermutationDraw perm = sample_permutation(N, rng);
    s.permutation = std::move(perm.sigma);
    s.cycle_type = std::move(perm.cycle_type);
    s.start_nodes.resize(N);
    for (std::size_t i = 0; i < N; ++i) s.start_nodes[i] = starts(rng);

    const Grid& grid = m.grid();
    std::vector<Point> pts(N);
    for (std::size_t i = 0; i < N; ++i) pts[i] = grid.node(s.start_nodes[i]);

    s.paths.reserve(N);
    double lw = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        PathSample p = sample_bridge(pts[i], pts[s.permutation[i]], beta, M, rng);
        lw += attach_weight(p, W);
        if (const auto& box = W.hard_wall_box()) lw += wall_survival_log(p, *box);
        if (log_pair) lw += log_pair(s.start_nodes[i], s.start_nodes[s.permutation[i]]);
        s.paths.push_back(std::move(p));
    }
    s.log_weight = std::isnan(lw) ? kNegInf : lw;
    return s;
}

}  // namespace

EnsembleSample sample_sym_ensemble(const DiscreteMeasure& m, std::size_t N, double beta, std::size_t M,
                                   const TrapPotential& W, Rng& rng, const LogPairWeight& log_pair) {
    if (!m.is_probability()) throw std::invalid_argument("sample_sym_ensemble: m must be a probability measure");
    auto starts = start_distribution(m);
    return draw(m, starts, N, beta, M, W, rng, log_pair);
}

EnsembleAccumulator::EnsembleAccumulator(Grid grid, double beta, std::size_t M, std::vector<double> time_marks)
    : grid_(std::move(grid)), beta_(beta), M_(M), times_(std::move(time_marks)), log_shift_(kNegInf) {
    if (M_ < 1 || !(beta_ > 0.0)) throw std::invalid_argument("ensemble accumulator: need M >= 1 and beta > 0");
    for (double t : times_) {
        const double k = std::round(t / beta_ * static_cast<double>(M_));
        if (k < 0.0 || k > static_cast<double>(M_) ||
            std::abs(k * beta_ / static_cast<double>(M_) - t) > 1e-9 * beta_) {
            throw std::invalid_argument("ensemble accumulator: time mark is not on the path mesh");
        }
        mark_steps_.push_back(static_cast<std::size_t>(k));
    }
    // Trapezoid weights of the normalized time average (1/beta) int_0^beta.
    time_weights_.assign(M_ + 1, 1.0 / static_cast<double>(M_));
    time_weights_.front() *= 0.5;
    time_weights_.back() *= 0.5;
    l_hist_.assign(times_.size(), std::vector<double>(grid_.size(), 0.0));
    y_hist_.assign(grid_.size(), 0.0);
}

void EnsembleAccumulator::rescale(double new_shift) {
    const double f = log_shift_ == kNegInf ? 0.0 : std::exp(log_shift_ - new_shift);
    w_sum_ *= f;
    w_sq_ *= f * f;
    for (auto& h : l_hist_)
        for (double& v : h) v *= f;
    for (double& v : y_hist_) v *= f;
    log_shift_ = new_shift;
}

void EnsembleAccumulator::add(const EnsembleSample& s) {
    ++count_;
    if (s.log_weight == kNegInf) return;
    if (s.log_weight > log_shift_) rescale(s.log_weight);
    const double w = std::exp(s.log_weight - log_shift_);
    w_sum_ += w;
    w_sq_ += w * w;
    const double per_path = w / static_cast<double>(s.paths.size());
    for (const auto& p : s.paths) {
        if (p.steps() != M_) throw std::invalid_argument("ensemble accumulator: path mesh mismatch");
        for (std::size_t t = 0; t < mark_steps_.size(); ++t) {
            l_hist_[t][grid_.nearest_node(p.position(mark_steps_[t]))] += per_path;
        }
        for (std::size_t k = 0; k <= M_; ++k) y_hist_[grid_.nearest_node(p.position(k))] += per_path * time_weights_[k];
    }
}

void EnsembleAccumulator::merge(const EnsembleAccumulator& other) {
    if (!(other.grid_ == grid_) || other.M_ != M_ || other.times_ != times_) {
        throw std::invalid_argument("ensemble accumulator: incompatible merge");
    }
    count_ += other.count_;
    if (other.log_shift_ == kNegInf) return;
    if (other.log_shift_ > log_shift_) rescale(other.log_shift_);
    const double f = std::exp(other.log_shift_ - log_shift_);
    w_sum_ += f * other.w_sum_;
    w_sq_ += f * f * other.w_sq_;
    for (std::size_t t = 0; t < l_hist_.size(); ++t)
        for (std::size_t i = 0; i < grid_.size(); ++i) l_hist_[t][i] += f * other.l_hist_[t][i];
    for (std::size_t i = 0; i < grid_.size(); ++i) y_hist_[i] += f * other.y_hist_[i];
}

EnsembleEstimates EnsembleAccumulator::estimates(std::uint64_t seed) const {
    if (count_ == 0 || !(w_sum_ > 0.0)) throw EstimationError("ensemble: all importance weights are zero");
    const double n = static_cast<double>(count_);
    const double scale = std::exp(log_shift_);
    const double mean_rel = w_sum_ / n;
    const double var_rel = count_ > 1 ? std::max(0.0, (w_sq_ / n - mean_rel * mean_rel) * n / (n - 1.0)) : 0.0;

    auto to_measure = [&](const std::vector<double>& h) {
        std::vector<double> dens(h.size());
        for (std::size_t i = 0; i < h.size(); ++i) dens[i] = h[i] / w_sum_ / grid_.cell_volume();
        return DiscreteMeasure::normalized(grid_, std::move(dens));
    };
    std::vector<DiscreteMeasure> marginals;
    for (const auto& h : l_hist_) marginals.push_back(to_measure(h));

    EnsembleEstimates e{McEstimate{scale * mean_rel, scale * std::sqrt(var_rel / n), count_},
                        log_shift_ + std::log(mean_rel),
                        w_sum_ * w_sum_ / w_sq_,
                        times_,
                        std::move(marginals),
                        to_measure(y_hist_),
                        count_,
                        seed};
    return e;
}

EnsembleEstimates ensemble_estimates(std::span<const EnsembleSample> samples, const Grid& grid,
                                     const std::vector<double>& time_marks) {
    if (samples.empty() || samples.front().paths.empty()) throw EstimationError("ensemble: no samples");
    const PathSample& p0 = samples.front().paths.front();
    EnsembleAccumulator acc(grid, p0.times.back(), p0.steps(), time_marks);
    for (const auto& s : samples) acc.add(s);
    return acc.estimates();
}

EnsembleEstimates simulate_ensemble(const EnsembleProblem& problem, const Grid& grid,
                                    const std::vector<double>& time_marks, std::size_t n_samples,
                                    std::uint64_t seed, const Exec& exec) {
    if (n_samples < 1) throw std::invalid_argument("simulate_ensemble: n_samples must be >= 1");
    if (!problem.m.is_probability()) throw std::invalid_argument("simulate_ensemble: m must be a probability measure");
    const auto chunks = make_chunks(n_samples, exec.chunk_size);
    std::vector<std::optional<EnsembleAccumulator>> partials(chunks.size());
    for_each_chunk(chunks, exec, [&](const ChunkRange& c) {
        Rng rng = make_stream(seed, c.index);
        auto starts = start_distribution(problem.m);
        EnsembleAccumulator acc(grid, problem.beta, problem.M, time_marks);
        for (std::size_t i = c.begin; i < c.end; ++i) {
            acc.add(draw(problem.m, starts, problem.N, problem.beta, problem.M, problem.W, rng, problem.log_pair));
        }
        partials[c.index] = std::move(acc);
    });
    EnsembleAccumulator total(grid, problem.beta, problem.M, time_marks);
    for (auto& p : partials) total.merge(*p);
    return total.estimates(seed);
}

}  // namespace symbridge
