#include "symbridge/diffusion/sde.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "symbridge/common/rng.hpp"

namespace symbridge {
namespace {

constexpr std::size_t kMaxRedraws = 1000;

void check_inputs(const DriftField& drift, const DiscreteMeasure& init, double dt) {
    if (!(init.grid() == drift.grid)) throw std::invalid_argument("sde: init and drift grids differ");
    if (!(dt > 0.0)) throw std::invalid_argument("sde: dt must be > 0");
    const double h = drift.grid.min_spacing();
    if (dt > h * h / 4.0) throw std::invalid_argument("sde: dt must not exceed h^2/4");
    Point x(drift.grid.dim());
    for (std::size_t i = 0; i < drift.grid.size(); ++i) {
        if (init.mass(i) <= 0.0) continue;
        drift.grid.node(i, x);
        for (std::size_t a = 0; a < x.size(); ++a) {
            const bool outside = drift.hard_wall ? (x[a] <= drift.domain[a].lower || x[a] >= drift.domain[a].upper)
                                                 : (x[a] < drift.domain[a].lower || x[a] > drift.domain[a].upper);
            if (outside) throw std::invalid_argument("sde: init charges a node outside the open domain");
        }
    }
}

// One sampler state: position plus scratch, advanced by Euler-Maruyama with rejection.
struct Stepper {
    const DriftField& drift;
    double dt;
    double sd;
    Point b, proposal;
    std::size_t rejections = 0;

    Stepper(const DriftField& f, double step) : drift(f), dt(step), sd(std::sqrt(2.0 * step)), b(f.grid.dim()), proposal(f.grid.dim()) {}

    bool inside(const Point& x) const {
        for (std::size_t a = 0; a < x.size(); ++a) {
            if (drift.hard_wall) {
                if (!(x[a] > drift.domain[a].lower && x[a] < drift.domain[a].upper)) return false;
            } else if (!(x[a] >= drift.domain[a].lower && x[a] <= drift.domain[a].upper)) {
                return false;
            }
        }
        return true;
    }

    void advance(Point& x, Rng& rng) {
        drift.evaluate(x, b);
        for (std::size_t attempt = 0; attempt < kMaxRedraws; ++attempt) {
            for (std::size_t a = 0; a < x.size(); ++a) proposal[a] = x[a] + b[a] * dt + sd * standard_normal(rng);
            if (inside(proposal)) {
                x = proposal;
                return;
            }
            ++rejections;
        }
    }
};

std::discrete_distribution<std::size_t> init_distribution(const DiscreteMeasure& init) {
    const auto m = init.masses();
    return std::discrete_distribution<std::size_t>(m.begin(), m.end());
}

}  // namespace

SdeResult simulate_ergodic_sde(const DriftField& drift, const DiscreteMeasure& init, double T_total, double dt,
                               std::uint64_t seed, const SdeOptions& opts) {
    check_inputs(drift, init, dt);
    if (!(T_total >= 0.0)) throw std::invalid_argument("sde: T_total must be >= 0");
    const Grid& grid = drift.grid;
    const auto steps = static_cast<std::size_t>(std::llround(T_total / dt));

    Rng rng = make_stream(seed, 0);
    auto pick = init_distribution(init);
    Point x = grid.node(pick(rng));
    Stepper stepper(drift, dt);
    std::vector<double> counts(grid.size(), 0.0);
    SdeResult out{DiscreteMeasure::lebesgue(grid), {}, steps, 0, 0.0, false};

    auto record = [&](std::size_t k) {
        if (opts.record_every == 0 || k % opts.record_every != 0) return;
        out.trajectory.push_back(static_cast<double>(k) * dt);
        out.trajectory.insert(out.trajectory.end(), x.begin(), x.end());
    };
    counts[grid.nearest_node(x)] += 1.0;
    record(0);
    for (std::size_t k = 1; k <= steps; ++k) {
        stepper.advance(x, rng);
        counts[grid.nearest_node(x)] += 1.0;
        record(k);
    }
    for (double& c : counts) c /= grid.cell_volume();
    out.occupation = DiscreteMeasure::normalized(grid, std::move(counts));
    out.rejections = stepper.rejections;
    const double proposals = static_cast<double>(steps + stepper.rejections);
    out.rejection_rate = proposals > 0.0 ? static_cast<double>(stepper.rejections) / proposals : 0.0;
    out.rejection_flag = out.rejection_rate > opts.rejection_flag_rate;
    return out;
}

SdeEnsembleResult simulate_sde_ensemble(const DriftField& drift, const DiscreteMeasure& init, double dt,
                                        std::size_t n_paths, const std::vector<double>& slice_times,
                                        std::uint64_t seed, const Exec& exec) {
    check_inputs(drift, init, dt);
    if (n_paths < 1) throw std::invalid_argument("sde ensemble: n_paths must be >= 1");
    std::vector<std::size_t> slice_steps;
    for (double t : slice_times) {
        if (!(t >= 0.0)) throw std::invalid_argument("sde ensemble: slice times must be >= 0");
        slice_steps.push_back(static_cast<std::size_t>(std::llround(t / dt)));
    }
    const std::size_t last = slice_steps.empty() ? 0 : *std::max_element(slice_steps.begin(), slice_steps.end());
    const Grid& grid = drift.grid;

    struct Partial {
        std::vector<std::vector<double>> hist;
        std::size_t rejections = 0;
    };
    Partial total = map_reduce_chunks<Partial>(
        n_paths, exec,
        [&](const ChunkRange& c) {
            Rng rng = make_stream(seed, c.index);
            auto pick = init_distribution(init);
            Stepper stepper(drift, dt);
            Partial p{std::vector<std::vector<double>>(slice_steps.size(), std::vector<double>(grid.size(), 0.0)), 0};
            for (std::size_t path = c.begin; path < c.end; ++path) {
                Point x = grid.node(pick(rng));
                for (std::size_t k = 0;; ++k) {
                    for (std::size_t s = 0; s < slice_steps.size(); ++s)
                        if (slice_steps[s] == k) p.hist[s][grid.nearest_node(x)] += 1.0;
                    if (k == last) break;
                    stepper.advance(x, rng);
                }
            }
            p.rejections = stepper.rejections;
            return p;
        },
        [&](Partial& acc, const Partial& part) {
            if (acc.hist.empty()) acc.hist.assign(slice_steps.size(), std::vector<double>(grid.size(), 0.0));
            for (std::size_t s = 0; s < part.hist.size(); ++s)
                for (std::size_t i = 0; i < grid.size(); ++i) acc.hist[s][i] += part.hist[s][i];
            acc.rejections += part.rejections;
        });

    SdeEnsembleResult out;
    out.times = slice_times;
    for (auto& h : total.hist) {
        for (double& v : h) v /= grid.cell_volume();
        out.slices.push_back(DiscreteMeasure::normalized(grid, std::move(h)));
    }
    out.rejections = total.rejections;
    const double proposals = static_cast<double>(n_paths * last + total.rejections);
    out.rejection_rate = proposals > 0.0 ? static_cast<double>(total.rejections) / proposals : 0.0;
    out.rejection_flag = out.rejection_rate > 0.5;
    return out;
}

}  // namespace symbridge
