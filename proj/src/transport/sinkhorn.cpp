#include "symbridge/transport/sinkhorn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "symbridge/common/error.hpp"
#include "symbridge/common/rng.hpp"

namespace symbridge {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

SchrodingerSolution sinkhorn_bridge(const linalg::Matrix& K_eff, const DiscreteMeasure& nu1,
                                    const DiscreteMeasure& nu2, const SinkhornOptions& opts) {
    const std::size_t n = K_eff.rows();
    if (!K_eff.square() || nu1.grid().size() != n || !(nu1.grid() == nu2.grid())) {
        throw std::invalid_argument("sinkhorn_bridge: shape or grid mismatch");
    }
    if (!nu1.is_probability() || !nu2.is_probability()) throw std::invalid_argument("sinkhorn_bridge: marginals must be probabilities");
    for (double v : K_eff.data())
        if (v < 0.0 || !std::isfinite(v)) throw std::invalid_argument("sinkhorn_bridge: kernel must be nonnegative");

    const auto r = nu1.masses();
    const auto c = nu2.masses();
    const linalg::Matrix Kt = K_eff.transposed();
    std::vector<double> a(n, 0.0), b(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) b[j] = c[j] > 0.0 ? 1.0 : 0.0;

    auto update = [&](const linalg::Matrix& k, const std::vector<double>& target, const std::vector<double>& other,
                      std::vector<double>& out, const char* side) {
        const auto kv = linalg::apply(k, other);
        for (std::size_t i = 0; i < n; ++i) {
            if (target[i] == 0.0) {
                out[i] = 0.0;
            } else if (!(kv[i] > 0.0)) {
                throw SupportError(std::string("sinkhorn_bridge: ") + side +
                                   " marginal charges a node the kernel cannot reach");
            } else {
                out[i] = target[i] / kv[i];
            }
        }
    };

    SinkhornPotentials pot;
    std::size_t increases = 0;
    double err = kInf;
    std::vector<double> a_new(n), b_new(n);
    for (std::size_t it = 1; it <= opts.max_iterations; ++it) {
        update(K_eff, r, b, a_new, "first");
        if (pot.damped) {
            for (std::size_t i = 0; i < n; ++i) a[i] = a[i] > 0.0 ? std::sqrt(a[i] * a_new[i]) : a_new[i];
        } else {
            a = a_new;
        }
        update(Kt, c, a, b_new, "second");
        if (pot.damped) {
            for (std::size_t j = 0; j < n; ++j) b[j] = b[j] > 0.0 ? std::sqrt(b[j] * b_new[j]) : b_new[j];
        } else {
            b = b_new;
        }

        const auto kb = linalg::apply(K_eff, b);
        double next = 0.0;
        for (std::size_t i = 0; i < n; ++i) next = std::max(next, std::abs(a[i] * kb[i] - r[i]));
        if (!pot.error_history.empty() && next > pot.error_history.back()) {
            if (++increases >= 2) pot.damped = true;
        }
        pot.error_history.push_back(next);
        err = next;
        pot.iterations = it;
        if (err < opts.tol) break;
    }
    if (!(err < opts.tol)) {
        throw ConvergenceError("sinkhorn_bridge: marginal error above tolerance at the iteration cap", a, err);
    }
    pot.marginal_error = err;

    linalg::Matrix q(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) q(i, j) = a[i] * K_eff(i, j) * b[j];
    q *= 1.0 / q.sum();

    pot.log_a.resize(n);
    pot.log_b.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        pot.log_a[i] = a[i] > 0.0 ? std::log(a[i]) : -kInf;
        pot.log_b[i] = b[i] > 0.0 ? std::log(b[i]) : -kInf;
    }
    return SchrodingerSolution{std::numeric_limits<double>::quiet_NaN(), {},
                               PairMeasure::from_masses(nu1.grid(), std::move(q)),
                               std::numeric_limits<double>::quiet_NaN(), std::move(pot)};
}

double factorization_check(const PairMeasure& q, const linalg::Matrix& K_eff, std::size_t random_quadruples,
                           std::uint64_t seed) {
    const linalg::Matrix qm = q.masses();
    const std::size_t n = qm.rows();
    if (K_eff.rows() != n || K_eff.cols() != n) throw std::invalid_argument("factorization_check: shape mismatch");
    linalg::Matrix r(n, n, std::numeric_limits<double>::quiet_NaN());
    std::vector<double> row_mass(n, 0.0), col_mass(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (K_eff(i, j) > 0.0) {
                if (!(qm(i, j) > 0.0)) return kInf;
                r(i, j) = std::log(qm(i, j)) - std::log(K_eff(i, j));
            }
            row_mass[i] += qm(i, j);
            col_mass[j] += qm(i, j);
        }
    }
    const std::size_t i0 = static_cast<std::size_t>(std::max_element(row_mass.begin(), row_mass.end()) - row_mass.begin());
    const std::size_t j0 = static_cast<std::size_t>(std::max_element(col_mass.begin(), col_mass.end()) - col_mass.begin());

    auto violation = [&](std::size_t i, std::size_t j, std::size_t k, std::size_t l) {
        const double v = r(i, j) + r(k, l) - r(i, l) - r(k, j);
        return std::isnan(v) ? 0.0 : std::abs(v);
    };
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) worst = std::max(worst, violation(i, j, i0, j0));

    Rng rng = make_stream(seed, 0);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    for (std::size_t s = 0; s < random_quadruples; ++s) {
        const std::size_t i = pick(rng), j = pick(rng), k = pick(rng), l = pick(rng);
        worst = std::max(worst, violation(i, j, k, l));
    }
    return worst;
}

}  // namespace symbridge
