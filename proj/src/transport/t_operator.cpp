#include "symbridge/transport/t_operator.hpp"

#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>

#include "symbridge/bridge/bridge.hpp"
#include "symbridge/common/error.hpp"

namespace symbridge {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool reaches_all(const linalg::Matrix& T, const std::vector<std::size_t>& support, bool transpose) {
    const std::size_t n = T.rows();
    std::vector<bool> in(n, false), seen(n, false);
    for (std::size_t i : support) in[i] = true;
    std::queue<std::size_t> q;
    q.push(support.front());
    seen[support.front()] = true;
    std::size_t count = 1;
    while (!q.empty()) {
        const std::size_t i = q.front();
        q.pop();
        for (std::size_t j : support) {
            const double v = transpose ? T(j, i) : T(i, j);
            if (!seen[j] && v > 0.0) {
                seen[j] = true;
                ++count;
                q.push(j);
            }
        }
    }
    return count == support.size();
}

}  // namespace

PairWeight PairWeight::gaussian() { return PairWeight{}; }

PairWeight PairWeight::constant(double c) {
    if (!(c > 0.0) || !std::isfinite(c)) throw std::invalid_argument("pair weight must be > 0");
    PairWeight g;
    g.kind_ = Kind::constant;
    g.constant_ = c;
    return g;
}

PairWeight PairWeight::tabulated(linalg::Matrix values) {
    for (double v : values.data())
        if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument("pair weight must be > 0");
    PairWeight g;
    g.kind_ = Kind::tabulated;
    g.values_ = std::move(values);
    return g;
}

linalg::Matrix PairWeight::on_grid(const Grid& grid, double beta) const {
    const std::size_t n = grid.size();
    switch (kind_) {
        case Kind::constant: return linalg::Matrix(n, n, constant_);
        case Kind::tabulated:
            if (values_.rows() != n || values_.cols() != n) throw std::invalid_argument("pair weight shape mismatch");
            return values_;
        case Kind::gaussian: {
            linalg::Matrix g(n, n);
            for (std::size_t i = 0; i < n; ++i) {
                const Point xi = grid.node(i);
                for (std::size_t j = 0; j < n; ++j) g(i, j) = gauss_kernel(xi, grid.node(j), beta);
            }
            return g;
        }
    }
    return {};
}

linalg::Matrix effective_kernel(const FKKernel& K, const PairWeight& g) {
    if (g.is_gaussian()) return K.matrix;
    const linalg::Matrix gv = g.on_grid(K.grid, K.beta);
    const std::size_t n = K.grid.size();
    linalg::Matrix e(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        const Point xi = K.grid.node(i);
        for (std::size_t j = 0; j < n; ++j) {
            const double k = K.matrix(i, j);
            if (k == 0.0) continue;
            e(i, j) = std::exp(std::log(k) - log_gauss_kernel(xi, K.grid.node(j), K.beta)) * gv(i, j);
        }
    }
    return e;
}

linalg::Matrix build_T_operator(const FKKernel& K, const PairWeight& g, const DiscreteMeasure& m) {
    if (!(m.grid() == K.grid)) throw std::invalid_argument("build_T_operator: grid mismatch");
    linalg::Matrix t = effective_kernel(K, g);
    const auto mass = m.masses();
    for (std::size_t i = 0; i < t.rows(); ++i)
        for (std::size_t j = 0; j < t.cols(); ++j) t(i, j) *= mass[j];
    return t;
}

TEigenpair t_eigenpair(const linalg::Matrix& T, const DiscreteMeasure& m, double rel_tol, std::size_t max_iterations) {
    const std::size_t n = T.rows();
    if (!T.square() || n != m.grid().size()) throw std::invalid_argument("t_eigenpair: shape mismatch");
    for (double v : T.data())
        if (v < 0.0 || !std::isfinite(v)) throw std::invalid_argument("t_eigenpair: T must be nonnegative");

    std::vector<std::size_t> support;
    for (std::size_t i = 0; i < n; ++i) {
        bool row = false;
        for (std::size_t j = 0; j < n && !row; ++j) row = T(i, j) > 0.0 || T(j, i) > 0.0;
        if (row && m.mass(i) > 0.0) support.push_back(i);
    }
    if (support.empty()) throw std::domain_error("t_eigenpair: T vanishes on the support of m");
    if (!reaches_all(T, support, false) || !reaches_all(T, support, true)) {
        throw std::domain_error("t_eigenpair: T is reducible on its support");
    }

    const auto mass = m.masses();
    std::vector<double> v(n, 0.0);
    for (std::size_t i : support) v[i] = 1.0;
    auto m_dot = [&](const std::vector<double>& a, const std::vector<double>& b) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i] * mass[i];
        return s;
    };
    auto normalize = [&](std::vector<double>& a) {
        const double s = std::sqrt(m_dot(a, a));
        for (double& x : a) x /= s;
    };
    normalize(v);

    double lambda = 0.0;
    for (std::size_t it = 1; it <= max_iterations; ++it) {
        std::vector<double> tv = linalg::apply(T, v);
        const double next = m_dot(v, tv);
        double resid = 0.0, vmax = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            resid = std::max(resid, std::abs(tv[i] - next * v[i]));
            vmax = std::max(vmax, std::abs(v[i]));
        }
        resid /= next * vmax;
        const bool settled = std::abs(next - lambda) <= rel_tol * next && resid <= 1e-11;
        lambda = next;
        if (settled) {
            for (std::size_t i = 0; i < n; ++i) v[i] = m.mass(i) > 0.0 ? std::abs(v[i]) : 0.0;
            normalize(v);
            return TEigenpair{lambda, std::move(v), it, resid};
        }
        v = std::move(tv);
        normalize(v);
    }
    throw ConvergenceError("t_eigenpair: power iteration did not converge", v, lambda);
}

linalg::Matrix minimizing_pair_masses(double lambda_T, const std::vector<double>& phi_T, const FKKernel& K,
                                      const PairWeight& g, const DiscreteMeasure& m) {
    if (!(lambda_T > 0.0)) throw std::invalid_argument("minimizing_pair_measure: lambda_T must be > 0");
    linalg::Matrix q = effective_kernel(K, g);
    const auto mass = m.masses();
    for (std::size_t i = 0; i < q.rows(); ++i) {
        const double left = phi_T[i] * mass[i] / lambda_T;
        for (std::size_t j = 0; j < q.cols(); ++j) q(i, j) *= left * phi_T[j] * mass[j];
    }
    return linalg::symmetrized(q);
}

PairMeasure minimizing_pair_measure(double lambda_T, const std::vector<double>& phi_T, const FKKernel& K,
                                    const PairWeight& g, const DiscreteMeasure& m) {
    linalg::Matrix q = minimizing_pair_masses(lambda_T, phi_T, K, g, m);
    q *= 1.0 / q.sum();
    return PairMeasure::from_masses(K.grid, std::move(q));
}

double schrodinger_objective(const PairMeasure& q, const DiscreteMeasure& m, const FKKernel& K, const PairWeight& g) {
    if (!(q.grid() == K.grid) || !(m.grid() == K.grid)) throw std::invalid_argument("schrodinger_objective: grid mismatch");
    if (std::abs(q.total_mass() - 1.0) > 1e-9) throw std::invalid_argument("schrodinger_objective: q must be a probability");
    if (!q.is_symmetric(1e-9)) throw std::invalid_argument("schrodinger_objective: q must be symmetric");
    const linalg::Matrix qm = q.masses();
    const linalg::Matrix e = effective_kernel(K, g);
    const auto mass = m.masses();
    const std::size_t n = qm.rows();
    std::vector<double> qbar(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) qbar[i] += qm(i, j);
    double value = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double v = qm(i, j);
            if (v == 0.0) continue;
            const double ref = qbar[i] * mass[j] * e(i, j);
            if (!(ref > 0.0)) return kInf;
            value += v * std::log(v / ref);
        }
    }
    return value;
}

SchrodingerSolution solve_symmetric_problem(const FKKernel& K, const PairWeight& g, const DiscreteMeasure& m) {
    const linalg::Matrix T = build_T_operator(K, g, m);
    TEigenpair ep = t_eigenpair(T, m);
    PairMeasure q = minimizing_pair_measure(ep.lambda_T, ep.phi_T, K, g, m);
    const double obj = schrodinger_objective(q, m, K, g);
    return SchrodingerSolution{ep.lambda_T, std::move(ep.phi_T), std::move(q), obj, std::nullopt};
}

}  // namespace symbridge
