#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "symbridge/bridge/fk_kernel.hpp"
#include "symbridge/linalg/matrix.hpp"
#include "symbridge/measure/measure.hpp"

namespace symbridge {

// Positive reference weight g(x,y) on grid pairs.
class PairWeight {
  public:
    // g = p_beta, the free Gaussian kernel at the kernel's time horizon.
    static PairWeight gaussian();
    static PairWeight constant(double c);
    static PairWeight tabulated(linalg::Matrix values);

    bool is_gaussian() const noexcept { return kind_ == Kind::gaussian; }
    // g on the nodes of the grid at time beta. Throws if any value is <= 0.
    linalg::Matrix on_grid(const Grid& grid, double beta) const;

  private:
    enum class Kind { gaussian, constant, tabulated };
    Kind kind_ = Kind::gaussian;
    double constant_ = 1.0;
    linalg::Matrix values_;
};

// (K / p_beta) * g; exactly K when g = p_beta.
linalg::Matrix effective_kernel(const FKKernel& K, const PairWeight& g);

// T(x,y) = (K(x,y)/p_beta(x,y)) g(x,y) m({y}).
linalg::Matrix build_T_operator(const FKKernel& K, const PairWeight& g, const DiscreteMeasure& m);

struct TEigenpair {
    double lambda_T = 0.0;
    std::vector<double> phi_T;  // per grid node, sum phi^2 m = 1, zero off the support
    std::size_t iterations = 0;
    double residual = 0.0;      // sup |T phi - lambda phi| / lambda
};

// Perron root and vector by power iteration. Throws std::domain_error when T
// restricted to its support is reducible, ConvergenceError at the cap.
TEigenpair t_eigenpair(const linalg::Matrix& T, const DiscreteMeasure& m, double rel_tol = 1e-12,
                       std::size_t max_iterations = 100000);

// Unnormalized masses phi(x) phi(y) (K/p) g m(x) m(y) / lambda_T; they sum to
// one for an exact eigenpair.
linalg::Matrix minimizing_pair_masses(double lambda_T, const std::vector<double>& phi_T, const FKKernel& K,
                                      const PairWeight& g, const DiscreteMeasure& m);
PairMeasure minimizing_pair_measure(double lambda_T, const std::vector<double>& phi_T, const FKKernel& K,
                                    const PairWeight& g, const DiscreteMeasure& m);

// H(q | qbar x m) - sum q log(K/p_beta) - sum q log g; +inf when q is not
// absolutely continuous with respect to the reference.
double schrodinger_objective(const PairMeasure& q, const DiscreteMeasure& m, const FKKernel& K, const PairWeight& g);

struct SinkhornPotentials {
    std::vector<double> log_a;
    std::vector<double> log_b;
    std::size_t iterations = 0;
    std::vector<double> error_history;
    bool damped = false;
    double marginal_error = 0.0;
};

struct SchrodingerSolution {
    double lambda_T = 0.0;
    std::vector<double> phi_T;
    PairMeasure q_star;
    double objective = 0.0;
    std::optional<SinkhornPotentials> potentials;
};

// Eigen route for the symmetric problem: (lambda_T, phi_T), q* and its objective.
SchrodingerSolution solve_symmetric_problem(const FKKernel& K, const PairWeight& g, const DiscreteMeasure& m);

}  // namespace symbridge
