#pragma once

#include <cstddef>
#include <cstdint>

#include "symbridge/linalg/matrix.hpp"
#include "symbridge/measure/measure.hpp"
#include "symbridge/transport/t_operator.hpp"

namespace symbridge {

struct SinkhornOptions {
    double tol = 1e-10;
    std::size_t max_iterations = 100000;
};

// Fixed-marginal problem by alternating scaling: q(x,y) = a(x) K_eff(x,y) b(y)
// (in masses) with row sums nu1 and column sums nu2. The error is the sup-norm
// of the row-marginal mismatch after each column update. Throws SupportError
// when required mass meets an empty kernel row, ConvergenceError at the cap.
SchrodingerSolution sinkhorn_bridge(const linalg::Matrix& K_eff, const DiscreteMeasure& nu1,
                                    const DiscreteMeasure& nu2, const SinkhornOptions& opts = {});

// Max |r(x,y) + r(x',y') - r(x,y') - r(x',y)| with r = log q - log K_eff, over
// quadruples anchored at the heaviest row and column plus random ones.
// +inf when q vanishes where K_eff does not.
double factorization_check(const PairMeasure& q, const linalg::Matrix& K_eff, std::size_t random_quadruples = 10000,
                           std::uint64_t seed = 1);

}  // namespace symbridge
