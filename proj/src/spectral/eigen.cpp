#include "symbridge/spectral/eigen.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "symbridge/common/error.hpp"

namespace symbridge {
namespace {

double weighted_norm(const Eigen::VectorXd& v, double vol) { return std::sqrt(v.squaredNorm() * vol); }

}  // namespace

DiscreteMeasure SpectralResult::density() const {
    std::vector<double> d(phi.size());
    for (std::size_t i = 0; i < phi.size(); ++i) d[i] = phi[i] * phi[i];
    return DiscreteMeasure::normalized(grid, std::move(d));
}

SpectralResult principal_eigenpair(const HamiltonianOperator& op, const EigenOptions& opts) {
    const std::size_t n = op.size();
    const CsrMatrix& csr = op.matrix;
    const double vol = op.grid.cell_volume();

    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(csr.val.size());
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t k = csr.row_ptr[r]; k < csr.row_ptr[r + 1]; ++k)
            trips.emplace_back(static_cast<int>(r), static_cast<int>(csr.col[k]), csr.val[k]);
    Eigen::SparseMatrix<double> H(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    H.setFromTriplets(trips.begin(), trips.end());

    const double sigma = *std::min_element(op.potential.begin(), op.potential.end()) - 1.0;
    Eigen::SparseMatrix<double> I(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    I.setIdentity();
    const Eigen::SparseMatrix<double> A = H - sigma * I;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(A);
    if (solver.info() != Eigen::Success) throw std::runtime_error("principal_eigenpair: factorization failed");

    Eigen::VectorXd v = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(n));
    v /= weighted_norm(v, vol);
    double lambda = std::numeric_limits<double>::infinity();
    double residual = std::numeric_limits<double>::infinity();

    for (std::size_t it = 1; it <= opts.max_iterations; ++it) {
        Eigen::VectorXd w = solver.solve(v);
        w /= weighted_norm(w, vol);
        const Eigen::VectorXd hw = H * w;
        const double next = w.dot(hw) * vol;
        residual = weighted_norm(hw - next * w, vol);
        const bool settled = std::abs(next - lambda) <= opts.rel_tol * std::abs(next);
        lambda = next;
        v = std::move(w);
        if (settled && residual <= 1e-8 * std::abs(lambda) + 1e-10) {
            if (v.sum() < 0.0) v = -v;
            std::vector<double> active(v.data(), v.data() + v.size());
            return SpectralResult{op.grid, lambda, op.to_grid(active), residual, it};
        }
    }
    std::vector<double> active(v.data(), v.data() + v.size());
    throw ConvergenceError("principal_eigenpair: no convergence within the iteration cap", op.to_grid(active), residual);
}

}  // namespace symbridge
