#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "paraexp/linode.hpp"

namespace paraexp {

/// Small dense matrix, row-major. Used only for the exact-exponential path;
/// everything performance-critical stays sparse.
struct DenseMatrix {
    std::size_t nrows = 0;
    std::size_t ncols = 0;
    std::vector<double> data;  // row-major, nrows*ncols

    DenseMatrix() = default;
    DenseMatrix(std::size_t r, std::size_t c) : nrows(r), ncols(c), data(r * c, 0.0) {}

    double& at(std::size_t i, std::size_t j) { return data[i * ncols + j]; }
    double at(std::size_t i, std::size_t j) const { return data[i * ncols + j]; }

    static DenseMatrix identity(std::size_t n);
    static DenseMatrix from_sparse(const SparseMatrix& a);
};

StateVector apply(const DenseMatrix& a, const StateVector& x);

/// Largest dimension accepted by the dense exponential. Larger systems must
/// use the Taylor action (ExpmMode::TaylorAction).
inline constexpr std::size_t kDenseExpmGuard = 4000;

/// exp(t*a) by scaling and squaring with a degree-13 diagonal Pade kernel.
/// Near machine precision; diagonal Pade maps skew-adjoint operators to
/// isometries, which is what keeps discrete energy exactly conserved.
/// Throws std::invalid_argument above kDenseExpmGuard.
DenseMatrix expm_dense(const DenseMatrix& a, double t);

/// Convenience wrapper: guard is checked before densifying.
DenseMatrix expm_dense(const SparseMatrix& a, double t);

/// exp(t*a)*b through s substeps of the degree-m Taylor polynomial:
///   b_{i+1} = sum_{j=0..m} ((t/s) a)^j / j! * b_i
/// evaluated with the term recurrence term_j = ((t/s)/j) a * term_{j-1} —
/// m sparse matrix-vector products per substep, no matrix powers.
/// Throws NumericalError (reporting m, s and the substep) on non-finite values.
StateVector expm_action_taylor(const SparseMatrix& a, const StateVector& b, double t, int m,
                               int s);

/// Column-wise 1-norm max_j sum_i |a_ij|.
double one_norm(const SparseMatrix& a);

/// Parameter rule for the Taylor action: m = 20 fixed, s the smallest integer
/// with ||t*a||_1 / s <= 1. Under that scaling the degree-20 remainder is
/// below 1/21! ~ 2e-20, sufficient for any tol >= 1e-16.
std::pair<int, int> select_taylor_params(const SparseMatrix& a, double t, double tol);

enum class ExpmMode { Dense, TaylorAction };

struct ExpmConfig {
    ExpmMode mode = ExpmMode::TaylorAction;
    int m = 20;
    int s = 1;
    bool auto_params = true;  // TaylorAction: pick (m, s) per gap, ignoring m/s above
};

}  // namespace paraexp
