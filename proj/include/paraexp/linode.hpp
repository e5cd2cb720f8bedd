#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <stdexcept>
#include <vector>

namespace paraexp {

using StateVector = std::vector<double>;

/// Thrown when a computation produces non-finite values or fails to converge.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Real sparse matrix in compressed-row storage.
///
/// row_offsets has length nrows+1, is non-decreasing and ends at nnz();
/// column indices are strictly increasing within each row (no duplicates).
/// Build through SparseBuilder, which sorts coordinate triplets and merges
/// duplicates by summation in a deterministic order.
struct SparseMatrix {
    std::size_t nrows = 0;
    std::size_t ncols = 0;
    std::vector<std::size_t> row_offsets{0};
    std::vector<std::size_t> col_indices;
    std::vector<double> values;

    std::size_t nnz() const { return values.size(); }

    static SparseMatrix identity(std::size_t n);
    static SparseMatrix zero(std::size_t nrows, std::size_t ncols);

    /// Checks the storage invariants; throws std::invalid_argument on violation.
    void validate() const;
};

/// Coordinate-triplet builder for SparseMatrix. add() may be called in any
/// order; build() sorts by (row, col) and sums duplicates.
class SparseBuilder {
public:
    SparseBuilder(std::size_t nrows, std::size_t ncols);

    void add(std::size_t row, std::size_t col, double value);
    SparseMatrix build() const;

private:
    struct Triplet {
        std::size_t row, col;
        double value;
    };
    std::size_t nrows_, ncols_;
    std::vector<Triplet> triplets_;
};

/// y = a * x, summed in row order.
StateVector spmv(const SparseMatrix& a, const StateVector& x);

/// y = a * x into a caller-owned buffer (resized as needed); x and y must not alias.
void spmv_into(const SparseMatrix& a, const StateVector& x, StateVector& y);

/// y = transpose(a) * x without materializing the transpose.
StateVector spmv_transposed(const SparseMatrix& a, const StateVector& x);

SparseMatrix transpose(const SparseMatrix& a);

/// Uniform output grid t0, t0+dt, ... ending at the last point <= t_end.
/// t_end itself is included (as an exact endpoint) when (t_end-t0)/dt is
/// integral within relative tolerance 1e-12.
std::vector<double> sample_grid(double t0, double t_end, double dt);

struct Norms {
    double max_abs = 0.0;
    double two_norm = 0.0;
};

Norms weighted_norms(const StateVector& x);

/// Time-dependent source evaluator. The output buffer is sized to the system
/// dimension and zeroed before the call; implementations add their entries.
using SourceFn = std::function<void(double t, StateVector& out)>;

struct FitSystemTerms;  // defined in fitwave.hpp

/// du/dt = a u + source(t), u(t0) = u0.
struct LinearOdeSystem {
    SparseMatrix a;
    SourceFn source;  // null means zero source
    StateVector u0;
    double t0 = 0.0;

    /// Block split of the FIT wave operator; set by build_wave_system and
    /// required by the Leapfrog stepper. Null for generic systems.
    std::shared_ptr<const FitSystemTerms> fit;

    std::size_t dim() const { return a.nrows; }

    /// out = a u + source(t). out is resized as needed.
    void eval_rhs(double t, const StateVector& u, StateVector& out) const;

    /// out = source(t) (zero vector when source is null).
    void eval_source(double t, StateVector& out) const;

    /// Throws std::invalid_argument unless a is square and u0 matches.
    void validate() const;
};

/// Trajectory on a strictly increasing time grid, one state per time.
struct SampledSolution {
    std::vector<double> times;
    std::vector<StateVector> states;

    std::size_t size() const { return times.size(); }
    void validate() const;
};

// Small vector kernels shared by the steppers and the exponential.
namespace vec {

inline void fill_zero(StateVector& x) { x.assign(x.size(), 0.0); }

/// y += alpha * x
void axpy(double alpha, const StateVector& x, StateVector& y);

/// x *= alpha
void scale(double alpha, StateVector& x);

double dot(const StateVector& x, const StateVector& y);

bool all_finite(const StateVector& x);

}  // namespace vec

}  // namespace paraexp
