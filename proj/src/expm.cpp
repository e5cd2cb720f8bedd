#include "paraexp/expm.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace paraexp {

DenseMatrix DenseMatrix::identity(std::size_t n) {
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1.0;
    return m;
}

DenseMatrix DenseMatrix::from_sparse(const SparseMatrix& a) {
    DenseMatrix m(a.nrows, a.ncols);
    for (std::size_t i = 0; i < a.nrows; ++i)
        for (std::size_t k = a.row_offsets[i]; k < a.row_offsets[i + 1]; ++k)
            m.at(i, a.col_indices[k]) = a.values[k];
    return m;
}

StateVector apply(const DenseMatrix& a, const StateVector& x) {
    if (x.size() != a.ncols) throw std::invalid_argument("dense apply: dimension mismatch");
    StateVector y(a.nrows, 0.0);
    for (std::size_t i = 0; i < a.nrows; ++i) {
        double acc = 0.0;
        const double* row = &a.data[i * a.ncols];
        for (std::size_t j = 0; j < a.ncols; ++j) acc += row[j] * x[j];
        y[i] = acc;
    }
    return y;
}

namespace {

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
    DenseMatrix c(a.nrows, b.ncols);
    for (std::size_t i = 0; i < a.nrows; ++i) {
        for (std::size_t k = 0; k < a.ncols; ++k) {
            const double aik = a.at(i, k);
            if (aik == 0.0) continue;
            const double* brow = &b.data[k * b.ncols];
            double* crow = &c.data[i * c.ncols];
            for (std::size_t j = 0; j < b.ncols; ++j) crow[j] += aik * brow[j];
        }
    }
    return c;
}

void add_scaled(DenseMatrix& dst, double alpha, const DenseMatrix& src) {
    for (std::size_t i = 0; i < dst.data.size(); ++i) dst.data[i] += alpha * src.data[i];
}

double one_norm_dense(const DenseMatrix& a) {
    double best = 0.0;
    for (std::size_t j = 0; j < a.ncols; ++j) {
        double col = 0.0;
        for (std::size_t i = 0; i < a.nrows; ++i) col += std::abs(a.at(i, j));
        best = std::max(best, col);
    }
    return best;
}

/// Solves a X = b in place (X overwrites b) by LU with partial pivoting.
DenseMatrix lu_solve(DenseMatrix a, DenseMatrix b) {
    const std::size_t n = a.nrows;
    std::vector<std::size_t> piv(n);
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(a.at(i, k)) > std::abs(a.at(p, k))) p = i;
        piv[k] = p;
        if (p != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a.at(k, j), a.at(p, j));
            for (std::size_t j = 0; j < b.ncols; ++j) std::swap(b.at(k, j), b.at(p, j));
        }
        const double pivval = a.at(k, k);
        if (pivval == 0.0) throw NumericalError("expm: singular Pade denominator");
        for (std::size_t i = k + 1; i < n; ++i) {
            const double f = a.at(i, k) / pivval;
            if (f == 0.0) continue;
            a.at(i, k) = f;
            for (std::size_t j = k + 1; j < n; ++j) a.at(i, j) -= f * a.at(k, j);
            for (std::size_t j = 0; j < b.ncols; ++j) b.at(i, j) -= f * b.at(k, j);
        }
    }
    // back substitution
    for (std::size_t col = 0; col < b.ncols; ++col) {
        for (std::size_t ii = n; ii-- > 0;) {
            double acc = b.at(ii, col);
            for (std::size_t j = ii + 1; j < n; ++j) acc -= a.at(ii, j) * b.at(j, col);
            b.at(ii, col) = acc / a.at(ii, ii);
        }
    }
    return b;
}

}  // namespace

DenseMatrix expm_dense(const DenseMatrix& a, double t) {
    if (a.nrows != a.ncols) throw std::invalid_argument("expm_dense: matrix must be square");
    if (a.nrows > kDenseExpmGuard)
        throw std::invalid_argument(
            "expm_dense: dimension " + std::to_string(a.nrows) + " exceeds the dense guard (" +
            std::to_string(kDenseExpmGuard) + "); use the TaylorAction mode instead");
    const std::size_t n = a.nrows;

    // Scale t*a below the degree-13 Pade radius, then square back.
    DenseMatrix b(n, n);
    for (std::size_t i = 0; i < b.data.size(); ++i) b.data[i] = t * a.data[i];

    const double theta13 = 5.371920351148152;
    const double norm = one_norm_dense(b);
    int squarings = 0;
    if (norm > theta13) {
        squarings = static_cast<int>(std::ceil(std::log2(norm / theta13)));
        const double inv = std::ldexp(1.0, -squarings);
        for (double& v : b.data) v *= inv;
    }

    static const double c[14] = {64764752532480000.0,
                                 32382376266240000.0,
                                 7771770303897600.0,
                                 1187353796428800.0,
                                 129060195264000.0,
                                 10559470521600.0,
                                 670442572800.0,
                                 33522128640.0,
                                 1323241920.0,
                                 40840800.0,
                                 960960.0,
                                 16380.0,
                                 182.0,
                                 1.0};

    const DenseMatrix b2 = matmul(b, b);
    const DenseMatrix b4 = matmul(b2, b2);
    const DenseMatrix b6 = matmul(b2, b4);
    const DenseMatrix eye = DenseMatrix::identity(n);

    // U = b * (b6*(c13 b6 + c11 b4 + c9 b2) + c7 b6 + c5 b4 + c3 b2 + c1 I)
    DenseMatrix w(n, n);
    add_scaled(w, c[13], b6);
    add_scaled(w, c[11], b4);
    add_scaled(w, c[9], b2);
    DenseMatrix u = matmul(b6, w);
    add_scaled(u, c[7], b6);
    add_scaled(u, c[5], b4);
    add_scaled(u, c[3], b2);
    add_scaled(u, c[1], eye);
    u = matmul(b, u);

    // V = b6*(c12 b6 + c10 b4 + c8 b2) + c6 b6 + c4 b4 + c2 b2 + c0 I
    DenseMatrix z(n, n);
    add_scaled(z, c[12], b6);
    add_scaled(z, c[10], b4);
    add_scaled(z, c[8], b2);
    DenseMatrix v = matmul(b6, z);
    add_scaled(v, c[6], b6);
    add_scaled(v, c[4], b4);
    add_scaled(v, c[2], b2);
    add_scaled(v, c[0], eye);

    // r = (V - U)^{-1} (V + U)
    DenseMatrix vmu = v;
    add_scaled(vmu, -1.0, u);
    DenseMatrix vpu = std::move(v);
    add_scaled(vpu, 1.0, u);
    DenseMatrix r = lu_solve(std::move(vmu), std::move(vpu));

    for (int k = 0; k < squarings; ++k) r = matmul(r, r);
    return r;
}

DenseMatrix expm_dense(const SparseMatrix& a, double t) {
    if (a.nrows != a.ncols) throw std::invalid_argument("expm_dense: matrix must be square");
    if (a.nrows > kDenseExpmGuard)
        throw std::invalid_argument(
            "expm_dense: dimension " + std::to_string(a.nrows) + " exceeds the dense guard (" +
            std::to_string(kDenseExpmGuard) + "); use the TaylorAction mode instead");
    return expm_dense(DenseMatrix::from_sparse(a), t);
}

StateVector expm_action_taylor(const SparseMatrix& a, const StateVector& b, double t, int m,
                               int s) {
    if (a.nrows != a.ncols) throw std::invalid_argument("expm_action_taylor: matrix not square");
    if (b.size() != a.ncols) throw std::invalid_argument("expm_action_taylor: size mismatch");
    if (m < 1 || s < 1) throw std::invalid_argument("expm_action_taylor: need m, s >= 1");

    const double tau = t / static_cast<double>(s);
    StateVector acc = b;
    StateVector term = b;
    StateVector scratch(b.size());
    for (int i = 0; i < s; ++i) {
        term = acc;
        for (int j = 1; j <= m; ++j) {
            spmv_into(a, term, scratch);
            const double f = tau / static_cast<double>(j);
            for (std::size_t r = 0; r < term.size(); ++r) term[r] = f * scratch[r];
            vec::axpy(1.0, term, acc);
        }
        if (!vec::all_finite(acc))
            throw NumericalError("expm_action_taylor: non-finite value at substep " +
                                 std::to_string(i) + " (m=" + std::to_string(m) +
                                 ", s=" + std::to_string(s) + ")");
    }
    return acc;
}

double one_norm(const SparseMatrix& a) {
    std::vector<double> col_sums(a.ncols, 0.0);
    for (std::size_t k = 0; k < a.nnz(); ++k) col_sums[a.col_indices[k]] += std::abs(a.values[k]);
    double best = 0.0;
    for (double v : col_sums) best = std::max(best, v);
    return best;
}

std::pair<int, int> select_taylor_params(const SparseMatrix& a, double t, double tol) {
    if (!(tol > 0.0 && tol < 1.0))
        throw std::invalid_argument("select_taylor_params: tol must be in (0,1)");
    const double norm = std::abs(t) * one_norm(a);
    int s = 1;
    if (norm > 1.0) s = static_cast<int>(std::ceil(norm));
    return {20, s};
}

}  // namespace paraexp
