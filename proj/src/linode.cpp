#include "paraexp/linode.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace paraexp {

SparseMatrix SparseMatrix::identity(std::size_t n) {
    SparseMatrix m;
    m.nrows = n;
    m.ncols = n;
    m.row_offsets.resize(n + 1);
    m.col_indices.resize(n);
    m.values.assign(n, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        m.row_offsets[i] = i;
        m.col_indices[i] = i;
    }
    m.row_offsets[n] = n;
    return m;
}

SparseMatrix SparseMatrix::zero(std::size_t nrows, std::size_t ncols) {
    SparseMatrix m;
    m.nrows = nrows;
    m.ncols = ncols;
    m.row_offsets.assign(nrows + 1, 0);
    return m;
}

void SparseMatrix::validate() const {
    if (row_offsets.size() != nrows + 1)
        throw std::invalid_argument("sparse matrix: row_offsets size mismatch");
    if (row_offsets.front() != 0 || row_offsets.back() != nnz())
        throw std::invalid_argument("sparse matrix: row_offsets endpoints");
    if (col_indices.size() != values.size())
        throw std::invalid_argument("sparse matrix: col/value size mismatch");
    for (std::size_t i = 0; i < nrows; ++i) {
        if (row_offsets[i] > row_offsets[i + 1])
            throw std::invalid_argument("sparse matrix: row_offsets not monotone");
        for (std::size_t k = row_offsets[i]; k < row_offsets[i + 1]; ++k) {
            if (col_indices[k] >= ncols)
                throw std::invalid_argument("sparse matrix: column index out of range");
            if (k > row_offsets[i] && col_indices[k] <= col_indices[k - 1])
                throw std::invalid_argument("sparse matrix: columns not strictly increasing");
        }
    }
}

SparseBuilder::SparseBuilder(std::size_t nrows, std::size_t ncols)
    : nrows_(nrows), ncols_(ncols) {}

void SparseBuilder::add(std::size_t row, std::size_t col, double value) {
    if (row >= nrows_ || col >= ncols_)
        throw std::invalid_argument("sparse builder: index out of range");
    triplets_.push_back({row, col, value});
}

SparseMatrix SparseBuilder::build() const {
    std::vector<Triplet> sorted = triplets_;
    std::stable_sort(sorted.begin(), sorted.end(), [](const Triplet& a, const Triplet& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });

    SparseMatrix m;
    m.nrows = nrows_;
    m.ncols = ncols_;
    m.row_offsets.assign(nrows_ + 1, 0);
    for (std::size_t k = 0; k < sorted.size();) {
        std::size_t j = k + 1;
        double sum = sorted[k].value;
        while (j < sorted.size() && sorted[j].row == sorted[k].row &&
               sorted[j].col == sorted[k].col) {
            sum += sorted[j].value;
            ++j;
        }
        m.col_indices.push_back(sorted[k].col);
        m.values.push_back(sum);
        m.row_offsets[sorted[k].row + 1] = m.values.size();
        k = j;
    }
    // Rows without entries inherit the previous offset.
    for (std::size_t i = 1; i <= nrows_; ++i)
        m.row_offsets[i] = std::max(m.row_offsets[i], m.row_offsets[i - 1]);
    return m;
}

StateVector spmv(const SparseMatrix& a, const StateVector& x) {
    StateVector y;
    spmv_into(a, x, y);
    return y;
}

void spmv_into(const SparseMatrix& a, const StateVector& x, StateVector& y) {
    if (x.size() != a.ncols)
        throw std::invalid_argument("spmv: dimension mismatch");
    y.assign(a.nrows, 0.0);
    for (std::size_t i = 0; i < a.nrows; ++i) {
        double acc = 0.0;
        for (std::size_t k = a.row_offsets[i]; k < a.row_offsets[i + 1]; ++k)
            acc += a.values[k] * x[a.col_indices[k]];
        y[i] = acc;
    }
}

StateVector spmv_transposed(const SparseMatrix& a, const StateVector& x) {
    if (x.size() != a.nrows)
        throw std::invalid_argument("spmv_transposed: dimension mismatch");
    StateVector y(a.ncols, 0.0);
    for (std::size_t i = 0; i < a.nrows; ++i)
        for (std::size_t k = a.row_offsets[i]; k < a.row_offsets[i + 1]; ++k)
            y[a.col_indices[k]] += a.values[k] * x[i];
    return y;
}

SparseMatrix transpose(const SparseMatrix& a) {
    SparseBuilder b(a.ncols, a.nrows);
    for (std::size_t i = 0; i < a.nrows; ++i)
        for (std::size_t k = a.row_offsets[i]; k < a.row_offsets[i + 1]; ++k)
            b.add(a.col_indices[k], i, a.values[k]);
    return b.build();
}

std::vector<double> sample_grid(double t0, double t_end, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("sample_grid: dt must be positive");
    if (t_end < t0) throw std::invalid_argument("sample_grid: t_end < t0");

    const double span = t_end - t0;
    const double ratio = span / dt;
    const double rounded = std::round(ratio);
    const bool integral =
        std::abs(ratio - rounded) <= 1e-12 * std::max(1.0, std::abs(ratio)) && rounded >= 0.0;

    std::size_t n_steps;
    if (integral) {
        n_steps = static_cast<std::size_t>(rounded);
    } else {
        n_steps = static_cast<std::size_t>(std::floor(ratio));
        // floor() can land one past the end when ratio sits just below an integer
        while (n_steps > 0 && t0 + static_cast<double>(n_steps) * dt > t_end) --n_steps;
    }

    std::vector<double> grid(n_steps + 1);
    for (std::size_t k = 0; k <= n_steps; ++k) grid[k] = t0 + static_cast<double>(k) * dt;
    if (integral) grid[n_steps] = t_end;  // exact endpoint, no accumulated rounding
    return grid;
}

Norms weighted_norms(const StateVector& x) {
    Norms n;
    double sum = 0.0;
    for (double v : x) {
        n.max_abs = std::max(n.max_abs, std::abs(v));
        sum += v * v;
    }
    n.two_norm = std::sqrt(sum);
    return n;
}

void LinearOdeSystem::eval_rhs(double t, const StateVector& u, StateVector& out) const {
    out = spmv(a, u);
    if (source) {
        StateVector s(dim(), 0.0);
        source(t, s);
        vec::axpy(1.0, s, out);
    }
}

void LinearOdeSystem::eval_source(double t, StateVector& out) const {
    out.assign(dim(), 0.0);
    if (source) source(t, out);
}

void LinearOdeSystem::validate() const {
    a.validate();
    if (a.nrows != a.ncols) throw std::invalid_argument("system: matrix must be square");
    if (u0.size() != a.nrows) throw std::invalid_argument("system: u0 dimension mismatch");
}

void SampledSolution::validate() const {
    if (times.size() != states.size())
        throw std::invalid_argument("solution: times/states size mismatch");
    for (std::size_t k = 1; k < times.size(); ++k)
        if (!(times[k] > times[k - 1]))
            throw std::invalid_argument("solution: times not strictly increasing");
    for (std::size_t k = 1; k < states.size(); ++k)
        if (states[k].size() != states[0].size())
            throw std::invalid_argument("solution: inconsistent state dimension");
}

namespace vec {

void axpy(double alpha, const StateVector& x, StateVector& y) {
    if (x.size() != y.size()) throw std::invalid_argument("axpy: size mismatch");
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

void scale(double alpha, StateVector& x) {
    for (double& v : x) v *= alpha;
}

double dot(const StateVector& x, const StateVector& y) {
    if (x.size() != y.size()) throw std::invalid_argument("dot: size mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
}

bool all_finite(const StateVector& x) {
    for (double v : x)
        if (!std::isfinite(v)) return false;
    return true;
}

}  // namespace vec

}  // namespace paraexp
