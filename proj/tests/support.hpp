#pragma once

#include <cstddef>
#include <random>
#include <vector>

#include "isvd/bidiag.hpp"
#include "isvd/dense.hpp"
#include "isvd/sparse.hpp"
#include "isvd/vecops.hpp"

// Shared oracle helpers for the test suites. Everything here goes through
// plain dense arithmetic, independent of the solver path under test.
namespace support {

inline isvd::DenseMatrix dense_from_sparse(const isvd::SparseMatrix& a) {
    isvd::DenseMatrix d(a.rows(), a.cols());
    for (const isvd::Triplet& t : a.entries()) d(t.row, t.col) = t.value;
    return d;
}

inline std::vector<double> dense_matvec(const isvd::DenseMatrix& a, const std::vector<double>& x) {
    std::vector<double> y(a.rows(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) y[i] += a(i, j) * x[j];
    return y;
}

inline isvd::SparseMatrix random_sparse(std::size_t rows, std::size_t cols, double density,
                                        std::mt19937_64& rng) {
    std::uniform_real_distribution<double> value(-1.0, 1.0);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    std::vector<isvd::Triplet> entries;
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j)
            if (coin(rng) < density || i == j) entries.push_back({i, j, value(rng)});
    return isvd::SparseMatrix(rows, cols, std::move(entries));
}

inline isvd::SparseMatrix sparse_diag(const std::vector<double>& values) {
    std::vector<isvd::Triplet> entries;
    for (std::size_t i = 0; i < values.size(); ++i) entries.push_back({i, i, values[i]});
    return isvd::SparseMatrix(values.size(), values.size(), std::move(entries));
}

inline isvd::DenseMatrix random_dense(std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> value(-1.0, 1.0);
    isvd::DenseMatrix d(rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) d(i, j) = value(rng);
    return d;
}

inline isvd::DenseMatrix random_symmetric(std::size_t n, std::mt19937_64& rng) {
    isvd::DenseMatrix d = random_dense(n, n, rng);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) d(j, i) = d(i, j);
    return d;
}

// Orthonormal n x k panel via two-pass Gram-Schmidt on Gaussian columns.
inline isvd::DenseMatrix random_orthonormal(std::size_t n, std::size_t k, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    isvd::DenseMatrix q(n, k);
    for (std::size_t j = 0; j < k; ++j) {
        std::vector<double> col(n);
        for (double& x : col) x = gauss(rng);
        for (int pass = 0; pass < 2; ++pass) {
            for (std::size_t jj = 0; jj < j; ++jj) {
                double d = 0.0;
                for (std::size_t i = 0; i < n; ++i) d += q(i, jj) * col[i];
                for (std::size_t i = 0; i < n; ++i) col[i] -= d * q(i, jj);
            }
        }
        const double nrm = isvd::norm2(col);
        for (std::size_t i = 0; i < n; ++i) q(i, j) = col[i] / nrm;
    }
    return q;
}

inline isvd::DenseMatrix bidiagonal_dense(const std::vector<double>& alphas,
                                          const std::vector<double>& betas) {
    const std::size_t m = alphas.size();
    isvd::DenseMatrix b(m, m);
    for (std::size_t i = 0; i < m; ++i) {
        b(i, i) = alphas[i];
        if (i + 1 < m) b(i, i + 1) = betas[i];
    }
    return b;
}

inline isvd::DenseMatrix columns_to_dense(const std::vector<std::vector<double>>& cols) {
    isvd::DenseMatrix d(cols.front().size(), cols.size());
    for (std::size_t j = 0; j < cols.size(); ++j)
        for (std::size_t i = 0; i < cols[j].size(); ++i) d(i, j) = cols[j][i];
    return d;
}

// max |(X^T X - I)_{ij}|
inline double orthonormality_error(const isvd::DenseMatrix& x) {
    double err = 0.0;
    for (std::size_t a = 0; a < x.cols(); ++a)
        for (std::size_t b = 0; b < x.cols(); ++b) {
            double d = 0.0;
            for (std::size_t i = 0; i < x.rows(); ++i) d += x(i, a) * x(i, b);
            if (a == b) d -= 1.0;
            err = std::max(err, std::abs(d));
        }
    return err;
}

inline double orthonormality_error(const std::vector<std::vector<double>>& cols) {
    return orthonormality_error(columns_to_dense(cols));
}

// per-column residual norms of the two factorization identities, as a max:
//   A Q = P B  and  A^T P = Q B^T + beta q_next e_m^T
inline double factorization_residual(const isvd::SparseMatrix& a,
                                     const isvd::BidiagFactorization& f) {
    const isvd::DenseMatrix ad = dense_from_sparse(a);
    const std::size_t m = f.steps();
    double worst = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        std::vector<double> lhs = dense_matvec(ad, f.q[j]);  // A q_j
        std::vector<double> rhs(a.rows(), 0.0);
        isvd::axpy(f.alphas[j], f.p[j], rhs);
        if (j > 0) isvd::axpy(f.betas[j - 1], f.p[j - 1], rhs);
        isvd::axpy(-1.0, rhs, lhs);
        worst = std::max(worst, isvd::norm2(lhs));
    }
    isvd::DenseMatrix adt = isvd::transposed(ad);
    for (std::size_t j = 0; j < m; ++j) {
        std::vector<double> lhs = dense_matvec(adt, f.p[j]);  // A^T p_j
        std::vector<double> rhs(a.cols(), 0.0);
        isvd::axpy(f.alphas[j], f.q[j], rhs);
        if (j + 1 < m) isvd::axpy(f.betas[j], f.q[j + 1], rhs);
        if (j + 1 == m) isvd::axpy(f.beta_residual, f.q_next, rhs);
        isvd::axpy(-1.0, rhs, lhs);
        worst = std::max(worst, isvd::norm2(lhs));
    }
    return worst;
}

// Same identities checked with the (independently verified) sparse kernels;
// dense expansion is too heavy at a few thousand rows.
inline double factorization_residual_sparse(const isvd::SparseMatrix& a,
                                            const isvd::BidiagFactorization& f) {
    isvd::MatvecCounter scratch;
    const std::size_t m = f.steps();
    double worst = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        std::vector<double> lhs = a.multiply(f.q[j], scratch);
        isvd::axpy(-f.alphas[j], f.p[j], lhs);
        if (j > 0) isvd::axpy(-f.betas[j - 1], f.p[j - 1], lhs);
        worst = std::max(worst, isvd::norm2(lhs));
    }
    for (std::size_t j = 0; j < m; ++j) {
        std::vector<double> lhs = a.multiply_transpose(f.p[j]);
        isvd::axpy(-f.alphas[j], f.q[j], lhs);
        if (j + 1 < m) isvd::axpy(-f.betas[j], f.q[j + 1], lhs);
        if (j + 1 == m) isvd::axpy(-f.beta_residual, f.q_next, lhs);
        worst = std::max(worst, isvd::norm2(lhs));
    }
    return worst;
}

// Synthetic exact factorization: P orthonormal (rows x m), Q = [I_m; 0] in
// R^{m+1}, q_{m+1} = e_{m+1}, A = P [B | beta e_m]. Both factorization
// identities then hold exactly, so the Gram matrix of
// (Atilde - tau I) blkdiag(P, Q) is computable from first principles.
inline isvd::DenseMatrix pencil_gram_oracle(const std::vector<double>& alphas,
                                            const std::vector<double>& betas, double beta_residual,
                                            double tau, std::mt19937_64& rng) {
    using isvd::DenseMatrix;
    const std::size_t m = alphas.size();
    const std::size_t rows = m + 3;
    const std::size_t cols = m + 1;
    DenseMatrix p = random_orthonormal(rows, m, rng);

    DenseMatrix b_aug(m, cols);
    for (std::size_t i = 0; i < m; ++i) {
        b_aug(i, i) = alphas[i];
        if (i + 1 < m) b_aug(i, i + 1) = betas[i];
    }
    b_aug(m - 1, m) = beta_residual;
    DenseMatrix a = matmul(p, b_aug);

    // G = (Atilde - tau I) blkdiag(P, Q), size (rows+cols) x 2m
    DenseMatrix g(rows + cols, 2 * m);
    for (std::size_t j = 0; j < m; ++j) {
        for (std::size_t i = 0; i < rows; ++i) g(i, j) = -tau * p(i, j);
        for (std::size_t i = 0; i < cols; ++i) {
            double sum = 0.0;
            for (std::size_t r = 0; r < rows; ++r) sum += a(r, i) * p(r, j);
            g(rows + i, j) = sum;
        }
        for (std::size_t i = 0; i < rows; ++i) g(i, m + j) = a(i, j);
        g(rows + j, m + j) = -tau;
    }
    return matmul(isvd::transposed(g), g);
}

}  // namespace support
