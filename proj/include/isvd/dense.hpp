#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

namespace isvd {

/// Iterative kernel ran out of its sweep budget.
struct NonConvergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Small dense real matrix, row-major.
class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), values_(rows * cols, fill) {}

    static DenseMatrix identity(std::size_t n) {
        DenseMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t i, std::size_t j) { return values_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return values_[i * cols_ + j]; }

    const std::vector<double>& values() const { return values_; }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> values_;
};

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix transposed(const DenseMatrix& a);
double max_abs(const DenseMatrix& a);
double frobenius_norm(const DenseMatrix& a);

/// Rotation in the (i, j) plane, i < j. As a matrix it is the identity with
/// G(i,i)=c, G(i,j)=s, G(j,i)=-s, G(j,j)=c.
struct GivensRotation {
    double c = 1.0;
    double s = 0.0;
    std::size_t i = 0;
    std::size_t j = 1;
};

struct GivensResult {
    double c;
    double s;
    double r;
};

/// Rotation annihilating b against a: with (c, s, r) = givens(a, b),
/// (c*a - s*b, s*a + c*b) = (r, 0) and r = hypot(a, b) >= 0. Scaled so
/// intermediate squares cannot overflow. a = b = 0 gives (1, 0, 0).
GivensResult givens(double a, double b);

/// In-place column update m[:, {i,j}] <- m[:, {i,j}] * [[c, s], [-s, c]],
/// i.e. accumulation of the rotation on the right.
void apply_rotation_columns(DenseMatrix& m, const GivensRotation& g);

struct SymEigResult {
    std::vector<double> values;  // ascending
    DenseMatrix vectors;         // column i pairs with values[i]
};

/// Householder tridiagonalization followed by implicit-shift QL with
/// eigenvector accumulation. Input must be symmetric to 1e-12 relative.
SymEigResult sym_eig(const DenseMatrix& s);

/// Lower-triangular L with L L^T = s, strictly positive diagonal. Empty when
/// a pivot falls at or below n*eps*max(diag) (not positive definite).
std::optional<DenseMatrix> cholesky(const DenseMatrix& s);

struct SvdResult {
    DenseMatrix u;              // orthonormal columns
    std::vector<double> sigma;  // descending, non-negative
    DenseMatrix v;              // orthonormal columns
};

/// One-sided Jacobi on columns. Test oracle; stays off the solver path.
SvdResult jacobi_svd(const DenseMatrix& d);

/// One implicit-shift QR step for B^T B - mu^2 I on the m x m upper bidiagonal
/// B given by `alphas` (diagonal) and `betas` (superdiagonal, length m-1).
/// The first right rotation comes from (alphas[0]^2 - mu^2, alphas[0]*betas[0]);
/// the bulge is chased with left rotations accumulated into `p_acc` and right
/// rotations into `q_acc` (both m x m, so that B_new = P^T B_old Q holds for
/// the per-step products). Returns false (no-op) for m < 2.
bool bidiag_qr_step(std::vector<double>& alphas, std::vector<double>& betas, double mu,
                    DenseMatrix& p_acc, DenseMatrix& q_acc);

}  // namespace isvd
