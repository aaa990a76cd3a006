#pragma once

#include <random>
#include <stdexcept>
#include <vector>

#include "isvd/sparse.hpp"

namespace isvd {

/// Starting vector lies in the null space of A.
struct StartBreakdownError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Partial Lanczos bidiagonalization A Q_j = P_j B_j,
/// A^T P_j = Q_j B_j^T + beta_j q_{j+1} e_j^T. The right vectors Q are kept
/// orthonormal by reorthogonalization; P is left to the recurrence.
struct BidiagFactorization {
    std::vector<std::vector<double>> p;  // left Lanczos vectors, length M each
    std::vector<std::vector<double>> q;  // right Lanczos vectors, length N each
    std::vector<double> alphas;          // diagonal of B_j
    std::vector<double> betas;           // superdiagonal of B_j, length j-1
    double beta_residual = 0.0;          // beta_j
    std::vector<double> q_next;          // q_{j+1}; zero vector when exhausted
    bool exhausted = false;              // no direction orthogonal to Q remains
    int breakdown_events = 0;

    std::size_t steps() const { return alphas.size(); }
};

/// One-step factorization from a unit starting vector. Counts one product
/// with A. Throws StartBreakdownError when ||A q1|| vanishes.
BidiagFactorization bidiag_start(const SparseMatrix& a, const std::vector<double>& q1,
                                 MatvecCounter& counter, std::mt19937_64& rng);

/// Grows the factorization to `target_steps` (one product with A per step).
/// New right vectors get two-pass classical Gram-Schmidt against all of Q;
/// P is never reorthogonalized. A vanishing beta is replaced by a random
/// direction orthogonal to Q (recorded in breakdown_events); a vanishing
/// alpha by a plain random direction. target_steps <= steps() is a no-op.
void bidiag_extend(const SparseMatrix& a, BidiagFactorization& fact, std::size_t target_steps,
                   MatvecCounter& counter, std::mt19937_64& rng);

/// r <- r - Basis (Basis^T r), two passes.
void reorthogonalize(const std::vector<std::vector<double>>& basis, std::vector<double>& r);

/// Random unit vector orthogonalized against `basis`. False when no such
/// direction remains (basis spans the space).
bool random_orthogonal_unit(const std::vector<std::vector<double>>& basis, std::size_t n,
                            std::mt19937_64& rng, std::vector<double>& out);

}  // namespace isvd
