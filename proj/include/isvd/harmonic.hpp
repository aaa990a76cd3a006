#pragma once

#include <stdexcept>
#include <utility>
#include <vector>

#include "isvd/bidiag.hpp"
#include "isvd/dense.hpp"

namespace isvd {

/// C-tilde has no usable positive eigenspace.
struct PencilDegenerateError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// No positive harmonic value survived the solve.
struct ExtractionEmptyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// The 2m x 2m pencil whose eigenpairs give harmonic approximations of the
/// singular triplets nearest tau:
///   Btilde = [[-tau I, B], [B^T, -tau I]]
///   Ctilde = [[tau^2 I + B B^T + beta^2 e_m e_m^T, -2 tau B],
///             [-2 tau B^T,                          tau^2 I + B^T B]]
/// Ctilde is the Gram matrix of (Atilde - tau I) blkdiag(P, Q), hence the
/// squared beta in the corner term.
struct HarmonicPencil {
    DenseMatrix btilde;
    DenseMatrix ctilde;
    double tau = 0.0;
};

struct HarmonicApproximation {
    double theta = 0.0;              // harmonic value
    double rho = 0.0;                // Rayleigh quotient x^T B y, reported value
    std::vector<double> x;           // unit left coefficient vector (length m)
    std::vector<double> y;           // unit right coefficient vector (length m)
    double residual_estimate = 0.0;  // cheap estimate, no long vectors needed
};

/// Which value enters the cheap residual estimate. The Rayleigh quotient is
/// the default; the harmonic value is kept for A/B comparison.
enum class ResidualVariant { rayleigh, harmonic };

HarmonicPencil build_pencil(const std::vector<double>& alphas, const std::vector<double>& betas,
                            double beta_residual, double tau);

struct PencilEigenpair {
    double theta;
    std::vector<double> z;  // length 2m, original coordinates, unnormalized
};

/// Solves Btilde z = nu Ctilde z via Cholesky of Ctilde (eigendecomposition
/// fallback when semidefinite), keeps |nu| above 1e-12 max|nu|, and maps back
/// theta = tau + 1/nu.
std::vector<PencilEigenpair> solve_pencil(const HarmonicPencil& pencil);

struct HarmonicExtraction {
    std::vector<HarmonicApproximation> positive;  // sorted by |theta - tau|, ties by residual
    std::vector<double> negative_thetas;          // discarded side, kept for shift fill-in
    double conditioning = 0.0;                    // filled only when requested
};

HarmonicExtraction extract_all(const BidiagFactorization& fact, double tau,
                               ResidualVariant variant = ResidualVariant::rayleigh,
                               bool want_conditioning = false);

/// First `want` positive approximations nearest tau. Throws
/// ExtractionEmptyError when want > 0 and nothing positive exists.
std::vector<HarmonicApproximation> extract(const BidiagFactorization& fact, double tau,
                                           std::size_t want,
                                           ResidualVariant variant = ResidualVariant::rayleigh);

/// Long vectors u = P x, v = Q y.
std::pair<std::vector<double>, std::vector<double>> form_vectors(const BidiagFactorization& fact,
                                                                 const HarmonicApproximation& approx);

/// 1/min|eig(Btilde)|, infinity when Btilde is numerically singular. Verbose
/// diagnostics only, never control flow.
double conditioning_diagnostic(const HarmonicPencil& pencil);

}  // namespace isvd
