#pragma once

#include <random>
#include <utility>
#include <vector>

#include "isvd/bidiag.hpp"
#include "isvd/harmonic.hpp"

namespace isvd {

struct ShiftSet {
    std::vector<double> shifts;  // non-negative
    int replaced_count = 0;
    bool degenerate = false;  // zero-shift fallback: no candidate at all
};

/// Shifts are the harmonic values ranked k_eff+1 .. k_eff+p in the sorted
/// positive list (the unwanted tail, farthest from tau last). A deficit is
/// filled with the largest |theta| among the discarded negative pairs; if
/// still short, fewer shifts are returned. With no candidate at all the set
/// degenerates to the single shift 0.
ShiftSet select_shifts(const std::vector<HarmonicApproximation>& sorted_positive, std::size_t k_eff,
                       std::size_t p, double tau, const std::vector<double>& negative_thetas = {});

/// Bad-shift rule: a shift within relative gap `threshold` of any wanted
/// (rho - residual_estimate) is replaced by the rho of the retained
/// approximation farthest from tau. Replacement values are exempt from the
/// test, which makes a second application a no-op.
ShiftSet adapt_shifts(ShiftSet shifts, const std::vector<std::pair<double, double>>& wanted,
                      double tau, const std::vector<HarmonicApproximation>& approximations,
                      double threshold = 1e-3);

/// Shrinks an m-step factorization to m-p steps by one implicit QR step per
/// shift, which filters the implied starting vector by
/// prod_j (A^T A - mu_j^2 I). The truncated factorization keeps non-negative
/// bidiagonal entries (sign flips folded into the basis columns) and gets a
/// fresh residual direction; a vanishing residual is handled like a
/// bidiagonalization breakdown.
BidiagFactorization implicit_restart(const BidiagFactorization& fact, const SparseMatrix& a,
                                     const ShiftSet& shifts, std::mt19937_64& rng);

}  // namespace isvd
