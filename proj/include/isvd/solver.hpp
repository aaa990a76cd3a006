#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "isvd/harmonic.hpp"
#include "isvd/sparse.hpp"

namespace isvd {

struct SolverConfig {
    double tau = 0.0;                // target; triplets nearest tau come back
    std::size_t k = 1;               // wanted triplet count
    std::size_t m = 20;              // max bidiagonalization steps
    double tol = 1e-6;               // relative tolerance against ||A||_1
    std::size_t max_restarts = 2000;
    std::uint64_t seed = 0;          // starting-vector seed
    std::size_t extras = 3;          // buffer approximations beyond k
    double relgap_threshold = 1e-3;  // bad-shift gap
    bool verbose = false;
    ResidualVariant residual_variant = ResidualVariant::rayleigh;
};

struct SingularTriplet {
    double sigma = 0.0;  // converged Rayleigh quotient
    std::vector<double> u;
    std::vector<double> v;
    double residual = 0.0;  // sqrt(|Av - sigma u|^2 + |A^T u - sigma v|^2)
};

struct RunStats {
    std::size_t restarts = 0;
    std::int64_t matvecs = 0;               // products with A only
    std::int64_t verification_matvecs = 0;  // subset spent on true residuals
    double wall_seconds = 0.0;
    double stopcrit = std::numeric_limits<double>::infinity();
    int breakdown_events = 0;
    int shifts_replaced = 0;
    // one row per extraction (restarts+1), k cheap estimates per row
    std::vector<std::vector<double>> residual_history;
};

struct SolverResult {
    std::vector<SingularTriplet> triplets;  // sorted by |sigma - tau|
    RunStats stats;
    bool converged = false;
};

/// Computes the k singular triplets of A nearest config.tau by implicitly
/// restarted harmonic Lanczos bidiagonalization. A matrix with more columns
/// than rows is handled through its transpose, with u and v swapped back.
SolverResult solve(const SparseMatrix& a, const SolverConfig& config);

/// Reproducible dense-pattern matrix U diag(sigma_values) V^T, with U and V
/// products of four seeded Householder reflectors each; its exact singular
/// values are sigma_values.
SparseMatrix generate_test_matrix(std::size_t rows, std::size_t cols,
                                  const std::vector<double>& sigma_values, std::uint64_t seed);

}  // namespace isvd
