#include "isvd/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>

#include "isvd/restart.hpp"
#include "isvd/vecops.hpp"

namespace isvd {

namespace {

void validate(const SparseMatrix& a, const SolverConfig& config) {
    if (config.tau < 0.0) throw std::invalid_argument("tau must be non-negative");
    if (config.k < 1) throw std::invalid_argument("k must be at least 1");
    if (config.tol <= 0.0) throw std::invalid_argument("tol must be positive");
    if (config.k >= std::min(a.rows(), a.cols()))
        throw std::invalid_argument("k must be smaller than min(M, N)");
}

double true_residual(const SparseMatrix& a, double sigma, const std::vector<double>& u,
                     const std::vector<double>& v, MatvecCounter& counter) {
    std::vector<double> av = a.multiply(v, counter);
    axpy(-sigma, u, av);
    std::vector<double> atu = a.multiply_transpose(u);
    axpy(-sigma, v, atu);
    return std::sqrt(dot(av, av) + dot(atu, atu));
}

}  // namespace

SolverResult solve(const SparseMatrix& a, const SolverConfig& config) {
    if (a.rows() < a.cols()) {
        SolverResult flipped = solve(a.transpose(), config);
        for (SingularTriplet& t : flipped.triplets) std::swap(t.u, t.v);
        return flipped;
    }
    validate(a, config);

    const std::size_t m = std::min(config.m, std::min(a.rows(), a.cols()));
    if (m < config.k + 1) throw std::invalid_argument("m must be at least k+1");
    const std::size_t extras = std::min(config.extras, m - config.k - 1);
    const std::size_t k_eff = config.k + extras;
    const std::size_t p = m - k_eff;  // >= 1
    const double norm1 = a.one_norm();
    const double accept = config.tol * norm1;

    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(config.seed);
    MatvecCounter counter;
    SolverResult result;
    RunStats& stats = result.stats;

    auto fresh_factorization = [&]() {
        for (int attempt = 0;; ++attempt) {
            try {
                BidiagFactorization f = bidiag_start(a, random_unit_vector(a.cols(), rng), counter, rng);
                bidiag_extend(a, f, m, counter, rng);
                return f;
            } catch (const StartBreakdownError&) {
                if (attempt >= 2) throw;
            }
        }
    };
    BidiagFactorization fact = fresh_factorization();

    int consecutive_empty = 0;
    int breakdown_base = 0;
    std::vector<HarmonicApproximation> last_wanted;

    for (std::size_t cycle = 0;; ++cycle) {
        HarmonicExtraction ext =
            extract_all(fact, config.tau, config.residual_variant, config.verbose);

        std::vector<double> row(config.k, std::numeric_limits<double>::quiet_NaN());
        for (std::size_t i = 0; i < std::min(config.k, ext.positive.size()); ++i)
            row[i] = ext.positive[i].residual_estimate;
        stats.residual_history.push_back(std::move(row));

        if (config.verbose) {
            std::fprintf(stderr, "cycle %zu: %zu positive, eps_1 = %.3e, cond(Btilde) = %.3e\n",
                         cycle, ext.positive.size(),
                         ext.positive.empty() ? std::numeric_limits<double>::quiet_NaN()
                                              : ext.positive.front().residual_estimate,
                         ext.conditioning);
        }

        if (ext.positive.empty()) {
            if (++consecutive_empty >= 3)
                throw std::runtime_error("harmonic extraction returned nothing three cycles in a row");
            if (cycle >= config.max_restarts) break;
            breakdown_base += fact.breakdown_events;
            last_wanted.clear();
            fact = fresh_factorization();  // counted as a restart cycle
            ++stats.restarts;
            continue;
        }
        consecutive_empty = 0;
        last_wanted.assign(ext.positive.begin(),
                           ext.positive.begin() + std::min(k_eff, ext.positive.size()));

        // cheap gate first; true residuals only when every estimate passes
        bool cheap_ok = ext.positive.size() >= config.k;
        for (std::size_t i = 0; cheap_ok && i < config.k; ++i)
            cheap_ok = ext.positive[i].residual_estimate < accept;

        if (cheap_ok) {
            std::vector<SingularTriplet> candidate;
            double stopcrit = 0.0;
            for (std::size_t i = 0; i < config.k; ++i) {
                const HarmonicApproximation& h = ext.positive[i];
                auto [u, v] = form_vectors(fact, h);
                const double res = true_residual(a, h.rho, u, v, counter);
                ++stats.verification_matvecs;
                stopcrit = std::max(stopcrit, res);
                candidate.push_back({h.rho, std::move(u), std::move(v), res});
            }
            result.triplets = std::move(candidate);
            stats.stopcrit = stopcrit;
            if (stopcrit < accept) {
                result.converged = true;
                break;
            }
        }

        if (cycle >= config.max_restarts) break;

        ShiftSet shifts = select_shifts(ext.positive, k_eff, p, config.tau, ext.negative_thetas);
        std::vector<std::pair<double, double>> wanted;
        for (std::size_t i = 0; i < std::min(config.k, ext.positive.size()); ++i)
            wanted.emplace_back(ext.positive[i].rho, ext.positive[i].residual_estimate);
        shifts = adapt_shifts(std::move(shifts), wanted, config.tau, ext.positive,
                              config.relgap_threshold);
        stats.shifts_replaced += shifts.replaced_count;

        fact = implicit_restart(fact, a, shifts, rng);
        bidiag_extend(a, fact, m, counter, rng);
        ++stats.restarts;
    }

    // non-converged: report the best available triplets with true residuals
    if (!result.converged && result.triplets.empty() && !last_wanted.empty()) {
        double stopcrit = 0.0;
        for (std::size_t i = 0; i < std::min(config.k, last_wanted.size()); ++i) {
            const HarmonicApproximation& h = last_wanted[i];
            auto [u, v] = form_vectors(fact, h);
            const double res = true_residual(a, h.rho, u, v, counter);
            ++stats.verification_matvecs;
            stopcrit = std::max(stopcrit, res);
            result.triplets.push_back({h.rho, std::move(u), std::move(v), res});
        }
        stats.stopcrit = stopcrit;
    }

    std::stable_sort(result.triplets.begin(), result.triplets.end(),
                     [&](const SingularTriplet& x, const SingularTriplet& y) {
                         return std::abs(x.sigma - config.tau) < std::abs(y.sigma - config.tau);
                     });

    stats.matvecs = counter.count_a;
    stats.breakdown_events = breakdown_base + fact.breakdown_events;
    stats.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return result;
}

SparseMatrix generate_test_matrix(std::size_t rows, std::size_t cols,
                                  const std::vector<double>& sigma_values, std::uint64_t seed) {
    if (rows < cols) throw std::invalid_argument("generate_test_matrix: rows must be >= cols");
    if (sigma_values.size() != cols)
        throw std::invalid_argument("generate_test_matrix: need one sigma per column");
    for (double s : sigma_values)
        if (s < 0.0) throw std::invalid_argument("generate_test_matrix: sigma values must be >= 0");

    DenseMatrix d(rows, cols);
    for (std::size_t j = 0; j < cols; ++j) d(j, j) = sigma_values[j];

    std::mt19937_64 rng(seed);
    const int reflectors = 4;
    for (int h = 0; h < reflectors; ++h) {  // left: D <- (I - 2 w w^T) D
        std::vector<double> w = random_unit_vector(rows, rng);
        for (std::size_t j = 0; j < cols; ++j) {
            double wd = 0.0;
            for (std::size_t i = 0; i < rows; ++i) wd += w[i] * d(i, j);
            for (std::size_t i = 0; i < rows; ++i) d(i, j) -= 2.0 * w[i] * wd;
        }
    }
    for (int h = 0; h < reflectors; ++h) {  // right: D <- D (I - 2 z z^T)
        std::vector<double> z = random_unit_vector(cols, rng);
        for (std::size_t i = 0; i < rows; ++i) {
            double dz = 0.0;
            for (std::size_t j = 0; j < cols; ++j) dz += d(i, j) * z[j];
            for (std::size_t j = 0; j < cols; ++j) d(i, j) -= 2.0 * dz * z[j];
        }
    }

    std::vector<Triplet> entries;
    entries.reserve(rows * cols);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j)
            if (d(i, j) != 0.0) entries.push_back({i, j, d(i, j)});
    return SparseMatrix(rows, cols, std::move(entries));
}

}  // namespace isvd
