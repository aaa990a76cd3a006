// Acceptance suite: one pass/fail line per criterion, non-zero exit when any
// criterion fails. Criterion 8 is skipped (not failed) when its matrix file
// is not available locally.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "isvd/harmonic.hpp"
#include "isvd/restart.hpp"
#include "isvd/solver.hpp"
#include "isvd/sparse.hpp"
#include "isvd/vecops.hpp"
#include "support.hpp"

using namespace isvd;

namespace {

int failures = 0;

class Criterion {
public:
    Criterion(int index, std::string name)
        : index_(index), name_(std::move(name)), start_(std::chrono::steady_clock::now()) {}

    void check(bool ok, const std::string& detail) {
        if (!ok) {
            ok_ = false;
            if (!detail.empty()) details_ += (details_.empty() ? "" : "; ") + detail;
        }
    }

    double elapsed() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

    void finish() const {
        std::printf("criterion %d: %s  %s (%.2fs)%s%s\n", index_, ok_ ? "PASS" : "FAIL",
                    name_.c_str(), elapsed(), details_.empty() ? "" : " -- ", details_.c_str());
        std::fflush(stdout);
        if (!ok_) ++failures;
    }

    void skip(const std::string& why) const {
        std::printf("criterion %d: SKIP  %s -- %s\n", index_, name_.c_str(), why.c_str());
        std::fflush(stdout);
    }

private:
    int index_;
    std::string name_;
    std::chrono::steady_clock::time_point start_;
    bool ok_ = true;
    std::string details_;
};

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6e", v);
    return buf;
}

// 1. Exact-subspace recovery on diag(1..10) with a full factorization.
void criterion1() {
    Criterion c(1, "exact-subspace recovery of diag(1..10)");
    std::vector<double> diag(10);
    for (int i = 0; i < 10; ++i) diag[i] = i + 1.0;
    SparseMatrix a = support::sparse_diag(diag);

    for (double tau : {0.0, 2.4, 5.5}) {
        MatvecCounter counter;
        std::mt19937_64 rng(7);
        BidiagFactorization f = bidiag_start(a, random_unit_vector(10, rng), counter, rng);
        bidiag_extend(a, f, 10, counter, rng);
        c.check(f.beta_residual <= 1e-10, "beta_10 did not vanish");

        HarmonicExtraction ext = extract_all(f, tau);
        c.check(ext.positive.size() == 10,
                "tau=" + num(tau) + ": got " + std::to_string(ext.positive.size()) + " positives");
        std::vector<double> thetas;
        for (const auto& h : ext.positive) thetas.push_back(h.theta);
        std::sort(thetas.begin(), thetas.end());
        for (std::size_t i = 0; i < thetas.size() && i < 10; ++i)
            c.check(std::abs(thetas[i] - (static_cast<double>(i) + 1.0)) <= 1e-10,
                    "tau=" + num(tau) + ": theta " + num(thetas[i]) + " vs " + num(i + 1.0));
    }
    c.check(c.elapsed() < 1.0, "took longer than 1 s");
    c.finish();
}

SparseMatrix interior_test_matrix() {
    std::vector<double> sigma(400);
    for (int j = 0; j < 400; ++j) sigma[j] = 0.01 * (j + 1);
    return generate_test_matrix(500, 400, sigma, 2024);
}

SolverConfig interior_test_config() {
    SolverConfig config;
    config.tau = 2.005;
    config.k = 3;
    config.m = 30;
    config.tol = 1e-6;
    return config;
}

// 2. Interior triplets of a 500x400 matrix with prescribed spectrum.
SolverResult criterion2() {
    Criterion c(2, "interior triplets of the 500x400 prescribed spectrum");
    SparseMatrix a = interior_test_matrix();
    SolverConfig config = interior_test_config();
    SolverResult r = solve(a, config);

    c.check(r.converged, "did not converge");
    c.check(r.triplets.size() == 3, "triplet count");
    std::vector<double> got;
    for (const auto& t : r.triplets) got.push_back(t.sigma);
    std::sort(got.begin(), got.end());
    const std::vector<double> want{1.99, 2.00, 2.01};
    for (std::size_t i = 0; i < want.size() && i < got.size(); ++i)
        c.check(std::abs(got[i] - want[i]) <= 1e-6 * want[i],
                "sigma " + num(got[i]) + " vs " + num(want[i]));
    c.check(r.stats.stopcrit / a.one_norm() < 1e-6, "stopcrit " + num(r.stats.stopcrit));
    c.check(c.elapsed() < 60.0, "took longer than 60 s");
    c.finish();
    return r;
}

// 3. Restart polynomial identity on a random dense-pattern 40x30 matrix.
void criterion3() {
    Criterion c(3, "restart matches the polynomial filter");
    std::mt19937_64 seed_rng(99);
    std::uniform_real_distribution<double> sig_dist(0.2, 3.0);
    std::vector<double> sigma(30);
    for (double& s : sigma) s = sig_dist(seed_rng);
    SparseMatrix a = generate_test_matrix(40, 30, sigma, 31);
    DenseMatrix ad = support::dense_from_sparse(a);

    MatvecCounter counter;
    std::mt19937_64 rng(5);
    std::vector<double> q1 = random_unit_vector(30, rng);
    BidiagFactorization f = bidiag_start(a, q1, counter, rng);
    bidiag_extend(a, f, 8, counter, rng);

    std::uniform_real_distribution<double> shift_dist(0.3, 2.5);
    ShiftSet shifts;
    for (int j = 0; j < 3; ++j) shifts.shifts.push_back(shift_dist(rng));
    BidiagFactorization g = implicit_restart(f, a, shifts, rng);

    std::vector<double> w = q1;
    for (double mu : shifts.shifts) {
        std::vector<double> aw = support::dense_matvec(ad, w);
        std::vector<double> ataw = support::dense_matvec(transposed(ad), aw);
        axpy(-mu * mu, w, ataw);
        w = ataw;
    }
    const double cosine = std::abs(dot(g.q[0], w)) / (norm2(g.q[0]) * norm2(w));
    c.check(cosine >= 1.0 - 1e-8, "cosine " + num(cosine));
    c.finish();
}

// 4. Pencil correctness on 50 random instances.
void criterion4() {
    Criterion c(4, "pencil equation and Gram-matrix identity (50 instances)");
    std::mt19937_64 rng(17);
    std::uniform_int_distribution<std::size_t> m_dist(2, 10);
    std::uniform_real_distribution<double> mag(0.3, 2.0);
    std::uniform_real_distribution<double> tau_dist(0.0, 2.5);
    std::uniform_real_distribution<double> beta_dist(0.0, 1.2);

    for (int rep = 0; rep < 50; ++rep) {
        const std::size_t m = m_dist(rng);
        std::vector<double> alphas(m), betas(m - 1);
        for (double& x : alphas) x = mag(rng);
        for (double& x : betas) x = mag(rng);
        const double beta_residual = beta_dist(rng);
        const double tau = tau_dist(rng);

        HarmonicPencil pencil = build_pencil(alphas, betas, beta_residual, tau);

        DenseMatrix oracle = support::pencil_gram_oracle(alphas, betas, beta_residual, tau, rng);
        double gram_err = 0.0;
        for (std::size_t i = 0; i < 2 * m; ++i)
            for (std::size_t j = 0; j < 2 * m; ++j)
                gram_err = std::max(gram_err, std::abs(pencil.ctilde(i, j) - oracle(i, j)));
        c.check(gram_err <= 1e-12 * std::max(1.0, max_abs(oracle)),
                "rep " + std::to_string(rep) + ": gram error " + num(gram_err));

        const double cnorm = jacobi_svd(pencil.ctilde).sigma[0];
        for (const PencilEigenpair& pair : solve_pencil(pencil)) {
            std::vector<double> lhs = support::dense_matvec(pencil.ctilde, pair.z);
            std::vector<double> rhs = support::dense_matvec(pencil.btilde, pair.z);
            axpy(-(pair.theta - tau), rhs, lhs);
            c.check(norm2(lhs) <= 1e-10 * cnorm * norm2(pair.z),
                    "rep " + std::to_string(rep) + ": pencil residual " + num(norm2(lhs)));
        }
    }
    c.finish();
}

// 5. Cheap residual estimate equals the formed-vector residual (50 runs).
void criterion5() {
    Criterion c(5, "residual-estimate identity (50 factorizations)");
    std::mt19937_64 rng(23);
    std::uniform_int_distribution<std::size_t> m_dist(3, 10);
    std::uniform_real_distribution<double> tau_dist(0.0, 1.5);

    for (int rep = 0; rep < 50; ++rep) {
        SparseMatrix a = support::random_sparse(30, 20, 0.3, rng);
        DenseMatrix ad = support::dense_from_sparse(a);
        const std::size_t m = m_dist(rng);
        const double tau = tau_dist(rng);

        MatvecCounter counter;
        BidiagFactorization f = bidiag_start(a, random_unit_vector(20, rng), counter, rng);
        bidiag_extend(a, f, m, counter, rng);

        HarmonicExtraction ext = extract_all(f, tau);
        for (const HarmonicApproximation& h : ext.positive) {
            auto [u, v] = form_vectors(f, h);
            std::vector<double> av = support::dense_matvec(ad, v);
            axpy(-h.rho, u, av);
            std::vector<double> atu = support::dense_matvec(transposed(ad), u);
            axpy(-h.rho, v, atu);
            const double truth = std::sqrt(dot(av, av) + dot(atu, atu));
            c.check(std::abs(h.residual_estimate - truth) <= 1e-9 * a.one_norm(),
                    "rep " + std::to_string(rep) + ": estimate " + num(h.residual_estimate) +
                        " vs " + num(truth));
        }
    }
    c.finish();
}

// 6. Orthogonality and factorization identities at scale, around a restart.
void criterion6() {
    Criterion c(6, "identities on 2000x1500 sparse matrices up to m = 50");
    std::mt19937_64 rng(29);
    for (std::size_t m : {25u, 50u}) {
        SparseMatrix a = support::random_sparse(2000, 1500, 0.003, rng);
        MatvecCounter counter;
        BidiagFactorization f = bidiag_start(a, random_unit_vector(1500, rng), counter, rng);
        bidiag_extend(a, f, m, counter, rng);

        c.check(support::orthonormality_error(f.q) <= 1e-10, "m=" + std::to_string(m) + " Q drift");
        c.check(support::factorization_residual_sparse(a, f) <= 1e-10 * a.one_norm(),
                "m=" + std::to_string(m) + " identity before restart");

        const double tau = 0.5;
        HarmonicExtraction ext = extract_all(f, tau);
        const std::size_t k_eff = m / 2;
        ShiftSet shifts =
            select_shifts(ext.positive, k_eff, m - k_eff, tau, ext.negative_thetas);
        BidiagFactorization g = implicit_restart(f, a, shifts, rng);

        c.check(support::orthonormality_error(g.q) <= 1e-10, "m=" + std::to_string(m) + " Q after restart");
        c.check(support::factorization_residual_sparse(a, g) <= 1e-10 * a.one_norm(),
                "m=" + std::to_string(m) + " identity after restart");

        bidiag_extend(a, g, m, counter, rng);
        c.check(support::orthonormality_error(g.q) <= 1e-10,
                "m=" + std::to_string(m) + " Q after re-extension");
        c.check(support::factorization_residual_sparse(a, g) <= 1e-10 * a.one_norm(),
                "m=" + std::to_string(m) + " identity after re-extension");
    }
    c.finish();
}

// 7. Adaptive-shift behavior: surgical replacement plus an exercised solve.
void criterion7() {
    Criterion c(7, "adaptive bad-shift replacement");

    std::vector<HarmonicApproximation> list;
    for (double rho : {2.0, 2.1, 1.9, 7.0, 0.3}) {
        HarmonicApproximation h;
        h.theta = rho;
        h.rho = rho;
        h.residual_estimate = 0.0;
        list.push_back(h);
    }
    const double tau = 2.0;
    const double eps = 1e-5;
    list[0].residual_estimate = eps;

    ShiftSet shifts;
    shifts.shifts = {(2.0 - eps) - 2.0 * 5e-5, 0.3, 7.0};  // first lies at relgap 5e-5
    ShiftSet adapted = adapt_shifts(shifts, {{2.0, eps}}, tau, list, 1e-3);
    c.check(adapted.replaced_count == 1, "replaced " + std::to_string(adapted.replaced_count));
    c.check(adapted.shifts[0] == 7.0, "replacement value " + num(adapted.shifts[0]));
    c.check(adapted.shifts[1] == 0.3 && adapted.shifts[2] == 7.0, "others must not move");

    // the same instance as criterion 2, with a gap wide enough to force the
    // replacement path during the run
    SparseMatrix a = interior_test_matrix();
    SolverConfig config = interior_test_config();
    config.relgap_threshold = 3e-2;
    SolverResult r = solve(a, config);
    c.check(r.converged, "solve with adapted shifts did not converge");
    c.check(r.stats.shifts_replaced >= 1,
            "replacement path not exercised (replaced = " +
                std::to_string(r.stats.shifts_replaced) + ")");
    std::vector<double> got;
    for (const auto& t : r.triplets) got.push_back(t.sigma);
    std::sort(got.begin(), got.end());
    const std::vector<double> want{1.99, 2.00, 2.01};
    for (std::size_t i = 0; i < want.size() && i < got.size(); ++i)
        c.check(std::abs(got[i] - want[i]) <= 1e-6 * want[i],
                "sigma " + num(got[i]) + " vs " + num(want[i]));
    c.finish();
}

// 8. Reproduction of the published WELL1850 values, when the file is present.
void criterion8() {
    Criterion c(8, "WELL1850 smallest triplets (external file)");
    std::string path;
    if (const char* env = std::getenv("ISVD_WELL1850")) path = env;
    for (const char* cand : {"fixtures/well1850.mtx", "tests/fixtures/well1850.mtx",
                             "../tests/fixtures/well1850.mtx"}) {
        if (!path.empty()) break;
        std::ifstream probe(cand);
        if (probe.good()) path = cand;
    }
    if (path.empty()) {
        c.skip("matrix file not found (set ISVD_WELL1850 or place fixtures/well1850.mtx)");
        return;
    }

    SparseMatrix a = load_matrix_market(path);
    SolverConfig config;
    config.tau = 0.0;
    config.k = 3;
    config.m = 20;
    config.tol = 1e-6;
    SolverResult r = solve(a, config);

    c.check(r.converged, "did not converge");
    const std::vector<double> published{1.611969e-2, 1.911309e-2, 2.315889e-2};
    for (std::size_t i = 0; i < published.size() && i < r.triplets.size(); ++i)
        c.check(std::abs(r.triplets[i].sigma - published[i]) <= 5e-7 * published[i],
                "sigma_" + std::to_string(i + 1) + " " + num(r.triplets[i].sigma));
    c.check(r.stats.restarts <= 3 * 56,
            "restarts " + std::to_string(r.stats.restarts) + " > 168");
    c.finish();
}

// 9. Matvec accounting identity on breakdown-free runs.
void criterion9(const SolverResult& interior) {
    Criterion c(9, "matvec accounting identity");

    std::vector<double> sigma(40);
    for (int j = 0; j < 40; ++j) sigma[j] = 0.1 * (j + 1);
    SparseMatrix a = generate_test_matrix(50, 40, sigma, 13);
    SolverConfig config;
    config.tau = 2.03;
    config.k = 2;
    config.m = 14;
    SolverResult r = solve(a, config);
    c.check(r.converged, "clean run did not converge");
    c.check(r.stats.breakdown_events == 0, "clean run hit a breakdown");
    auto expected = [](const SolverConfig& cfg, const RunStats& s) {
        return static_cast<std::int64_t>(cfg.m) +
               static_cast<std::int64_t>(s.restarts) *
                   static_cast<std::int64_t>(cfg.m - cfg.k - cfg.extras) +
               s.verification_matvecs;
    };
    c.check(r.stats.matvecs == expected(config, r.stats),
            "mv " + std::to_string(r.stats.matvecs) + " vs " +
                std::to_string(expected(config, r.stats)));

    if (interior.stats.breakdown_events == 0) {
        c.check(interior.stats.matvecs == expected(interior_test_config(), interior.stats),
                "interior run mv " + std::to_string(interior.stats.matvecs));
    }
    c.finish();
}

}  // namespace

int main() {
    criterion1();
    SolverResult interior = criterion2();
    criterion3();
    criterion4();
    criterion5();
    criterion6();
    criterion7();
    criterion8();
    criterion9(interior);

    if (failures == 0)
        std::printf("all acceptance criteria passed\n");
    else
        std::printf("%d acceptance criteria FAILED\n", failures);
    return failures == 0 ? 0 : 1;
}
