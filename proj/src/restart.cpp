#include "isvd/restart.hpp"

#include <algorithm>
#include <cmath>

#include "isvd/dense.hpp"
#include "isvd/vecops.hpp"

namespace isvd {

ShiftSet select_shifts(const std::vector<HarmonicApproximation>& sorted_positive, std::size_t k_eff,
                       std::size_t p, double tau, const std::vector<double>& negative_thetas) {
    (void)tau;  // list arrives already sorted around tau
    if (p < 1) throw std::invalid_argument("select_shifts: p must be >= 1");

    ShiftSet out;
    for (std::size_t i = k_eff; i < sorted_positive.size() && out.shifts.size() < p; ++i)
        out.shifts.push_back(sorted_positive[i].theta);

    if (out.shifts.size() < p) {
        std::vector<double> fill(negative_thetas);
        std::sort(fill.begin(), fill.end(),
                  [](double a, double b) { return std::abs(a) > std::abs(b); });
        for (double t : fill) {
            if (out.shifts.size() >= p) break;
            out.shifts.push_back(std::abs(t));
        }
    }
    if (out.shifts.empty()) {
        out.shifts.push_back(0.0);
        out.degenerate = true;
    }
    return out;
}

ShiftSet adapt_shifts(ShiftSet shifts, const std::vector<std::pair<double, double>>& wanted,
                      double tau, const std::vector<HarmonicApproximation>& approximations,
                      double threshold) {
    if (wanted.empty()) throw std::invalid_argument("adapt_shifts: wanted list is empty");
    if (approximations.empty()) throw std::invalid_argument("adapt_shifts: no replacement candidates");

    double replacement = approximations.front().rho;
    double best_gap = -1.0;
    for (const HarmonicApproximation& a : approximations) {
        const double gap = std::abs(a.rho - tau);
        if (gap > best_gap) {
            best_gap = gap;
            replacement = a.rho;
        }
    }
    // the filter squares shifts, so the magnitude carries all the information
    replacement = std::abs(replacement);

    for (double& mu : shifts.shifts) {
        if (mu == replacement) continue;  // replacement values are exempt
        bool bad = false;
        for (const auto& [rho, eps] : wanted) {
            if (std::abs(((rho - eps) - mu) / rho) <= threshold) {
                bad = true;
                break;
            }
        }
        if (bad) {
            mu = replacement;
            ++shifts.replaced_count;
        }
    }
    return shifts;
}

BidiagFactorization implicit_restart(const BidiagFactorization& fact, const SparseMatrix& a,
                                     const ShiftSet& shifts, std::mt19937_64& rng) {
    const std::size_t m = fact.steps();
    const std::size_t p = shifts.shifts.size();
    if (p == 0) throw std::invalid_argument("implicit_restart: need at least one shift");
    if (p >= m) throw std::invalid_argument("implicit_restart: p must be < m");

    std::vector<double> alphas = fact.alphas;
    std::vector<double> betas = fact.betas;
    DenseMatrix p_acc = DenseMatrix::identity(m);
    DenseMatrix q_acc = DenseMatrix::identity(m);
    for (double mu : shifts.shifts) bidiag_qr_step(alphas, betas, mu, p_acc, q_acc);

    const std::size_t n = m - p;
    const std::size_t rows = a.rows();
    const std::size_t cols = a.cols();

    BidiagFactorization out;
    out.breakdown_events = fact.breakdown_events;

    // P+ = P p_acc[:, 0..n), Q+ = Q q_acc[:, 0..n), q_plus = (Q q_acc)[:, n]
    out.p.assign(n, std::vector<double>(rows, 0.0));
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < m; ++i) axpy(p_acc(i, j), fact.p[i], out.p[j]);
    out.q.assign(n, std::vector<double>(cols, 0.0));
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < m; ++i) axpy(q_acc(i, j), fact.q[i], out.q[j]);
    std::vector<double> q_plus(cols, 0.0);
    for (std::size_t i = 0; i < m; ++i) axpy(q_acc(i, n), fact.q[i], q_plus);

    // two-term residual: the old residual direction enters through the last
    // row of p_acc, the in-subspace part through the first discarded column
    std::vector<double> r(cols, 0.0);
    axpy(fact.beta_residual * p_acc(m - 1, n - 1), fact.q_next, r);
    axpy(betas[n - 1], q_plus, r);

    out.alphas.assign(alphas.begin(), alphas.begin() + static_cast<std::ptrdiff_t>(n));
    out.betas.assign(betas.begin(), betas.begin() + static_cast<std::ptrdiff_t>(n - 1));

    // fold signs so the bidiagonal entries are non-negative
    for (std::size_t i = 0; i < n; ++i) {
        if (out.alphas[i] < 0.0) {
            out.alphas[i] = -out.alphas[i];
            scale(out.p[i], -1.0);
            if (i + 1 < n)
                out.betas[i] = -out.betas[i];
            else
                scale(r, -1.0);
        }
        if (i + 1 < n && out.betas[i] < 0.0) {
            out.betas[i] = -out.betas[i];
            scale(out.q[i + 1], -1.0);
            out.alphas[i + 1] = -out.alphas[i + 1];
        }
    }

    const double beta_new = norm2(r);
    out.beta_residual = beta_new;
    if (beta_new > 1e-14 * a.one_norm()) {
        scale(r, 1.0 / beta_new);
        out.q_next = std::move(r);
    } else {
        ++out.breakdown_events;
        std::vector<double> fresh;
        if (random_orthogonal_unit(out.q, cols, rng, fresh)) {
            out.q_next = std::move(fresh);
        } else {
            out.q_next.assign(cols, 0.0);
            out.exhausted = true;
        }
    }
    return out;
}

}  // namespace isvd
