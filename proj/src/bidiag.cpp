#include "isvd/bidiag.hpp"

#include <cmath>

#include "isvd/vecops.hpp"

namespace isvd {

namespace {
constexpr double kBreakdownRel = 1e-14;
}

void reorthogonalize(const std::vector<std::vector<double>>& basis, std::vector<double>& r) {
    std::vector<double> coef(basis.size());
    for (int pass = 0; pass < 2; ++pass) {
        for (std::size_t j = 0; j < basis.size(); ++j) coef[j] = dot(basis[j], r);
        for (std::size_t j = 0; j < basis.size(); ++j) axpy(-coef[j], basis[j], r);
    }
}

bool random_orthogonal_unit(const std::vector<std::vector<double>>& basis, std::size_t n,
                            std::mt19937_64& rng, std::vector<double>& out) {
    if (basis.size() >= n) return false;
    for (int attempt = 0; attempt < 8; ++attempt) {
        out = random_unit_vector(n, rng);
        reorthogonalize(basis, out);
        const double nrm = norm2(out);
        if (nrm > 1e-6) {
            scale(out, 1.0 / nrm);
            return true;
        }
    }
    return false;
}

namespace {

// Settles beta_residual / q_next from the unnormalized residual r.
void finish_step(const SparseMatrix& a, BidiagFactorization& f, std::vector<double>&& r,
                 double breakdown_floor, std::mt19937_64& rng) {
    const double beta = norm2(r);
    f.beta_residual = beta;
    if (beta > breakdown_floor) {
        scale(r, 1.0 / beta);
        f.q_next = std::move(r);
        f.exhausted = false;
        return;
    }
    ++f.breakdown_events;
    std::vector<double> fresh;
    if (random_orthogonal_unit(f.q, a.cols(), rng, fresh)) {
        f.q_next = std::move(fresh);
        f.exhausted = false;
    } else {
        f.q_next.assign(a.cols(), 0.0);
        f.exhausted = true;
    }
}

}  // namespace

BidiagFactorization bidiag_start(const SparseMatrix& a, const std::vector<double>& q1,
                                 MatvecCounter& counter, std::mt19937_64& rng) {
    if (q1.size() != a.cols()) throw std::invalid_argument("bidiag_start: q1 length != cols");
    if (std::abs(norm2(q1) - 1.0) > 1e-12) throw std::invalid_argument("bidiag_start: q1 must be unit");
    const double floor = kBreakdownRel * a.one_norm();

    std::vector<double> p = a.multiply(q1, counter);
    const double alpha = norm2(p);
    if (alpha <= floor) throw StartBreakdownError("starting vector lies in the null space of A");
    scale(p, 1.0 / alpha);

    std::vector<double> r = a.multiply_transpose(p);
    axpy(-alpha, q1, r);

    BidiagFactorization f;
    f.q.push_back(q1);
    reorthogonalize(f.q, r);
    f.p.push_back(std::move(p));
    f.alphas.push_back(alpha);
    finish_step(a, f, std::move(r), floor, rng);
    return f;
}

void bidiag_extend(const SparseMatrix& a, BidiagFactorization& f, std::size_t target_steps,
                   MatvecCounter& counter, std::mt19937_64& rng) {
    if (target_steps <= f.steps()) return;
    if (target_steps > std::min(a.rows(), a.cols()))
        throw std::invalid_argument("bidiag_extend: target exceeds min(M, N)");
    if (f.exhausted) throw std::invalid_argument("bidiag_extend: factorization exhausted");
    const double floor = kBreakdownRel * a.one_norm();

    while (f.steps() < target_steps) {
        const double beta_prev = f.beta_residual;
        f.q.push_back(f.q_next);
        f.betas.push_back(beta_prev);
        const std::vector<double>& qj = f.q.back();

        std::vector<double> p = a.multiply(qj, counter);
        axpy(-beta_prev, f.p.back(), p);
        const double alpha = norm2(p);
        if (alpha > floor) {
            scale(p, 1.0 / alpha);
        } else {
            // A^T of the replacement must stay orthogonal to Q, which holds
            // exactly when the replacement is orthogonal to the P columns
            ++f.breakdown_events;
            if (!random_orthogonal_unit(f.p, a.rows(), rng, p))
                p = random_unit_vector(a.rows(), rng);
        }
        f.p.push_back(std::move(p));
        f.alphas.push_back(alpha);

        std::vector<double> r = a.multiply_transpose(f.p.back());
        axpy(-alpha, qj, r);
        reorthogonalize(f.q, r);
        finish_step(a, f, std::move(r), floor, rng);
    }
}

}  // namespace isvd
