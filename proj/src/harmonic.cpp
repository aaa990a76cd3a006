#include "isvd/harmonic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "isvd/vecops.hpp"

namespace isvd {

namespace {

// X with L X = B, L lower triangular.
DenseMatrix forward_solve(const DenseMatrix& l, const DenseMatrix& b) {
    const std::size_t n = l.rows();
    DenseMatrix x = b;
    for (std::size_t col = 0; col < b.cols(); ++col) {
        for (std::size_t i = 0; i < n; ++i) {
            double sum = x(i, col);
            for (std::size_t k = 0; k < i; ++k) sum -= l(i, k) * x(k, col);
            x(i, col) = sum / l(i, i);
        }
    }
    return x;
}

// z with L^T z = w.
std::vector<double> back_solve_transposed(const DenseMatrix& l, const std::vector<double>& w) {
    const std::size_t n = l.rows();
    std::vector<double> z = w;
    for (std::size_t i = n; i-- > 0;) {
        double sum = z[i];
        for (std::size_t k = i + 1; k < n; ++k) sum -= l(k, i) * z[k];
        z[i] = sum / l(i, i);
    }
    return z;
}

void symmetrize(DenseMatrix& m) {
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = i + 1; j < m.cols(); ++j) {
            const double avg = 0.5 * (m(i, j) + m(j, i));
            m(i, j) = m(j, i) = avg;
        }
}

// (B y)_i = alpha_i y_i + beta_i y_{i+1}
std::vector<double> bidiag_apply(const std::vector<double>& alphas, const std::vector<double>& betas,
                                 const std::vector<double>& y) {
    const std::size_t m = alphas.size();
    std::vector<double> out(m);
    for (std::size_t i = 0; i < m; ++i) {
        out[i] = alphas[i] * y[i];
        if (i + 1 < m) out[i] += betas[i] * y[i + 1];
    }
    return out;
}

// (B^T x)_j = alpha_j x_j + beta_{j-1} x_{j-1}
std::vector<double> bidiag_apply_transposed(const std::vector<double>& alphas,
                                            const std::vector<double>& betas,
                                            const std::vector<double>& x) {
    const std::size_t m = alphas.size();
    std::vector<double> out(m);
    for (std::size_t j = 0; j < m; ++j) {
        out[j] = alphas[j] * x[j];
        if (j > 0) out[j] += betas[j - 1] * x[j - 1];
    }
    return out;
}

}  // namespace

HarmonicPencil build_pencil(const std::vector<double>& alphas, const std::vector<double>& betas,
                            double beta_residual, double tau) {
    const std::size_t m = alphas.size();
    if (m == 0) throw std::invalid_argument("build_pencil: empty factorization");
    if (betas.size() + 1 != m)
        throw std::invalid_argument("build_pencil: betas must have length m-1");

    HarmonicPencil pencil;
    pencil.tau = tau;
    pencil.btilde = DenseMatrix(2 * m, 2 * m);
    pencil.ctilde = DenseMatrix(2 * m, 2 * m);
    DenseMatrix& bt = pencil.btilde;
    DenseMatrix& ct = pencil.ctilde;
    const double tau2 = tau * tau;

    for (std::size_t i = 0; i < 2 * m; ++i) bt(i, i) = -tau;
    for (std::size_t i = 0; i < m; ++i) {
        bt(i, m + i) = alphas[i];
        bt(m + i, i) = alphas[i];
        if (i + 1 < m) {
            bt(i, m + i + 1) = betas[i];
            bt(m + i + 1, i) = betas[i];
        }
    }

    // (1,1) block: tau^2 I + B B^T + beta^2 e_m e_m^T (tridiagonal)
    for (std::size_t i = 0; i < m; ++i) {
        double diag = tau2 + alphas[i] * alphas[i];
        if (i + 1 < m) diag += betas[i] * betas[i];
        if (i + 1 == m) diag += beta_residual * beta_residual;
        ct(i, i) = diag;
        if (i + 1 < m) {
            const double off = betas[i] * alphas[i + 1];
            ct(i, i + 1) = off;
            ct(i + 1, i) = off;
        }
    }
    // (2,2) block: tau^2 I + B^T B (tridiagonal)
    for (std::size_t j = 0; j < m; ++j) {
        double diag = tau2 + alphas[j] * alphas[j];
        if (j > 0) diag += betas[j - 1] * betas[j - 1];
        ct(m + j, m + j) = diag;
        if (j + 1 < m) {
            const double off = alphas[j] * betas[j];
            ct(m + j, m + j + 1) = off;
            ct(m + j + 1, m + j) = off;
        }
    }
    // off-diagonal blocks: -2 tau B and its transpose
    for (std::size_t i = 0; i < m; ++i) {
        ct(i, m + i) = -2.0 * tau * alphas[i];
        ct(m + i, i) = -2.0 * tau * alphas[i];
        if (i + 1 < m) {
            ct(i, m + i + 1) = -2.0 * tau * betas[i];
            ct(m + i + 1, i) = -2.0 * tau * betas[i];
        }
    }
    return pencil;
}

std::vector<PencilEigenpair> solve_pencil(const HarmonicPencil& pencil) {
    const std::size_t n2 = pencil.btilde.rows();
    std::vector<double> nus;
    std::vector<std::vector<double>> zs;

    if (auto chol = cholesky(pencil.ctilde)) {
        const DenseMatrix& l = *chol;
        DenseMatrix x = forward_solve(l, pencil.btilde);
        DenseMatrix reduced = transposed(forward_solve(l, transposed(x)));
        symmetrize(reduced);
        SymEigResult eig = sym_eig(reduced);
        nus = eig.values;
        zs.reserve(n2);
        std::vector<double> w(n2);
        for (std::size_t j = 0; j < n2; ++j) {
            for (std::size_t i = 0; i < n2; ++i) w[i] = eig.vectors(i, j);
            zs.push_back(back_solve_transposed(l, w));
        }
    } else {
        // Ctilde numerically semidefinite: project onto its positive eigenspace
        SymEigResult ceig = sym_eig(pencil.ctilde);
        const double lam_max = std::max(ceig.values.empty() ? 0.0 : ceig.values.back(), 0.0);
        std::vector<std::size_t> keep;
        for (std::size_t i = 0; i < ceig.values.size(); ++i)
            if (ceig.values[i] > 1e-12 * lam_max) keep.push_back(i);
        if (keep.empty()) throw PencilDegenerateError("Ctilde has no usable eigenspace");

        const std::size_t r = keep.size();
        // scaled basis S = W_r D^{-1/2}
        DenseMatrix s(n2, r);
        for (std::size_t c = 0; c < r; ++c) {
            const double invsqrt = 1.0 / std::sqrt(ceig.values[keep[c]]);
            for (std::size_t i = 0; i < n2; ++i) s(i, c) = ceig.vectors(i, keep[c]) * invsqrt;
        }
        DenseMatrix reduced = matmul(transposed(s), matmul(pencil.btilde, s));
        symmetrize(reduced);
        SymEigResult eig = sym_eig(reduced);
        nus = eig.values;
        zs.reserve(r);
        for (std::size_t j = 0; j < r; ++j) {
            std::vector<double> z(n2, 0.0);
            for (std::size_t i = 0; i < n2; ++i)
                for (std::size_t c = 0; c < r; ++c) z[i] += s(i, c) * eig.vectors(c, j);
            zs.push_back(std::move(z));
        }
    }

    double nu_max = 0.0;
    for (double nu : nus) nu_max = std::max(nu_max, std::abs(nu));
    const double nu_floor = 1e-12 * nu_max;

    std::vector<PencilEigenpair> out;
    for (std::size_t j = 0; j < nus.size(); ++j) {
        if (std::abs(nus[j]) <= nu_floor) continue;  // theta at infinity
        out.push_back({pencil.tau + 1.0 / nus[j], std::move(zs[j])});
    }
    return out;
}

HarmonicExtraction extract_all(const BidiagFactorization& fact, double tau, ResidualVariant variant,
                               bool want_conditioning) {
    const std::size_t m = fact.steps();
    HarmonicPencil pencil = build_pencil(fact.alphas, fact.betas, fact.beta_residual, tau);
    std::vector<PencilEigenpair> pairs = solve_pencil(pencil);

    HarmonicExtraction ext;
    for (PencilEigenpair& pair : pairs) {
        if (pair.theta <= 0.0) {
            ext.negative_thetas.push_back(pair.theta);
            continue;
        }
        std::vector<double> x(pair.z.begin(), pair.z.begin() + m);
        std::vector<double> y(pair.z.begin() + m, pair.z.end());
        const double nx = norm2(x);
        const double ny = norm2(y);
        const double nz = std::sqrt(nx * nx + ny * ny);
        if (nx <= 1e-13 * nz || ny <= 1e-13 * nz) continue;  // degenerate half
        scale(x, 1.0 / nx);
        scale(y, 1.0 / ny);

        std::vector<double> by = bidiag_apply(fact.alphas, fact.betas, y);
        std::vector<double> btx = bidiag_apply_transposed(fact.alphas, fact.betas, x);
        const double rho = dot(x, by);
        const double value = variant == ResidualVariant::rayleigh ? rho : pair.theta;

        double left = 0.0, right = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            const double dl = by[i] - value * x[i];
            const double dr = btx[i] - value * y[i];
            left += dl * dl;
            right += dr * dr;
        }
        const double corner = fact.beta_residual * x[m - 1];
        const double est = std::sqrt(left + right + corner * corner);

        ext.positive.push_back({pair.theta, rho, std::move(x), std::move(y), est});
    }

    std::stable_sort(ext.positive.begin(), ext.positive.end(),
                     [tau](const HarmonicApproximation& a, const HarmonicApproximation& b) {
                         const double da = std::abs(a.theta - tau);
                         const double db = std::abs(b.theta - tau);
                         if (da != db) return da < db;
                         return a.residual_estimate < b.residual_estimate;
                     });

    if (want_conditioning) ext.conditioning = conditioning_diagnostic(pencil);
    return ext;
}

std::vector<HarmonicApproximation> extract(const BidiagFactorization& fact, double tau,
                                           std::size_t want, ResidualVariant variant) {
    if (want == 0) return {};
    HarmonicExtraction ext = extract_all(fact, tau, variant);
    if (ext.positive.empty()) throw ExtractionEmptyError("no positive harmonic values extracted");
    if (ext.positive.size() > want) ext.positive.resize(want);
    return std::move(ext.positive);
}

std::pair<std::vector<double>, std::vector<double>> form_vectors(const BidiagFactorization& fact,
                                                                 const HarmonicApproximation& approx) {
    const std::size_t m = fact.steps();
    if (approx.x.size() != m || approx.y.size() != m)
        throw std::invalid_argument("form_vectors: approximation does not match factorization");
    std::vector<double> u(fact.p.front().size(), 0.0);
    std::vector<double> v(fact.q.front().size(), 0.0);
    for (std::size_t j = 0; j < m; ++j) {
        axpy(approx.x[j], fact.p[j], u);
        axpy(approx.y[j], fact.q[j], v);
    }
    return {std::move(u), std::move(v)};
}

double conditioning_diagnostic(const HarmonicPencil& pencil) {
    SymEigResult eig = sym_eig(pencil.btilde);
    double min_abs = std::numeric_limits<double>::infinity();
    double max_abs = 0.0;
    for (double lam : eig.values) {
        min_abs = std::min(min_abs, std::abs(lam));
        max_abs = std::max(max_abs, std::abs(lam));
    }
    if (min_abs < 1e-14 * max_abs) return std::numeric_limits<double>::infinity();
    return 1.0 / min_abs;
}

}  // namespace isvd
