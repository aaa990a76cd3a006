#include "isvd/dense.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace isvd {

namespace {
constexpr double kEps = std::numeric_limits<double>::epsilon();
}

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.cols() != b.rows()) throw std::invalid_argument("matmul: inner dimensions differ");
    DenseMatrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

DenseMatrix transposed(const DenseMatrix& a) {
    DenseMatrix t(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
    return t;
}

double max_abs(const DenseMatrix& a) {
    double m = 0.0;
    for (double v : a.values()) m = std::max(m, std::abs(v));
    return m;
}

double frobenius_norm(const DenseMatrix& a) {
    double sum = 0.0;
    for (double v : a.values()) sum += v * v;
    return std::sqrt(sum);
}

GivensResult givens(double a, double b) {
    if (b == 0.0) {
        if (a == 0.0) return {1.0, 0.0, 0.0};
        return a > 0.0 ? GivensResult{1.0, 0.0, a} : GivensResult{-1.0, 0.0, -a};
    }
    if (a == 0.0) return {0.0, b > 0.0 ? -1.0 : 1.0, std::abs(b)};
    const double scale = std::max(std::abs(a), std::abs(b));
    const double as = a / scale;
    const double bs = b / scale;
    const double r = scale * std::sqrt(as * as + bs * bs);
    return {a / r, -b / r, r};
}

void apply_rotation_columns(DenseMatrix& m, const GivensRotation& g) {
    if (g.j >= m.cols() || g.i >= g.j) throw std::invalid_argument("rotation plane outside matrix");
    for (std::size_t r = 0; r < m.rows(); ++r) {
        const double u = m(r, g.i);
        const double v = m(r, g.j);
        m(r, g.i) = g.c * u - g.s * v;
        m(r, g.j) = g.s * u + g.c * v;
    }
}

namespace {

// Householder reduction to symmetric tridiagonal; transformations accumulate
// into v so that a = v * tridiag(d, e) * v^T.
void tridiagonalize(DenseMatrix& a, std::vector<double>& d, std::vector<double>& e, DenseMatrix& v) {
    const std::size_t n = a.rows();
    v = DenseMatrix::identity(n);
    std::vector<double> u(n), p(n), w(n);

    for (std::size_t k = 0; k + 2 < n; ++k) {
        const std::size_t lo = k + 1;
        double scale = 0.0;
        for (std::size_t i = lo; i < n; ++i) scale += std::abs(a(i, k));
        if (scale == 0.0) continue;  // column already reduced

        double sigma2 = 0.0;
        for (std::size_t i = lo; i < n; ++i) {
            u[i] = a(i, k) / scale;
            sigma2 += u[i] * u[i];
        }
        const double sigma = std::sqrt(sigma2);
        const double alpha = u[lo] >= 0.0 ? -sigma : sigma;
        const double h = sigma2 - alpha * u[lo];  // = |u - alpha*e1|^2 / 2
        u[lo] -= alpha;

        a(k, lo) = a(lo, k) = scale * alpha;
        for (std::size_t i = lo + 1; i < n; ++i) a(i, k) = a(k, i) = 0.0;

        // p = A u / h over the trailing block
        for (std::size_t i = lo; i < n; ++i) {
            double sum = 0.0;
            for (std::size_t j = lo; j < n; ++j) sum += a(i, j) * u[j];
            p[i] = sum / h;
        }
        double up = 0.0;
        for (std::size_t i = lo; i < n; ++i) up += u[i] * p[i];
        const double kappa = up / (2.0 * h);
        for (std::size_t i = lo; i < n; ++i) w[i] = p[i] - kappa * u[i];

        // A <- A - u w^T - w u^T
        for (std::size_t i = lo; i < n; ++i)
            for (std::size_t j = lo; j < n; ++j) a(i, j) -= u[i] * w[j] + w[i] * u[j];

        // V <- V (I - u u^T / h)
        for (std::size_t r = 0; r < n; ++r) {
            double t = 0.0;
            for (std::size_t j = lo; j < n; ++j) t += v(r, j) * u[j];
            t /= h;
            for (std::size_t j = lo; j < n; ++j) v(r, j) -= t * u[j];
        }
    }

    d.resize(n);
    e.assign(n > 0 ? n - 1 : 0, 0.0);
    for (std::size_t i = 0; i < n; ++i) d[i] = a(i, i);
    for (std::size_t i = 0; i + 1 < n; ++i) e[i] = a(i + 1, i);
}

// Implicit-shift QL on tridiag(d, e) with eigenvector accumulation into v.
// 30 sweeps per eigenvalue, each a full plane-rotation chase.
void tridiag_ql(std::vector<double>& d, std::vector<double>& e, DenseMatrix& v) {
    const std::size_t n = d.size();
    if (n == 0) return;
    std::vector<double> sub(e);
    sub.push_back(0.0);  // sub[l] couples l and l+1; sentinel at n-1

    for (std::size_t l = 0; l < n; ++l) {
        int iter = 0;
        while (true) {
            std::size_t split = l;
            while (split + 1 < n) {
                const double dd = std::abs(d[split]) + std::abs(d[split + 1]);
                if (std::abs(sub[split]) <= kEps * dd) break;
                ++split;
            }
            if (split == l) break;
            if (++iter > 30) throw NonConvergenceError("tridiagonal QL exceeded 30 sweeps");

            // Wilkinson-style shift from the leading 2x2
            double g = (d[l + 1] - d[l]) / (2.0 * sub[l]);
            double r = std::hypot(g, 1.0);
            g = d[split] - d[l] + sub[l] / (g + std::copysign(r, g));
            double s = 1.0, c = 1.0, p = 0.0;

            bool underflow = false;
            for (std::size_t i = split; i-- > l;) {
                double f = s * sub[i];
                const double b = c * sub[i];
                r = std::hypot(f, g);
                sub[i + 1] = r;
                if (r == 0.0) {
                    d[i + 1] -= p;
                    sub[split] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                for (std::size_t k = 0; k < n; ++k) {
                    f = v(k, i + 1);
                    v(k, i + 1) = s * v(k, i) + c * f;
                    v(k, i) = c * v(k, i) - s * f;
                }
            }
            if (underflow) continue;
            d[l] -= p;
            sub[l] = g;
            sub[split] = 0.0;
        }
    }
    e.assign(sub.begin(), sub.end() - 1);
}

}  // namespace

SymEigResult sym_eig(const DenseMatrix& s) {
    if (s.rows() != s.cols()) throw std::invalid_argument("sym_eig: matrix not square");
    const std::size_t n = s.rows();
    const double scale = max_abs(s);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (std::abs(s(i, j) - s(j, i)) > 1e-12 * std::max(scale, 1e-300))
                throw std::invalid_argument("sym_eig: matrix not symmetric");

    DenseMatrix work = s;
    std::vector<double> d, e;
    DenseMatrix v;
    tridiagonalize(work, d, e, v);
    tridiag_ql(d, e, v);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return d[a] < d[b]; });

    SymEigResult out;
    out.values.resize(n);
    out.vectors = DenseMatrix(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        out.values[j] = d[order[j]];
        for (std::size_t i = 0; i < n; ++i) out.vectors(i, j) = v(i, order[j]);
    }
    return out;
}

std::optional<DenseMatrix> cholesky(const DenseMatrix& s) {
    if (s.rows() != s.cols()) throw std::invalid_argument("cholesky: matrix not square");
    const std::size_t n = s.rows();
    double max_diag = 0.0;
    for (std::size_t i = 0; i < n; ++i) max_diag = std::max(max_diag, s(i, i));
    const double pivot_floor = static_cast<double>(n) * kEps * max_diag;

    DenseMatrix l(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        double diag = s(j, j);
        for (std::size_t k = 0; k < j; ++k) diag -= l(j, k) * l(j, k);
        if (diag <= pivot_floor) return std::nullopt;
        l(j, j) = std::sqrt(diag);
        for (std::size_t i = j + 1; i < n; ++i) {
            double sum = s(i, j);
            for (std::size_t k = 0; k < j; ++k) sum -= l(i, k) * l(j, k);
            l(i, j) = sum / l(j, j);
        }
    }
    return l;
}

SvdResult jacobi_svd(const DenseMatrix& d) {
    if (d.rows() < d.cols()) {
        SvdResult t = jacobi_svd(transposed(d));
        return {std::move(t.v), std::move(t.sigma), std::move(t.u)};
    }
    const std::size_t m = d.rows();
    const std::size_t n = d.cols();
    DenseMatrix w = d;
    DenseMatrix v = DenseMatrix::identity(n);

    const int max_sweeps = 60;
    int sweep = 0;
    for (; sweep < max_sweeps; ++sweep) {
        bool rotated = false;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                double app = 0.0, aqq = 0.0, apq = 0.0;
                for (std::size_t i = 0; i < m; ++i) {
                    app += w(i, p) * w(i, p);
                    aqq += w(i, q) * w(i, q);
                    apq += w(i, p) * w(i, q);
                }
                if (std::abs(apq) <= 1e2 * kEps * std::sqrt(app * aqq) || apq == 0.0) continue;
                rotated = true;
                const double zeta = (aqq - app) / (2.0 * apq);
                const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                for (std::size_t i = 0; i < m; ++i) {
                    const double wp = w(i, p);
                    const double wq = w(i, q);
                    w(i, p) = c * wp - s * wq;
                    w(i, q) = s * wp + c * wq;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    const double vp = v(i, p);
                    const double vq = v(i, q);
                    v(i, p) = c * vp - s * vq;
                    v(i, q) = s * vp + c * vq;
                }
            }
        }
        if (!rotated) break;
    }
    if (sweep == max_sweeps) throw NonConvergenceError("one-sided Jacobi exceeded sweep budget");

    std::vector<double> sigma(n);
    for (std::size_t j = 0; j < n; ++j) {
        double sum = 0.0;
        for (std::size_t i = 0; i < m; ++i) sum += w(i, j) * w(i, j);
        sigma[j] = std::sqrt(sum);
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return sigma[a] > sigma[b]; });

    SvdResult out;
    out.sigma.resize(n);
    out.u = DenseMatrix(m, n);
    out.v = DenseMatrix(n, n);
    const double sigma_max = sigma.empty() ? 0.0 : sigma[order[0]];
    for (std::size_t j = 0; j < n; ++j) {
        const std::size_t src = order[j];
        out.sigma[j] = sigma[src];
        for (std::size_t i = 0; i < n; ++i) out.v(i, j) = v(i, src);
        if (sigma[src] > static_cast<double>(m) * kEps * sigma_max && sigma[src] > 0.0) {
            for (std::size_t i = 0; i < m; ++i) out.u(i, j) = w(i, src) / sigma[src];
        } else {
            // null direction: complete U with a coordinate vector orthogonalized
            // against the columns already placed
            for (std::size_t cand = 0; cand < m; ++cand) {
                std::vector<double> col(m, 0.0);
                col[cand] = 1.0;
                for (int pass = 0; pass < 2; ++pass) {
                    for (std::size_t jj = 0; jj < j; ++jj) {
                        double dot = 0.0;
                        for (std::size_t i = 0; i < m; ++i) dot += out.u(i, jj) * col[i];
                        for (std::size_t i = 0; i < m; ++i) col[i] -= dot * out.u(i, jj);
                    }
                }
                double nrm = 0.0;
                for (double x : col) nrm += x * x;
                nrm = std::sqrt(nrm);
                if (nrm > 0.5) {
                    for (std::size_t i = 0; i < m; ++i) out.u(i, j) = col[i] / nrm;
                    break;
                }
            }
        }
    }
    return out;
}

bool bidiag_qr_step(std::vector<double>& alphas, std::vector<double>& betas, double mu,
                    DenseMatrix& p_acc, DenseMatrix& q_acc) {
    const std::size_t m = alphas.size();
    if (m < 2) return false;
    if (betas.size() + 1 != m) throw std::invalid_argument("bidiag_qr_step: betas must have length m-1");
    if (p_acc.cols() < m || q_acc.cols() < m)
        throw std::invalid_argument("bidiag_qr_step: accumulators too small");

    double y = alphas[0] * alphas[0] - mu * mu;
    double z = alphas[0] * betas[0];
    for (std::size_t k = 0; k + 1 < m; ++k) {
        GivensResult right = givens(y, z);
        if (k > 0) betas[k - 1] = right.r;
        const double ak = alphas[k];
        const double bk = betas[k];
        const double ak1 = alphas[k + 1];
        alphas[k] = right.c * ak - right.s * bk;
        betas[k] = right.s * ak + right.c * bk;
        alphas[k + 1] = right.c * ak1;
        const double bulge = -right.s * ak1;
        apply_rotation_columns(q_acc, {right.c, right.s, k, k + 1});

        GivensResult left = givens(alphas[k], bulge);
        alphas[k] = left.r;
        const double bk2 = betas[k];
        const double ak12 = alphas[k + 1];
        betas[k] = left.c * bk2 - left.s * ak12;
        alphas[k + 1] = left.s * bk2 + left.c * ak12;
        apply_rotation_columns(p_acc, {left.c, left.s, k, k + 1});

        if (k + 2 < m) {
            const double bk1 = betas[k + 1];
            y = betas[k];
            z = -left.s * bk1;
            betas[k + 1] = left.c * bk1;
        }
    }
    return true;
}

}  // namespace isvd
