#pragma once

#include <cmath>
#include <cstddef>
#include <random>
#include <vector>

namespace isvd {

inline double dot(const std::vector<double>& x, const std::vector<double>& y) {
    double sum = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) sum += x[i] * y[i];
    return sum;
}

inline double norm2(const std::vector<double>& x) { return std::sqrt(dot(x, x)); }

/// y += a x
inline void axpy(double a, const std::vector<double>& x, std::vector<double>& y) {
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

inline void scale(std::vector<double>& x, double a) {
    for (double& v : x) v *= a;
}

inline std::vector<double> random_unit_vector(std::size_t n, std::mt19937_64& rng) {
    std::normal_distribution<double> dist(0.0, 1.0);
    std::vector<double> v(n);
    double nrm = 0.0;
    while (nrm == 0.0) {
        for (double& x : v) x = dist(rng);
        nrm = norm2(v);
    }
    scale(v, 1.0 / nrm);
    return v;
}

}  // namespace isvd
