#pragma once

// Independent numerical oracles shared by the test suites. Deliberately
// implemented with different algorithms than the library under test.

#include <complex>
#include <random>
#include <vector>

namespace oracle {

using cplx = std::complex<double>;

// All roots of a polynomial sum_k c[k] z^k (ascending, c.back() != 0) by
// Durand-Kerner iteration.
inline std::vector<cplx> poly_roots(std::vector<double> c) {
    while (c.size() > 1 && std::abs(c.back()) == 0.0) c.pop_back();
    const std::size_t n = c.size() - 1;
    if (n == 0) return {};
    std::vector<cplx> a(c.begin(), c.end());
    for (auto& v : a) v /= c.back();

    auto eval = [&](cplx z) {
        cplx p = 0.0;
        for (std::size_t k = a.size(); k-- > 0;) p = p * z + a[k];
        return p;
    };

    std::vector<cplx> r(n);
    for (std::size_t i = 0; i < n; ++i)
        r[i] = std::pow(cplx(0.4, 0.9), static_cast<double>(i + 1));
    for (int it = 0; it < 500; ++it) {
        double moved = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            cplx denom = 1.0;
            for (std::size_t j = 0; j < n; ++j)
                if (j != i) denom *= r[i] - r[j];
            const cplx step = eval(r[i]) / denom;
            r[i] -= step;
            moved = std::max(moved, std::abs(step));
        }
        if (moved < 1e-14) break;
    }
    return r;
}

// e^{A t} by scaling-and-squaring of the Taylor series (small dense matrices).
inline std::vector<std::vector<double>> expm(std::vector<std::vector<double>> A, double t) {
    const std::size_t n = A.size();
    double norm = 0.0;
    for (auto& row : A)
        for (double& v : row) {
            v *= t;
            norm = std::max(norm, std::abs(v));
        }
    int s = 0;
    while (norm > 0.5) {
        norm /= 2.0;
        ++s;
    }
    const double scale = std::ldexp(1.0, -s);
    for (auto& row : A)
        for (double& v : row) v *= scale;

    auto matmul = [n](const auto& X, const auto& Y) {
        std::vector<std::vector<double>> Z(n, std::vector<double>(n, 0.0));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t k = 0; k < n; ++k)
                for (std::size_t j = 0; j < n; ++j) Z[i][j] += X[i][k] * Y[k][j];
        return Z;
    };

    std::vector<std::vector<double>> E(n, std::vector<double>(n, 0.0)), T = E;
    for (std::size_t i = 0; i < n; ++i) E[i][i] = T[i][i] = 1.0;
    for (int k = 1; k <= 24; ++k) {
        T = matmul(T, A);
        for (auto& row : T)
            for (double& v : row) v /= k;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) E[i][j] += T[i][j];
    }
    for (int k = 0; k < s; ++k) E = matmul(E, E);
    return E;
}

// Composite Simpson quadrature of f on [a, b].
template <class F>
double simpson(F f, double a, double b, int n = 2000) {
    if (n % 2) ++n;
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

} // namespace oracle
