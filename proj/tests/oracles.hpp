#pragma once

// Reference computations that share no code with the library.

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "octspec/coefficients.hpp"

namespace oracle {

using octspec::PeriodicCoefficients;

/// Transfer matrix over one period in long double, acting on (f_0, f_1):
/// columns are the images of (1, 0) and (0, 1), so the result is
/// [[theta_p, phi_p], [theta_{p+1}, phi_{p+1}]].
inline std::array<long double, 4> monodromy(const PeriodicCoefficients& c, long double lambda) {
    long double m00 = 1, m01 = 0, m10 = 0, m11 = 1;  // rows: f_{x-1}, f_x
    const int p = c.period();
    for (int x = 1; x <= p; ++x) {
        const long double ax = c.a[static_cast<std::size_t>(x - 1)];
        const long double aprev = c.a[static_cast<std::size_t>((x - 2 + p) % p)];
        const long double bx = static_cast<long double>(c.b[static_cast<std::size_t>(x - 1)]) + c.shift;
        // (f_{x-1}, f_x) -> (f_x, f_{x+1})
        const long double n00 = m10, n01 = m11;
        const long double n10 = ((lambda - bx) * m10 - aprev * m00) / ax;
        const long double n11 = ((lambda - bx) * m11 - aprev * m01) / ax;
        m00 = n00, m01 = n01, m10 = n10, m11 = n11;
    }
    return {m00, m01, m10, m11};
}

inline long double half_trace(const PeriodicCoefficients& c, long double lambda) {
    const auto m = monodromy(c, lambda);
    return 0.5L * (m[0] + m[3]);
}

/// Dirichlet eigenvalue polished by secant steps on phi_p in long double.
inline long double refine_dirichlet(const PeriodicCoefficients& c, double mu) {
    long double x0 = mu, x1 = mu + 1e-9L * (1 + std::abs(mu));
    long double f0 = monodromy(c, x0)[1], f1 = monodromy(c, x1)[1];
    for (int it = 0; it < 30 && f1 != f0; ++it) {
        const long double x2 = x1 - f1 * (x1 - x0) / (f1 - f0);
        x0 = x1, f0 = f1;
        x1 = x2, f1 = monodromy(c, x1)[1];
        if (f1 == 0 || std::abs(x1 - x0) < 1e-18L * (1 + std::abs(x1))) break;
    }
    return x1;
}

/// phi_0..phi_{x_max} in long double.
inline std::vector<long double> phi_values(const PeriodicCoefficients& c, long double lambda, int x_max) {
    std::vector<long double> f{0.0L, 1.0L};
    for (long x = 1; x < x_max; ++x) {
        const auto i = static_cast<std::size_t>(x);
        f.push_back(((lambda - static_cast<long double>(c.site(x))) * f[i] - c.hop(x - 1) * f[i - 1]) / c.hop(x));
    }
    return f;
}

/// Number of eigenvalues below x of the symmetric tridiagonal matrix (Sturm count).
inline int sturm_count(const std::vector<double>& diag, const std::vector<double>& off, double x) {
    int count = 0;
    long double q = 1;
    for (std::size_t i = 0; i < diag.size(); ++i) {
        const long double o = i > 0 ? off[i - 1] : 0.0;
        q = (diag[i] - x) - (i > 0 ? o * o / q : 0.0L);
        if (q == 0) q = 1e-300L;
        if (q < 0) ++count;
    }
    return count;
}

/// Eigenvalues of a symmetric tridiagonal matrix by Sturm bisection.
inline std::vector<double> sturm_eigenvalues(const std::vector<double>& diag, const std::vector<double>& off) {
    const std::size_t n = diag.size();
    double lo = 0, hi = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = (i > 0 ? std::abs(off[i - 1]) : 0.0) + (i + 1 < n ? std::abs(off[i]) : 0.0);
        lo = std::min(lo, diag[i] - r);
        hi = std::max(hi, diag[i] + r);
    }
    std::vector<double> out;
    for (std::size_t k = 0; k < n; ++k) {
        double a = lo - 1, b = hi + 1;
        for (int it = 0; it < 200; ++it) {
            const double m = 0.5 * (a + b);
            if (m <= a || m >= b) break;
            if (sturm_count(diag, off, m) > static_cast<int>(k)) b = m;
            else a = m;
        }
        out.push_back(0.5 * (a + b));
    }
    return out;
}

/// Dirichlet matrix on sites 1..p-1, whose eigenvalues are the zeros of phi_p.
inline std::vector<double> dirichlet_by_sturm(const PeriodicCoefficients& c) {
    const int p = c.period();
    std::vector<double> diag, off;
    for (int x = 1; x < p; ++x) {
        diag.push_back(c.b[static_cast<std::size_t>(x - 1)] + c.shift);
        if (x < p - 1) off.push_back(c.a[static_cast<std::size_t>(x - 1)]);
    }
    return sturm_eigenvalues(diag, off);
}

/// m_+ = psi_1 / psi_0 by running the backward continued fraction over many periods.
inline std::complex<double> m_plus_continued_fraction(const PeriodicCoefficients& c, std::complex<double> lambda, int periods) {
    const int p = c.period();
    auto a = [&](long x) { return c.a[static_cast<std::size_t>(((x - 1) % p + p) % p)]; };
    auto b = [&](long x) { return c.b[static_cast<std::size_t>(((x - 1) % p + p) % p)] + c.shift; };
    std::complex<double> g = 0;
    for (long x = static_cast<long>(periods) * p + 1; x >= 1; --x) g = a(x - 1) / (lambda - b(x) - a(x) * g);
    return g;
}

/// Dense Hamiltonian of the truncated half-line (sites 1..L).
inline Eigen::MatrixXd half_line_matrix(const PeriodicCoefficients& c, int L) {
    const int p = c.period();
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(L, L);
    for (int i = 0; i < L; ++i) {
        h(i, i) = c.b[static_cast<std::size_t>(i % p)] + c.shift;
        if (i + 1 < L) h(i, i + 1) = h(i + 1, i) = c.a[static_cast<std::size_t>(i % p)];
    }
    return h;
}

/// Number of ordered d-tuples from {1..m} summing to s.
inline int tuples_with_sum(int d, int m, int s) {
    if (d == 0) return s == 0 ? 1 : 0;
    int n = 0;
    for (int i = 1; i <= m; ++i) n += tuples_with_sum(d - 1, m, s - i);
    return n;
}

template <class Rng>
PeriodicCoefficients random_coefficients(int p, Rng& rng, double log_a = 1.0, double b_max = 2.0) {
    std::uniform_real_distribution<double> la(-log_a, log_a), lb(-b_max, b_max);
    std::vector<double> a(static_cast<std::size_t>(p)), b(static_cast<std::size_t>(p));
    double s = 0, m = 0;
    for (int i = 0; i < p; ++i) {
        a[static_cast<std::size_t>(i)] = la(rng);
        b[static_cast<std::size_t>(i)] = lb(rng);
        s += a[static_cast<std::size_t>(i)];
        m += b[static_cast<std::size_t>(i)];
    }
    for (int i = 0; i < p; ++i) {
        a[static_cast<std::size_t>(i)] = std::exp(a[static_cast<std::size_t>(i)] - s / p);
        b[static_cast<std::size_t>(i)] -= m / p;
    }
    return {a, b, 0.0};
}

}  // namespace oracle
