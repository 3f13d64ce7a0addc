#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <sstream>
#include <string_view>
#include <vector>

#include "octspec/bands.hpp"
#include "octspec/coefficients.hpp"
#include "octspec/errors.hpp"
#include "octspec/recurrence.hpp"

namespace octspec {

/// Zeros mu_1 < ... < mu_{p-1} of phi_p: eigenvalues of the Jacobi matrix on
/// sites 1..p-1 with f_0 = f_p = 0. Empty for p = 1.
inline std::vector<double> dirichlet_eigenvalues(const PeriodicCoefficients& c);

/// Dirichlet eigenvalue mu_n with log|phi_{p+1}(mu_n)|.
struct DirichletPoint {
    double mu = 0.0;
    double log_phi_p1 = 0.0;
    int phi_p1_sign = 1;

    double phi_p1() const { return phi_p1_sign * std::exp(log_phi_p1); }
};

namespace detail {

// Since phi_p(mu) = 0, phi_{p+1}(mu) = -a_{p-1} phi_{p-1}(mu) / a_p, and
// phi_{p-1}(mu)/phi_1(mu) = v_{p-1}/v_1 for the Dirichlet eigenvector v. Going
// through the eigenvector avoids dividing by small hoppings in the recurrence.
inline std::vector<DirichletPoint> dirichlet_points(const PeriodicCoefficients& c, bool vectors) {
    const int p = c.period();
    if (p < 2) return {};
    const int n = p - 1;
    Eigen::VectorXd diag(n), sub(std::max(n - 1, 1));
    for (int i = 0; i < n; ++i) diag(i) = c.site(i + 1);
    for (int i = 0; i + 1 < n; ++i) sub(i) = c.hop(i + 1);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, sub.head(n - 1), vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw NumericalError("Dirichlet eigenvalue solver did not converge");
    std::vector<DirichletPoint> out(static_cast<std::size_t>(n));
    const double ratio = std::log(c.hop(p - 1)) - std::log(c.hop(p));
    for (int i = 0; i < n; ++i) {
        auto& d = out[static_cast<std::size_t>(i)];
        d.mu = es.eigenvalues()(i);
        if (vectors) {
            const auto v = es.eigenvectors().col(i);
            d.log_phi_p1 = ratio + std::log(std::abs(v(n - 1))) - std::log(std::abs(v(0)));
            d.phi_p1_sign = (v(n - 1) > 0) == (v(0) > 0) ? -1 : 1;
        }
    }
    return out;
}

}  // namespace detail

inline std::vector<double> dirichlet_eigenvalues(const PeriodicCoefficients& c) {
    c.validate();
    std::vector<double> mu;
    for (const auto& d : detail::dirichlet_points(c, false)) mu.push_back(d.mu);
    return mu;
}

/// Dirichlet eigenvalues with |phi_{p+1}| evaluated there (in log form).
inline std::vector<DirichletPoint> dirichlet_points(const PeriodicCoefficients& c) {
    c.validate();
    return detail::dirichlet_points(c, true);
}

enum class StateKind { Eigenvalue, Resonance, VirtualState };

inline std::string_view to_string(StateKind k) {
    switch (k) {
        case StateKind::Eigenvalue: return "eigenvalue";
        case StateKind::Resonance: return "resonance";
        case StateKind::VirtualState: return "virtual";
    }
    return "?";
}

struct GapState {
    int n = 0;
    double mu = 0.0;
    StateKind kind = StateKind::VirtualState;
    int epsilon = 0;
    double phi_p1_abs = 1.0;
};

enum class Sheet { Plus, Minus };

/// e^{ik} on the physical sheet, i.e. the Floquet multiplier of the solution
/// decaying towards +infinity, together with sin k = -i (e^{ik} - F).
///
/// Off the spectrum this is the root of rho^2 - 2 F rho + 1 = 0 with |rho| < 1.
/// On a band interior both roots are unimodular and the boundary value from the
/// upper half-plane is taken, which gives sin k < 0 on the top band.
struct Multiplier {
    Complex rho;
    Complex sin_k;
};

namespace detail {

inline Multiplier physical_multiplier(const PeriodicCoefficients& c, Complex lambda, Complex F) {
    Complex s = std::sqrt(F * F - 1.0);
    // The larger root F + s is free of cancellation; the product of the roots is 1.
    if (std::real(std::conj(F) * s) < 0) s = -s;
    const Complex r2 = F + s;
    const Complex r1 = 1.0 / r2;
    const bool unimodular = std::abs(std::abs(r1) - 1.0) <= 1e-13 && std::abs(std::abs(r2) - 1.0) <= 1e-13;
    if (lambda.imag() == 0.0 && unimodular && std::abs(F.imag()) <= 1e-13 * (1.0 + std::abs(F))) {
        const double f = std::clamp(F.real(), -1.0, 1.0);
        const double dF = detail::period_map_derivative(c, lambda.real()).dF;
        const double sk = -(dF >= 0 ? 1.0 : -1.0) * std::sqrt(1.0 - f * f);
        return {Complex(f, sk), Complex(sk, 0.0)};
    }
    const Complex rho = r1;
    return {rho, Complex(0, -1) * (rho - F)};
}

}  // namespace detail

inline Multiplier floquet_multiplier(const PeriodicCoefficients& c, Complex lambda) {
    c.validate();
    return detail::physical_multiplier(c, lambda, detail::period_map(c, lambda).F);
}

/// m_+(lambda) and m_-(lambda) on the physical sheet.
struct WeylValue {
    Complex lambda;
    Complex m_plus;
    Complex m_minus;
};

namespace detail {

// m_{+-} = (e^{+-ik} - theta_p)/phi_p = -theta_{p+1}/(e^{-+ik} - theta_p);
// the better conditioned of the two forms is used.
inline Complex weyl_branch(const LyapunovValues<Complex>& v, Complex e_same, Complex e_other, double lambda_re) {
    const double scale = 1.0 + std::abs(v.theta_p) + std::abs(v.phi_p1) + std::abs(v.phi_p) + std::abs(v.theta_p1);
    const Complex den_a = v.phi_p;
    const Complex den_b = e_other - v.theta_p;
    if (std::abs(den_a) >= std::abs(den_b)) {
        if (std::abs(den_a) <= 1e-14 * scale) {
            throw PoleError("Weyl function evaluated at its pole", lambda_re, std::abs(e_same - v.theta_p));
        }
        return (e_same - v.theta_p) / den_a;
    }
    if (std::abs(den_b) <= 1e-14 * scale) {
        throw PoleError("Weyl function evaluated at its pole", lambda_re, std::abs(v.theta_p1));
    }
    return -v.theta_p1 / den_b;
}

}  // namespace detail

inline WeylValue weyl_m(const PeriodicCoefficients& c, Complex lambda) {
    c.validate();
    const auto v = detail::period_map(c, lambda);
    const auto mult = detail::physical_multiplier(c, lambda, v.F);
    const Complex e_plus = mult.rho;
    const Complex e_minus = v.F - Complex(0, 1) * mult.sin_k;  // e^{-ik}
    WeylValue w;
    w.lambda = lambda;
    try {
        w.m_plus = detail::weyl_branch(v, e_plus, e_minus, lambda.real());
    } catch (const PoleError&) {
        // Residue of m_+ at a Dirichlet zero: (e^{ik} - theta_p)/phi_p'.
        const double dphi = detail::period_map_derivative(c, lambda.real()).dphi_p;
        throw PoleError("m_+ has a pole at this Dirichlet eigenvalue", lambda.real(),
                        dphi != 0 ? std::abs(e_plus - v.theta_p) / std::abs(dphi) : 0.0);
    }
    try {
        w.m_minus = detail::weyl_branch(v, e_minus, e_plus, lambda.real());
    } catch (const PoleError&) {
        const double dphi = detail::period_map_derivative(c, lambda.real()).dphi_p;
        throw PoleError("m_- has a pole at this Dirichlet eigenvalue", lambda.real(),
                        dphi != 0 ? std::abs(e_minus - v.theta_p) / std::abs(dphi) : 0.0);
    }
    return w;
}

/// Only one branch; a pole of the other branch at the same point is not an error.
inline Complex weyl_m(const PeriodicCoefficients& c, Complex lambda, Sheet sheet) {
    c.validate();
    const auto v = detail::period_map(c, lambda);
    const auto mult = detail::physical_multiplier(c, lambda, v.F);
    const Complex e_plus = mult.rho;
    const Complex e_minus = v.F - Complex(0, 1) * mult.sin_k;
    const Complex same = sheet == Sheet::Plus ? e_plus : e_minus;
    const Complex other = sheet == Sheet::Plus ? e_minus : e_plus;
    try {
        return detail::weyl_branch(v, same, other, lambda.real());
    } catch (const PoleError&) {
        const double dphi = detail::period_map_derivative(c, lambda.real()).dphi_p;
        throw PoleError(sheet == Sheet::Plus ? "m_+ has a pole at this Dirichlet eigenvalue"
                                             : "m_- has a pole at this Dirichlet eigenvalue",
                        lambda.real(), dphi != 0 ? std::abs(same - v.theta_p) / std::abs(dphi) : 0.0);
    }
}

/// m_+ = psi_1/psi_0 from the backward Riccati recurrence
///
///     g_x = a_{x-1} / (lambda - b_x - a_x g_{x+1}),   g_x = psi_x / psi_{x-1},
///
/// whose one-period Moebius map has the decaying solution as its attracting
/// fixed point. Only products of hoppings occur, so this stays accurate when
/// some a_x is tiny and the forward recurrence is not.
inline Complex weyl_m_riccati(const PeriodicCoefficients& c, Complex lambda) {
    c.validate();
    const int p = c.period();
    Complex A = 1, B = 0, C = 0, D = 1;
    for (long x = 1; x <= p; ++x) {
        // [[A, B], [C, D]] * [[0, a_{x-1}], [-a_x, lambda - b_x]]
        const double up = c.hop(x - 1), down = c.hop(x);
        const Complex d = lambda - c.site(x);
        const Complex nA = -B * down, nB = A * up + B * d;
        const Complex nC = -D * down, nD = C * up + D * d;
        A = nA, B = nB, C = nC, D = nD;
        const double scale = std::max({std::abs(A), std::abs(B), std::abs(C), std::abs(D)});
        if (scale > 1e100) A /= scale, B /= scale, C /= scale, D /= scale;
    }
    const Complex tr = A + D;
    const Complex det = A * D - B * C;
    Complex s = std::sqrt(tr * tr - 4.0 * det);
    if (std::real(std::conj(tr) * s) < 0) s = -s;
    const Complex kappa = 0.5 * (tr + s);   // dominant eigenvalue
    const Complex other = det / kappa;
    // Eigenvectors (B, kappa - A) = (B, D - other) and (kappa - D, C) = (A - other, C).
    const Complex u1 = B, v1 = D - other, u2 = A - other, v2 = C;
    if (std::abs(u1) + std::abs(v1) >= std::abs(u2) + std::abs(v2)) {
        if (v1 == 0.0) throw PoleError("m_+ has a pole here", lambda.real(), 0.0);
        return u1 / v1;
    }
    if (v2 == 0.0) throw PoleError("m_+ has a pole here", lambda.real(), 0.0);
    return u2 / v2;
}

/// psi_x^{+-} = theta_x + m_{+-} phi_x.
inline Complex bloch_value(const PeriodicCoefficients& c, Complex lambda, int x, Sheet sheet) {
    if (x < 0) throw ValidationError("Bloch values are defined here for x >= 0");
    const Complex m = weyl_m(c, lambda, sheet);
    if (x == 0) return 1.0;
    const auto t = solve_recurrence(c, lambda, x);
    return t.theta[static_cast<std::size_t>(x)] + m * t.phi[static_cast<std::size_t>(x)];
}

/// Virtual iff | |phi_{p+1}(mu)| - 1 | <= kVirtualTol (1 + |phi_{p+1}(mu)|).
inline constexpr double kVirtualTol = 1e-8;

inline StateKind classify_value(double phi_p1_abs) {
    if (std::abs(phi_p1_abs - 1.0) <= kVirtualTol * (1.0 + phi_p1_abs)) return StateKind::VirtualState;
    return phi_p1_abs < 1.0 ? StateKind::Eigenvalue : StateKind::Resonance;
}

inline int epsilon_of(StateKind k) {
    switch (k) {
        case StateKind::Eigenvalue: return 1;
        case StateKind::Resonance: return -1;
        case StateKind::VirtualState: return 0;
    }
    return 0;
}

/// One state per open gap, located at the Dirichlet eigenvalue mu_n of that gap.
/// Closed gaps contribute nothing.
inline std::vector<GapState> classify_states(const PeriodicCoefficients& c, const SpectralBands& sb) {
    const int p = c.period();
    std::vector<GapState> out;
    if (p < 2) return out;
    const auto dp = detail::dirichlet_points(c, true);
    for (int n = 1; n < p; ++n) {
        if (!sb.gap_open(n)) continue;
        GapState s;
        s.n = n;
        s.mu = std::clamp(dp[static_cast<std::size_t>(n - 1)].mu, sb.gap(n).lo, sb.gap(n).hi);
        s.phi_p1_abs = std::exp(dp[static_cast<std::size_t>(n - 1)].log_phi_p1);
        s.kind = classify_value(s.phi_p1_abs);
        s.epsilon = epsilon_of(s.kind);
        out.push_back(s);
    }
    return out;
}

inline std::vector<GapState> classify_states(const PeriodicCoefficients& c) {
    c.validate();
    if (c.period() < 2) return {};
    return classify_states(c, band_edges(c));
}

}  // namespace octspec
