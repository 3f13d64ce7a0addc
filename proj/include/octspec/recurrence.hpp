#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "octspec/coefficients.hpp"
#include "octspec/errors.hpp"

namespace octspec {

using Complex = std::complex<double>;

/// Fundamental solutions of a_{x-1} f_{x-1} + a_x f_{x+1} + b_x f_x = lambda f_x
/// with theta_0 = 1, theta_1 = 0, phi_0 = 0, phi_1 = 1; entries 0..x_max.
template <class Scalar>
struct SolutionTable {
    Scalar lambda{};
    std::vector<Scalar> theta;
    std::vector<Scalar> phi;

    /// {theta, phi}_x = a_x (theta_x phi_{x+1} - phi_x theta_{x+1}); constant in x.
    Scalar wronskian(const PeriodicCoefficients& c, long x) const {
        const auto i = static_cast<std::size_t>(x);
        return c.hop(x) * (theta[i] * phi[i + 1] - phi[i] * theta[i + 1]);
    }
};

template <class Scalar>
SolutionTable<Scalar> solve_recurrence(const PeriodicCoefficients& c, Scalar lambda, int x_max) {
    c.validate();
    if (x_max < 1) throw ValidationError("x_max must be at least 1");
    SolutionTable<Scalar> t;
    t.lambda = lambda;
    t.theta.resize(static_cast<std::size_t>(x_max) + 1);
    t.phi.resize(static_cast<std::size_t>(x_max) + 1);
    t.theta[0] = Scalar(1);
    t.theta[1] = Scalar(0);
    t.phi[0] = Scalar(0);
    t.phi[1] = Scalar(1);
    for (long x = 1; x < x_max; ++x) {
        const auto i = static_cast<std::size_t>(x);
        const Scalar d = lambda - c.site(x);
        const double inv = 1.0 / c.hop(x);
        const double back = c.hop(x - 1);
        t.theta[i + 1] = (d * t.theta[i] - back * t.theta[i - 1]) * inv;
        t.phi[i + 1] = (d * t.phi[i] - back * t.phi[i - 1]) * inv;
    }
    return t;
}

/// Lyapunov function F = (phi_{p+1} + theta_p)/2, its odd partner
/// Fo = (phi_{p+1} - theta_p)/2, and the endpoint values they come from.
template <class Scalar>
struct LyapunovValues {
    Scalar F{};
    Scalar Fo{};
    Scalar phi_p{};
    Scalar phi_p1{};
    Scalar theta_p{};
    Scalar theta_p1{};
};

namespace detail {

// Runs the recurrence over one period without storing the table. Validation
// is the caller's job; this is the hot path of every root finder.
template <class Scalar>
LyapunovValues<Scalar> period_map(const PeriodicCoefficients& c, Scalar lambda) {
    const int p = c.period();
    Scalar th_prev(1), th(0), ph_prev(0), ph(1);
    for (long x = 1; x <= p; ++x) {
        const Scalar d = lambda - c.site(x);
        const double inv = 1.0 / c.hop(x);
        const double back = c.hop(x - 1);
        Scalar th_next = (d * th - back * th_prev) * inv;
        Scalar ph_next = (d * ph - back * ph_prev) * inv;
        th_prev = th;
        th = th_next;
        ph_prev = ph;
        ph = ph_next;
    }
    // th == theta_{p+1}, th_prev == theta_p (same for phi).
    LyapunovValues<Scalar> v;
    v.theta_p = th_prev;
    v.theta_p1 = th;
    v.phi_p = ph_prev;
    v.phi_p1 = ph;
    v.F = (v.phi_p1 + v.theta_p) / 2.0;
    v.Fo = (v.phi_p1 - v.theta_p) / 2.0;
    return v;
}

// Values and lambda-derivatives of theta_x, phi_x at x = p, p+1, from the
// differentiated recurrence.
struct PeriodMapDerivative {
    double F = 0, dF = 0;
    double phi_p = 0, dphi_p = 0;
    double phi_p1 = 0, theta_p = 0;
};

inline PeriodMapDerivative period_map_derivative(const PeriodicCoefficients& c, double lambda) {
    const int p = c.period();
    double th_prev = 1, th = 0, ph_prev = 0, ph = 1;
    double dth_prev = 0, dth = 0, dph_prev = 0, dph = 0;
    for (long x = 1; x <= p; ++x) {
        const double d = lambda - c.site(x);
        const double inv = 1.0 / c.hop(x);
        const double back = c.hop(x - 1);
        const double th_next = (d * th - back * th_prev) * inv;
        const double ph_next = (d * ph - back * ph_prev) * inv;
        const double dth_next = (th + d * dth - back * dth_prev) * inv;
        const double dph_next = (ph + d * dph - back * dph_prev) * inv;
        th_prev = th, th = th_next, ph_prev = ph, ph = ph_next;
        dth_prev = dth, dth = dth_next, dph_prev = dph, dph = dph_next;
    }
    PeriodMapDerivative r;
    r.F = 0.5 * (ph + th_prev);
    r.dF = 0.5 * (dph + dth_prev);
    r.phi_p = ph_prev;
    r.dphi_p = dph_prev;
    r.phi_p1 = ph;
    r.theta_p = th_prev;
    return r;
}

}  // namespace detail

template <class Scalar>
LyapunovValues<Scalar> lyapunov(const PeriodicCoefficients& c, Scalar lambda) {
    c.validate();
    return detail::period_map(c, lambda);
}

/// F'(lambda), from the differentiated recurrence.
inline double lyapunov_derivative(const PeriodicCoefficients& c, double lambda) {
    c.validate();
    return detail::period_map_derivative(c, lambda).dF;
}

}  // namespace octspec
