#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <sstream>
#include <utility>
#include <vector>

#include "octspec/bands.hpp"
#include "octspec/coefficients.hpp"
#include "octspec/errors.hpp"
#include "octspec/intervals.hpp"
#include "octspec/states.hpp"

namespace octspec {

// The half-solid operator T_tau on Z: the periodic coefficients on x >= 1 and
// a_x = 1, b_x = tau on x <= 0 (so the bond between sites 0 and 1 has hopping 1).

/// Solutions of z + 1/z = lambda - tau with |z| < 1, and z1 = 1/z.
struct VacuumRoots {
    Complex z;
    Complex z1;
};

inline VacuumRoots vacuum_dispersion(Complex lambda, double tau) {
    const Complex t = 0.5 * (lambda - tau);
    Complex s = std::sqrt(t * t - 1.0);
    if (std::real(std::conj(t) * s) < 0) s = -s;
    const Complex z1 = t + s;
    return {1.0 / z1, z1};
}

/// Real branch, for lambda outside the vacuum band [tau-2, tau+2].
inline std::pair<double, double> vacuum_dispersion(double lambda, double tau) {
    const double t = 0.5 * (lambda - tau);
    if (std::abs(t) < 1.0) {
        std::ostringstream os;
        os << "lambda = " << lambda << " lies inside the vacuum band [" << tau - 2 << ", " << tau + 2 << "]";
        throw DomainError(os.str());
    }
    const double s = std::copysign(std::sqrt((t - 1.0) * (t + 1.0)), t);
    const double z1 = t + s;
    return {1.0 / z1, z1};
}

namespace detail {

inline double wronskian_unchecked(const PeriodicCoefficients& c, double tau, double lambda) {
    const Complex m = weyl_m_riccati(c, Complex(lambda, 0.0));
    return m.real() - c.hop(c.period()) * vacuum_dispersion(lambda, tau).second;
}

}  // namespace detail

/// w(lambda) = m_+(lambda) - a_p / z(lambda); its zeros are the eigenvalues of T_tau.
inline double wronskian_w(const PeriodicCoefficients& c, double tau, double lambda) {
    c.validate();
    const SpectralBands sb = band_edges(c);
    if (sb.gap_containing(lambda) == 0) {
        std::ostringstream os;
        os << "lambda = " << lambda << " is not inside an open gap";
        throw DomainError(os.str());
    }
    return detail::wronskian_unchecked(c, tau, lambda);
}

/// c(mu_n) = 2 Fo(mu_n) / (a_p phi_p'(mu_n)).
///
/// phi_p(lambda) = a_p prod_i (lambda - mu_i), so phi_p'(mu_n) is a product of
/// eigenvalue differences; Fo(mu_n) = (phi_{p+1} - 1/phi_{p+1})/2 since
/// theta_p phi_{p+1} = 1 there.
inline double asymptotic_coefficient(const PeriodicCoefficients& c, int n) {
    c.validate();
    const int p = c.period();
    if (n < 1 || n >= p) throw DomainError("gap index out of range");
    const SpectralBands sb = band_edges(c);
    if (!sb.gap_open(n)) throw DomainError("gap is closed");
    const auto dp = dirichlet_points(c);
    const auto& d = dp[static_cast<std::size_t>(n - 1)];
    if (classify_value(std::exp(d.log_phi_p1)) != StateKind::Eigenvalue)
        throw DomainError("the state in this gap is not an eigenvalue");
    const double ap = c.hop(p);
    double dphi = ap;
    for (std::size_t i = 0; i < dp.size(); ++i)
        if (static_cast<int>(i) != n - 1) dphi *= d.mu - dp[i].mu;
    const double phi = d.phi_p1();
    const double fo = 0.5 * (phi - 1.0 / phi);
    const double value = 2.0 * fo / (ap * dphi);
    if (!(std::abs(value) > 1e-12)) throw NumericalError("asymptotic coefficient vanishes: state misclassified");
    return value;
}

struct HalfSolidSpectrum {
    double tau = 0;
    std::vector<Interval> bands;                 // bands of J_+, then [tau-2, tau+2]
    std::vector<Interval> gaps;                  // gamma_1..gamma_{p-1}, then (top, tau-2)
    std::vector<std::optional<double>> eigenvalues;  // per gap n = 1..p-1
    std::vector<double> top_gap_eigenvalues;     // zeros of w in (top, tau-2); informational
};

namespace detail {

struct Sample {
    double x;
    double w;
};

// Evaluates w on a grid of the open interval (lo, hi), geometric towards the
// endpoints and towards the pole (if any).
inline std::vector<Sample> sample_wronskian(const PeriodicCoefficients& c, double tau, double lo, double hi,
                                            std::optional<double> pole) {
    std::vector<double> xs;
    const double len = hi - lo;
    for (int k = 1; k < 64; ++k) xs.push_back(lo + len * k / 64.0);
    for (int k = 7; k <= 48; ++k) {
        const double d = len * std::ldexp(1.0, -k);
        xs.push_back(lo + d);
        xs.push_back(hi - d);
        if (pole) {
            xs.push_back(*pole - d);
            xs.push_back(*pole + d);
        }
    }
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    std::vector<Sample> out;
    for (double x : xs) {
        if (!(x > lo && x < hi) || (pole && x == *pole)) continue;
        try {
            const double w = wronskian_unchecked(c, tau, x);
            if (std::isfinite(w)) out.push_back({x, w});
        } catch (const PoleError&) {
        }
    }
    return out;
}

// Brackets [x_k, x_{k+1}] where w crosses from positive to negative. Both m_+
// and -a_p z1 decrease between poles, so zeros cross downwards while the pole
// of m_+ crosses upwards, even when it sits a rounding error away from mu.
inline std::vector<std::pair<Sample, Sample>> sign_changes(const std::vector<Sample>& s, std::optional<double> pole) {
    std::vector<std::pair<Sample, Sample>> out;
    for (std::size_t k = 0; k + 1 < s.size(); ++k) {
        if (pole && s[k].x < *pole && *pole < s[k + 1].x) continue;
        if (s[k].w > 0 && s[k + 1].w < 0) out.push_back({s[k], s[k + 1]});
    }
    return out;
}

inline double bisect_wronskian(const PeriodicCoefficients& c, double tau, Sample a, Sample b) {
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (a.x + b.x);
        if (mid <= a.x || mid >= b.x) break;
        const double w = wronskian_unchecked(c, tau, mid);
        if (w == 0.0) return mid;
        if ((w < 0) == (a.w < 0)) {
            a = {mid, w};
        } else {
            b = {mid, w};
        }
    }
    const double x = std::abs(a.w) <= std::abs(b.w) ? a.x : b.x;
    const double w = std::min(std::abs(a.w), std::abs(b.w));
    // |w| is judged against the size of its two terms; next to the pole of m_+
    // the slope of w can make that unreachable, and a bracket of adjacent
    // doubles is accepted instead.
    const double scale = 1.0 + c.hop(c.period()) * std::abs(vacuum_dispersion(x, tau).second);
    const bool collapsed = b.x - a.x <= 4 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(x));
    if (w > 1e-9 * scale && !collapsed) {
        std::ostringstream os;
        os << "Wronskian bisection stalled at lambda = " << x << " with |w| = " << w;
        throw NumericalError(os.str());
    }
    return x;
}

}  // namespace detail

/// Zero of w in each gap n = 1..p-1 (none for resonance and virtual states).
///
/// The vacuum level is large enough when sampling w shows exactly one sign
/// change away from the pole of m_+ in every eigenvalue gap and none in the
/// other gaps; otherwise a ThresholdError asks for a larger tau.
inline HalfSolidSpectrum find_gap_eigenvalues(const PeriodicCoefficients& c, double tau) {
    c.validate();
    const int p = c.period();
    const SpectralBands sb = band_edges(c);
    if (!(tau >= sb.top() + 4.0)) {
        std::ostringstream os;
        os << "tau = " << tau << " must be at least the top of the spectrum plus 4 (" << sb.top() + 4.0 << ")";
        throw ParameterError(os.str());
    }
    HalfSolidSpectrum out;
    out.tau = tau;
    out.bands = sb.spectrum();
    out.bands.push_back({tau - 2.0, tau + 2.0});
    out.gaps = sb.gaps;
    out.gaps.push_back({sb.top(), tau - 2.0});
    out.eigenvalues.assign(static_cast<std::size_t>(std::max(p - 1, 0)), std::nullopt);

    const auto states = classify_states(c, sb);
    for (const auto& st : states) {
        const Interval g = sb.gap(st.n);
        const bool eigen = st.kind == StateKind::Eigenvalue;
        std::optional<double> pole;
        if (eigen) pole = st.mu;
        const auto samples = detail::sample_wronskian(c, tau, g.lo, g.hi, pole);
        const auto brackets = detail::sign_changes(samples, pole);
        const std::size_t expected = eigen ? 1 : 0;
        if (brackets.size() != expected) {
            std::ostringstream os;
            os << "tau = " << tau << " is below the asymptotic threshold: gap " << st.n << " shows "
               << brackets.size() << " sign changes of w (expected " << expected << ")";
            throw ThresholdError(os.str());
        }
        if (eigen) {
            out.eigenvalues[static_cast<std::size_t>(st.n - 1)] =
                detail::bisect_wronskian(c, tau, brackets[0].first, brackets[0].second);
        }
    }

    const Interval top = out.gaps.back();
    if (top.hi > top.lo) {
        const auto samples = detail::sample_wronskian(c, tau, top.lo, top.hi, std::nullopt);
        for (const auto& [a, b] : detail::sign_changes(samples, std::nullopt)) {
            try {
                out.top_gap_eigenvalues.push_back(detail::bisect_wronskian(c, tau, a, b));
            } catch (const NumericalError&) {
            }
        }
    }
    return out;
}

}  // namespace octspec
