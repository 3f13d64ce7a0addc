#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "octspec/coefficients.hpp"
#include "octspec/errors.hpp"
#include "octspec/intervals.hpp"
#include "octspec/recurrence.hpp"

namespace octspec {

/// Band edges lambda_0^+ < lambda_1^- <= lambda_1^+ < ... < lambda_{p-1}^+ < lambda_p^-,
/// bands sigma_n = [lambda_n^+, lambda_{n+1}^-] (n = 0..p-1) and
/// gaps gamma_n = (lambda_n^-, lambda_n^+) (n = 1..p-1).
struct SpectralBands {
    int p = 0;
    std::vector<double> edges;   // 2p sorted edges
    std::vector<Interval> bands;  // p bands
    std::vector<Interval> gaps;   // index n-1 holds gamma_n; closed gaps have lo == hi

    double lambda_plus(int n) const { return edges[static_cast<std::size_t>(2 * n)]; }
    double lambda_minus(int n) const { return edges[static_cast<std::size_t>(2 * n - 1)]; }
    const Interval& gap(int n) const { return gaps[static_cast<std::size_t>(n - 1)]; }
    bool gap_open(int n) const { return gap(n).hi > gap(n).lo; }
    double bottom() const { return edges.front(); }
    double top() const { return edges.back(); }

    double total_band_width() const {
        double s = 0;
        for (const auto& b : bands) s += b.length();
        return s;
    }

    /// Bands with closed gaps merged.
    std::vector<Interval> spectrum() const { return merge_intervals(bands); }

    /// Index n of the open gap strictly containing lambda, or 0 if none.
    int gap_containing(double lambda) const {
        for (int n = 1; n < p; ++n)
            if (gap_open(n) && gap(n).lo < lambda && lambda < gap(n).hi) return n;
        return 0;
    }
};

namespace detail {

// Eigenvalues of the p x p Floquet matrix with boundary phase sign (+1: periodic,
// F = 1; -1: antiperiodic, F = -1).
inline Eigen::VectorXd floquet_eigenvalues(const PeriodicCoefficients& c, double sign) {
    const int p = c.period();
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(p, p);
    for (int i = 0; i < p; ++i) m(i, i) = c.site(i + 1);
    for (int i = 0; i + 1 < p; ++i) {
        m(i, i + 1) += c.hop(i + 1);
        m(i + 1, i) += c.hop(i + 1);
    }
    m(p - 1, 0) += sign * c.hop(p);
    m(0, p - 1) += sign * c.hop(p);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues();
}

// Root-residual of F(lambda) = target measured against the local slope, so that
// stiff Lyapunov functions of widely gapped operators are judged by their
// backward error in lambda rather than the raw value of F.
inline double edge_residual(const PeriodicCoefficients& c, double lambda, double target) {
    const auto d = period_map_derivative(c, lambda);
    return std::abs(d.F - target) / (1.0 + std::abs(d.dF) * (1.0 + std::abs(lambda)));
}

inline double polish_edge(const PeriodicCoefficients& c, double lambda, double target) {
    auto d = period_map_derivative(c, lambda);
    double best = std::abs(d.F - target);
    for (int it = 0; it < 4 && best > 0; ++it) {
        if (d.dF == 0.0) break;
        const double step = (d.F - target) / d.dF;
        if (std::abs(step) > 1e-8 * (1.0 + std::abs(lambda))) break;
        const double trial = lambda - step;
        const auto dt = period_map_derivative(c, trial);
        if (!(std::abs(dt.F - target) < best)) break;
        lambda = trial;
        d = dt;
        best = std::abs(dt.F - target);
    }
    return lambda;
}

}  // namespace detail

/// Closed-gap threshold: lambda_n^+ - lambda_n^- <= 1e-9 (1 + |lambda_n^-|).
inline constexpr double kClosedGapTol = 1e-9;

/// All 2p solutions of F(lambda) = +-1, sorted and labelled.
///
/// Seeds come from the periodic/antiperiodic Floquet matrices (whose
/// eigenvalues are exactly the roots of F = 1 and F = -1, with multiplicity),
/// then each root is Newton-polished on F evaluated through the recurrence.
inline SpectralBands band_edges(const PeriodicCoefficients& c) {
    c.validate();
    const int p = c.period();
    // Sorted roots of F = 1 and F = -1. Walking up the spectrum the edge classes
    // alternate in a fixed pattern, so the k-th edge of each class is known.
    std::vector<double> roots[2];
    for (int s = 0; s < 2; ++s) {
        const double sign = s == 0 ? 1.0 : -1.0;
        const Eigen::VectorXd ev = detail::floquet_eigenvalues(c, sign);
        for (int i = 0; i < p; ++i) roots[s].push_back(detail::polish_edge(c, ev(i), sign));
        std::sort(roots[s].begin(), roots[s].end());
    }

    SpectralBands out;
    out.p = p;
    out.edges.resize(static_cast<std::size_t>(2 * p));
    std::size_t used[2] = {0, 0};
    for (int i = 0; i < 2 * p; ++i) {
        // edges[0] = lambda_0^+, edges[2n-1] = lambda_n^-, edges[2n] = lambda_n^+, edges[2p-1] = lambda_p^-
        const int n = (i + 1) / 2;
        const int s = ((p - n) % 2 == 0) ? 0 : 1;
        const double lambda = roots[s][used[s]++];
        const double res = detail::edge_residual(c, lambda, s == 0 ? 1.0 : -1.0);
        if (res > 1e-9) {
            std::ostringstream os;
            os << "band edge root finder residual " << res << " at lambda = " << lambda;
            throw NumericalError(os.str());
        }
        out.edges[static_cast<std::size_t>(i)] = lambda;
    }
    for (int n = 0; n < p; ++n) {
        // Bands narrower than the eigenvalue accuracy may come out with crossed edges.
        double& lo = out.edges[static_cast<std::size_t>(2 * n)];
        double& hi = out.edges[static_cast<std::size_t>(2 * n + 1)];
        if (lo <= hi) continue;
        if (lo - hi > 1e-12 * (1.0 + std::abs(lo)) * p) {
            std::ostringstream os;
            os << "band edge labelling failed in band " << n << " (" << lo << " > " << hi << ")";
            throw NumericalError(os.str());
        }
        std::swap(lo, hi);
    }
    for (int n = 1; n < p; ++n) {
        double& lo = out.edges[static_cast<std::size_t>(2 * n - 1)];
        double& hi = out.edges[static_cast<std::size_t>(2 * n)];
        if (hi - lo <= kClosedGapTol * (1.0 + std::abs(lo))) lo = hi = 0.5 * (lo + hi);
    }
    for (int n = 0; n < p; ++n) out.bands.push_back({out.lambda_plus(n), out.edges[static_cast<std::size_t>(2 * n + 1)]});
    for (int n = 1; n < p; ++n) out.gaps.push_back({out.lambda_minus(n), out.lambda_plus(n)});
    return out;
}

/// Quasimomentum on band sigma_n with cos k = F(lambda). The value is
/// k = m*pi + arccos((-1)^m F) with m = p-1-n: zero at the top edge lambda_p^-,
/// increasing continuously (and monotonically) as lambda decreases through the bands.
inline double quasimomentum(const PeriodicCoefficients& c, double lambda, int band_index) {
    c.validate();
    const int p = c.period();
    if (band_index < 0 || band_index >= p) throw DomainError("band index out of range");
    const SpectralBands sb = band_edges(c);
    const Interval& band = sb.bands[static_cast<std::size_t>(band_index)];
    const double slack = 1e-12 * (1.0 + std::abs(lambda));
    if (lambda < band.lo - slack || lambda > band.hi + slack) {
        std::ostringstream os;
        os << "lambda = " << lambda << " is outside band " << band_index << " [" << band.lo << ", " << band.hi << "]";
        throw DomainError(os.str());
    }
    const int m = p - 1 - band_index;
    const double sign = (m % 2 == 0) ? 1.0 : -1.0;
    const double F = std::clamp(detail::period_map(c, lambda).F, -1.0, 1.0);
    return m * std::numbers::pi + std::acos(sign * F);
}

/// Critical point alpha_n of F in a gap and h_n = arccosh |F(alpha_n)|.
struct GapExtremum {
    int n = 0;
    double alpha = 0.0;
    double height = 0.0;
};

inline std::vector<GapExtremum> gap_extrema(const PeriodicCoefficients& c) {
    const SpectralBands sb = band_edges(c);
    std::vector<GapExtremum> out;
    for (int n = 1; n < sb.p; ++n) {
        const Interval g = sb.gap(n);
        if (!sb.gap_open(n)) {
            out.push_back({n, g.lo, 0.0});
            continue;
        }
        // F' has opposite signs at the two edges of an open gap and a single zero inside.
        double lo = g.lo, hi = g.hi;
        double dlo = detail::period_map_derivative(c, lo).dF;
        const double dhi = detail::period_map_derivative(c, hi).dF;
        if (dlo == 0.0 || dhi == 0.0 || (dlo > 0) == (dhi > 0)) {
            // Endpoint derivative lost to roundoff; fall back to maximizing |F| on a grid.
            double best = lo, best_val = 0;
            for (int k = 1; k < 400; ++k) {
                const double x = lo + (hi - lo) * k / 400.0;
                const double v = std::abs(detail::period_map(c, x).F);
                if (v > best_val) best_val = v, best = x;
            }
            lo = std::max(g.lo, best - (hi - lo) / 400.0);
            hi = std::min(g.hi, best + (g.hi - g.lo) / 400.0);
            dlo = detail::period_map_derivative(c, lo).dF;
        }
        for (int it = 0; it < 200 && hi - lo > 4 * std::numeric_limits<double>::epsilon() * (1 + std::abs(lo)); ++it) {
            const double mid = 0.5 * (lo + hi);
            const double dm = detail::period_map_derivative(c, mid).dF;
            if (dm == 0.0) {
                lo = hi = mid;
                break;
            }
            if ((dm > 0) == (dlo > 0)) {
                lo = mid;
                dlo = dm;
            } else {
                hi = mid;
            }
        }
        const double alpha = 0.5 * (lo + hi);
        const double f = std::abs(detail::period_map(c, alpha).F);
        if (!(f >= 1.0)) throw NumericalError("gap critical point search failed: |F(alpha)| < 1 in an open gap");
        out.push_back({n, alpha, std::acosh(f)});
    }
    return out;
}

/// h_n for n = 1..p-1 (index n-1); zero exactly for closed gaps.
inline std::vector<double> gap_heights(const PeriodicCoefficients& c) {
    std::vector<double> h;
    for (const auto& e : gap_extrema(c)) h.push_back(e.height);
    return h;
}

}  // namespace octspec
