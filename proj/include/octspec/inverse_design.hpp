#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <sstream>
#include <vector>

#include "octspec/bands.hpp"
#include "octspec/coefficients.hpp"
#include "octspec/errors.hpp"
#include "octspec/states.hpp"

namespace octspec {

/// Gap-length coordinates psi_n = (psi_1n, psi_2n), n = 1..p-1:
/// psi_1n = (lambda_n^+ + lambda_n^-)/2 - mu_n,
/// psi_2n = eps_n sqrt(| |gamma_n|^2/4 - psi_1n^2 |).
struct GapMapVector {
    std::vector<std::array<double, 2>> psi;

    int period() const { return static_cast<int>(psi.size()) + 1; }

    Eigen::VectorXd flat() const {
        Eigen::VectorXd v(2 * static_cast<Eigen::Index>(psi.size()));
        for (std::size_t i = 0; i < psi.size(); ++i) {
            v(static_cast<Eigen::Index>(2 * i)) = psi[i][0];
            v(static_cast<Eigen::Index>(2 * i + 1)) = psi[i][1];
        }
        return v;
    }

    static GapMapVector from_flat(const Eigen::VectorXd& v) {
        GapMapVector g;
        for (Eigen::Index i = 0; i + 1 < v.size(); i += 2) g.psi.push_back({v(i), v(i + 1)});
        return g;
    }

    /// Half gap length recovered from the coordinates.
    double half_gap(int n) const { return std::hypot(psi[static_cast<std::size_t>(n - 1)][0], psi[static_cast<std::size_t>(n - 1)][1]); }

    double norm_inf() const {
        double m = 0;
        for (const auto& q : psi) m = std::max({m, std::abs(q[0]), std::abs(q[1])});
        return m;
    }
};

namespace detail {

// eps_n is taken as the bare sign of log|phi_{p+1}(mu_n)| when raw_sign is set;
// otherwise from classify_states (virtual states within tolerance give 0).
inline GapMapVector gap_map(const PeriodicCoefficients& c, bool raw_sign) {
    const int p = c.period();
    const SpectralBands sb = band_edges(c);
    const auto dp = dirichlet_points(c, true);
    GapMapVector g;
    g.psi.resize(static_cast<std::size_t>(p - 1), {0.0, 0.0});
    for (int n = 1; n < p; ++n) {
        if (!sb.gap_open(n)) continue;
        const Interval gap = sb.gap(n);
        const double m = std::clamp(dp[static_cast<std::size_t>(n - 1)].mu, gap.lo, gap.hi);
        const double psi1 = gap.center() - m;
        const double half = 0.5 * gap.length();
        const double mag = std::sqrt(std::abs(half * half - psi1 * psi1));
        const double lphi = dp[static_cast<std::size_t>(n - 1)].log_phi_p1;
        const double phi = std::exp(lphi);
        int eps;
        if (raw_sign) {
            eps = lphi < 0.0 ? 1 : (lphi > 0.0 ? -1 : 0);
        } else {
            eps = epsilon_of(classify_value(phi));
        }
        g.psi[static_cast<std::size_t>(n - 1)] = {psi1, eps * mag};
    }
    return g;
}

// Unknowns of the inverse problem: log a_1..log a_{p-1}, b_1..b_{p-1}; the last
// entries follow from sum log a = 0 and sum b = 0.
inline Eigen::VectorXd to_coordinates(const PeriodicCoefficients& c) {
    const int p = c.period();
    Eigen::VectorXd x(2 * (p - 1));
    for (int i = 0; i + 1 < p; ++i) {
        x(i) = std::log(c.a[static_cast<std::size_t>(i)]);
        x(p - 1 + i) = c.b[static_cast<std::size_t>(i)];
    }
    return x;
}

inline PeriodicCoefficients from_coordinates(const Eigen::VectorXd& x, int p) {
    PeriodicCoefficients c = PeriodicCoefficients::free(p);
    double la = 0, sb = 0;
    for (int i = 0; i + 1 < p; ++i) {
        c.a[static_cast<std::size_t>(i)] = std::exp(x(i));
        c.b[static_cast<std::size_t>(i)] = x(p - 1 + i);
        la += x(i);
        sb += x(p - 1 + i);
    }
    c.a[static_cast<std::size_t>(p - 1)] = std::exp(-la);
    c.b[static_cast<std::size_t>(p - 1)] = -sb;
    return c;
}

}  // namespace detail

inline GapMapVector forward_gap_map(const PeriodicCoefficients& c) {
    c.validate();
    if (c.period() < 2) throw ValidationError("the gap map needs p >= 2");
    return detail::gap_map(c, false);
}

struct InverseOptions {
    int max_newton_iterations = 60;
    int continuation_steps = 10;
    double tolerance = 1e-8;  // on ||psi(v) - target||_inf / (1 + ||target||_inf)
};

struct ContinuationStep {
    double t = 0;                 // homotopy parameter in (0, 1]
    double residual_before = 0;   // ||psi - target_t||_inf at the warm start
    double residual_after = 0;    // after Newton
    int iterations = 0;
};

struct GapMapSolution {
    PeriodicCoefficients coeffs;
    double residual = 0;  // ||psi(coeffs) - target||_inf
    int iterations = 0;
    std::vector<ContinuationStep> steps;
};

namespace detail {

class GapMapNewton {
public:
    GapMapNewton(int p, const InverseOptions& opt) : p_(p), opt_(opt) {}

    Eigen::VectorXd image(const Eigen::VectorXd& x) const {
        return gap_map(from_coordinates(x, p_), true).flat();
    }

    // Residual norm, +inf when the forward map cannot be evaluated.
    double residual(const Eigen::VectorXd& x, const Eigen::VectorXd& target, Eigen::VectorXd* r = nullptr) const {
        try {
            Eigen::VectorXd d = image(x) - target;
            if (r) *r = d;
            const double v = d.lpNorm<Eigen::Infinity>();
            return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
        } catch (const Error&) {
            return std::numeric_limits<double>::infinity();
        }
    }

    Eigen::MatrixXd jacobian(const Eigen::VectorXd& x) const {
        const Eigen::Index n = x.size();
        Eigen::MatrixXd jac(n, n);
        for (Eigen::Index i = 0; i < n; ++i) {
            const double h = 1e-6 * (1.0 + std::abs(x(i)));
            Eigen::VectorXd xp = x, xm = x;
            xp(i) += h;
            xm(i) -= h;
            jac.col(i) = (image(xp) - image(xm)) / (2.0 * h);
        }
        return jac;
    }

    // Damped Newton towards target from x; returns the final residual.
    double solve(Eigen::VectorXd& x, const Eigen::VectorXd& target, int& iterations) const {
        Eigen::VectorXd r;
        double res = residual(x, target, &r);
        const double goal = 1e-3 * opt_.tolerance * (1.0 + target.lpNorm<Eigen::Infinity>());
        iterations = 0;
        for (int it = 0; it < opt_.max_newton_iterations && res > goal; ++it) {
            ++iterations;
            Eigen::VectorXd dx;
            try {
                dx = jacobian(x).fullPivLu().solve(-r);
            } catch (const Error&) {
                break;
            }
            if (!dx.allFinite()) break;
            double alpha = 1.0;
            bool improved = false;
            for (int ls = 0; ls < 40; ++ls, alpha *= 0.5) {
                Eigen::VectorXd xt = x + alpha * dx;
                Eigen::VectorXd rt;
                const double rest = residual(xt, target, &rt);
                if (rest < res) {
                    x = xt;
                    r = rt;
                    res = rest;
                    improved = true;
                    break;
                }
            }
            if (!improved) break;
        }
        return res;
    }

private:
    int p_;
    InverseOptions opt_;
};

}  // namespace detail

/// Coefficients (zero-mean b, unit-product a, shift 0) whose gap map equals target.
///
/// Damped Newton with a central-difference Jacobian. Without an initial guess
/// the target is approached by continuation t * target, t = 1/K, ..., 1 from
/// the free operator; steps that fail are subdivided.
inline GapMapSolution invert_gap_map(const GapMapVector& target, const std::optional<PeriodicCoefficients>& initial_guess = std::nullopt,
                                     const InverseOptions& opt = {}) {
    const int p = target.period();
    if (p < 2) throw ValidationError("the gap map needs p >= 2");
    const Eigen::VectorXd goal = target.flat();
    if (!goal.allFinite()) throw ValidationError("gap map target must be finite");
    const double tol = opt.tolerance * (1.0 + goal.lpNorm<Eigen::Infinity>());

    detail::GapMapNewton newton(p, opt);
    GapMapSolution sol;

    Eigen::VectorXd x;
    Eigen::VectorXd start_image;
    if (initial_guess) {
        initial_guess->validate();
        if (initial_guess->period() != p) throw ValidationError("initial guess has the wrong period");
        PeriodicCoefficients g = *initial_guess;
        g.shift = 0;
        x = detail::to_coordinates(g);
        Eigen::VectorXd trial = x;
        int its = 0;
        const double before = newton.residual(trial, goal);
        const double res = newton.solve(trial, goal, its);
        if (res <= tol) {
            sol.coeffs = detail::from_coordinates(trial, p);
            sol.residual = res;
            sol.iterations = its;
            sol.steps.push_back({1.0, before, res, its});
            return sol;
        }
        start_image = newton.image(x);
    } else {
        x = Eigen::VectorXd::Zero(2 * (p - 1));
        start_image = Eigen::VectorXd::Zero(2 * (p - 1));
    }

    double t = 0.0;
    double dt = 1.0 / std::max(1, opt.continuation_steps);
    double best = std::numeric_limits<double>::infinity();
    while (t < 1.0) {
        const double t_next = std::min(1.0, t + dt);
        const Eigen::VectorXd tgt = (1.0 - t_next) * start_image + t_next * goal;
        const double step_tol = opt.tolerance * (1.0 + tgt.lpNorm<Eigen::Infinity>());
        Eigen::VectorXd trial = x;
        int its = 0;
        const double before = newton.residual(trial, tgt);
        const double res = newton.solve(trial, tgt, its);
        sol.iterations += its;
        best = std::min(best, res);
        if (res <= step_tol) {
            x = trial;
            t = t_next;
            sol.steps.push_back({t, before, res, its});
            if (dt < 1.0 / opt.continuation_steps) dt = std::min(2 * dt, 1.0 / opt.continuation_steps);
        } else {
            dt *= 0.5;
            if (dt < 1e-4) throw SolverError("gap map inversion did not converge", best);
        }
    }
    sol.coeffs = detail::from_coordinates(x, p);
    sol.residual = newton.residual(x, goal);
    if (!(sol.residual <= tol)) throw SolverError("gap map inversion did not reach tolerance", sol.residual);
    return sol;
}

/// Target data for a designed half-line operator.
struct DesignSpec {
    int p = 8;
    std::vector<double> gap_lengths;    // |gamma_n|, n = 1..p-1
    std::vector<double> state_offsets;  // gap center - mu_n
    std::vector<int> sheet_signs;       // +1 eigenvalue, -1 resonance
    int d = 2;                          // dimension; fixes e_1 = 1/(4d)

    double e1() const { return 1.0 / (4.0 * d); }

    /// All gaps gamma, states at gamma (n-1+e_1) above the bottom of the spectrum,
    /// using the nominal band positions (no band width) for the initial offsets.
    static DesignSpec uniform(int p, int d, double gamma, int sheet = +1) {
        DesignSpec s;
        s.p = p;
        s.d = d;
        s.gap_lengths.assign(static_cast<std::size_t>(p - 1), gamma);
        s.state_offsets.assign(static_cast<std::size_t>(p - 1), gamma * (0.5 - s.e1()));
        s.sheet_signs.assign(static_cast<std::size_t>(p - 1), sheet);
        return s;
    }

    void validate() const {
        if (p < 2) throw ValidationError("design needs p >= 2");
        if (d < 1) throw ValidationError("dimension must be positive");
        const auto m = static_cast<std::size_t>(p - 1);
        if (gap_lengths.size() != m || state_offsets.size() != m || sheet_signs.size() != m)
            throw ValidationError("design vectors must have p-1 entries");
        for (std::size_t i = 0; i < m; ++i) {
            if (!(gap_lengths[i] > 0)) throw ValidationError("gap lengths must be positive");
            if (sheet_signs[i] != 1 && sheet_signs[i] != -1 && sheet_signs[i] != 0)
                throw ValidationError("sheet signs must be +1, -1 or 0");
            if (sheet_signs[i] != 0 && !(std::abs(state_offsets[i]) < 0.5 * gap_lengths[i]))
                throw ValidationError("state offsets must lie strictly inside their gaps");
        }
    }

    GapMapVector target() const {
        GapMapVector g;
        for (std::size_t i = 0; i + 1 < static_cast<std::size_t>(p); ++i) {
            const double half = 0.5 * gap_lengths[i];
            const double psi1 = state_offsets[i];
            g.psi.push_back({psi1, sheet_signs[i] * std::sqrt(std::max(0.0, half * half - psi1 * psi1))});
        }
        return g;
    }
};

struct DesignResult {
    PeriodicCoefficients coeffs;      // shift set so that lambda_0^+ = 0
    SpectralBands bands;              // of the shifted operator
    std::vector<GapState> states;
    double residual = 0;              // last gap-map residual
    int rounds = 0;                   // outer fixed-point rounds used
    double max_state_error = 0;       // max_n |mu_n - gamma (n-1+e_1)|
};

/// Inverts the gap map for a general design (no normalization of the bottom edge).
inline GapMapSolution design(const DesignSpec& spec, const std::optional<PeriodicCoefficients>& guess = std::nullopt,
                             const InverseOptions& opt = {}) {
    spec.validate();
    return invert_gap_map(spec.target(), guess, opt);
}

/// Uniform gaps of length gamma with states at gamma (n-1+e_1) after shifting
/// lambda_0^+ to 0. The state offsets are corrected over at most five rounds
/// for the actual band positions lambda_n^- = gamma (n-1) + S_n.
inline DesignResult design_uniform(DesignSpec spec, double gamma, const InverseOptions& opt = {}) {
    if (!(gamma >= 16.0)) throw ParameterError("uniform designs need gamma >= 16");
    if (spec.p < 2) throw ValidationError("design needs p >= 2");
    const int p = spec.p;
    const auto m = static_cast<std::size_t>(p - 1);
    spec.gap_lengths.assign(m, gamma);
    if (spec.sheet_signs.size() != m) spec.sheet_signs.assign(m, 1);
    if (spec.state_offsets.size() != m) spec.state_offsets.assign(m, gamma * (0.5 - spec.e1()));
    const double e1 = spec.e1();

    DesignResult out;
    std::optional<PeriodicCoefficients> guess;
    for (int round = 1; round <= 5; ++round) {
        const GapMapSolution sol = design(spec, guess, opt);
        guess = sol.coeffs;
        out.coeffs = sol.coeffs;
        out.residual = sol.residual;
        out.rounds = round;
        const SpectralBands sb = band_edges(sol.coeffs);
        const auto mu = dirichlet_eigenvalues(sol.coeffs);
        const double base = sb.bottom();
        double worst = 0;
        for (int n = 1; n < p; ++n) {
            const double want = gamma * (n - 1 + e1);
            worst = std::max(worst, std::abs(mu[static_cast<std::size_t>(n - 1)] - base - want));
            // Offset that puts mu_n at the wanted position given the achieved gap center.
            spec.state_offsets[static_cast<std::size_t>(n - 1)] = sb.gap(n).center() - base - want;
        }
        out.max_state_error = worst;
        if (worst <= 1e-9 * gamma) break;
    }
    out.coeffs.shift = -band_edges(out.coeffs).bottom();
    out.bands = band_edges(out.coeffs);
    out.states = classify_states(out.coeffs, out.bands);
    return out;
}

}  // namespace octspec
