#pragma once

#include <lapacke.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include "octspec/bands.hpp"
#include "octspec/coefficients.hpp"
#include "octspec/errors.hpp"
#include "octspec/intervals.hpp"

namespace octspec {

// Brute-force finite truncations with Dirichlet boundary conditions.

enum class Model { HalfLine, HalfSolid, Box };

/// One coordinate axis: Z_+ truncated to sites 1..L, or the half-solid line
/// (vacuum level tau on x <= 0) truncated to -L..L.
struct Axis {
    Model kind = Model::HalfLine;
    PeriodicCoefficients coeffs;
    int L = 0;
    double tau = 0;

    int sites() const { return kind == Model::HalfSolid ? 2 * L + 1 : L; }
    int first_site() const { return kind == Model::HalfSolid ? -L : 1; }
};

struct TruncationSpec {
    Model model = Model::HalfLine;
    std::vector<Axis> axes;  // one axis for 1D models, one per dimension for boxes
};

struct Tridiagonal {
    std::vector<double> diag;
    std::vector<double> off;
};

inline constexpr long kMaxTridiagonal = 20000;
inline constexpr long kMaxBoxEigenvalues = 2000000;
inline constexpr long kMaxBanded = 100000;

inline Tridiagonal axis_matrix(const Axis& ax) {
    ax.coeffs.validate();
    if (ax.L < 1) throw ValidationError("truncation length must be positive");
    if (ax.sites() > kMaxTridiagonal) throw SizeError("truncation too long for the dense tridiagonal path");
    Tridiagonal t;
    const int x0 = ax.first_site();
    const int n = ax.sites();
    for (int i = 0; i < n; ++i) {
        const long x = x0 + i;
        // Half-solid convention: a_x = 1, b_x = tau for x <= 0.
        t.diag.push_back(x <= 0 ? ax.tau : ax.coeffs.site(x));
        if (i + 1 < n) t.off.push_back(x <= 0 ? 1.0 : ax.coeffs.hop(x));
    }
    return t;
}

inline std::vector<double> tridiagonal_eigenvalues(Tridiagonal t) {
    const auto n = static_cast<lapack_int>(t.diag.size());
    if (n == 0) return {};
    if (t.off.empty()) t.off.push_back(0.0);
    const lapack_int info = LAPACKE_dsterf(n, t.diag.data(), t.off.data());
    if (info != 0) throw NumericalError("tridiagonal eigenvalue solver failed");
    return t.diag;
}

/// Eigenvector of the tridiagonal matrix for an (accurate) eigenvalue, by two
/// steps of inverse iteration.
inline std::vector<double> inverse_iteration(const Tridiagonal& t, double lambda) {
    const auto n = static_cast<lapack_int>(t.diag.size());
    double scale = 1.0;
    for (double d : t.diag) scale = std::max(scale, std::abs(d));
    const double shift = lambda + 1e-13 * scale;
    std::vector<double> v(static_cast<std::size_t>(n), 1.0);
    for (int step = 0; step < 2; ++step) {
        std::vector<double> d(t.diag), dl(t.off), du(t.off);
        for (double& x : d) x -= shift;
        if (n > 1) {
            const lapack_int info = LAPACKE_dgtsv(LAPACK_COL_MAJOR, n, 1, dl.data(), d.data(), du.data(), v.data(), n);
            if (info < 0) throw NumericalError("inverse iteration failed");
        } else {
            v[0] = 1.0;
        }
        double norm = 0;
        for (double x : v) norm += x * x;
        norm = std::sqrt(norm);
        if (!(norm > 0) || !std::isfinite(norm)) throw NumericalError("inverse iteration produced no vector");
        for (double& x : v) x /= norm;
    }
    return v;
}

/// Sorted eigenvalues of the truncated operator. Boxes are separable, so their
/// spectrum is the set of tuple sums of the axis spectra.
inline std::vector<double> truncate_and_diagonalize(const TruncationSpec& spec) {
    if (spec.axes.empty()) throw ValidationError("truncation needs at least one axis");
    if (spec.model != Model::Box) {
        if (spec.axes.size() != 1) throw ValidationError("one-dimensional models take exactly one axis");
        if (spec.axes[0].kind != spec.model) throw ValidationError("axis kind does not match the model");
        auto ev = tridiagonal_eigenvalues(axis_matrix(spec.axes[0]));
        std::sort(ev.begin(), ev.end());
        return ev;
    }
    long total = 1;
    for (const auto& ax : spec.axes) {
        if (ax.kind == Model::Box) throw ValidationError("box axes must be one-dimensional");
        total *= ax.sites();
        if (total > kMaxBoxEigenvalues) throw SizeError("box has too many sites");
    }
    std::vector<double> sums{0.0};
    for (const auto& ax : spec.axes) {
        const auto ev = tridiagonal_eigenvalues(axis_matrix(ax));
        std::vector<double> next;
        next.reserve(sums.size() * ev.size());
        for (double s : sums)
            for (double e : ev) next.push_back(s + e);
        sums = std::move(next);
    }
    std::sort(sums.begin(), sums.end());
    return sums;
}

/// Symmetric banded matrix in LAPACK upper storage: ab[(kd + i - j) + j * (kd + 1)] = A(i, j), i <= j.
struct BandedMatrix {
    int n = 0;
    int kd = 0;
    std::vector<double> ab;

    BandedMatrix(int n_, int kd_) : n(n_), kd(kd_) {
        if (static_cast<long>(n) > kMaxBanded || static_cast<long>(n) * (kd + 1) > 20000000L)
            throw SizeError("matrix too large for the banded eigensolver");
        ab.assign(static_cast<std::size_t>(n) * static_cast<std::size_t>(kd + 1), 0.0);
    }

    double& at(int i, int j) {
        if (i > j) std::swap(i, j);
        return ab[static_cast<std::size_t>(kd + i - j) + static_cast<std::size_t>(j) * static_cast<std::size_t>(kd + 1)];
    }

    std::vector<double> eigenvalues() const {
        std::vector<double> work(ab);
        std::vector<double> w(static_cast<std::size_t>(n));
        double z = 0;
        const lapack_int info = LAPACKE_dsbev(LAPACK_COL_MAJOR, 'N', 'U', n, kd, work.data(), kd + 1, w.data(), &z, 1);
        if (info != 0) throw NumericalError("banded eigenvalue solver failed");
        return w;
    }
};

/// The separable two-dimensional box assembled as an explicit matrix (x outer, y inner).
inline BandedMatrix box_matrix(const Axis& ax, const Axis& ay) {
    const Tridiagonal tx = axis_matrix(ax), ty = axis_matrix(ay);
    const int nx = ax.sites(), ny = ay.sites();
    BandedMatrix m(nx * ny, ny);
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j) {
            const int k = i * ny + j;
            m.at(k, k) = tx.diag[static_cast<std::size_t>(i)] + ty.diag[static_cast<std::size_t>(j)];
            if (j + 1 < ny) m.at(k, k + 1) = ty.off[static_cast<std::size_t>(j)];
            if (i + 1 < nx) m.at(k, k + ny) = tx.off[static_cast<std::size_t>(i)];
        }
    return m;
}

/// Eigenvalues in I, counting eigenvalues closer than 1e-7 as one numerical
/// cluster that is counted in full when any member lies in I.
inline int count_in_interval(std::vector<double> eigs, const Interval& I) {
    if (I.empty()) return 0;
    std::sort(eigs.begin(), eigs.end());
    int count = 0;
    std::size_t k = 0;
    while (k < eigs.size()) {
        std::size_t end = k + 1;
        while (end < eigs.size() && eigs[end] - eigs[end - 1] <= 1e-7) ++end;
        bool inside = false;
        for (std::size_t i = k; i < end; ++i) inside = inside || I.contains(eigs[i]);
        if (inside) count += static_cast<int>(end - k);
        k = end;
    }
    return count;
}

/// Eigenvalues of the truncated half-solid operator inside the open gaps of
/// J_+, keeping only states localized near the interface (|x| <= L/2); the
/// far Dirichlet end can bind states of its own. Index n-1 holds gap n.
inline std::vector<std::vector<double>> half_solid_truncation_gap_eigenvalues(const PeriodicCoefficients& c, double tau, int L) {
    const Axis ax{Model::HalfSolid, c, L, tau};
    const Tridiagonal t = axis_matrix(ax);
    const auto ev = tridiagonal_eigenvalues(t);
    const SpectralBands sb = band_edges(c);
    std::vector<std::vector<double>> out(static_cast<std::size_t>(std::max(sb.p - 1, 0)));
    for (double e : ev) {
        const int n = sb.gap_containing(e);
        if (n == 0) continue;
        const auto v = inverse_iteration(t, e);
        double near = 0;
        for (int i = 0; i < ax.sites(); ++i)
            if (std::abs(ax.first_site() + i) <= L / 2) near += v[static_cast<std::size_t>(i)] * v[static_cast<std::size_t>(i)];
        if (near >= 0.5) out[static_cast<std::size_t>(n - 1)].push_back(e);
    }
    return out;
}

/// epsilon W with W = sum_i (a^i U_i + U_{-i} a^i) + V on the quadrant, where
/// a^1, a^2, V are periodic with period (qx, qy) and sup norms at most 1, so ||W|| <= 5.
struct PerturbationSpec {
    double epsilon = 0;
    int qx = 1, qy = 1;
    std::vector<double> a1, a2, v;  // row-major qx x qy

    double at(const std::vector<double>& f, int x, int y) const {
        return f[static_cast<std::size_t>(((x % qx) + qx) % qx * qy + ((y % qy) + qy) % qy)];
    }

    void validate() const {
        if (!(epsilon >= 0)) throw ValidationError("epsilon must be non-negative");
        if (qx < 1 || qy < 1) throw ValidationError("perturbation periods must be positive");
        const auto m = static_cast<std::size_t>(qx * qy);
        if (a1.size() != m || a2.size() != m || v.size() != m) throw ValidationError("perturbation arrays have the wrong size");
        for (const auto* f : {&a1, &a2, &v})
            for (double x : *f)
                if (!(std::abs(x) <= 1.0)) throw ValidationError("perturbation components must have sup norm <= 1");
    }

    /// Operator-norm bound 2 ||a^1|| + 2 ||a^2|| + ||V||.
    double norm_bound() const {
        auto sup = [](const std::vector<double>& f) {
            double m = 0;
            for (double x : f) m = std::max(m, std::abs(x));
            return m;
        };
        return 2 * sup(a1) + 2 * sup(a2) + sup(v);
    }

    template <class Rng>
    static PerturbationSpec random(double epsilon, int qx, int qy, Rng& rng) {
        std::uniform_real_distribution<double> pos(0.0, 1.0), sym(-1.0, 1.0);
        PerturbationSpec w;
        w.epsilon = epsilon;
        w.qx = qx;
        w.qy = qy;
        for (int i = 0; i < qx * qy; ++i) {
            w.a1.push_back(pos(rng));
            w.a2.push_back(pos(rng));
            w.v.push_back(sym(rng));
        }
        return w;
    }
};

struct PerturbationResult {
    int before = 0;
    int after = 0;
    double margin = 0;            // distance from I to the nearest unperturbed eigenvalue outside it
    double contour_before = 0;    // dist(sigma(H_0), circle |z - E| = 2), E the centre of I
    double contour_after = 0;     // same for H_eps
};

/// Counts eigenvalues of the truncated quadrant box in I before and after adding epsilon W.
inline PerturbationResult perturb_and_count(const TruncationSpec& spec, const PerturbationSpec& pert, const Interval& I) {
    pert.validate();
    if (pert.epsilon > 0.02) throw ParameterError("perturbation strength must be at most 0.02");
    if (spec.model != Model::Box || spec.axes.size() != 2) throw ValidationError("perturbations act on two-dimensional boxes");
    for (const auto& ax : spec.axes)
        if (ax.kind != Model::HalfLine) throw ValidationError("perturbed boxes live on the quadrant Z_+^2");
    const Axis& ax = spec.axes[0];
    const Axis& ay = spec.axes[1];
    BandedMatrix h0 = box_matrix(ax, ay);
    const std::vector<double> e0 = truncate_and_diagonalize(spec);

    PerturbationResult r;
    r.margin = std::numeric_limits<double>::infinity();
    for (double e : e0)
        if (!I.contains(e)) r.margin = std::min(r.margin, distance(e, I));
    if (r.margin < 1.0) {
        std::ostringstream os;
        os << "interval margin " << r.margin << " is below 1";
        throw ParameterError(os.str());
    }
    BandedMatrix h = h0;
    const int nx = ax.sites(), ny = ay.sites();
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j) {
            const int k = i * ny + j;
            const int x = i + 1, y = j + 1;
            h.at(k, k) += pert.epsilon * pert.at(pert.v, x - 1, y - 1);
            if (i + 1 < nx) h.at(k, k + ny) += pert.epsilon * pert.at(pert.a1, x - 1, y - 1);
            if (j + 1 < ny) h.at(k, k + 1) += pert.epsilon * pert.at(pert.a2, x - 1, y - 1);
        }
    const std::vector<double> e1 = h.eigenvalues();
    r.before = count_in_interval(e0, I);
    r.after = count_in_interval(e1, I);
    const double E = I.center();
    auto contour = [&](const std::vector<double>& ev) {
        double m = std::numeric_limits<double>::infinity();
        for (double e : ev) m = std::min(m, std::abs(std::abs(e - E) - 2.0));
        return m;
    };
    r.contour_before = contour(e0);
    r.contour_after = contour(e1);
    return r;
}

/// Coefficients of the periodic model in one quadrant (x axis, y axis).
struct QuadrantModel {
    PeriodicCoefficients x;
    PeriodicCoefficients y;
};

struct CoverageResult {
    int L = 0;
    int samples = 0;
    int covered = 0;
    double tolerance = 0.05;
    double coverage = 0;
};

/// Quadrant index of a site: 0 (x>0, y>0), 1 (x<=0, y>0), 2 (x<=0, y<=0), 3 (x>0, y<=0).
inline int quadrant_of(long x, long y) {
    if (y > 0) return x > 0 ? 0 : 1;
    return x > 0 ? 3 : 2;
}

/// Eigenvalues of the quadrant-assembled operator on the box [-L/2+1, L/2]^2.
/// Each bond takes its hopping from the quadrant of its lower-left site.
inline std::vector<double> quadrant_box_eigenvalues(const std::array<QuadrantModel, 4>& q, int L) {
    for (const auto& m : q) {
        m.x.validate();
        m.y.validate();
    }
    if (L < 2) throw ValidationError("box length must be at least 2");
    const int lo = -L / 2 + 1;
    BandedMatrix h(L * L, L);
    for (int i = 0; i < L; ++i)
        for (int j = 0; j < L; ++j) {
            const long x = lo + i, y = lo + j;
            const QuadrantModel& m = q[static_cast<std::size_t>(quadrant_of(x, y))];
            const int k = i * L + j;
            h.at(k, k) = m.x.site(x) + m.y.site(y);
            if (i + 1 < L) h.at(k, k + L) = m.x.hop(x);
            if (j + 1 < L) h.at(k, k + 1) = m.y.hop(y);
        }
    return h.eigenvalues();
}

/// Fraction of sample points of the union of the quadrant spectra that lie
/// within `tolerance` of an eigenvalue of the truncated operator. Points within
/// 3/L of a band edge are not sampled.
inline CoverageResult ess_coverage(const std::array<QuadrantModel, 4>& q, int L, int samples_per_quadrant = 200,
                                   double tolerance = 0.05) {
    auto ev = quadrant_box_eigenvalues(q, L);
    std::sort(ev.begin(), ev.end());
    CoverageResult r;
    r.L = L;
    r.tolerance = tolerance;
    const double edge = 3.0 / L;
    for (const auto& m : q) {
        const auto sx = band_edges(m.x).spectrum();
        const auto sy = band_edges(m.y).spectrum();
        std::vector<Interval> pieces;
        for (const auto& s : minkowski_sum(sx, sy))
            if (s.length() > 2 * edge) pieces.push_back({s.lo + edge, s.hi - edge});
        double total = 0;
        for (const auto& s : pieces) total += s.length();
        if (total <= 0) continue;
        for (int k = 0; k < samples_per_quadrant; ++k) {
            double arc = total * (k + 0.5) / samples_per_quadrant;
            double point = pieces.back().hi;
            for (const auto& s : pieces) {
                if (arc <= s.length()) {
                    point = s.lo + arc;
                    break;
                }
                arc -= s.length();
            }
            ++r.samples;
            const auto it = std::lower_bound(ev.begin(), ev.end(), point);
            double best = std::numeric_limits<double>::infinity();
            if (it != ev.end()) best = *it - point;
            if (it != ev.begin()) best = std::min(best, point - *std::prev(it));
            if (best <= tolerance) ++r.covered;
        }
    }
    r.coverage = r.samples > 0 ? static_cast<double>(r.covered) / r.samples : 1.0;
    return r;
}

}  // namespace octspec
