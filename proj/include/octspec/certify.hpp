#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>
#include <sstream>
#include <string_view>
#include <vector>

#include "octspec/assembler.hpp"
#include "octspec/errors.hpp"
#include "octspec/intervals.hpp"
#include "octspec/inverse_design.hpp"
#include "octspec/oracle.hpp"

namespace octspec {

enum class Domain { Quadrant, Octant, HalfPlane, Plane };  // Z_+^2, Z_+^3, Z_+ x Z, Z^2

inline std::string_view to_string(Domain d) {
    switch (d) {
        case Domain::Quadrant: return "quadrant";
        case Domain::Octant: return "octant";
        case Domain::HalfPlane: return "half-plane";
        case Domain::Plane: return "plane";
    }
    return "?";
}

inline int dimension(Domain d) { return d == Domain::Octant ? 3 : 2; }

struct CertifyOptions {
    int p = 8;              // raised to n + 2 when needed
    int L = 0;              // box side for the oracle; 0 picks p * max(ceil(40 / p), 5) - 1
    double tau = 0;         // vacuum level for half-solid axes; 0 picks 3 * top
    int perturbations = 20;  // random trials on the quadrant
    double epsilon = 0.01;
    unsigned seed = 1;
};

struct CertifiedDesign {
    Domain domain = Domain::Quadrant;
    int d = 2;
    Interval interval;
    int N = 0;
    int n = -1;                         // label of K_n^e, -1 when N = 0
    int p = 0;
    double gamma = 0;
    double offset = 0;                  // energy shift applied to the assembled operator
    std::vector<PeriodicCoefficients> coefficients;  // per axis, shift included
    std::vector<std::optional<double>> tau;          // per axis, set for half-solid axes
    std::optional<double> eigenvalue;   // gamma K_n^e + offset
    double isolation_distance = 0;      // dist(I, essential spectrum)
    bool spectrum_below = false;
    bool spectrum_above = false;
    int assembler_count = 0;
    int oracle_count = 0;
    int box_L = 0;
    std::vector<PerturbationResult> perturbations;
    ClusterReport report;               // unshifted frame: energies there are E - offset
};

namespace detail {

inline int label_for_multiplicity(int N, int d) {
    if (d == 2) return N - 1;
    for (int n = 0;; ++n) {
        const int m = (n + 1) * (n + 2) / 2;
        if (m == N) return n;
        if (m > N) break;
    }
    std::ostringstream os;
    os << "no three-dimensional eigenvalue has multiplicity " << N << " (possible: 1, 3, 6, 10, ...)";
    throw ParameterError(os.str());
}

inline Axis oracle_axis(const PeriodicCoefficients& c, std::optional<double> tau, int L) {
    Axis ax;
    ax.kind = tau ? Model::HalfSolid : Model::HalfLine;
    ax.coeffs = c;
    ax.L = L;
    ax.tau = tau.value_or(0.0);
    return ax;
}

}  // namespace detail

/// Designs a separable operator on the domain with exactly N eigenvalues
/// (counted with multiplicity) in I and no other spectrum there, then checks
/// the count against truncated boxes and, on the quadrant, random perturbations.
inline CertifiedDesign certify(const Interval& I, int N, Domain domain, const CertifyOptions& opt = {}) {
    if (!std::isfinite(I.lo) || !std::isfinite(I.hi) || I.empty() || !(I.length() > 0))
        throw ValidationError("interval must be bounded with positive length");
    if (N < 0) throw ValidationError("N must be non-negative");
    if (!(opt.epsilon >= 0)) throw ValidationError("epsilon must be non-negative");

    CertifiedDesign out;
    out.domain = domain;
    out.d = dimension(domain);
    out.interval = I;
    out.N = N;
    const int d = out.d;
    const double r = 1.0 / (8.0 * d);
    if (N >= 1) {
        out.n = detail::label_for_multiplicity(N, d);
        // The isolation distance of gamma I_n is at most gamma r = |I| / 2.
        if (I.length() < 6.0) {
            std::ostringstream os;
            os << "interval length " << I.length() << " is below 6, the least that keeps distance 3 from the essential spectrum";
            throw InfeasibleError(os.str(), 6.0);
        }
    }
    out.p = std::max(opt.p, out.n + 2);
    out.gamma = I.length() / (2.0 * r);
    if (out.gamma < 16.0) {
        std::ostringstream os;
        os << "interval length " << I.length() << " needs gamma = " << out.gamma << " < 16";
        throw InfeasibleError(os.str(), 32.0 * r);
    }
    const double gamma = out.gamma;

    const DesignResult dr = design_uniform(DesignSpec::uniform(out.p, d, gamma, +1), gamma);
    const PeriodicCoefficients& c = dr.coeffs;
    const bool mixed = domain == Domain::HalfPlane || domain == Domain::Plane;
    const double tau = opt.tau > 0 ? opt.tau : 3.0 * dr.bands.top();

    std::vector<ComponentSpectrum> comps;
    std::vector<std::optional<double>> taus;
    for (int a = 0; a < d; ++a) {
        const bool solid = (domain == Domain::Plane) || (domain == Domain::HalfPlane && a == 1);
        comps.push_back(solid ? ComponentSpectrum::from_half_solid(c, tau, gamma) : ComponentSpectrum::from_half_line(c, gamma));
        taus.push_back(solid ? std::optional<double>(tau) : std::nullopt);
    }
    out.report = mixed ? assemble_mixed(domain == Domain::Plane ? MixedDomain::Plane : MixedDomain::HalfPlane, comps, gamma)
                       : assemble(d, comps, gamma);
    const ClusterReport& rep = out.report;

    double centre = 0;
    if (N >= 1) {
        const auto it = std::find_if(rep.point_spectrum.begin(), rep.point_spectrum.end(),
                                     [&](const PointEigenvalue& pe) { return pe.n == out.n; });
        if (it == rep.point_spectrum.end()) throw StructureError("designed operator lacks the requested eigenvalue");
        if (it->multiplicity != N) {
            std::ostringstream os;
            os << "K_" << out.n << "^e has multiplicity " << it->multiplicity << ", expected " << N;
            throw StructureError(os.str());
        }
        centre = gamma * it->value;
    } else {
        // Midpoint of the gap between K_0^e and the essential spectrum above it.
        const auto it = std::find_if(rep.point_spectrum.begin(), rep.point_spectrum.end(),
                                     [](const PointEigenvalue& pe) { return pe.n == 0; });
        if (it == rep.point_spectrum.end()) throw StructureError("designed operator lacks K_0^e");
        double above = std::numeric_limits<double>::infinity();
        for (const auto& a : rep.ac)
            if (a.lo > it->value) above = std::min(above, a.lo);
        if (!std::isfinite(above)) throw StructureError("no essential spectrum above K_0^e");
        centre = 0.5 * gamma * (it->value + above);
    }
    out.offset = I.center() - centre;

    const Interval local = I.shifted(-out.offset);
    IntervalCount ic;
    try {
        ic = eigenvalues_in_interval(rep, local, gamma);
    } catch (const OverlapError& e) {
        throw InfeasibleError(std::string("interval reaches the essential spectrum:") + e.what(), 2.0 * I.length());
    }
    out.assembler_count = ic.count;
    out.isolation_distance = ic.distance;
    out.spectrum_below = ic.spectrum_below;
    out.spectrum_above = ic.spectrum_above;
    if (ic.distance < 3.0) {
        std::ostringstream os;
        os << "distance " << ic.distance << " to the essential spectrum is below 3";
        throw InfeasibleError(os.str(), I.length() * 3.0 / std::max(ic.distance, 1e-300));
    }
    if (ic.count != N) {
        std::ostringstream os;
        os << "assembled operator has " << ic.count << " eigenvalues in the interval, expected " << N;
        throw NumericalError(os.str());
    }
    if (!ic.spectrum_below || !ic.spectrum_above) throw StructureError("essential spectrum missing on one side of the interval");
    if (N >= 1) out.eigenvalue = centre + out.offset;

    for (int a = 0; a < d; ++a) {
        PeriodicCoefficients ca = c;
        ca.shift += out.offset / d;
        out.coefficients.push_back(ca);
        out.tau.push_back(taus[static_cast<std::size_t>(a)] ? std::optional<double>(*taus[static_cast<std::size_t>(a)] + out.offset / d)
                                                            : std::nullopt);
    }

    const int p = out.p;
    out.box_L = opt.L > 0 ? opt.L : p * std::max((40 + p - 1) / p, 5) - 1;
    TruncationSpec box;
    box.model = Model::Box;
    for (int a = 0; a < d; ++a)
        box.axes.push_back(detail::oracle_axis(out.coefficients[static_cast<std::size_t>(a)], out.tau[static_cast<std::size_t>(a)], out.box_L));
    out.oracle_count = count_in_interval(truncate_and_diagonalize(box), I);
    if (out.oracle_count != N) {
        std::ostringstream os;
        os << "truncated box of side " << out.box_L << " has " << out.oracle_count << " eigenvalues in the interval, expected " << N;
        throw NumericalError(os.str());
    }

    if (domain == Domain::Quadrant) {
        std::mt19937_64 rng(opt.seed);
        for (int k = 0; k < opt.perturbations; ++k) {
            const auto w = PerturbationSpec::random(opt.epsilon, p, p, rng);
            const PerturbationResult pr = perturb_and_count(box, w, I);
            if (pr.after != N) {
                std::ostringstream os;
                os << "perturbation " << k << " changed the count to " << pr.after;
                throw NumericalError(os.str());
            }
            out.perturbations.push_back(pr);
        }
    }
    return out;
}

}  // namespace octspec
