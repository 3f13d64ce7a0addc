#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <sstream>
#include <string_view>
#include <vector>

#include "octspec/bands.hpp"
#include "octspec/coefficients.hpp"
#include "octspec/errors.hpp"
#include "octspec/half_solid.hpp"
#include "octspec/intervals.hpp"
#include "octspec/states.hpp"

namespace octspec {

enum class Source { HalfLine, HalfSolid };

inline std::string_view to_string(Source s) { return s == Source::HalfLine ? "half-line" : "half-solid"; }

/// One-dimensional spectrum in units of gamma: bands s_0 < ... < s_{p-1} near
/// the integers and one eigenvalue e_n in each gap (n = 1..p-1).
struct ComponentSpectrum {
    Source source = Source::HalfLine;
    double gamma = 1.0;
    std::vector<Interval> bands;
    std::vector<double> eigenvalues;
    std::vector<Interval> vacuum_bands;      // half-solid only
    std::vector<double> extra_eigenvalues;   // half-solid eigenvalues above the top band

    int period() const { return static_cast<int>(bands.size()); }

    void validate() const {
        if (bands.empty()) throw StructureError("component has no bands");
        for (std::size_t i = 0; i < bands.size(); ++i) {
            if (bands[i].empty()) throw StructureError("component band is empty");
            if (i > 0 && !(bands[i - 1].hi < bands[i].lo)) throw StructureError("component bands must be sorted and disjoint");
        }
        if (eigenvalues.size() + 1 != bands.size()) {
            std::ostringstream os;
            os << "component has " << eigenvalues.size() << " gap eigenvalues for " << bands.size() - 1 << " gaps";
            throw StructureError(os.str());
        }
        for (std::size_t n = 1; n < bands.size(); ++n) {
            const double e = eigenvalues[n - 1];
            if (!(bands[n - 1].hi < e && e < bands[n].lo)) {
                std::ostringstream os;
                os << "eigenvalue " << e << " is not inside gap " << n;
                throw StructureError(os.str());
            }
        }
    }

    /// Normalized spectrum of a half-line operator whose gap states are all eigenvalues.
    static ComponentSpectrum from_half_line(const PeriodicCoefficients& c, double gamma) {
        if (!(gamma > 0)) throw ValidationError("gamma must be positive");
        const SpectralBands sb = band_edges(c);
        ComponentSpectrum out;
        out.source = Source::HalfLine;
        out.gamma = gamma;
        for (const auto& b : sb.spectrum()) out.bands.push_back(b.scaled(1.0 / gamma));
        if (static_cast<int>(out.bands.size()) != sb.p) throw StructureError("all gaps must be open");
        for (const auto& s : classify_states(c, sb)) {
            if (s.kind != StateKind::Eigenvalue) {
                std::ostringstream os;
                os << "gap " << s.n << " holds a " << to_string(s.kind) << ", not an eigenvalue";
                throw StructureError(os.str());
            }
            out.eigenvalues.push_back(s.mu / gamma);
        }
        out.validate();
        return out;
    }

    /// Normalized spectrum of the half-solid operator with vacuum level tau.
    static ComponentSpectrum from_half_solid(const PeriodicCoefficients& c, double tau, double gamma) {
        if (!(gamma > 0)) throw ValidationError("gamma must be positive");
        const SpectralBands sb = band_edges(c);
        const HalfSolidSpectrum hs = find_gap_eigenvalues(c, tau);
        ComponentSpectrum out;
        out.source = Source::HalfSolid;
        out.gamma = gamma;
        for (const auto& b : sb.spectrum()) out.bands.push_back(b.scaled(1.0 / gamma));
        if (static_cast<int>(out.bands.size()) != sb.p) throw StructureError("all gaps must be open");
        for (std::size_t n = 0; n < hs.eigenvalues.size(); ++n) {
            if (!hs.eigenvalues[n]) {
                std::ostringstream os;
                os << "half-solid operator has no eigenvalue in gap " << n + 1;
                throw StructureError(os.str());
            }
            out.eigenvalues.push_back(*hs.eigenvalues[n] / gamma);
        }
        out.vacuum_bands.push_back(Interval{tau - 2.0, tau + 2.0}.scaled(1.0 / gamma));
        for (double e : hs.top_gap_eigenvalues) out.extra_eigenvalues.push_back(e / gamma);
        out.validate();
        return out;
    }
};

/// Labelled union of tuple sums with k eigenvalue factors (k = 0, 1, 2).
struct Cluster {
    int kind = 0;
    int n = 0;
    std::vector<Interval> intervals;
    Interval hull;
    double nominal_center = 0;  // from the ideal band/eigenvalue positions

    double center() const { return hull.center(); }
};

/// Sum of d eigenvalues, K_n^e, with the number of index tuples producing it.
struct PointEigenvalue {
    int n = 0;
    double value = 0;  // mean over the tuples
    double spread = 0;  // max - min over the tuples
    int multiplicity = 0;
};

struct Isolation {
    int n = 0;
    Interval interval;  // I_n, normalized
    Interval scaled;    // gamma * I_n
    double distance = 0;  // dist(gamma I_n, gamma sigma_ac)
    bool spectrum_below = false;
    bool spectrum_above = false;
};

struct ClusterReport {
    int d = 2;
    double gamma = 1;
    double r = 0;
    std::vector<Cluster> clusters0, clusters1, clusters2;
    std::vector<PointEigenvalue> point_spectrum;
    std::vector<Isolation> isolation;
    std::vector<Interval> ac;                // normalized essential spectrum used for distances
    std::vector<double> unlabelled_points;   // sums involving extra half-solid eigenvalues
    std::optional<Interval> window;          // set for mixed domains
};

namespace detail {

// Piece of a component: a band (index i, nominal i) or an eigenvalue
// (index i, nominal i-1+e_1). Extra pieces carry no label.
struct Piece {
    bool eigen = false;
    bool extra = false;
    bool vacuum = false;
    int index = 0;
    Interval span;
};

inline std::vector<Piece> pieces_of(const ComponentSpectrum& c) {
    std::vector<Piece> out;
    for (std::size_t i = 0; i < c.bands.size(); ++i) out.push_back({false, false, false, static_cast<int>(i), c.bands[i]});
    for (std::size_t i = 0; i < c.eigenvalues.size(); ++i)
        out.push_back({true, false, false, static_cast<int>(i + 1), {c.eigenvalues[i], c.eigenvalues[i]}});
    for (const auto& v : c.vacuum_bands) out.push_back({false, true, true, -1, v});
    for (double e : c.extra_eigenvalues) out.push_back({true, true, false, -1, {e, e}});
    return out;
}

// Cluster label for a tuple with k eigenvalue factors and index sum s. In two
// dimensions K^1_n ~ n + e_1; in three dimensions K^1_n ~ n - 1 + e_1.
inline int cluster_label(int d, int k, int s) {
    if (d == 3 && k == 1) return s;
    return s - k;
}

struct Accumulator {
    std::map<std::pair<int, int>, Cluster> clusters;
    std::map<int, std::vector<double>> points;
    std::vector<Interval> ac;
    std::vector<Interval> vacuum;
    std::vector<double> unlabelled_points;
};

inline ClusterReport finish(Accumulator& acc, int d, double gamma) {
    ClusterReport rep;
    rep.d = d;
    rep.gamma = gamma;
    rep.r = 1.0 / (8.0 * d);
    for (auto& [key, cl] : acc.clusters) {
        cl.intervals = merge_intervals(cl.intervals);
        cl.hull = hull(cl.intervals);
        if (cl.kind == 0) rep.clusters0.push_back(cl);
        if (cl.kind == 1) rep.clusters1.push_back(cl);
        if (cl.kind == 2) rep.clusters2.push_back(cl);
    }
    rep.ac = merge_intervals(acc.ac);
    for (auto& [n, vals] : acc.points) {
        PointEigenvalue pe;
        pe.n = n;
        pe.multiplicity = static_cast<int>(vals.size());
        double s = 0;
        for (double v : vals) s += v;
        pe.value = s / static_cast<double>(vals.size());
        const auto [lo, hi] = std::minmax_element(vals.begin(), vals.end());
        pe.spread = *hi - *lo;
        rep.point_spectrum.push_back(pe);
    }
    std::sort(acc.unlabelled_points.begin(), acc.unlabelled_points.end());
    rep.unlabelled_points = acc.unlabelled_points;
    return rep;
}

inline void add_isolation(ClusterReport& rep) {
    std::vector<Interval> scaled_ac;
    for (const auto& a : rep.ac) scaled_ac.push_back(a.scaled(rep.gamma));
    for (const auto& pe : rep.point_spectrum) {
        Isolation iso;
        iso.n = pe.n;
        iso.interval = {pe.value - rep.r, pe.value + rep.r};
        iso.scaled = iso.interval.scaled(rep.gamma);
        iso.distance = distance(iso.scaled, scaled_ac);
        for (const auto& a : scaled_ac) {
            if (a.hi < iso.scaled.lo) iso.spectrum_below = true;
            if (a.lo > iso.scaled.hi) iso.spectrum_above = true;
        }
        rep.isolation.push_back(iso);
    }
}

inline void enumerate(const std::vector<std::vector<Piece>>& comps, int d, double e1, Accumulator& acc) {
    std::vector<std::size_t> idx(comps.size(), 0);
    while (true) {
        int k = 0, s = 0;
        bool extra = false, vac = false;
        Interval sum{0, 0};
        for (std::size_t a = 0; a < comps.size(); ++a) {
            const Piece& pc = comps[a][idx[a]];
            k += pc.eigen ? 1 : 0;
            s += pc.index;
            extra = extra || pc.extra;
            vac = vac || pc.vacuum;
            sum.lo += pc.span.lo;
            sum.hi += pc.span.hi;
        }
        if (vac) {
            acc.vacuum.push_back(sum);
        } else if (extra) {
            if (k == d) {
                acc.unlabelled_points.push_back(sum.lo);
            } else {
                acc.ac.push_back(sum);
            }
        } else if (k == d) {
            acc.points[s - d].push_back(sum.lo);
        } else {
            acc.ac.push_back(sum);
            const int n = cluster_label(d, k, s);
            Cluster& cl = acc.clusters[{k, n}];
            cl.kind = k;
            cl.n = n;
            cl.nominal_center = s - k + k * e1;
            cl.intervals.push_back(sum);
        }
        std::size_t a = 0;
        while (a < comps.size() && ++idx[a] == comps[a].size()) idx[a++] = 0;
        if (a == comps.size()) break;
    }
}

}  // namespace detail

/// Number of ordered d-tuples (i_1..i_d), 1 <= i_j <= p-1, with sum n + d.
inline int composition_count(int n, int d, int p) {
    if (d == 0) return n == 0 ? 1 : 0;
    int count = 0;
    for (int i = 1; i <= p - 1 && i - 1 <= n; ++i) count += composition_count(n - (i - 1), d - 1, p);
    return count;
}

/// Separated-variables spectrum on Z_+^d from d normalized half-line components.
inline ClusterReport assemble(int d, const std::vector<ComponentSpectrum>& components, double gamma) {
    if (d != 2 && d != 3) throw ValidationError("dimension must be 2 or 3");
    if (static_cast<int>(components.size()) != d) throw ValidationError("need one component per axis");
    if (!(gamma > 0)) throw ValidationError("gamma must be positive");
    std::vector<std::vector<detail::Piece>> comps;
    for (const auto& c : components) {
        c.validate();
        comps.push_back(detail::pieces_of(c));
    }
    const double e1 = 1.0 / (4.0 * d);
    detail::Accumulator acc;
    detail::enumerate(comps, d, e1, acc);
    ClusterReport rep = detail::finish(acc, d, gamma);
    detail::add_isolation(rep);
    return rep;
}

enum class MixedDomain { HalfPlane, Plane };  // Z_+ x Z and Z^2

/// Two-dimensional assembly with half-solid factors, restricted to the window
/// [0, 2 top] (top = upper edge of the half-line spectrum, normalized) where the
/// half-solid spectrum mirrors the half-line one.
inline ClusterReport assemble_mixed(MixedDomain domain, const std::vector<ComponentSpectrum>& components, double gamma) {
    if (components.size() != 2) throw ValidationError("mixed domains are two-dimensional");
    int solid = 0;
    for (const auto& c : components) solid += c.source == Source::HalfSolid ? 1 : 0;
    if (domain == MixedDomain::HalfPlane && solid != 1)
        throw ValidationError("Z_+ x Z needs one half-line and one half-solid component");
    if (domain == MixedDomain::Plane && solid != 2) throw ValidationError("Z^2 needs two half-solid components");
    std::vector<std::vector<detail::Piece>> comps;
    double top = 0;
    for (const auto& c : components) {
        c.validate();
        comps.push_back(detail::pieces_of(c));
        top = std::max(top, c.bands.back().hi);
    }
    const Interval window{0.0, 2.0 * top};
    const double e1 = 1.0 / 8.0;
    detail::Accumulator acc;
    detail::enumerate(comps, 2, e1, acc);
    for (const auto& v : acc.vacuum) {
        if (v.lo <= window.hi) {
            std::ostringstream os;
            os << "vacuum band sum reaches " << v.lo * gamma << " inside the window up to " << window.hi * gamma
               << "; increase tau";
            throw ParameterError(os.str());
        }
    }
    ClusterReport rep = detail::finish(acc, 2, gamma);
    rep.window = window;
    auto outside = [&](const Cluster& cl) { return !cl.hull.intersects(window); };
    std::erase_if(rep.clusters0, outside);
    std::erase_if(rep.clusters1, outside);
    std::erase_if(rep.point_spectrum, [&](const PointEigenvalue& pe) { return !window.contains(pe.value); });
    std::erase_if(rep.unlabelled_points, [&](double x) { return !window.contains(x); });
    // Keep essential spectrum slightly beyond the window so isolation near its edge stays honest.
    std::erase_if(rep.ac, [&](const Interval& a) { return a.lo > window.hi + 1.0; });
    detail::add_isolation(rep);
    return rep;
}

struct IntervalCount {
    int count = 0;
    std::vector<int> labels;   // n of each K_n^e counted
    double distance = 0;       // dist(I, gamma sigma_ac)
    bool spectrum_below = false;
    bool spectrum_above = false;
};

/// Eigenvalues (with multiplicity) of the assembled operator in the energy
/// interval I, which must avoid the essential spectrum gamma sigma_ac.
inline IntervalCount eigenvalues_in_interval(const ClusterReport& rep, const Interval& I, double gamma) {
    if (I.empty()) throw ValidationError("interval is empty");
    if (!(gamma > 0)) throw ValidationError("gamma must be positive");
    IntervalCount out;
    out.distance = std::numeric_limits<double>::infinity();
    std::ostringstream overlaps;
    bool overlap = false;
    for (const auto& a : rep.ac) {
        const Interval s = a.scaled(gamma);
        if (s.intersects(I)) {
            overlap = true;
            overlaps << " [" << s.lo << ", " << s.hi << "]";
        }
        out.distance = std::min(out.distance, distance(I, s));
        if (s.hi < I.lo) out.spectrum_below = true;
        if (s.lo > I.hi) out.spectrum_above = true;
    }
    if (overlap) throw OverlapError("interval meets the essential spectrum at" + overlaps.str());
    for (const auto& pe : rep.point_spectrum) {
        if (I.contains(gamma * pe.value)) {
            out.count += pe.multiplicity;
            out.labels.push_back(pe.n);
        }
    }
    for (double x : rep.unlabelled_points)
        if (I.contains(gamma * x)) ++out.count;
    return out;
}

}  // namespace octspec
