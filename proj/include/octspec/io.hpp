#pragma once

#include <fstream>
#include <string>

#include <json.hpp>

#include "octspec/assembler.hpp"
#include "octspec/bands.hpp"
#include "octspec/certify.hpp"
#include "octspec/coefficients.hpp"
#include "octspec/errors.hpp"
#include "octspec/half_solid.hpp"
#include "octspec/intervals.hpp"
#include "octspec/inverse_design.hpp"
#include "octspec/oracle.hpp"
#include "octspec/states.hpp"

namespace octspec {

using json = nlohmann::json;

inline void to_json(json& j, const Interval& I) { j = json::array({I.lo, I.hi}); }

inline void from_json(const json& j, Interval& I) {
    if (!j.is_array() || j.size() != 2) throw ValidationError("interval must be a two-element array");
    I = {j.at(0).get<double>(), j.at(1).get<double>()};
}

/// {"p": int, "a": [...], "b": [...], "shift": float}
inline void to_json(json& j, const PeriodicCoefficients& c) {
    j = json{{"p", c.period()}, {"a", c.a}, {"b", c.b}, {"shift", c.shift}};
}

inline void from_json(const json& j, PeriodicCoefficients& c) {
    if (!j.is_object()) throw ValidationError("coefficient file must hold a JSON object");
    for (const char* key : {"p", "a", "b"})
        if (!j.contains(key)) throw ValidationError(std::string("coefficient file lacks \"") + key + "\"");
    try {
        const int p = j.at("p").get<int>();
        c.a = j.at("a").get<std::vector<double>>();
        c.b = j.at("b").get<std::vector<double>>();
        c.shift = j.value("shift", 0.0);
        if (p < 1 || static_cast<int>(c.a.size()) != p || static_cast<int>(c.b.size()) != p)
            throw ValidationError("\"a\" and \"b\" must both have length p");
    } catch (const json::exception& e) {
        throw ValidationError(std::string("malformed coefficient file: ") + e.what());
    }
    c.validate();
}

inline json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ValidationError(path + ": " + e.what());
    }
}

inline PeriodicCoefficients load_coefficients(const std::string& path) { return read_json(path).get<PeriodicCoefficients>(); }

inline void write_json(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write " + path);
    out << j.dump(2) << '\n';
}

inline void to_json(json& j, const SpectralBands& sb) {
    j = json{{"p", sb.p}, {"edges", sb.edges}, {"bands", sb.bands}, {"gaps", sb.gaps}};
}

inline void to_json(json& j, const GapState& s) {
    j = json{{"n", s.n}, {"mu", s.mu}, {"kind", to_string(s.kind)}, {"epsilon", s.epsilon}, {"phi_p1_abs", s.phi_p1_abs}};
}

inline void to_json(json& j, const Cluster& c) {
    j = json{{"n", c.n}, {"center", c.center()}, {"nominal_center", c.nominal_center}, {"hull", c.hull}, {"intervals", c.intervals}};
}

inline void to_json(json& j, const PointEigenvalue& pe) {
    j = json{{"n", pe.n}, {"value", pe.value}, {"multiplicity", pe.multiplicity}, {"spread", pe.spread}};
}

inline void to_json(json& j, const Isolation& iso) {
    j = json{{"n", iso.n},
             {"interval", iso.interval},
             {"scaled", iso.scaled},
             {"distance", iso.distance},
             {"spectrum_below", iso.spectrum_below},
             {"spectrum_above", iso.spectrum_above}};
}

inline void to_json(json& j, const ClusterReport& r) {
    j = json{{"d", r.d},
             {"gamma", r.gamma},
             {"r", r.r},
             {"clusters0", r.clusters0},
             {"clusters1", r.clusters1},
             {"clusters2", r.clusters2},
             {"point_spectrum", r.point_spectrum},
             {"isolation", r.isolation},
             {"ac", r.ac},
             {"unlabelled_points", r.unlabelled_points}};
    j["window"] = r.window ? json(*r.window) : json(nullptr);
}

inline void to_json(json& j, const IntervalCount& ic) {
    j = json{{"count", ic.count},
             {"labels", ic.labels},
             {"distance", ic.distance},
             {"spectrum_below", ic.spectrum_below},
             {"spectrum_above", ic.spectrum_above}};
}

inline void to_json(json& j, const PerturbationResult& r) {
    j = json{{"before", r.before},
             {"after", r.after},
             {"margin", r.margin},
             {"contour_before", r.contour_before},
             {"contour_after", r.contour_after}};
}

inline void to_json(json& j, const CoverageResult& r) {
    j = json{{"L", r.L}, {"samples", r.samples}, {"covered", r.covered}, {"tolerance", r.tolerance}, {"coverage", r.coverage}};
}

inline void to_json(json& j, const CertifiedDesign& c) {
    j = json{{"domain", to_string(c.domain)},
             {"d", c.d},
             {"interval", c.interval},
             {"N", c.N},
             {"n", c.n},
             {"p", c.p},
             {"gamma", c.gamma},
             {"offset", c.offset},
             {"coefficients", c.coefficients},
             {"isolation_distance", c.isolation_distance},
             {"spectrum_below", c.spectrum_below},
             {"spectrum_above", c.spectrum_above},
             {"assembler_count", c.assembler_count},
             {"oracle_count", c.oracle_count},
             {"box_L", c.box_L},
             {"perturbations", c.perturbations}};
    json taus = json::array();
    for (const auto& t : c.tau) taus.push_back(t ? json(*t) : json(nullptr));
    j["tau"] = taus;
    j["eigenvalue"] = c.eigenvalue ? json(*c.eigenvalue) : json(nullptr);
}

}  // namespace octspec
