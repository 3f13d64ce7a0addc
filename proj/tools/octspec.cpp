#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "octspec/io.hpp"

using namespace octspec;

namespace {

struct Globals {
    std::string out;
    std::string csv;
    bool table = false;
    double tol = 0;
    unsigned seed = 1;
};

class Table {
public:
    explicit Table(std::vector<std::string> head) { rows_.push_back(std::move(head)); }

    template <class... T>
    void row(const T&... cells) {
        std::vector<std::string> r;
        (r.push_back(cell(cells)), ...);
        rows_.push_back(std::move(r));
    }

    void print(std::ostream& os) const {
        std::vector<std::size_t> w(rows_.front().size(), 0);
        for (const auto& r : rows_)
            for (std::size_t i = 0; i < r.size(); ++i) w[i] = std::max(w[i], r[i].size());
        for (const auto& r : rows_) {
            for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "  " : "") << std::setw(static_cast<int>(w[i])) << r[i];
            os << '\n';
        }
    }

    void csv(std::ostream& os) const {
        for (const auto& r : rows_) {
            for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << r[i];
            os << '\n';
        }
    }

private:
    static std::string cell(const std::string& s) { return s; }
    static std::string cell(const char* s) { return s; }
    static std::string cell(std::string_view s) { return std::string(s); }
    static std::string cell(double x) {
        std::ostringstream os;
        os << std::setprecision(12) << x;
        return os.str();
    }
    static std::string cell(int x) { return std::to_string(x); }
    static std::string cell(bool x) { return x ? "yes" : "no"; }

    std::vector<std::vector<std::string>> rows_;
};

std::string text(const Interval& I) {
    std::ostringstream os;
    os << std::setprecision(12) << '[' << I.lo << ", " << I.hi << ']';
    return os.str();
}

void emit(const Globals& g, const json& doc, const Table* table) {
    if (!g.csv.empty() && table) {
        std::ofstream f(g.csv);
        if (!f) throw ValidationError("cannot write " + g.csv);
        table->csv(f);
    }
    if (!g.out.empty()) write_json(g.out, doc);
    if (g.table && table) {
        table->print(std::cout);
    } else if (g.out.empty()) {
        std::cout << doc.dump(2) << '\n';
    }
}

Interval parse_interval(const std::vector<double>& v) {
    if (v.size() != 2) throw ValidationError("interval needs two values a,b");
    if (!(v[0] < v[1])) throw ValidationError("interval needs a < b");
    return {v[0], v[1]};
}

Domain parse_domain(const std::string& s) {
    if (s == "quadrant") return Domain::Quadrant;
    if (s == "octant") return Domain::Octant;
    if (s == "half-plane") return Domain::HalfPlane;
    if (s == "plane") return Domain::Plane;
    throw ValidationError("unknown domain " + s);
}

std::vector<PeriodicCoefficients> load_all(const std::vector<std::string>& files, std::size_t want) {
    if (files.empty()) throw ValidationError("--coeffs is required");
    std::vector<PeriodicCoefficients> out;
    for (const auto& f : files) out.push_back(load_coefficients(f));
    if (out.size() == 1)
        while (out.size() < want) out.push_back(out.front());
    if (out.size() != want) {
        std::ostringstream os;
        os << "expected 1 or " << want << " coefficient files, got " << files.size();
        throw ValidationError(os.str());
    }
    return out;
}

void cmd_bands(const Globals& g, const std::string& file) {
    const auto c = load_coefficients(file);
    const SpectralBands sb = band_edges(c);
    json doc = sb;
    doc["total_band_width"] = sb.total_band_width();
    doc["gap_heights"] = gap_heights(c);
    Table t({"n", "band", "gap", "gap_height"});
    const auto h = gap_heights(c);
    for (int n = 0; n < sb.p; ++n)
        t.row(n, text(sb.bands[static_cast<std::size_t>(n)]), n + 1 < sb.p ? text(sb.gap(n + 1)) : std::string("-"),
              n + 1 < sb.p ? h[static_cast<std::size_t>(n)] : 0.0);
    if (!g.csv.empty()) {
        // Plot-ready Lyapunov curve over the spectrum with a margin on both sides.
        const double pad = 0.1 * (sb.top() - sb.bottom()) + 1.0;
        Table curve({"lambda", "F"});
        for (int k = 0; k <= 2000; ++k) {
            const double x = sb.bottom() - pad + (sb.top() - sb.bottom() + 2 * pad) * k / 2000.0;
            curve.row(x, lyapunov(c, x).F);
        }
        std::ofstream f(g.csv);
        if (!f) throw ValidationError("cannot write " + g.csv);
        curve.csv(f);
        Globals rest = g;
        rest.csv.clear();
        emit(rest, doc, &t);
        return;
    }
    emit(g, doc, &t);
}

void cmd_states(const Globals& g, const std::string& file) {
    const auto c = load_coefficients(file);
    const auto states = classify_states(c);
    Table t({"n", "mu", "kind", "epsilon", "phi_p1_abs"});
    for (const auto& s : states) t.row(s.n, s.mu, to_string(s.kind), s.epsilon, s.phi_p1_abs);
    emit(g, json(states), &t);
}

void cmd_design(const Globals& g, int p, double gamma, int dim, int sheet) {
    InverseOptions opt;
    if (g.tol > 0) opt.tolerance = g.tol;
    const DesignResult r = design_uniform(DesignSpec::uniform(p, dim, gamma, sheet), gamma, opt);
    json doc = r.coeffs;
    json gaps = json::array();
    for (int n = 1; n < p; ++n) gaps.push_back(r.bands.gap(n).length());
    doc["verification"] = {{"achieved_gaps", gaps}, {"achieved_states", r.states}, {"residual", r.residual},
                           {"max_state_error", r.max_state_error}, {"rounds", r.rounds}};
    Table t({"n", "gap", "length", "mu", "kind"});
    for (int n = 1; n < p; ++n) {
        const auto& s = r.states[static_cast<std::size_t>(n - 1)];
        t.row(n, text(r.bands.gap(n)), r.bands.gap(n).length(), s.mu, to_string(s.kind));
    }
    emit(g, doc, &t);
}

void cmd_halfsolid(const Globals& g, const std::string& file, double tau) {
    const auto c = load_coefficients(file);
    const HalfSolidSpectrum hs = find_gap_eigenvalues(c, tau);
    const auto states = classify_states(c);
    json eig = json::array();
    Table t({"n", "kind", "mu", "mu_tau", "c_fit", "c"});
    for (std::size_t i = 0; i < hs.eigenvalues.size(); ++i) {
        const auto& s = states[i];
        json e = {{"n", s.n}, {"kind", to_string(s.kind)}, {"mu", s.mu}};
        if (hs.eigenvalues[i]) {
            const double c_fit = (*hs.eigenvalues[i] - s.mu) * tau;
            const double cc = asymptotic_coefficient(c, s.n);
            e["mu_tau"] = *hs.eigenvalues[i];
            e["c_fit"] = c_fit;
            e["c"] = cc;
            t.row(s.n, to_string(s.kind), s.mu, *hs.eigenvalues[i], c_fit, cc);
        } else {
            e["mu_tau"] = nullptr;
            t.row(s.n, to_string(s.kind), s.mu, std::string("-"), std::string("-"), std::string("-"));
        }
        eig.push_back(e);
    }
    json doc = {{"tau", tau}, {"bands", hs.bands}, {"gaps", hs.gaps}, {"eigenvalues", eig},
                {"top_gap_eigenvalues", hs.top_gap_eigenvalues}};
    emit(g, doc, &t);
}

void cmd_assemble(const Globals& g, int dim, const std::string& dom, const std::vector<std::string>& files, double gamma,
                  double tau, const std::vector<double>& interval) {
    const Domain domain = parse_domain(dom);
    if (dimension(domain) != dim) throw ValidationError("domain " + dom + " is not " + std::to_string(dim) + "-dimensional");
    const auto cs = load_all(files, static_cast<std::size_t>(dim));
    std::vector<ComponentSpectrum> comps;
    for (int a = 0; a < dim; ++a) {
        const bool solid = domain == Domain::Plane || (domain == Domain::HalfPlane && a == 1);
        if (solid && !(tau > 0)) throw ValidationError("--tau is required for half-solid axes");
        const auto& c = cs[static_cast<std::size_t>(a)];
        comps.push_back(solid ? ComponentSpectrum::from_half_solid(c, tau, gamma) : ComponentSpectrum::from_half_line(c, gamma));
    }
    const ClusterReport rep =
        domain == Domain::HalfPlane || domain == Domain::Plane
            ? assemble_mixed(domain == Domain::Plane ? MixedDomain::Plane : MixedDomain::HalfPlane, comps, gamma)
            : assemble(dim, comps, gamma);
    json doc = rep;
    Table t({"n", "K_e", "multiplicity", "isolation", "distance"});
    for (std::size_t i = 0; i < rep.point_spectrum.size(); ++i) {
        const auto& pe = rep.point_spectrum[i];
        t.row(pe.n, pe.value, pe.multiplicity, text(rep.isolation[i].scaled), rep.isolation[i].distance);
    }
    if (!interval.empty()) doc["interval_count"] = eigenvalues_in_interval(rep, parse_interval(interval), gamma);
    emit(g, doc, &t);
}

Model parse_model(const std::string& s) {
    if (s == "half-line") return Model::HalfLine;
    if (s == "half-solid") return Model::HalfSolid;
    if (s == "box") return Model::Box;
    throw ValidationError("unknown model " + s);
}

void cmd_oracle(const Globals& g, const std::string& model, int L, const std::vector<std::string>& files, double tau,
                const std::vector<double>& interval, const std::vector<double>& perturb, int dim, const std::vector<int>& coverage) {
    json doc;
    Table t({"quantity", "value"});
    if (!coverage.empty()) {
        // Four quadrant fillings: 1 file (all equal), 2 (alternating), 4 (one per quadrant) or 8 (x, y per quadrant).
        std::vector<PeriodicCoefficients> cs;
        for (const auto& f : files) cs.push_back(load_coefficients(f));
        std::array<QuadrantModel, 4> q;
        for (int i = 0; i < 4; ++i) {
            const auto idx = static_cast<std::size_t>(i);
            if (cs.size() == 1) q[idx] = {cs[0], cs[0]};
            else if (cs.size() == 2) q[idx] = {cs[idx % 2], cs[idx % 2]};
            else if (cs.size() == 4) q[idx] = {cs[idx], cs[idx]};
            else if (cs.size() == 8) q[idx] = {cs[2 * idx], cs[2 * idx + 1]};
            else throw ValidationError("coverage takes 1, 2, 4 or 8 coefficient files");
        }
        json rows = json::array();
        for (int Lc : coverage) {
            const CoverageResult r = ess_coverage(q, Lc);
            rows.push_back(r);
            t.row("coverage L=" + std::to_string(Lc), r.coverage);
        }
        doc["coverage"] = rows;
        emit(g, doc, &t);
        return;
    }
    const Model m = parse_model(model);
    TruncationSpec spec;
    spec.model = m;
    const std::size_t axes = m == Model::Box ? static_cast<std::size_t>(dim) : 1;
    const auto cs = load_all(files, axes);
    for (std::size_t a = 0; a < axes; ++a) {
        Axis ax;
        ax.kind = m == Model::Box ? (tau > 0 ? Model::HalfSolid : Model::HalfLine) : m;
        ax.coeffs = cs[a];
        ax.L = L;
        ax.tau = tau;
        if (ax.kind == Model::HalfSolid && !(tau > 0)) throw ValidationError("--tau is required for the half-solid model");
        spec.axes.push_back(ax);
    }
    if (L < 4 * cs[0].period()) throw ValidationError("truncation length must be at least 4p");
    const auto ev = truncate_and_diagonalize(spec);
    doc = {{"model", model}, {"L", L}, {"size", ev.size()}};
    t.row("eigenvalues", static_cast<int>(ev.size()));
    if (ev.size() <= 5000) doc["eigenvalues"] = ev;
    if (!interval.empty()) {
        const Interval I = parse_interval(interval);
        doc["interval"] = I;
        doc["count"] = count_in_interval(ev, I);
        t.row("count in " + text(I), count_in_interval(ev, I));
        if (!perturb.empty()) {
            if (perturb.size() != 2) throw ValidationError("--perturb needs eps,seed");
            std::mt19937_64 rng(static_cast<unsigned>(perturb[1]));
            const int p = cs[0].period();
            const auto w = PerturbationSpec::random(perturb[0], p, p, rng);
            const PerturbationResult r = perturb_and_count(spec, w, I);
            doc["perturbation"] = r;
            t.row("count after perturbation", r.after);
            t.row("contour distance after", r.contour_after);
        }
    }
    Table* shown = &t;
    Table list({"k", "eigenvalue"});
    if (!g.csv.empty()) {
        for (std::size_t k = 0; k < ev.size(); ++k) list.row(static_cast<int>(k), ev[k]);
        std::ofstream f(g.csv);
        if (!f) throw ValidationError("cannot write " + g.csv);
        list.csv(f);
        Globals rest = g;
        rest.csv.clear();
        emit(rest, doc, shown);
        return;
    }
    emit(g, doc, shown);
}

void cmd_certify(const Globals& g, const std::vector<double>& interval, int N, const std::string& dom, CertifyOptions opt) {
    opt.seed = g.seed;
    const CertifiedDesign cd = certify(parse_interval(interval), N, parse_domain(dom), opt);
    json doc = cd;
    Table t({"quantity", "value"});
    t.row("domain", to_string(cd.domain));
    t.row("interval", text(cd.interval));
    t.row("N", cd.N);
    t.row("gamma", cd.gamma);
    t.row("offset", cd.offset);
    t.row("eigenvalue", cd.eigenvalue ? *cd.eigenvalue : std::nan(""));
    t.row("isolation distance", cd.isolation_distance);
    t.row("assembler count", cd.assembler_count);
    t.row("oracle count", cd.oracle_count);
    t.row("perturbation trials", static_cast<int>(cd.perturbations.size()));
    emit(g, doc, &t);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Band structure, gap states and designed eigenvalues of periodic Jacobi operators"};
    app.require_subcommand(1);
    app.fallthrough();
    Globals g;
    app.add_option("--out", g.out, "write the JSON document to this path");
    app.add_option("--csv", g.csv, "write plot-ready CSV to this path");
    app.add_flag("--table", g.table, "print an aligned text table instead of JSON");
    app.add_option("--tol", g.tol, "Newton residual tolerance for the inverse gap map");
    app.add_option("--seed", g.seed, "random seed for perturbation trials");

    std::string coeffs;
    std::vector<std::string> coeff_list;
    double tau = 0, gamma = 200;
    int p = 8, dim = 2, sheet = 1, L = 40, N = 1;
    std::string domain = "quadrant", model = "half-line";
    std::vector<double> interval, perturb;
    std::vector<int> coverage;
    CertifyOptions copt;

    auto* bands = app.add_subcommand("bands", "band edges, bands and gaps");
    bands->add_option("--coeffs", coeffs, "coefficient file")->required();
    auto* states = app.add_subcommand("states", "Dirichlet eigenvalues and their classification");
    states->add_option("--coeffs", coeffs, "coefficient file")->required();
    auto* design = app.add_subcommand("design", "uniform design with gaps of length gamma");
    design->add_option("--p", p, "period")->capture_default_str();
    design->add_option("--gamma", gamma, "gap length")->capture_default_str();
    design->add_option("--dim", dim, "target dimension (sets e_1 = 1/(4 dim))")->capture_default_str();
    design->add_option("--sheet", sheet, "+1 for eigenvalues, -1 for resonances")->capture_default_str();
    auto* halfsolid = app.add_subcommand("halfsolid", "gap eigenvalues of the half-solid operator");
    halfsolid->add_option("--coeffs", coeffs, "coefficient file")->required();
    halfsolid->add_option("--tau", tau, "vacuum level")->required();
    auto* assemble_cmd = app.add_subcommand("assemble", "separated-variables clusters and point spectrum");
    assemble_cmd->add_option("--dim", dim, "2 or 3")->capture_default_str();
    assemble_cmd->add_option("--domain", domain, "quadrant, octant, half-plane or plane")->capture_default_str();
    assemble_cmd->add_option("--coeffs", coeff_list, "coefficient files, one per axis or one for all")->required();
    assemble_cmd->add_option("--gamma", gamma, "normalization")->capture_default_str();
    assemble_cmd->add_option("--tau", tau, "vacuum level for half-solid axes");
    assemble_cmd->add_option("--interval", interval, "count eigenvalues in a,b")->delimiter(',');
    auto* oracle = app.add_subcommand("oracle", "finite truncation checks");
    oracle->add_option("--model", model, "half-line, half-solid or box")->capture_default_str();
    oracle->add_option("--L", L, "truncation length per axis")->capture_default_str();
    oracle->add_option("--dim", dim, "box dimension")->capture_default_str();
    oracle->add_option("--coeffs", coeff_list, "coefficient files")->required();
    oracle->add_option("--tau", tau, "vacuum level (half-solid axes)");
    oracle->add_option("--interval", interval, "count eigenvalues in a,b")->delimiter(',');
    oracle->add_option("--perturb", perturb, "eps,seed for a random perturbation of a quadrant box")->delimiter(',');
    oracle->add_option("--coverage", coverage, "box sides for the essential-spectrum coverage statistic")->delimiter(',');
    auto* certify_cmd = app.add_subcommand("certify", "operator with N eigenvalues in an interval");
    certify_cmd->add_option("--interval", interval, "a,b")->delimiter(',')->required();
    certify_cmd->add_option("--N", N, "number of eigenvalues")->capture_default_str();
    certify_cmd->add_option("--domain", domain, "quadrant, octant, half-plane or plane")->capture_default_str();
    certify_cmd->add_option("--p", copt.p, "minimal period")->capture_default_str();
    certify_cmd->add_option("--tau", copt.tau, "vacuum level for half-solid axes (0 picks one)");
    certify_cmd->add_option("--L", copt.L, "oracle box side (0 picks one)");
    certify_cmd->add_option("--perturbations", copt.perturbations, "random perturbation trials")->capture_default_str();
    certify_cmd->add_option("--epsilon", copt.epsilon, "perturbation strength")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*bands) cmd_bands(g, coeffs);
        if (*states) cmd_states(g, coeffs);
        if (*design) cmd_design(g, p, gamma, dim, sheet);
        if (*halfsolid) cmd_halfsolid(g, coeffs, tau);
        if (*assemble_cmd) cmd_assemble(g, dim, domain, coeff_list, gamma, tau, interval);
        if (*oracle) cmd_oracle(g, model, L, coeff_list, tau, interval, perturb, dim, coverage);
        if (*certify_cmd) cmd_certify(g, interval, N, domain, copt);
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
