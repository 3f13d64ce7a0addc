#include <gtest/gtest.h>

#include <cmath>

#include "designs.hpp"
#include "octspec/assembler.hpp"
#include "oracles.hpp"

using namespace octspec;

namespace {

constexpr double kGamma = 200.0;

ClusterReport quadrant_report() {
    const auto& c = fixtures::design_d2().coeffs;
    const auto comp = ComponentSpectrum::from_half_line(c, kGamma);
    return assemble(2, {comp, comp}, kGamma);
}

const PointEigenvalue& point(const ClusterReport& rep, int n) {
    for (const auto& pe : rep.point_spectrum)
        if (pe.n == n) return pe;
    throw std::runtime_error("missing point");
}

}  // namespace

TEST(Minkowski, Examples) {
    const std::vector<Interval> a{{0, 1}}, b{{0, 1}};
    EXPECT_EQ(minkowski_sum(a, b), (std::vector<Interval>{{0, 2}}));
    const std::vector<Interval> c{{0, 1}, {5, 6}}, d{{0, 0.5}};
    EXPECT_EQ(minkowski_sum(c, d), (std::vector<Interval>{{0, 1.5}, {5, 6.5}}));
    const std::vector<Interval> e{{0, 1}, {2, 3}}, f{{0, 1}};
    EXPECT_EQ(minkowski_sum(e, f), (std::vector<Interval>{{0, 4}}));
    EXPECT_TRUE(minkowski_sum(a, std::vector<Interval>{}).empty());
}

TEST(Minkowski, SumOfPointsIsAPoint) {
    const std::vector<Interval> a{{1, 1}, {3, 3}}, b{{0.5, 0.5}};
    EXPECT_EQ(minkowski_sum(a, b), (std::vector<Interval>{{1.5, 1.5}, {3.5, 3.5}}));
}

TEST(Compositions, MatchBruteForce) {
    for (int d : {1, 2, 3})
        for (int p : {2, 5, 8})
            for (int n = 0; n < 12; ++n) EXPECT_EQ(composition_count(n, d, p), oracle::tuples_with_sum(d, p - 1, n + d));
    EXPECT_EQ(composition_count(0, 3, 8), 1);
    EXPECT_EQ(composition_count(1, 3, 8), 3);
}

TEST(Assembler, QuadrantPointSpectrum) {
    const auto rep = quadrant_report();
    for (int n = 0; n <= 4; ++n) {
        const auto& pe = point(rep, n);
        EXPECT_EQ(pe.multiplicity, n + 1);
        EXPECT_NEAR(pe.value, n + 0.25, 2 * 0.04 / kGamma);
        EXPECT_LT(pe.spread, 1e-9);
    }
    for (const auto& pe : rep.point_spectrum) EXPECT_EQ(pe.multiplicity, oracle::tuples_with_sum(2, 7, pe.n + 2));
}

TEST(Assembler, ClustersSitNearTheirLattice) {
    const auto rep = quadrant_report();
    for (const auto* cls : {&rep.clusters0, &rep.clusters1})
        for (const auto& cl : *cls) {
            EXPECT_NEAR(cl.hull.lo, cl.nominal_center, 2.0 / kGamma) << cl.kind << " " << cl.n;
            EXPECT_LT(cl.hull.length(), 2.0 / kGamma);
        }
    EXPECT_TRUE(rep.clusters2.empty());
    // K^0_0 is the band sum starting at zero.
    EXPECT_NEAR(rep.clusters0.front().hull.lo, 0.0, 1e-12);
}

TEST(Assembler, IsolationIntervalsAreFarFromEssentialSpectrum) {
    const auto rep = quadrant_report();
    ASSERT_GE(rep.isolation.size(), 5u);
    for (int n = 0; n <= 4; ++n) {
        const auto& iso = rep.isolation[static_cast<std::size_t>(n)];
        EXPECT_EQ(iso.n, n);
        EXPECT_GE(iso.distance, 3.0);
        EXPECT_TRUE(iso.spectrum_below || n == 0);
        EXPECT_TRUE(iso.spectrum_above);
        EXPECT_NEAR(iso.scaled.length(), kGamma / 8.0, 1e-9);
    }
}

TEST(Assembler, IntervalCounts) {
    const auto rep = quadrant_report();
    const auto ic = eigenvalues_in_interval(rep, rep.isolation[3].scaled, kGamma);
    EXPECT_EQ(ic.count, 4);
    EXPECT_EQ(ic.labels, (std::vector<int>{3}));
    EXPECT_TRUE(ic.spectrum_below && ic.spectrum_above);
    EXPECT_EQ(eigenvalues_in_interval(rep, Interval{3.5, 3.7}.scaled(kGamma), kGamma).count, 0);
    EXPECT_THROW(eigenvalues_in_interval(rep, Interval{2.9, 3.1}.scaled(kGamma), kGamma), OverlapError);
    EXPECT_THROW(eigenvalues_in_interval(rep, Interval{1, 0}, kGamma), ValidationError);
}

TEST(Assembler, ThreeDimensions) {
    const auto& c = fixtures::design_d3().coeffs;
    const auto comp = ComponentSpectrum::from_half_line(c, kGamma);
    const auto rep = assemble(3, {comp, comp, comp}, kGamma);
    const int expected[] = {1, 3, 6, 10};
    for (int n = 0; n < 4; ++n) {
        const auto& pe = point(rep, n);
        EXPECT_EQ(pe.multiplicity, expected[n]);
        EXPECT_EQ(pe.multiplicity, composition_count(n, 3, 8));
        EXPECT_NEAR(pe.value, n + 3.0 / 12.0, 3 * 0.04 / kGamma);
    }
    EXPECT_FALSE(rep.clusters2.empty());
    for (const auto& iso : rep.isolation)
        if (iso.n <= 3) {
            EXPECT_GE(iso.distance, 3.0);
        }
}

TEST(Assembler, MixedDomains) {
    const auto& d = fixtures::design_d2();
    const double tau = 3 * d.bands.top();
    const auto line = ComponentSpectrum::from_half_line(d.coeffs, kGamma);
    const auto solid = ComponentSpectrum::from_half_solid(d.coeffs, tau, kGamma);
    for (std::size_t n = 0; n < line.eigenvalues.size(); ++n)
        EXPECT_NEAR(solid.eigenvalues[n], line.eigenvalues[n], 2.0 / kGamma);

    const auto half = assemble_mixed(MixedDomain::HalfPlane, {line, solid}, kGamma);
    ASSERT_TRUE(half.window.has_value());
    for (const auto& pe : half.point_spectrum) {
        EXPECT_NEAR(pe.value, pe.n + 0.25, 2.0 / kGamma);
        EXPECT_EQ(pe.multiplicity, oracle::tuples_with_sum(2, 7, pe.n + 2));
    }
    const auto plane = assemble_mixed(MixedDomain::Plane, {solid, solid}, kGamma);
    for (const auto& iso : plane.isolation)
        if (iso.n <= 4) {
            EXPECT_GE(iso.distance, 3.0);
        }

    const auto low = ComponentSpectrum::from_half_solid(d.coeffs, 1.5 * d.bands.top(), kGamma);
    EXPECT_THROW(assemble_mixed(MixedDomain::HalfPlane, {line, low}, kGamma), ParameterError);
    EXPECT_THROW(assemble_mixed(MixedDomain::Plane, {line, solid}, kGamma), ValidationError);
    EXPECT_THROW(assemble_mixed(MixedDomain::HalfPlane, {line, line}, kGamma), ValidationError);
}

TEST(Assembler, StructureErrors) {
    ComponentSpectrum c;
    c.bands = {{0, 0.1}, {1, 1.1}};
    c.eigenvalues = {0.5};
    EXPECT_NO_THROW(c.validate());
    c.eigenvalues = {1.05};
    EXPECT_THROW(c.validate(), StructureError);
    c.eigenvalues = {};
    EXPECT_THROW(c.validate(), StructureError);
    c.bands = {{1, 1.1}, {0, 0.1}};
    c.eigenvalues = {0.5};
    EXPECT_THROW(c.validate(), StructureError);

    const auto res = design(DesignSpec::uniform(8, 2, 1.0, -1)).coeffs;
    EXPECT_THROW(ComponentSpectrum::from_half_line(res, 1.0), StructureError);
    EXPECT_THROW(assemble(4, {}, 1.0), ValidationError);
    EXPECT_THROW(assemble(2, {c}, 1.0), ValidationError);
}
