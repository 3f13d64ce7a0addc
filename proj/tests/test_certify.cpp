#include <gtest/gtest.h>

#include "octspec/certify.hpp"
#include "oracles.hpp"

using namespace octspec;

TEST(Certify, QuadrantFourEigenvalues) {
    const Interval I{100, 140};
    const auto cd = certify(I, 4, Domain::Quadrant);
    EXPECT_EQ(cd.n, 3);
    EXPECT_DOUBLE_EQ(cd.gamma, 320.0);
    ASSERT_TRUE(cd.eigenvalue.has_value());
    EXPECT_NEAR(*cd.eigenvalue, 120.0, 1e-9);
    EXPECT_EQ(cd.assembler_count, 4);
    EXPECT_EQ(cd.oracle_count, 4);
    EXPECT_GE(cd.isolation_distance, 3.0);
    EXPECT_TRUE(cd.spectrum_below && cd.spectrum_above);
    ASSERT_EQ(cd.perturbations.size(), 20u);
    for (const auto& pr : cd.perturbations) EXPECT_EQ(pr.after, 4);
    EXPECT_EQ(cd.box_L % cd.p, cd.p - 1);
}

TEST(Certify, ShiftedCoefficientsReproduceTheCount) {
    // Independent check: Sturm counts of the two axis truncations, convolved.
    const Interval I{-30, 0};
    const auto cd = certify(I, 2, Domain::Quadrant, {.perturbations = 0});
    ASSERT_EQ(cd.coefficients.size(), 2u);
    std::vector<double> diag, off;
    const auto& c = cd.coefficients[0];
    for (int x = 1; x <= cd.box_L; ++x) {
        diag.push_back(c.site(x));
        if (x < cd.box_L) off.push_back(c.hop(x));
    }
    const auto ev = oracle::sturm_eigenvalues(diag, off);
    int count = 0;
    for (double u : ev)
        for (double v : ev) count += I.contains(u + v) ? 1 : 0;
    EXPECT_EQ(count, 2);
}

TEST(Certify, EmptyInterval) {
    const auto cd = certify({0, 10}, 0, Domain::Quadrant, {.perturbations = 2});
    EXPECT_FALSE(cd.eigenvalue.has_value());
    EXPECT_EQ(cd.assembler_count, 0);
    EXPECT_EQ(cd.oracle_count, 0);
    EXPECT_GE(cd.isolation_distance, 3.0);
}

TEST(Certify, Octant) {
    for (int N : {1, 3, 6}) {
        const auto cd = certify({50, 70}, N, Domain::Octant, {.perturbations = 0});
        EXPECT_EQ(cd.d, 3);
        EXPECT_EQ(cd.oracle_count, N);
        EXPECT_TRUE(cd.perturbations.empty());
    }
    EXPECT_THROW(certify({50, 70}, 2, Domain::Octant), ParameterError);
}

TEST(Certify, MixedDomains) {
    for (Domain dom : {Domain::HalfPlane, Domain::Plane}) {
        const auto cd = certify({10, 40}, 4, dom);
        EXPECT_EQ(cd.assembler_count, 4);
        EXPECT_EQ(cd.oracle_count, 4);
        const int solid = static_cast<int>(std::count_if(cd.tau.begin(), cd.tau.end(), [](const auto& t) { return t.has_value(); }));
        EXPECT_EQ(solid, dom == Domain::Plane ? 2 : 1);
    }
}

TEST(Certify, Infeasible) {
    try {
        certify({0, 4}, 1, Domain::Quadrant);
        FAIL();
    } catch (const InfeasibleError& e) {
        EXPECT_DOUBLE_EQ(e.minimal_length(), 6.0);
    }
    EXPECT_THROW(certify({0, 1}, 0, Domain::Quadrant), InfeasibleError);
    EXPECT_THROW(certify({1, 0}, 1, Domain::Quadrant), ValidationError);
    EXPECT_THROW(certify({0, 10}, -1, Domain::Quadrant), ValidationError);
}

TEST(Certify, DomainNames) {
    EXPECT_EQ(to_string(Domain::HalfPlane), "half-plane");
    EXPECT_EQ(dimension(Domain::Octant), 3);
    EXPECT_EQ(dimension(Domain::Plane), 2);
}
