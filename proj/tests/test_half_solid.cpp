#include <gtest/gtest.h>

#include <Eigen/Dense>

#include <cmath>
#include <random>

#include "octspec/half_solid.hpp"
#include "octspec/inverse_design.hpp"
#include "oracles.hpp"

using namespace octspec;

namespace {

PeriodicCoefficients unit_design(int sheet) {
    return design(DesignSpec::uniform(8, 2, 1.0, sheet)).coeffs;
}

// Sturm count of the half-solid truncation on sites -L..R (R = Np - 1).
int half_solid_count_below(const PeriodicCoefficients& c, double tau, int L, double x) {
    const int p = c.period();
    const int R = ((L + 1) / p) * p - 1;
    std::vector<double> diag, off;
    for (int s = -L; s <= R; ++s) {
        diag.push_back(s <= 0 ? tau : c.site(s));
        if (s < R) off.push_back(s <= 0 ? 1.0 : c.hop(s));
    }
    return oracle::sturm_count(diag, off, x);
}

}  // namespace

TEST(Vacuum, DispersionValues) {
    const auto [z0, z10] = vacuum_dispersion(98.0, 100.0);
    EXPECT_NEAR(z0, -1.0, 1e-12);
    EXPECT_NEAR(z10, -1.0, 1e-12);
    const auto [z, z1] = vacuum_dispersion(0.0, 100.0);
    EXPECT_NEAR(z, -50 + std::sqrt(2499.0), 1e-12);
    EXPECT_NEAR(z * z1, 1.0, 1e-15);
    for (double t : {-10.0, -100.0, -1000.0}) {
        const auto [zz, zz1] = vacuum_dispersion(2 * t + 50, 50.0);
        EXPECT_NEAR(zz, 1 / (2 * t), 1.0 / std::abs(t * t * t));
        (void)zz1;
    }
    EXPECT_THROW(vacuum_dispersion(100.5, 100.0), DomainError);
}

TEST(Vacuum, ComplexBranchInsideUnitDisc) {
    for (Complex l : {Complex(0, 1), Complex(99, 0.1), Complex(103, -2), Complex(-5, 0)}) {
        const auto r = vacuum_dispersion(l, 100.0);
        EXPECT_LT(std::abs(r.z), 1.0);
        EXPECT_NEAR(std::abs(r.z * r.z1 - 1.0), 0.0, 1e-13);
        EXPECT_NEAR(std::abs(r.z + 1.0 / r.z - (l - 100.0)), 0.0, 1e-10);
    }
}

TEST(Wronskian, RequiresOpenGap) {
    EXPECT_THROW(wronskian_w(PeriodicCoefficients::free(3), 50.0, 0.0), DomainError);
    const auto c = unit_design(+1);
    EXPECT_THROW(wronskian_w(c, 100.0, band_edges(c).bands[2].center()), DomainError);
}

TEST(Wronskian, ResonanceGapsStayAwayFromZero) {
    const auto c = unit_design(-1);
    const auto sb = band_edges(c);
    for (int n = 1; n < 8; ++n) {
        const Interval g = sb.gap(n);
        const double d = 0.01 * g.length();
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (int k = 0; k <= 200; ++k) {
            const double w = wronskian_w(c, 1e4, g.lo + d + (g.length() - 2 * d) * k / 200.0);
            lo = std::min(lo, w);
            hi = std::max(hi, w);
        }
        EXPECT_TRUE(lo > 0 || hi < 0) << "gap " << n;
    }
}

TEST(Wronskian, EigenvalueGapChangesSignAtTheZero) {
    const auto c = unit_design(+1);
    const auto hs = find_gap_eigenvalues(c, 400.0);
    for (int n = 1; n < 8; ++n) {
        const double m = *hs.eigenvalues[static_cast<std::size_t>(n - 1)];
        EXPECT_GT(wronskian_w(c, 400.0, m - 1e-6), 0.0);
        EXPECT_LT(wronskian_w(c, 400.0, m + 1e-6), 0.0);
    }
}

TEST(HalfSolid, EigenvaluesMatchSturmCountOfTruncation) {
    const auto c = unit_design(+1);
    for (double tau : {100.0, 400.0}) {
        const auto hs = find_gap_eigenvalues(c, tau);
        ASSERT_EQ(hs.eigenvalues.size(), 7u);
        for (const auto& e : hs.eigenvalues) {
            ASSERT_TRUE(e.has_value());
            EXPECT_EQ(half_solid_count_below(c, tau, 2000, *e + 1e-7) - half_solid_count_below(c, tau, 2000, *e - 1e-7), 1);
        }
        // And nothing else in the gaps.
        const auto sb = band_edges(c);
        for (int n = 1; n < 8; ++n) {
            const Interval g = sb.gap(n);
            EXPECT_EQ(half_solid_count_below(c, tau, 2000, g.hi - 1e-6) - half_solid_count_below(c, tau, 2000, g.lo + 1e-6), 1);
        }
    }
}

TEST(HalfSolid, ResonanceDesignHasNoGapEigenvalues) {
    const auto hs = find_gap_eigenvalues(unit_design(-1), 400.0);
    for (const auto& e : hs.eigenvalues) EXPECT_FALSE(e.has_value());
}

TEST(HalfSolid, SpectrumLayout) {
    const auto c = unit_design(+1);
    const auto sb = band_edges(c);
    const auto hs = find_gap_eigenvalues(c, 100.0);
    EXPECT_EQ(hs.bands.back(), (Interval{98.0, 102.0}));
    EXPECT_EQ(hs.gaps.back(), (Interval{sb.top(), 98.0}));
    EXPECT_EQ(hs.gaps.size(), 8u);
    EXPECT_THROW(find_gap_eigenvalues(c, sb.top() + 3.0), ParameterError);
}

TEST(HalfSolid, LeadingShiftIsMinusCOverTau) {
    const auto c = unit_design(+1);
    const auto mu = dirichlet_eigenvalues(c);
    const std::vector<double> taus{100, 200, 400, 800};
    for (int n = 1; n < 8; ++n) {
        // Least-squares line of (mu_tau - mu) tau against 1/tau; the intercept is the limit.
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (double tau : taus) {
            const double y = (*find_gap_eigenvalues(c, tau).eigenvalues[static_cast<std::size_t>(n - 1)] - mu[static_cast<std::size_t>(n - 1)]) * tau;
            const double x = 1 / tau;
            sx += x, sy += y, sxx += x * x, sxy += x * y;
        }
        const double k = static_cast<double>(taus.size());
        const double slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
        const double intercept = (sy - slope * sx) / k;
        const double cc = asymptotic_coefficient(c, n);
        EXPECT_NEAR(intercept, -cc, 0.05 * std::abs(cc)) << "gap " << n;
    }
}

TEST(HalfSolid, CoefficientMatchesCentralDifference) {
    const auto c = unit_design(+1);
    const auto sb = band_edges(c);
    for (const auto& s : classify_states(c, sb)) {
        const double h = 1e-6 * (1 + std::abs(s.mu));
        const double dphi = (static_cast<double>(oracle::monodromy(c, s.mu + h)[1]) - static_cast<double>(oracle::monodromy(c, s.mu - h)[1])) / (2 * h);
        const auto m = oracle::monodromy(c, s.mu);
        const double fo = 0.5 * static_cast<double>(m[3] - m[0]);
        const double ref = 2 * fo / (c.hop(8) * dphi);
        const double cc = asymptotic_coefficient(c, s.n);
        EXPECT_NEAR(cc, ref, 1e-6 * std::abs(ref));
        EXPECT_EQ(cc > 0, fo / dphi > 0);
    }
}

TEST(HalfSolid, CoefficientNeedsEigenvalueState) {
    EXPECT_THROW(asymptotic_coefficient(unit_design(-1), 3), DomainError);
    EXPECT_THROW(asymptotic_coefficient(unit_design(+1), 9), DomainError);
}

TEST(HalfSolid, RandomOperatorsMatchLocalizedStatesOfDenseTruncation) {
    // The far Dirichlet end binds states of its own, so only eigenvectors
    // concentrated near the interface are counted.
    std::mt19937 rng(127);
    int eig = 0;
    const int L = 200;
    for (int trial = 0; trial < 20; ++trial) {
        const auto c = oracle::random_coefficients(2 + trial % 5, rng);
        const auto sb = band_edges(c);
        const double tau = sb.top() + 50.0;
        HalfSolidSpectrum hs;
        try {
            hs = find_gap_eigenvalues(c, tau);
        } catch (const ThresholdError&) {
            continue;
        }
        Eigen::MatrixXd h = Eigen::MatrixXd::Zero(2 * L + 1, 2 * L + 1);
        for (int i = 0; i <= 2 * L; ++i) {
            const long x = i - L;
            h(i, i) = x <= 0 ? tau : c.site(x);
            if (i < 2 * L) h(i, i + 1) = h(i + 1, i) = x <= 0 ? 1.0 : c.hop(x);
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
        for (const auto& s : classify_states(c, sb)) {
            const Interval g = sb.gap(s.n);
            const double margin = 0.05 * g.length();
            const auto& lib = hs.eigenvalues[static_cast<std::size_t>(s.n - 1)];
            if (g.length() < 0.05 || (lib && (*lib < g.lo + margin || *lib > g.hi - margin))) continue;
            int count = 0;
            for (int k = 0; k <= 2 * L; ++k) {
                const double e = es.eigenvalues()(k);
                if (!(e > g.lo + margin && e < g.hi - margin)) continue;
                const double near = es.eigenvectors().col(k).segment(L / 2, L).squaredNorm();
                if (near > 0.5) {
                    ++count;
                    if (lib) {
                        EXPECT_NEAR(e, *lib, 1e-8);
                    }
                }
            }
            EXPECT_EQ(count, lib ? 1 : 0) << "trial " << trial << " gap " << s.n;
            eig += lib ? 1 : 0;
        }
    }
    EXPECT_GT(eig, 3);
}

TEST(HalfSolid, StiffDesignAgreesWithTruncation) {
    // Gap length 200 makes some hoppings ~1e-17; the Wronskian must still be accurate.
    const auto r = design_uniform(DesignSpec::uniform(8, 2, 200.0), 200.0);
    const auto hs = find_gap_eigenvalues(r.coeffs, 3000.0);
    for (const auto& e : hs.eigenvalues) {
        ASSERT_TRUE(e.has_value());
        EXPECT_EQ(half_solid_count_below(r.coeffs, 3000.0, 400, *e + 1e-6) - half_solid_count_below(r.coeffs, 3000.0, 400, *e - 1e-6), 1);
    }
}
