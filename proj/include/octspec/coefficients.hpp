#pragma once

#include <cmath>
#include <cstddef>
#include <numeric>
#include <random>
#include <sstream>
#include <vector>

#include "octspec/errors.hpp"

namespace octspec {

/// Coefficients of a p-periodic Jacobi operator
///
///     (J f)_x = a_{x-1} f_{x-1} + a_x f_{x+1} + (b_x + shift) f_x.
///
/// `a` and `b` hold one period, a[0] = a_1, ..., a[p-1] = a_p, extended
/// periodically (so a_0 = a_p). The stored potential has zero mean and the
/// hoppings have unit product; any uniform energy offset lives in `shift`.
struct PeriodicCoefficients {
    std::vector<double> a;
    std::vector<double> b;
    double shift = 0.0;

    int period() const { return static_cast<int>(a.size()); }

    /// a_x for any integer x.
    double hop(long x) const {
        const long p = static_cast<long>(a.size());
        return a[static_cast<std::size_t>(((x - 1) % p + p) % p)];
    }

    /// b_x + shift for any integer x.
    double site(long x) const {
        const long p = static_cast<long>(b.size());
        return b[static_cast<std::size_t>(((x - 1) % p + p) % p)] + shift;
    }

    void validate() const {
        if (a.empty()) throw ValidationError("period must be at least 1");
        if (a.size() != b.size()) throw ValidationError("a and b must both have length p");
        double log_prod = 0.0;
        double b_scale = 1.0;
        for (double ax : a) {
            if (!(ax > 0.0) || !std::isfinite(ax)) throw ValidationError("hoppings must be positive and finite");
            log_prod += std::log(ax);
        }
        for (double bx : b) {
            if (!std::isfinite(bx)) throw ValidationError("potential must be finite");
            b_scale = std::max(b_scale, std::abs(bx));
        }
        if (!std::isfinite(shift)) throw ValidationError("shift must be finite");
        if (std::abs(std::expm1(log_prod)) > 1e-12) {
            std::ostringstream os;
            os << "product of hoppings must be 1 (got exp(" << log_prod << "))";
            throw ValidationError(os.str());
        }
        const double sum = std::accumulate(b.begin(), b.end(), 0.0);
        if (std::abs(sum) > 1e-12 * b_scale) {
            std::ostringstream os;
            os << "potential must have zero mean, the offset belongs in shift (sum " << sum << ")";
            throw ValidationError(os.str());
        }
    }

    static PeriodicCoefficients free(int p, double shift = 0.0) {
        return {std::vector<double>(static_cast<std::size_t>(p), 1.0),
                std::vector<double>(static_cast<std::size_t>(p), 0.0), shift};
    }

    /// Brings arbitrary positive hoppings and real potential into the normal
    /// form: hoppings rescaled to unit product, potential mean moved into shift.
    /// Rescaling the hoppings changes the operator unless their product already is 1.
    static PeriodicCoefficients normalized(std::vector<double> a, std::vector<double> b, double shift = 0.0) {
        if (a.empty() || a.size() != b.size()) throw ValidationError("a and b must both have length p >= 1");
        double log_mean = 0.0;
        for (double ax : a) {
            if (!(ax > 0.0)) throw ValidationError("hoppings must be positive");
            log_mean += std::log(ax);
        }
        log_mean /= static_cast<double>(a.size());
        for (double& ax : a) ax = std::exp(std::log(ax) - log_mean);
        const double mean = std::accumulate(b.begin(), b.end(), 0.0) / static_cast<double>(b.size());
        for (double& bx : b) bx -= mean;
        return {std::move(a), std::move(b), shift + mean};
    }

    /// Random coefficients with |log a_x| <= log_a_max and |b_x| <= b_max before
    /// centering. Used by tests and the CLI's --seed sampling.
    template <class Rng>
    static PeriodicCoefficients random(int p, Rng& rng, double log_a_max = 1.0, double b_max = 2.0) {
        std::uniform_real_distribution<double> la(-log_a_max, log_a_max);
        std::uniform_real_distribution<double> bb(-b_max, b_max);
        std::vector<double> a(static_cast<std::size_t>(p)), b(static_cast<std::size_t>(p));
        for (int i = 0; i < p; ++i) {
            a[static_cast<std::size_t>(i)] = std::exp(la(rng));
            b[static_cast<std::size_t>(i)] = bb(rng);
        }
        return normalized(std::move(a), std::move(b));
    }
};

}  // namespace octspec
