#include <cmath>

#include <gtest/gtest.h>

#include "sconcord/scalar.hpp"
#include "sconcord/suites.hpp"

using namespace sconcord;

// long double evaluation as an independent reference; below 0.01 the difference
// z - log1p(z) cancels even in long double, so integrate omega(z) = z^2 int_0^1 s / (1 + z s) ds instead
static long double omega_ref(long double z) {
    if (z >= 0.01L) return z - std::log1p(z);
    const int n = 2000;
    const long double h = 1.0L / n;
    long double sum = 0.0L;
    for (int i = 0; i <= n; ++i) {
        const long double s = i * h;
        const long double w = (i == 0 || i == n) ? 1.0L : (i % 2 ? 4.0L : 2.0L);
        sum += w * s / (1.0L + z * s);
    }
    return z * z * sum * h / 3.0L;
}
static long double omega_star_ref(long double z) { return -z - std::log1p(-z); }

TEST(Constants, ExactValuesAndOrdering) {
    const AppendixConstants& c = appendix_constants();
    EXPECT_EQ(c.alpha_star, 0.0001);
    EXPECT_EQ(c.r1, 0.49);
    EXPECT_EQ(c.c1, 9.0);
    EXPECT_EQ(c.c2, 0.95);
    EXPECT_DOUBLE_EQ(c.r2, 0.49 / std::sqrt(1.0 - 0.0001));
    EXPECT_DOUBLE_EQ(c.r3, std::sqrt(1.0 - 0.0001) / (1.0 + 0.0001) * 0.49);
    EXPECT_DOUBLE_EQ(c.c3, (1.0 / c.r2 - 1.0) / (1.0 / c.r2 - 2.0));
    EXPECT_LT(0.0, c.r3);
    EXPECT_LT(c.r3, c.r1);
    EXPECT_LT(c.r1, c.r2);
    EXPECT_LT(c.r2, 0.5);
    EXPECT_GT(c.c3, 1.0);
}

TEST(Omega, Examples) {
    EXPECT_EQ(omega(0.0), 0.0);
    EXPECT_NEAR(omega(1.0), static_cast<double>(omega_ref(1.0L)), 1e-15);
    EXPECT_NEAR(omega(1.0), 0.3068528, 1e-7);
    EXPECT_NEAR(omega(0.5), 0.0945349, 1e-7);
    EXPECT_THROW(omega(-1e-3), std::domain_error);
}

TEST(Omega, MatchesLongDoubleOnGrid) {
    for (double z : {1e-12, 1e-8, 1e-4, 0.01, 0.3, 2.0, 17.0, 1e3, 1e8}) {
        const long double ref = omega_ref(z);
        EXPECT_NEAR(omega(z), static_cast<double>(ref), 1e-14 * static_cast<double>(ref) + 1e-300) << z;
    }
}

TEST(OmegaStar, Examples) {
    EXPECT_EQ(omega_star(0.0).value(), 0.0);
    EXPECT_TRUE(omega_star(1.0).is_infinite());
    EXPECT_TRUE(omega_star(3.0).is_infinite());
    EXPECT_NEAR(omega_star(0.5).value(), 0.1931472, 1e-7);
    EXPECT_NEAR(omega_star(0.5).value(), static_cast<double>(omega_star_ref(0.5L)), 1e-15);
    EXPECT_THROW(omega_star(-0.5), std::domain_error);
}

TEST(OmegaStar, NearOneStaysFiniteThenInfinite) {
    const ExtendedReal a = omega_star(1.0 - 1e-10);
    ASSERT_TRUE(a.is_finite());
    EXPECT_NEAR(a.value(), static_cast<double>(omega_star_ref(1.0L - 1e-10L)), 1e-6);
    EXPECT_TRUE(omega_star(1.0 - 1e-15).is_infinite());
}

TEST(GammaF, Examples) {
    EXPECT_EQ(gamma_f(0.0, 1.0), 0.0);
    EXPECT_NEAR(gamma_f(1.0 - std::log(2.0), 1.0), 1.0, 1e-12);
    EXPECT_EQ(gamma_f(123.0, 0.0), 0.0);
}

TEST(GammaF, InvertsOmegaByBisectionOracle) {
    // independent inversion: plain bisection in long double
    for (double gap : {1e-6, 0.01, 0.7, 5.0, 40.0}) {
        for (double kappa : {0.5, 1.0, 3.0}) {
            const long double target = static_cast<long double>(kappa) * kappa * gap;
            long double lo = 0, hi = 1;
            while (omega_ref(hi) < target) hi *= 2;
            for (int i = 0; i < 200; ++i) {
                const long double mid = 0.5L * (lo + hi);
                (omega_ref(mid) < target ? lo : hi) = mid;
            }
            EXPECT_NEAR(gamma_f(gap, kappa), static_cast<double>(lo), 1e-11 * (1.0 + static_cast<double>(lo)));
        }
    }
}

TEST(ScalarSuite, AllIdentitiesHold) {
    for (const suites::Check& c : suites::scalar_identities()) EXPECT_TRUE(c.passed) << c.name << " worst " << c.worst;
}
