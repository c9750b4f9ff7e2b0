#include <boost/math/quadrature/exp_sinh.hpp>
#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "hgtpp/tpp.hpp"

using namespace hgtpp;

TEST_SUITE("tpp") {
    TEST_CASE("constant survival") {
        ConstantIntensity c(2.0);
        CHECK(survival(c, 1.0, 1.5) == doctest::Approx(std::exp(-1.0)));
        CHECK(event_probability(c, 1.5, 1.0) == doctest::Approx(2.0 * std::exp(-1.0)));
        CHECK_THROWS(ConstantIntensity(-1.0));
        CHECK_THROWS(survival(c, 2.0, 1.0));
    }

    TEST_CASE("rayleigh closed forms") {
        RayleighIntensity r(2.0, 1.0);
        CHECK(r(0.5) == 0.0);
        CHECK(r(2.0) == 2.0);
        CHECK(*r.integral(1.0, 2.0) == doctest::Approx(1.0));
        CHECK(survival(r, 1.0, 2.0) == doctest::Approx(std::exp(-1.0)));
        CHECK(rayleigh_expected_duration(std::numbers::pi / 2) == doctest::Approx(1.0).epsilon(1e-14));
        CHECK_THROWS(rayleigh_expected_duration(0.0));
    }

    TEST_CASE("quadrature agrees with closed form when forced") {
        RayleighIntensity r(1.5, 0.0);
        FunctionIntensity f([](double t) { return 1.5 * t; });
        CHECK(survival(f, 0.0, 2.0, 4096) == doctest::Approx(survival(r, 0.0, 2.0)).epsilon(1e-6));
    }

    TEST_CASE("numeric expectation of a constant intensity is the exponential mean") {
        for (double c : {0.5, 1.0, 2.0}) {
            ConstantIntensity lam(c);
            const double e = expected_duration_numeric(lam, 0.0, 20.0, 4096);
            CHECK(e == doctest::Approx(1.0 / c).epsilon(0.02));
        }
        ConstantIntensity a(1.0), b(2.0);
        CHECK(expected_duration_numeric(b, 0.0, 40.0, 4096) ==
              doctest::Approx(expected_duration_numeric(a, 0.0, 40.0, 4096) / 2).epsilon(0.01));
        ConstantIntensity zero(0.0);
        CHECK_THROWS_AS(expected_duration_numeric(zero, 0.0, 20.0, 256), std::domain_error);
    }

    TEST_CASE("rayleigh mean matches adaptive quadrature") {
        boost::math::quadrature::exp_sinh<double> integrator;
        for (double alpha : {0.1, 1.0, 10.0}) {
            const double q = integrator.integrate(
                [alpha](double t) { return t * alpha * t * std::exp(-alpha * t * t / 2); });
            CHECK(std::abs(rayleigh_expected_duration(alpha) - q) / q < 1e-4);
        }
    }

    TEST_CASE("sorted samples") {
        Rng rng(1);
        auto s = sorted_uniform_samples(2.0, 3.0, 500, rng);
        REQUIRE(s.size() == 500);
        for (std::size_t i = 0; i < s.size(); ++i) {
            CHECK(s[i] >= 2.0);
            CHECK(s[i] <= 3.0);
            if (i) CHECK(s[i - 1] <= s[i]);
        }
    }

    TEST_CASE("mc estimator under constant intensity telescopes") {
        ConstantIntensity c(3.0);
        Rng a(11), b(11);
        const double est = mc_log_survival(c, 0.0, 2.0, 64, a);
        const auto s = sorted_uniform_samples(0.0, 2.0, 64, b);
        CHECK(est == doctest::Approx(3.0 * (s.back() - s.front())).epsilon(1e-13));
        CHECK_THROWS(mc_log_survival(c, 1.0, 1.0, 64, a));
        CHECK_THROWS(mc_log_survival(c, 0.0, 1.0, 1, a));
    }

    TEST_CASE("hawkes intensity and thinning") {
        HawkesIntensity h(0.5, 0.8, 2.0);
        CHECK(h.branching_ratio() == doctest::Approx(0.4));
        CHECK(h(1.0) == 0.5);
        h.observe(1.0);
        CHECK(h(2.0) == doctest::Approx(0.5 + 0.8 * std::exp(-2.0)));

        // a Hawkes process has mean rate mu / (1 - alpha/beta)
        HawkesIntensity sim(0.5, 0.8, 2.0);
        Rng rng(5);
        const auto ev = simulate_thinning(sim, 0.0, 4000.0, rng);
        const double rate = static_cast<double>(ev.size()) / 4000.0;
        CHECK(rate == doctest::Approx(0.5 / 0.6).epsilon(0.08));
        for (std::size_t i = 1; i < ev.size(); ++i) CHECK(ev[i - 1] <= ev[i]);
    }

    TEST_CASE("poisson thinning rate") {
        ConstantIntensity c(2.0);
        Rng rng(9);
        const auto ev = simulate_thinning(c, 0.0, 5000.0, rng);
        CHECK(static_cast<double>(ev.size()) / 5000.0 == doctest::Approx(2.0).epsilon(0.03));
        FunctionIntensity unbounded([](double) { return 1.0; });
        CHECK_THROWS(simulate_thinning(unbounded, 0.0, 1.0, rng));
    }
}
