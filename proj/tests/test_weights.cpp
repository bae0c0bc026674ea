#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <random>

#include "krylov/weights.hpp"
#include "oracles.hpp"

using namespace krylov;
using Catch::Matchers::WithinRel;

TEST_CASE("eval_weight: closed-form spot values") {
    CHECK_THAT(eval_weight(weights::sech(0.0), 0.0), WithinRel(1.0, 1e-14));
    CHECK_THAT(eval_weight(weights::gen_hermite(0.0), 0.0), WithinRel(1.0, 1e-14));
    // Q(1) = sqrt(3) for the quartic-root toy, so w(1) = e^{-sqrt 3}
    CHECK_THAT(eval_weight(weights::quartic_root(-0.5, 2.0), 1.0),
               WithinRel(0.17692120631776420, 1e-13));
}

TEST_CASE("eval_weight: domain errors") {
    CHECK_THROWS_AS(weights::sech(-1.0), NonIntegrable);
    CHECK_THROWS_AS(eval_weight(weights::sech(-0.5), 0.0), EvalAtZeroSingularity);
}

TEST_CASE("weights: even symmetry on random frequencies") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> dist(0.01, 12.0);
    for (const auto& spec :
         {weights::gen_hermite(0.3), weights::gaussian_rho(-0.4, 1.3), weights::sech(0.25),
          weights::quartic_root(0.5, 4.0), weights::freud(2.0)}) {
        for (int i = 0; i < 100; ++i) {
            const double w = dist(rng);
            REQUIRE(eval_weight(spec, w) == eval_weight(spec, -w));
        }
    }
}

TEST_CASE("weights: Q' matches a finite difference of Q") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> dist(0.1, 10.0);
    for (const auto& spec :
         {weights::gen_hermite(0.0), weights::sech(0.0), weights::quartic_root(0.0, 2.0),
          weights::freud(4.0), weights::gaussian_rho(0.0, 0.7)}) {
        for (int i = 0; i < 25; ++i) {
            const double w = dist(rng);
            const double h = 1e-6 * (1 + w);
            const double fd = (spec.potential(w + h) - spec.potential(w - h)) / (2 * h);
            CHECK_THAT(spec.potential_deriv(w), WithinRel(fd, 1e-6));
        }
        CHECK_NOTHROW(weights::validate(spec));
    }
}

TEST_CASE("reference_coefficients: closed forms") {
    auto gh0 = reference_coefficients(weights::gen_hermite(0.0), 4);
    CHECK_THAT(gh0.b[1], WithinRel(1.0, 1e-15));  // b_2 = 1
    auto gh1 = reference_coefficients(weights::gen_hermite(1.0), 2);
    CHECK_THAT(gh1.b[0], WithinRel(1.0, 1e-15));  // b_1 = (1/sqrt2) sqrt(2)
    auto gm = reference_coefficients(weights::gaussian_rho(-0.5, 1.0), 3);
    CHECK_THAT(gm.b[2], WithinRel(std::sqrt(2.5 / 2.0), 1e-15));  // b_3
    CHECK_THROWS_AS(reference_coefficients(weights::sech(0.0), 5), NoClosedForm);
}

TEST_CASE("gen-hermite moment check: int w^2 w(w) dw = b_1^2 ||A||^2") {
    for (double rho : {0.0, 0.5, -0.25}) {
        auto spec = weights::gen_hermite(rho);
        auto ref = reference_coefficients(spec, 1);
        const double mu2 =
            2.0 * oracle::adaptive_simpson(
                      [&](double w) { return w * w * eval_weight(spec, w); }, 1e-12, 12.0,
                      1e-13);
        CHECK_THAT(mu2, WithinRel(ref.b[0] * ref.b[0] * ref.norm2, 1e-10));
    }
}

TEST_CASE("expint_en agrees with the incomplete-gamma closed form at nu=1/2") {
    // E_{1/2}(x) = sqrt(pi/x) erfc(sqrt x); compare the e^x-scaled values so
    // the large-x branch stays representable
    for (double x : {0.25, 1.0, 4.0, 20.0, 50.0, 400.0}) {
        const auto v = special::expint_en_scaled(0.5, {x, 0.0});
        const double expect = std::exp(x / 2) * std::sqrt(M_PI / x) *
                              std::erfc(std::sqrt(x)) * std::exp(x / 2);
        CHECK_THAT(v.real(), WithinRel(expect, 1e-11));
        CHECK(std::abs(v.imag()) < 1e-14 * expect + 1e-300);
    }
    const auto small = special::expint_en(0.5, {1.0, 0.0});
    CHECK_THAT(small.real(), WithinRel(std::sqrt(M_PI) * std::erfc(1.0), 1e-12));
}

TEST_CASE("reference_green: resolvent normalization, z=i value, spectral limit") {
    auto model = weights::gaussian_rho(0.0, 1.0);
    // |z G(z)| -> 1 along z = i t
    for (double t : {20.0, 50.0}) {
        const auto g = reference_green(model, {0.0, t});
        CHECK_THAT(std::abs(std::complex<double>(0.0, t) * g), WithinRel(1.0, 5e-3));
    }
    // Im G(i) = i * i * e^1 E_{1/2}(1) (the quadrature-verified value)
    const auto gi = reference_green(model, {0.0, 1.0});
    CHECK_THAT(gi.imag(), WithinRel(-0.75787215614131211, 1e-12));
    CHECK(std::abs(gi.real()) < 1e-14);

    // spectral limit: 2 Im G(omega - i eps) = 2 pi w(omega), rho = -1/2
    auto m2 = weights::gaussian_rho(-0.5, 1.0);
    const double omega = 0.3, eps = 1e-14;
    const auto g = reference_green(m2, {omega, -eps});
    CHECK_THAT(2.0 * g.imag(), WithinRel(2.0 * M_PI * eval_weight(m2, omega), 1e-6));
}

TEST_CASE("tabulated weights: interpolation, extrapolation flag") {
    std::vector<double> x, y;
    for (int i = 0; i <= 200; ++i) {
        x.push_back(0.02 * i);
        y.push_back(1.0 / std::cosh(M_PI * x.back()));
    }
    auto tab = weights::tabulated(x, y);
    CHECK_THAT(eval_weight(tab, 1.01), WithinRel(1.0 / std::cosh(M_PI * 1.01), 1e-5));
    CHECK_THAT(eval_weight(tab, -1.01), WithinRel(1.0 / std::cosh(M_PI * 1.01), 1e-5));
    CHECK(!tab.tabulated_extrapolation_flag->load());
    CHECK(eval_weight(tab, 7.0) == 0.0);
    CHECK(tab.tabulated_extrapolation_flag->load());
}
