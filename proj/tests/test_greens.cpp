#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <random>

#include "krylov/greens.hpp"
#include "krylov/transport.hpp"
#include "krylov/weight_lanczos.hpp"

using namespace krylov;
using Catch::Matchers::WithinRel;

namespace {
LanczosSequence constant_chain(int n, double b = 1.0) {
    LanczosSequence seq;
    seq.b.assign(n, b);
    seq.norm2 = 1.0;
    return seq;
}
}  // namespace

TEST_CASE("semicircle green: boundary values and decay") {
    const double beta = 3.0;
    auto g0 = semicircle_green(beta, 0.0, Side::Minus);
    CHECK_THAT(g0.imag(), WithinRel(2.0 / beta, 1e-14));
    CHECK(g0.real() == 0.0);
    auto gp = semicircle_green(beta, 0.0, Side::Plus);
    CHECK_THAT(gp.imag(), WithinRel(-2.0 / beta, 1e-14));

    const double far = 10.0 * beta;
    CHECK_THAT(semicircle_green(beta, far, Side::Minus).real(), WithinRel(1.0 / far, 0.01));

    // spectral density at omega = beta/2
    const double w = beta / 2;
    CHECK_THAT(2.0 * semicircle_green(beta, w, Side::Minus).imag(),
               WithinRel(4.0 / beta * std::sqrt(3.0) / 2.0, 1e-14));

    // complex-z form agrees with the side form near the cut
    auto zc = semicircle_green(beta, std::complex<double>(0.7, -1e-12));
    auto bd = semicircle_green(beta, 0.7, Side::Minus);
    CHECK_THAT(zc.imag(), WithinRel(bd.imag(), 1e-6));
}

TEST_CASE("semicircle spectral density integrates to one") {
    const double beta = 2.7;
    double sum = 0;
    const int m = 20000;
    for (int i = 0; i < m; ++i) {
        const double w = -beta + 2 * beta * (i + 0.5) / m;
        sum += 2.0 * semicircle_green(beta, w, Side::Minus).imag() * (2 * beta / m);
    }
    CHECK_THAT(sum / (2 * M_PI), WithinRel(1.0, 1e-8));
}

TEST_CASE("bessel green: rho -> 0 collapses to the semicircle value") {
    const double beta = 10.0, sigma0 = 0.7;
    for (double w : {1e-6, 1e-4, 1e-2}) {
        auto gb = bessel_green(0.0, sigma0, beta, w, Side::Minus);
        auto gs = semicircle_green(beta, 0.0, Side::Minus);
        CHECK_THAT(gb.imag(), WithinRel(gs.imag(), 1e-6 + w));
    }
}

TEST_CASE("bessel green: omega -> 0 limit against C_rho") {
    const double rho = -0.5, sigma0 = 0.9, beta = 25.0;
    const double g = special::gamma_fn((1 + rho) / 2);
    const double c_rho = std::pow(2.0, 1.0 - rho) / (g * g);
    const double w = 1e-9;
    auto gm = bessel_green(rho, sigma0, beta, w, Side::Minus);
    CHECK_THAT(gm.imag() / std::pow(w, rho),
               WithinRel(M_PI * c_rho * std::pow(M_PI * sigma0, rho) / beta, 1e-4));
    // conjugate symmetry
    auto gp = bessel_green(rho, sigma0, beta, 0.37, Side::Plus);
    auto gmm = bessel_green(rho, sigma0, beta, 0.37, Side::Minus);
    CHECK(gp == std::conj(gmm));
}

TEST_CASE("airy endpoint green: large-n limit and Ai constants") {
    const double beta = 40.0;
    auto g = airy_endpoint_green(0.0, 2.0, 100000000, beta, Side::Minus);
    CHECK_THAT(g.real(), WithinRel(2.0 / beta, 1e-3));
    // Ai(0), Ai'(0) against the series values 3^{-2/3}/Gamma(2/3), -3^{-1/3}/Gamma(1/3)
    CHECK_THAT(special::airy_ai0(),
               WithinRel(std::pow(3.0, -2.0 / 3.0) / special::gamma_fn(2.0 / 3.0), 1e-14));
    CHECK_THAT(special::airy_ai0_prime(),
               WithinRel(-std::pow(3.0, -1.0 / 3.0) / special::gamma_fn(1.0 / 3.0), 1e-14));
    auto gp = airy_endpoint_green(-0.3, 2.0, 40, beta, Side::Plus);
    auto gm = airy_endpoint_green(-0.3, 2.0, 40, beta, Side::Minus);
    CHECK(gp == std::conj(gm));
}

TEST_CASE("continued fraction: the constant chain is a fixed point") {
    auto seq = constant_chain(15);
    Terminator t = Terminator::semicircle(2.0);
    for (double w : {0.1, 0.9, 1.7}) {
        auto g0 = continued_fraction(seq, t, 15, w, Side::Minus);
        auto gt = t.value(w, Side::Minus, 15);
        CHECK_THAT(g0.real(), WithinRel(gt.real(), 1e-12));
        CHECK_THAT(g0.imag(), WithinRel(gt.imag(), 1e-12));
    }
}

TEST_CASE("continued fraction: sech recovery at omega = 0") {
    auto seq = stieltjes_coefficients(weights::sech(0.0), 40, {});
    Terminator t = Terminator::semicircle(2.0 * seq.at(40));
    const double phi0 = 2.0 * continued_fraction(seq, t, 40, 0.0, Side::Minus).imag();
    CHECK_THAT(phi0, WithinRel(2 * M_PI, 2e-2));
}

TEST_CASE("algebraic identity: Phi(0) from the continued fraction equals Eq. (Phi0)") {
    std::mt19937 rng(23);
    std::uniform_real_distribution<double> bdist(0.4, 2.5), ndist(0.2, 5.0);
    for (int t = 0; t < 100; ++t) {
        LanczosSequence seq;
        const int n = 2 + 2 * (t % 12);
        for (int i = 0; i < n; ++i) seq.b.push_back(bdist(rng));
        seq.norm2 = ndist(rng);
        const double beta = 2.0 * seq.at(n);
        Terminator term = Terminator::semicircle(beta);
        const double cf = 2.0 * continued_fraction(seq, term, n, 0.0, Side::Minus).imag();
        CHECK_THAT(envelope_at_zero(seq, n, 0.0), WithinRel(cf, 1e-10));
    }
}

TEST_CASE("level consistency: advancing the terminator one step preserves G_0") {
    auto seq = stieltjes_coefficients(weights::gen_hermite(0.0), 20, {});
    const double beta = 7.0, w = 1.3;
    Terminator t20 = Terminator::semicircle(beta);
    auto direct = continued_fraction(seq, t20, 20, w, Side::Minus);
    // advance: G_19 = 1/(w - b_20^2 G_20)
    const auto g20 = t20.value(w, Side::Minus, 20);
    const std::complex<double> g19 = 1.0 / (w - seq.at(20) * seq.at(20) * g20);
    // replicate the backward loop by hand from level 19
    std::complex<double> g = g19;
    for (int k = 18; k >= 0; --k) g = 1.0 / (w - seq.at(k + 1) * seq.at(k + 1) * g);
    g *= seq.norm2;
    CHECK_THAT(g.real(), WithinRel(direct.real(), 1e-13));
    CHECK_THAT(g.imag(), WithinRel(direct.imag(), 1e-13));
}

TEST_CASE("Herglotz property of terminated fractions") {
    auto seq = stieltjes_coefficients(weights::sech(0.0), 30, {});
    Terminator t = Terminator::semicircle(2.0 * seq.at(30));
    for (double w = -0.95; w <= 0.96; w += 0.05) {
        auto g = continued_fraction(seq, t, 30, w * 2.0 * seq.at(30), Side::Minus);
        CHECK(g.imag() >= 0.0);
    }
}

TEST_CASE("pole proximity reports the level") {
    LanczosSequence seq;
    seq.b = {std::sqrt(2.0)};
    seq.norm2 = 1.0;
    Terminator t = Terminator::semicircle(2.0);
    CHECK_THROWS_AS(continued_fraction(seq, t, 1, 2.0, Side::Minus), PoleProximity);
}

TEST_CASE("bessel terminator rejects odd levels") {
    auto seq = constant_chain(9);
    Terminator t = Terminator::bessel(-0.5, 0.5, 2.0);
    CHECK_THROWS_AS(continued_fraction(seq, t, 9, 0.5, Side::Minus), std::invalid_argument);
}

TEST_CASE("spectral_from_green: sign conventions and negativity flag") {
    std::vector<std::complex<double>> g{{0.1, 0.5}, {0.2, -1e-3}};
    auto minus = spectral_from_green(g, Side::Minus);
    CHECK(minus.phi[0] == 1.0);
    CHECK(minus.negative_flag);  // second entry dips negative
    auto plus = spectral_from_green(g, Side::Plus);
    CHECK(plus.phi[0] == -1.0);
}

TEST_CASE("exact-model terminator reproduces the model green at any level") {
    auto model = weights::gaussian_rho(-0.5, 1.0);
    auto ref = reference_coefficients(model, 24);
    LanczosSequence seq;
    seq.b = ref.b;
    seq.norm2 = ref.norm2;
    Terminator t = Terminator::exact_model(model);
    for (double w : {0.2, 0.8, 1.6}) {
        auto via_cf = continued_fraction(seq, t, 24, w, Side::Minus);
        auto direct = reference_green(model, {w, -1e-14});
        CHECK_THAT(via_cf.real(), WithinRel(direct.real(), 1e-6));
        CHECK_THAT(via_cf.imag(), WithinRel(direct.imag(), 1e-6));
    }
}
