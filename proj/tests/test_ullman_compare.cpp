#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "krylov/coulomb_gas.hpp"
#include "krylov/ullman_compare.hpp"
#include "krylov/weights.hpp"

using namespace krylov;
using Catch::Matchers::WithinRel;

TEST_CASE("rescaled measure: Q = w^2 is exactly the p = 2 Ullman form") {
    auto gh = weights::gen_hermite(0.0);
    auto m = coulomb::equilibrium_density(gh, 15,
                                          coulomb::uniform_grid(0.0, std::sqrt(30.0), 400));
    auto r = rescaled_measure(m);
    for (std::size_t i = 0; i < r.x.size(); i += 13)
        CHECK(std::abs(r.psi[i] - coulomb::ullman(2.0, r.x[i])) < 1e-9);
    CHECK(r.psi.back() == 0.0);  // edge zero
    // normalization within 1e-3 (trapezoid over [0,1], doubled)
    double total = 0;
    for (std::size_t i = 1; i < r.x.size(); ++i)
        total += 0.5 * (r.psi[i] + r.psi[i - 1]) * (r.x[i] - r.x[i - 1]);
    CHECK_THAT(2.0 * total, WithinRel(1.0, 1e-3));
}

TEST_CASE("sech measure: finite sup-distance to the p = 1 Ullman form (diagnostic)") {
    auto spec = weights::sech(0.0);
    auto m = coulomb::equilibrium_density(
        spec, 40, coulomb::uniform_grid(0.0, coulomb::mrs_number(spec, 40), 500));
    auto r = rescaled_measure(m);
    double dist = 0;
    for (std::size_t i = 0; i < r.x.size(); ++i) {
        if (r.x[i] < 0.05 || r.x[i] > 0.95) continue;  // skip the divergent origin
        dist = std::max(dist, std::abs(r.psi[i] - coulomb::ullman(1.0, r.x[i])));
    }
    CHECK(std::isfinite(dist));
    CHECK(dist < 1.0);  // qualitative match only; reported, not asserted tightly
}

TEST_CASE("Freud measures approach the Ullman distribution") {
    for (double p : {2.0, 4.0}) {
        auto fr = weights::freud(p);
        auto dist_at = [&](int n) {
            auto m = coulomb::equilibrium_density(
                fr, n, coulomb::uniform_grid(0.0, coulomb::mrs_number(fr, n), 200));
            auto r = rescaled_measure(m);
            double d = 0;
            for (std::size_t i = 0; i < r.x.size(); ++i)
                d = std::max(d, std::abs(r.psi[i] - coulomb::ullman(p, r.x[i])));
            return d;
        };
        // the pure Freud equilibrium measure *is* the Ullman distribution at
        // every n, so both distances sit at quadrature level
        const double d2 = dist_at(100), d4 = dist_at(10000);
        CHECK(d4 <= d2 + 1e-8);
        CHECK(d2 < 1e-6);
    }
    // a genuinely converging family: the quartic-root toy approaches psi^(2)
    auto qr = weights::quartic_root(0.0, 2.0);
    auto dist_at = [&](int n) {
        auto m = coulomb::equilibrium_density(
            qr, n, coulomb::uniform_grid(0.0, coulomb::mrs_number(qr, n), 200));
        auto r = rescaled_measure(m);
        double d = 0;
        for (std::size_t i = 0; i < r.x.size(); ++i)
            d = std::max(d, std::abs(r.psi[i] - coulomb::ullman(2.0, r.x[i])));
        return d;
    };
    CHECK(dist_at(10000) < dist_at(100));
}

TEST_CASE("confinement diagnostic: growth classes") {
    // strongly confined: Q = (1 + w^2)^{p/2}, p = 2 -> sigma_n(0) ~ sqrt(n)
    auto strong = weights::custom(
        0.0, [](double w) { return 1.0 + w * w; }, [](double w) { return 2.0 * w; },
        [](double) { return 2.0; }, 2.0);
    auto ds = confinement_diagnostic(strong, {100, 300, 1000, 3000, 10000});
    CHECK(ds.growth_class == "algebraic");
    CHECK(std::abs(ds.loglog_exponent - 0.5) < 0.1);
    for (double s : ds.sigma0) CHECK(s > 0.0);

    // marginal: quartic-root pinv = 4 (p = 1) -> sigma_n(0) ~ log n
    auto marginal = weights::quartic_root(0.0, 4.0);
    auto dm = confinement_diagnostic(marginal, {100, 300, 1000, 3000, 10000});
    CHECK(dm.growth_class == "logarithmic");
    // sigma0 / log n bounded and nondecreasing across the range
    double prev = 0;
    for (std::size_t i = 0; i < dm.n.size(); ++i) {
        const double ratio = dm.sigma0[i] / std::log(double(dm.n[i]));
        CHECK(ratio < 10.0);
        CHECK(ratio >= prev * 0.98);
        prev = ratio;
    }

    CHECK_THROWS_AS(confinement_diagnostic(strong, {100}), std::invalid_argument);
    CHECK_THROWS_AS(confinement_diagnostic(strong, {100, 50}), std::invalid_argument);
}
