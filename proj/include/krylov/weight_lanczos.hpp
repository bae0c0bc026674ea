// weight_lanczos.hpp — Lanczos coefficients from a spectral weight.
//
// Primary path is the discretized Stieltjes procedure in extended precision:
// carry p_{n-1}, p_{n-2} on a composite Gauss grid, take
// b_n = || omega p_{n-1} - b_{n-1} p_{n-2} ||_w, and monitor the orthogonality
// drift <p_n, p_{n-2}> per step. The moment (Chebyshev) algorithm lives in the
// test suite as a cross-check oracle only; moments grow like beta_n^{2n} and
// are far worse conditioned.

#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "krylov/coulomb_gas.hpp"
#include "krylov/errors.hpp"
#include "krylov/mp.hpp"
#include "krylov/sequence.hpp"
#include "krylov/weights.hpp"

namespace krylov {

namespace stieltjes_detail {

struct Pass {
    std::vector<double> b;
    double norm2 = 0;
    double max_drift = 0;
};

// one full Stieltjes sweep on a fixed grid; fails with PrecisionExhausted when
// the drift monitor exceeds 10^{-bits/8}
inline Pass run(const QuadratureGrid& grid, int n_max, unsigned bits) {
    const std::size_t m = grid.nodes.size();
    const double drift_cap = std::pow(10.0, -double(bits) / 8.0);

    // even weight: integrals are 2 * (half-line sum); integrands below all
    // have even parity
    mpfloat mu0 = 0;
    for (std::size_t i = 0; i < m; ++i) mu0 += grid.weights[i];
    mu0 *= 2;

    Pass out;
    out.norm2 = mu0.convert_to<double>();
    std::vector<mpfloat> pm1(m, 1 / sqrt(mu0)), pm2(m, mpfloat(0)), v(m);
    mpfloat b_prev = 0;
    for (int n = 1; n <= n_max; ++n) {
        mpfloat s = 0;
        for (std::size_t i = 0; i < m; ++i) {
            v[i] = grid.nodes[i] * pm1[i] - b_prev * pm2[i];
            s += grid.weights[i] * v[i] * v[i];
        }
        s *= 2;
        if (s <= 0)
            throw PrecisionExhausted("stieltjes: nonpositive norm at n=" + std::to_string(n));
        const mpfloat bn = sqrt(s);
        mpfloat drift = 0;
        for (std::size_t i = 0; i < m; ++i) {
            v[i] /= bn;
            drift += grid.weights[i] * v[i] * pm2[i];
        }
        drift *= 2;
        out.max_drift = std::max(out.max_drift, std::abs(drift.convert_to<double>()));
        if (out.max_drift > drift_cap)
            throw PrecisionExhausted("stieltjes: orthogonality drift " +
                                     std::to_string(out.max_drift) + " exceeds 10^-bits/8");
        out.b.push_back(bn.convert_to<double>());
        std::swap(pm2, pm1);
        std::swap(pm1, v);
        b_prev = bn;
    }
    return out;
}

inline double max_rel_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double d = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        d = std::max(d, std::abs(a[i] - b[i]) / std::abs(b[i]));
    return d;
}

// exp(-Q) at mpfloat precision. Built-in families are re-derived in mpfr so
// the grid invariant (agreement to 10^{-bits log10(2)/4}) is meaningful at
// high precision; Custom and Tabulated fall back to the double evaluator,
// which caps fidelity near 1e-15 relative.
inline std::function<mpfloat(const mpfloat&)> weight_mp(const WeightSpec& spec) {
    switch (spec.family) {
        case WeightFamily::GenHermite:
            return [](const mpfloat& w) -> mpfloat { return exp(-w * w); };
        case WeightFamily::GaussianRhoModel: {
            const mpfloat w0(spec.omega0);
            const mpfloat c = boost::math::lgamma(mpfloat((1.0 + spec.rho) / 2.0)) +
                              (1.0 + spec.rho) * log(w0);
            return [w0, c](const mpfloat& w) -> mpfloat { return exp(-(w / w0) * (w / w0) - c); };
        }
        case WeightFamily::Sech: {
            const mpfloat pi = boost::math::constants::pi<mpfloat>();
            return [pi](const mpfloat& w) -> mpfloat {
                // sech(pi w) = 2 e^{-pi w} / (1 + e^{-2 pi w}) for w >= 0
                const mpfloat e = exp(-pi * w);
                return 2 * e / (1 + e * e);
            };
        }
        case WeightFamily::QuarticRoot: {
            const double pinv = spec.quartic_pinv;
            return [pinv](const mpfloat& w) -> mpfloat {
                const mpfloat w2 = w * w;
                return exp(-pow(1 + w2 + w2 * w2, mpfloat(1.0 / pinv)));
            };
        }
        case WeightFamily::Freud: {
            const double p = spec.freud_p;
            const mpfloat kp = boost::math::tgamma(mpfloat(0.5)) *
                               boost::math::tgamma(mpfloat(p / 2)) /
                               boost::math::tgamma(mpfloat((p + 1) / 2));
            return [kp, p](const mpfloat& w) -> mpfloat { return exp(-kp * pow(w, mpfloat(p))); };
        }
        default: {
            auto q = spec.potential;
            return [q](const mpfloat& w) -> mpfloat {
                return exp(-mpfloat(q(w.convert_to<double>())));
            };
        }
    }
}

// omega_cut: past the weighted-polynomial bulk (1.25 beta_{n_max}) and far
// enough out that w has decayed by 10^{digits+10} from its bulk scale
inline double choose_cut(const WeightSpec& spec, int n_max, unsigned digits) {
    double cut = 1.25 * coulomb::mrs_number(spec, std::max(1, n_max));
    const double qmin = std::min({spec.potential(0.25), spec.potential(1.0), spec.potential(2.0)});
    const double target = qmin + (digits + 10.0) * std::log(10.0);
    while (spec.potential(cut) < target && cut < 1e9) cut *= 1.25;
    return cut;
}

}  // namespace stieltjes_detail

struct StieltjesOptions {
    unsigned precision_bits = 512;
    int nodes_per_panel = 72;
    double panel_width = 0.75;
    int max_refine = 3;
    // refinement target for b; 0 means the grid default 10^{-bits log10(2)/4}.
    // Weights with kinks inside the support (compactly supported models) only
    // converge algebraically under node refinement and need a looser target.
    double grid_target_override = 0.0;
};

inline LanczosSequence stieltjes_coefficients(const WeightSpec& spec, int n_max,
                                              const StieltjesOptions& opt = {}) {
    if (n_max < 1) throw std::invalid_argument("stieltjes_coefficients: n_max >= 1");
    if (opt.precision_bits < 128)
        throw std::invalid_argument("stieltjes_coefficients: precision_bits >= 128");
    if (spec.rho <= -1.0) throw NonIntegrable("stieltjes_coefficients: rho <= -1");
    if (std::isfinite(spec.growth_p) && spec.growth_p < 1.0)
        throw IndeterminateMomentRegime(
            "stieltjes_coefficients: weights with p < 1 (slower than exponential decay) "
            "have an indeterminate moment problem and are refused");

    const unsigned digits = bits_to_digits10(opt.precision_bits);
    PrecisionGuard guard(digits);

    const double cut = stieltjes_detail::choose_cut(spec, n_max, digits);
    const auto wmp = stieltjes_detail::weight_mp(spec);

    // refine node count until b stabilizes to the grid target 10^{-d},
    // d = precision_bits log10(2)/4 (capped by what double output resolves)
    const double grid_target =
        opt.grid_target_override > 0
            ? opt.grid_target_override
            : std::max(1e-15, std::pow(10.0, -opt.precision_bits * 0.30103 / 4.0));
    int nodes = opt.nodes_per_panel;
    auto grid = build_weight_grid(spec.rho, cut, wmp, nodes, opt.precision_bits, opt.panel_width);
    auto pass = stieltjes_detail::run(grid, n_max, opt.precision_bits);
    double reached = -1;
    for (int lvl = 0; lvl < opt.max_refine; ++lvl) {
        nodes = nodes * 3 / 2;
        auto grid2 =
            build_weight_grid(spec.rho, cut, wmp, nodes, opt.precision_bits, opt.panel_width);
        auto pass2 = stieltjes_detail::run(grid2, n_max, opt.precision_bits);
        reached = stieltjes_detail::max_rel_diff(pass.b, pass2.b);
        pass = std::move(pass2);
        grid = std::move(grid2);
        if (reached <= grid_target) break;
    }
    if (reached > std::sqrt(grid_target))
        throw PrecisionExhausted("stieltjes: quadrature refinement stalled at rel " +
                                 std::to_string(reached));

    LanczosSequence seq;
    seq.b = std::move(pass.b);
    seq.norm2 = pass.norm2;
    seq.meta["weight"] = spec.tag;
    seq.meta["rho"] = meta_num(spec.rho);
    seq.meta["n"] = std::to_string(n_max);
    seq.meta["precision_bits"] = std::to_string(opt.precision_bits);
    seq.meta["nodes_per_panel"] = std::to_string(nodes);
    seq.meta["omega_cut"] = meta_num(cut);
    seq.meta["orthogonality_drift"] = meta_num(pass.max_drift);
    seq.meta["method"] = "stieltjes";
    return seq;
}

struct ReconstructOptions {
    unsigned precision_bits = 160;
    int nodes_per_panel = 48;
    double panel_width = 0.75;
    double refine_tol = 1e-3;  // GridTooCoarse threshold on b_{n_max}
};

// Lanczos coefficients from a tabulated spectral estimate (the Fig. 5c
// round-trip): same recurrence, quadrature restricted to the tabulated range.
inline LanczosSequence reconstruct_coefficients(const WeightSpec& phi, int n_max,
                                                const ReconstructOptions& opt = {}) {
    if (phi.family != WeightFamily::Tabulated)
        throw std::invalid_argument("reconstruct_coefficients: Tabulated weight required");
    if (n_max < 1) throw std::invalid_argument("reconstruct_coefficients: n_max >= 1");
    PrecisionGuard guard(bits_to_digits10(opt.precision_bits));

    auto table = phi.table;
    const double cut = table->x_max();
    auto wmp = [table](const mpfloat& w) {
        const double v = std::max(0.0, (*table)(w.convert_to<double>()));
        return mpfloat(v);
    };

    auto grid = build_weight_grid(0.0, cut, wmp, opt.nodes_per_panel, opt.precision_bits,
                                  opt.panel_width);
    auto pass = stieltjes_detail::run(grid, n_max, opt.precision_bits);
    auto grid2 = build_weight_grid(0.0, cut, wmp, opt.nodes_per_panel * 2, opt.precision_bits,
                                   opt.panel_width / 2);
    auto pass2 = stieltjes_detail::run(grid2, n_max, opt.precision_bits);
    const double diff =
        std::abs(pass.b.back() - pass2.b.back()) / std::abs(pass2.b.back());
    if (diff > opt.refine_tol)
        throw GridTooCoarse("reconstruct_coefficients: refinement moved b_n by rel " +
                            std::to_string(diff));

    LanczosSequence seq;
    seq.b = std::move(pass2.b);
    seq.norm2 = pass2.norm2;
    seq.meta["weight"] = "tabulated";
    seq.meta["n"] = std::to_string(n_max);
    seq.meta["method"] = "stieltjes-reconstruct";
    return seq;
}

}  // namespace krylov
