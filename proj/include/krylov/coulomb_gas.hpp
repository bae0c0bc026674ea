// coulomb_gas.hpp — equilibrium-measure problem for the potential Q:
// MRS numbers beta_n, the bulk density factor h_n(x), the equilibrium density
// sigma_n(omega) with its cumulative I_n, and the Ullman reference measures.

#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "krylov/errors.hpp"
#include "krylov/mp.hpp"
#include "krylov/parallel.hpp"
#include "krylov/weights.hpp"

namespace krylov {

struct EquilibriumMeasure {
    int n = 0;
    double beta_n = 0;
    std::vector<double> grid;        // omega in [0, beta_n]
    std::vector<double> sigma;       // sigma_n(omega)
    std::vector<double> cumulative;  // I_n(omega) = int_0^omega sigma_n
};

namespace coulomb {

namespace detail {

struct GlRule {
    std::vector<double> x, w;
};

inline const GlRule& gl24() {
    static const GlRule rule = [] {
        PrecisionGuard guard(30);
        auto r = quad::gauss_jacobi(24, 0.0);
        GlRule out;
        for (std::size_t i = 0; i < r->nodes.size(); ++i) {
            out.x.push_back(r->nodes[i].convert_to<double>());
            out.w.push_back(r->weights[i].convert_to<double>());
        }
        return out;
    }();
    return rule;
}

// Recursive adaptive Gauss-Legendre. Panels are bisected until the two-half
// refinement changes the panel integral by less than a width-scaled share of
// the global tolerance; sharp localized features (the 1/beta_n-wide rise of
// V' near s = 0 for quasi-linear potentials, the Taylor-branch jump of the
// h_n integrand) cost only a logarithmic number of extra panels.
template <typename F>
double panel_gl(F&& f, double a, double b) {
    const auto& r = gl24();
    const double half = (b - a) / 2, mid = (a + b) / 2;
    double s = 0;
    for (std::size_t i = 0; i < r.x.size(); ++i) s += r.w[i] * f(mid + half * r.x[i]);
    return half * s;
}

template <typename F>
double adaptive(F&& f, double a, double b, double rtol, int max_depth = 36) {
    const double coarse = panel_gl(f, a, b);
    const double scale = std::max(std::abs(coarse), 1e-12);
    double bad = 0;  // error accepted at the depth cap or at a noise stall

    auto rec = [&](auto&& self, double pa, double pb, double whole, double parent_err,
                   int depth) -> double {
        const double mid = 0.5 * (pa + pb);
        const double left = panel_gl(f, pa, mid), right = panel_gl(f, mid, pb);
        const double err = std::abs(left + right - whole);
        const double tol = (rtol * scale + 1e-14) * std::sqrt((pb - pa) / (b - a));
        // roundoff floor relative to the panel's own magnitude
        const double floor = 1e-14 * (std::abs(left) + std::abs(right));
        if (err <= tol || err <= floor) return left + right;
        // noise stall: splitting no longer reduces an error that is already
        // tiny relative to the panel magnitude — the integrand's own
        // evaluation noise has been reached and refinement cannot help.
        // Unresolved *features* keep err comparable to the panel magnitude
        // and are excluded by the magnitude test.
        const bool stalled = depth >= 12 && err >= 0.25 * parent_err &&
                             err <= 1e-6 * (std::abs(left) + std::abs(right));
        if (depth >= max_depth || stalled) {
            bad += err;
            return left + right;
        }
        return self(self, pa, mid, left, err, depth + 1) +
               self(self, mid, pb, right, err, depth + 1);
    };
    const double result =
        rec(rec, a, b, coarse, std::numeric_limits<double>::infinity(), 0);
    if (bad > 1e-6 * std::max(std::abs(result), scale))
        throw QuadratureNonConvergent("coulomb quadrature did not converge");
    return result;
}

}  // namespace detail

// LHS of the MRS equation: (1/2pi) int_{-1}^1 beta s Q'(beta s)/sqrt(1-s^2) ds,
// evaluated as (1/pi) int_0^{pi/2} beta sin(t) Q'(beta sin(t)) dt.
inline double charge_of_beta(const WeightSpec& spec, double beta) {
    return detail::adaptive(
               [&](double t) {
                   const double s = std::sin(t);
                   return beta * s * spec.potential_deriv(beta * s);
               },
               0.0, M_PI / 2, 1e-12) /
           M_PI;
}

struct MrsOptions {
    double rel_tol = 1e-12;
    double beta_cap = 1e12;
};

inline double mrs_number(const WeightSpec& spec, double n, const MrsOptions& opt = {}) {
    if (n < 1) throw std::invalid_argument("mrs_number: n >= 1");
    // a probe past a hard support edge (compactly supported weights) makes the
    // charge integral diverge; treat a non-convergent probe as above-target
    auto charge = [&](double beta) {
        try {
            return charge_of_beta(spec, beta);
        } catch (const QuadratureNonConvergent&) {
            return std::numeric_limits<double>::infinity();
        }
    };
    const double p_guess = std::isfinite(spec.growth_p) ? spec.growth_p : 1.0;
    double lo = 0.0, hi = std::max(1.0, 2.0 * std::pow(n, 1.0 / p_guess));
    while (charge(hi) < n) {
        lo = hi;
        hi *= 2;
        if (hi > opt.beta_cap)
            throw NoBracket("mrs_number: charge never reaches n below the beta cap");
    }
    while ((hi - lo) > opt.rel_tol * hi) {
        const double mid = 0.5 * (lo + hi);
        (charge(mid) < n ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

struct HOptions {
    double rtol = 3e-11;
};

// h_n(x) = (1/pi) int_{-1}^1 (V'(s) - V'(x))/(s - x) ds / sqrt(1-s^2),
// V(x) = Q(beta_n x)/n. Near-coincidence |s-x| < delta uses the Taylor branch
// V''(x) + (1/2) V'''(x)(s-x); V''' from a central difference of Q''.
inline double h_function(const WeightSpec& spec, double n, double x, double beta_n,
                         const HOptions& opt = {}) {
    if (std::abs(x) > 1.0) throw std::invalid_argument("h_function: x in [-1,1]");
    const double bn = beta_n;
    auto Vp = [&](double s) { return bn / n * spec.potential_deriv(bn * s); };
    auto Vpp = [&](double s) { return bn * bn / n * spec.potential_second(bn * s); };
    const double delta = 1e-4 * (1.0 + std::abs(x));
    const double vpx = Vp(x), vppx = Vpp(x);
    const double h3 = 1e-3;
    const double vpppx = (Vpp(x + h3) - Vpp(x - h3)) / (2 * h3);

    auto integrand = [&](double t) {
        const double s = std::sin(t);
        const double d = s - x;
        if (std::abs(d) < delta) return vppx + 0.5 * vpppx * d;
        return (Vp(s) - vpx) / d;
    };
    return detail::adaptive(integrand, -M_PI / 2, M_PI / 2, opt.rtol) / M_PI;
}

inline double h_function(const WeightSpec& spec, double n, double x,
                         const HOptions& opt = {}) {
    return h_function(spec, n, x, mrs_number(spec, n), opt);
}

// sigma_n(omega) = (n/beta_n) (1/2pi) h_n(omega/beta_n) sqrt(1 - (omega/beta_n)^2)
inline EquilibriumMeasure equilibrium_density(const WeightSpec& spec, int n,
                                              std::vector<double> grid) {
    EquilibriumMeasure m;
    m.n = n;
    m.beta_n = mrs_number(spec, n);
    if (grid.empty()) throw std::invalid_argument("equilibrium_density: empty grid");
    for (double w : grid)
        if (w < 0 || w > m.beta_n * (1 + 1e-12))
            throw std::invalid_argument("equilibrium_density: grid must lie in [0, beta_n]");
    m.grid = std::move(grid);
    m.sigma.assign(m.grid.size(), 0.0);
    parallel_for(m.grid.size(), [&](std::size_t i) {
        const double x = std::min(1.0, m.grid[i] / m.beta_n);
        const double edge = std::max(0.0, 1.0 - x * x);
        if (edge == 0.0) {
            m.sigma[i] = 0.0;  // sqrt factor vanishes exactly at the endpoint
            return;
        }
        const double h = h_function(spec, n, x, m.beta_n);
        m.sigma[i] = (n / m.beta_n) * h * std::sqrt(edge) / (2 * M_PI);
    });
    m.cumulative.assign(m.grid.size(), 0.0);
    for (std::size_t i = 1; i < m.grid.size(); ++i)
        m.cumulative[i] = m.cumulative[i - 1] + 0.5 * (m.sigma[i] + m.sigma[i - 1]) *
                                                    (m.grid[i] - m.grid[i - 1]);
    return m;
}

inline std::vector<double> uniform_grid(double a, double b, int points) {
    std::vector<double> g(points);
    for (int i = 0; i < points; ++i) g[i] = a + (b - a) * i / double(points - 1);
    return g;
}

// Ullman distribution psi^(p)(x): closed forms at p = 1, 2, infinity, else
// (p/pi) int_0^{sqrt(1-x^2)} (x^2 + v^2)^{(p-2)/2} dv  (u = sqrt(x^2+v^2))
inline double ullman(double p, double x) {
    if (!(p > 0)) throw std::invalid_argument("ullman: p > 0");
    const double ax = std::abs(x);
    if (ax > 1.0) return 0.0;
    if (std::isinf(p)) return 1.0 / (M_PI * std::sqrt(std::max(1e-300, 1.0 - x * x)));
    if (p == 1.0) return std::atanh(std::sqrt(1.0 - x * x)) / M_PI;  // +inf at x=0
    if (p == 2.0) return 2.0 / M_PI * std::sqrt(1.0 - x * x);
    const double vmax = std::sqrt(std::max(0.0, 1.0 - x * x));
    if (vmax == 0.0) return 0.0;
    if (ax < 1e-12) {
        if (p <= 1.0) return std::numeric_limits<double>::infinity();
        return p / (M_PI * (p - 1.0)) * std::pow(vmax, p - 1.0);
    }
    return p / M_PI *
           detail::adaptive([&](double v) { return std::pow(x * x + v * v, (p - 2.0) / 2.0); },
                            0.0, vmax, 1e-11);
}

}  // namespace coulomb
}  // namespace krylov
