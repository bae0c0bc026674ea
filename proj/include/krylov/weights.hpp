// weights.hpp — spectral-weight models Phi(omega)/2pi = |omega|^rho * exp(-Q(omega))
//
// Built-in families carry analytic Q, Q', Q'' and (where known) closed-form
// Lanczos coefficients and Green's functions used as oracles elsewhere.

#pragma once

#include <atomic>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "krylov/errors.hpp"
#include "krylov/interp.hpp"
#include "krylov/special.hpp"

namespace krylov {

enum class WeightFamily {
    GenHermite,
    GaussianRhoModel,
    Sech,
    QuarticRoot,
    Freud,
    Tabulated,
    Custom,
};

struct WeightSpec {
    double rho = 0.0;
    std::function<double(double)> potential;         // Q(omega)
    std::function<double(double)> potential_deriv;   // Q'(omega)
    std::function<double(double)> potential_deriv2;  // Q''(omega), may be empty

    WeightFamily family = WeightFamily::Custom;
    std::string tag = "custom";

    // high-frequency growth exponent p in Q ~ |omega|^p (NaN when unknown).
    // The log-correction exponent q of the paper lives only in documentation:
    // sech-class weights have (p, q) = (1, 0), nothing here estimates q.
    double growth_p = std::numeric_limits<double>::quiet_NaN();

    double omega0 = 1.0;  // GaussianRhoModel scale
    double freud_p = 0.0;
    double quartic_pinv = 0.0;

    // closed-form \int Phi/2pi when known (used by oracles; NaN -> quadrature)
    double norm2_closed_form = std::numeric_limits<double>::quiet_NaN();

    std::shared_ptr<MonotoneCubic> table;  // Tabulated only: omega -> Phi/2pi
    std::shared_ptr<std::atomic<bool>> tabulated_extrapolation_flag;

    double potential_second(double w) const {
        if (potential_deriv2) return potential_deriv2(w);
        // 5-point central stencil, step per coulomb_gas design decision
        const double h = 1e-4;
        return (-potential_deriv(w + 2 * h) + 8 * potential_deriv(w + h) -
                8 * potential_deriv(w - h) + potential_deriv(w - 2 * h)) /
               (12 * h);
    }
};

inline double eval_weight(const WeightSpec& spec, double omega) {
    if (spec.rho <= -1.0)
        throw NonIntegrable("eval_weight: rho <= -1 is not integrable across 0");
    if (!std::isfinite(omega))
        throw std::invalid_argument("eval_weight: omega must be finite");
    if (spec.family == WeightFamily::Tabulated) {
        if (!spec.table->contains(omega) && !spec.table->contains(-omega)) {
            if (spec.tabulated_extrapolation_flag)
                spec.tabulated_extrapolation_flag->store(true);
            return 0.0;
        }
        const double x = spec.table->contains(omega) ? omega : -omega;
        return std::max(0.0, (*spec.table)(x));
    }
    if (spec.rho < 0.0 && omega == 0.0)
        throw EvalAtZeroSingularity("eval_weight: |omega|^rho diverges at 0 for rho < 0");
    const double pw = (spec.rho == 0.0) ? 1.0 : std::pow(std::abs(omega), spec.rho);
    return pw * std::exp(-spec.potential(omega));
}

namespace weights {

inline double kappa_p(double p) {
    return special::gamma_fn(0.5) * special::gamma_fn(p / 2) /
           special::gamma_fn((p + 1) / 2);
}

inline WeightSpec gen_hermite(double rho) {
    if (rho <= -1.0) throw NonIntegrable("gen_hermite: rho <= -1");
    WeightSpec s;
    s.rho = rho;
    s.family = WeightFamily::GenHermite;
    s.tag = "gen-hermite";
    s.growth_p = 2.0;
    s.potential = [](double w) { return w * w; };
    s.potential_deriv = [](double w) { return 2.0 * w; };
    s.potential_deriv2 = [](double) { return 2.0; };
    s.norm2_closed_form = special::gamma_fn((1.0 + rho) / 2.0);
    return s;
}

// Gaussian-rho solvable model: Phi/2pi = |w/w0|^rho exp[-(w/w0)^2] / (w0 Gamma((1+rho)/2)),
// normalized so that int Phi/2pi = 1.
inline WeightSpec gaussian_rho(double rho, double omega0 = 1.0) {
    if (rho <= -1.0) throw NonIntegrable("gaussian_rho: rho <= -1");
    if (omega0 <= 0.0) throw std::invalid_argument("gaussian_rho: omega0 must be > 0");
    WeightSpec s;
    s.rho = rho;
    s.family = WeightFamily::GaussianRhoModel;
    s.tag = "gaussian-rho";
    s.growth_p = 2.0;
    s.omega0 = omega0;
    const double c = std::log(special::gamma_fn((1.0 + rho) / 2.0)) +
                     (1.0 + rho) * std::log(omega0);
    s.potential = [omega0, c](double w) { return (w / omega0) * (w / omega0) + c; };
    s.potential_deriv = [omega0](double w) { return 2.0 * w / (omega0 * omega0); };
    s.potential_deriv2 = [omega0](double) { return 2.0 / (omega0 * omega0); };
    s.norm2_closed_form = 1.0;
    return s;
}

// Phi/2pi = |w|^rho sech(pi w); Q = log cosh(pi w), the p=1 marginal toy
inline WeightSpec sech(double rho) {
    if (rho <= -1.0) throw NonIntegrable("sech: rho <= -1");
    WeightSpec s;
    s.rho = rho;
    s.family = WeightFamily::Sech;
    s.tag = "sech";
    s.growth_p = 1.0;
    s.potential = [](double w) {
        const double x = std::abs(M_PI * w);
        // log cosh x = x + log((1+e^{-2x})/2), safe for large x
        return x + std::log1p(std::exp(-2.0 * x)) - std::log(2.0);
    };
    s.potential_deriv = [](double w) { return M_PI * std::tanh(M_PI * w); };
    s.potential_deriv2 = [](double w) {
        const double c = 1.0 / std::cosh(M_PI * w);
        return M_PI * M_PI * c * c;
    };
    if (rho == 0.0) s.norm2_closed_form = 1.0;  // int sech(pi w) dw = 1
    return s;
}

// Q = (1 + w^2 + w^4)^{1/pinv}; pinv=2 -> p=2, pinv=4 -> p=1 (Fig. 4 toys)
inline WeightSpec quartic_root(double rho, double pinv) {
    if (rho <= -1.0) throw NonIntegrable("quartic_root: rho <= -1");
    if (pinv < 2.0 || pinv > 4.0)
        throw std::invalid_argument("quartic_root: pinv must be in [2, 4]");
    WeightSpec s;
    s.rho = rho;
    s.family = WeightFamily::QuarticRoot;
    s.tag = "quartic-root";
    s.quartic_pinv = pinv;
    s.growth_p = 4.0 / pinv;
    s.potential = [pinv](double w) {
        const double u = 1.0 + w * w + w * w * w * w;
        return std::pow(u, 1.0 / pinv);
    };
    s.potential_deriv = [pinv](double w) {
        const double u = 1.0 + w * w + w * w * w * w;
        return (1.0 / pinv) * std::pow(u, 1.0 / pinv - 1.0) * (2.0 * w + 4.0 * w * w * w);
    };
    s.potential_deriv2 = [pinv](double w) {
        const double u = 1.0 + w * w + w * w * w * w;
        const double du = 2.0 * w + 4.0 * w * w * w;
        const double ddu = 2.0 + 12.0 * w * w;
        const double a = 1.0 / pinv;
        return a * std::pow(u, a - 2.0) * ((a - 1.0) * du * du + u * ddu);
    };
    return s;
}

// Pure Freud weight: Q = kappa_p |w|^p, beta_n = n^{1/p} exactly
inline WeightSpec freud(double p, double rho = 0.0) {
    if (rho <= -1.0) throw NonIntegrable("freud: rho <= -1");
    if (p <= 0.0) throw std::invalid_argument("freud: p must be > 0");
    WeightSpec s;
    s.rho = rho;
    s.family = WeightFamily::Freud;
    s.tag = "freud";
    s.freud_p = p;
    s.growth_p = p;
    const double kp = kappa_p(p);
    s.potential = [kp, p](double w) { return kp * std::pow(std::abs(w), p); };
    s.potential_deriv = [kp, p](double w) {
        if (w == 0.0) return 0.0;
        return kp * p * std::pow(std::abs(w), p - 1.0) * (w > 0 ? 1.0 : -1.0);
    };
    if (p >= 2.0) {
        s.potential_deriv2 = [kp, p](double w) {
            return kp * p * (p - 1.0) * std::pow(std::abs(w), p - 2.0);
        };
    }
    return s;
}

// Tabulated Phi/2pi on a nonuniform grid; evaluation beyond the grid returns 0
// and raises the extrapolation flag. Evenness assumed: negative omega mirrors.
inline WeightSpec tabulated(std::vector<double> omega, std::vector<double> phi_over_2pi) {
    WeightSpec s;
    s.rho = 0.0;
    s.family = WeightFamily::Tabulated;
    s.tag = "tabulated";
    s.table = std::make_shared<MonotoneCubic>(std::move(omega), std::move(phi_over_2pi));
    s.tabulated_extrapolation_flag = std::make_shared<std::atomic<bool>>(false);
    auto tbl = s.table;
    s.potential = [tbl](double w) {
        const double v = tbl->contains(std::abs(w)) ? (*tbl)(std::abs(w)) : 0.0;
        return -std::log(std::max(v, 1e-300));
    };
    s.potential_deriv = [tbl](double w) {
        const double x = std::abs(w);
        if (!tbl->contains(x)) return 0.0;
        const double v = std::max((*tbl)(x), 1e-300);
        const double d = tbl->derivative(x);
        return -(w >= 0 ? 1.0 : -1.0) * d / v;
    };
    return s;
}

inline WeightSpec custom(double rho, std::function<double(double)> Q,
                         std::function<double(double)> Qp,
                         std::function<double(double)> Qpp = nullptr,
                         double growth_p = std::numeric_limits<double>::quiet_NaN()) {
    if (rho <= -1.0) throw NonIntegrable("custom: rho <= -1");
    WeightSpec s;
    s.rho = rho;
    s.family = WeightFamily::Custom;
    s.tag = "custom";
    s.potential = std::move(Q);
    s.potential_deriv = std::move(Qp);
    s.potential_deriv2 = std::move(Qpp);
    s.growth_p = growth_p;
    return s;
}

// Asserts the WeightSpec invariants on a sample grid: evenness of Q and
// agreement of Q' with a central difference of Q to relative 1e-6.
inline void validate(const WeightSpec& spec) {
    if (spec.rho <= -1.0) throw NonIntegrable("validate: rho <= -1");
    if (spec.family == WeightFamily::Tabulated) return;
    for (double w : {0.13, 0.71, 1.9, 4.2, 9.7}) {
        const double qe = spec.potential(w) - spec.potential(-w);
        if (std::abs(qe) > 1e-10 * (1.0 + std::abs(spec.potential(w))))
            throw std::invalid_argument("WeightSpec: Q is not even at omega=" + std::to_string(w));
        const double h = 1e-6 * (1.0 + std::abs(w));
        const double fd = (spec.potential(w + h) - spec.potential(w - h)) / (2 * h);
        const double qp = spec.potential_deriv(w);
        if (std::abs(fd - qp) > 1e-6 * (1.0 + std::abs(qp)) * 10)
            throw std::invalid_argument("WeightSpec: Q' disagrees with finite difference");
    }
}

}  // namespace weights

// Closed-form Lanczos coefficients and seed norm for the two solvable families.
// GenHermite: b_n = (1/sqrt2) sqrt(n + (1/2)[1-(-1)^n] rho)
// GaussianRhoModel: b_{2k-1} = w0 sqrt((2k-1+rho)/2), b_{2k} = w0 sqrt(k)
struct LanczosClosedForm {
    std::vector<double> b;
    double norm2;
};

inline LanczosClosedForm reference_coefficients(const WeightSpec& spec, int n_max) {
    if (n_max < 1) throw std::invalid_argument("reference_coefficients: n_max >= 1");
    LanczosClosedForm out;
    out.b.reserve(n_max);
    switch (spec.family) {
        case WeightFamily::GenHermite:
            for (int n = 1; n <= n_max; ++n) {
                const double stag = (n % 2 == 1) ? 1.0 : 0.0;
                out.b.push_back(std::sqrt((n + stag * spec.rho) / 2.0));
            }
            out.norm2 = special::gamma_fn((1.0 + spec.rho) / 2.0);
            return out;
        case WeightFamily::GaussianRhoModel:
            for (int n = 1; n <= n_max; ++n) {
                if (n % 2 == 1)
                    out.b.push_back(spec.omega0 * std::sqrt((n + spec.rho) / 2.0));
                else
                    out.b.push_back(spec.omega0 * std::sqrt(n / 2.0));
            }
            out.norm2 = 1.0;
            return out;
        default:
            throw NoClosedForm("reference_coefficients: only GenHermite and GaussianRhoModel");
    }
}

// Exact Green's function of the GaussianRhoModel, standard resolvent
// convention G(z) = int (Phi/2pi)(w) / (z - w) dw, so that
// Phi(omega) = -/+ 2 Im G(omega +/- i eps).
inline std::complex<double> reference_green(const WeightSpec& spec, std::complex<double> z) {
    if (spec.family != WeightFamily::GaussianRhoModel)
        throw NoClosedForm("reference_green: GaussianRhoModel only");
    const double w0 = spec.omega0;
    const std::complex<double> u = z / w0;
    // e^{-u^2} E_nu(-u^2) in its overflow-safe scaled form
    return -(z / (w0 * w0)) * special::expint_en_scaled((1.0 + spec.rho) / 2.0, -u * u);
}

}  // namespace krylov
