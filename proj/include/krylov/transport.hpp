// transport.hpp — hydrodynamic coefficients from Lanczos data: the finite-n
// estimate of lim Phi(omega)/|omega|^rho, diffusion constants via the Einstein
// relation, the Heisenberg superdiffusion coefficient gamma, 1/n
// extrapolation, and the zero-mode fit for the exponent rho.

#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "krylov/errors.hpp"
#include "krylov/ortho_poly.hpp"
#include "krylov/sequence.hpp"
#include "krylov/special.hpp"

namespace krylov {

struct TransportResult {
    std::vector<std::pair<int, double>> per_n;  // (coefficient count used, value)
    double intercept = 0;
    double stderr_intercept = 0;
    double power = 1.0;  // extrapolation in n^{-power}
    double chi = 0;
    double rho = 0;
    double norm2 = 0;
};

// ordinary least squares of y against n^{-power}
inline std::pair<double, double> extrapolate(const std::vector<std::pair<int, double>>& values,
                                             double power) {
    const std::size_t m = values.size();
    if (m < 3) throw InsufficientPoints("extrapolate: need at least 3 points");
    double su = 0, sy = 0, suu = 0, suy = 0;
    for (const auto& [n, y] : values) {
        const double u = std::pow(double(n), -power);
        su += u;
        sy += y;
        suu += u * u;
        suy += u * y;
    }
    const double det = m * suu - su * su;
    const double slope = (m * suy - su * sy) / det;
    const double intercept = (sy - slope * su) / m;
    double ss = 0;
    for (const auto& [n, y] : values) {
        const double u = std::pow(double(n), -power);
        const double r = y - intercept - slope * u;
        ss += r * r;
    }
    const double s2 = ss / std::max<std::size_t>(1, m - 2);
    const double ubar = su / m, sxx = suu - m * ubar * ubar;
    const double var_a = s2 * (1.0 / m + ubar * ubar / sxx);
    return {intercept, std::sqrt(std::max(0.0, var_a))};
}

// c_rho ||A||^2 [1 + sum_k (prod_{j<=k} b_{2j-1}/b_{2j})^2]^rho /
//   [beta_{2n} (prod_{j<=n} b_{2j-1}/b_{2j})^2]^{1+rho},
// c_rho = 4 pi (1+rho)^rho / Gamma((1+rho)/2)^2; beta_{2n} = 2 b_{2n} unless
// overridden. This is the finite-n estimate of lim Phi(omega)/|omega|^rho.
inline double envelope_at_zero(const LanczosSequence& seq, int n_even, double rho,
                               double beta_override = 0.0) {
    if (n_even % 2 != 0 || n_even < 2)
        throw std::invalid_argument("envelope_at_zero: even index >= 2 required");
    if (n_even > seq.size()) throw std::invalid_argument("envelope_at_zero: index > len(b)");
    if (rho <= -1.0) throw NonIntegrable("envelope_at_zero: rho <= -1");
    const double g = special::gamma_fn((1.0 + rho) / 2.0);
    const double c_rho = 4.0 * M_PI * std::pow(1.0 + rho, rho) / (g * g);
    const double beta = beta_override > 0 ? beta_override : 2.0 * seq.at(n_even);

    // log-domain ratio products; the bracket is K_{2n}(0,0) * ||A||^2
    double log_prod = 0.0, bracket = 1.0;
    const int half = n_even / 2;
    for (int k = 1; k <= half; ++k) {
        log_prod += 2.0 * (std::log(seq.at(2 * k - 1)) - std::log(seq.at(2 * k)));
        if (k < half) bracket += std::exp(log_prod);
    }
    const double log_val = std::log(c_rho) + std::log(seq.norm2) + rho * std::log(bracket) -
                           (1.0 + rho) * (std::log(beta) + log_prod);
    return std::exp(log_val);
}

// D = sigma_dc / chi with sigma_dc = Phi(0)/2 (rho = 0)
inline TransportResult diffusion_constant(const LanczosSequence& seq, double chi,
                                          int n_min_even = 2) {
    if (!(chi > 0)) throw std::invalid_argument("diffusion_constant: chi > 0");
    TransportResult r;
    r.chi = chi;
    r.rho = 0;
    r.norm2 = seq.norm2;
    r.power = 1.0;
    for (int m = std::max(2, n_min_even); m <= seq.size(); m += 2)
        r.per_n.emplace_back(m, envelope_at_zero(seq, m, 0.0) / (2.0 * chi));
    if (r.per_n.size() >= 3)
        std::tie(r.intercept, r.stderr_intercept) = extrapolate(r.per_n, 1.0);
    return r;
}

// gamma = (chi sqrt3 / Gamma(1/3)) lim Phi/|omega|^{-1/3}; returns the 1/n and
// 1/n^{3/2} extrapolations (the paper privileges neither)
inline std::pair<TransportResult, TransportResult> superdiffusion_gamma(
    const LanczosSequence& seq, double chi = 0.25, double rho = -1.0 / 3.0) {
    if (rho != -1.0 / 3.0)
        throw std::invalid_argument("superdiffusion_gamma: the t^{1/3} growth law fixes rho = -1/3");
    const double pref = chi * std::sqrt(3.0) / special::gamma_fn(1.0 / 3.0);
    TransportResult r;
    r.chi = chi;
    r.rho = rho;
    r.norm2 = seq.norm2;
    for (int m = 2; m <= seq.size(); m += 2)
        r.per_n.emplace_back(m, pref * envelope_at_zero(seq, m, rho));
    TransportResult r32 = r;
    r.power = 1.0;
    r32.power = 1.5;
    if (r.per_n.size() >= 3) {
        std::tie(r.intercept, r.stderr_intercept) = extrapolate(r.per_n, 1.0);
        std::tie(r32.intercept, r32.stderr_intercept) = extrapolate(r32.per_n, 1.5);
    }
    return {r, r32};
}

// GHD spin diffusion constant of the XXZ chain at anisotropy Delta > 1:
// D = (2 sinh eta / 9 pi) sum_{s>=1} (1+s)[(s+2)/sinh(eta s) - s/sinh(eta(s+2))],
// eta = arcosh(Delta); summed until the term drops below 1e-14.
inline double xxz_ghd_diffusion(double delta) {
    if (!(delta > 1.0)) throw std::invalid_argument("xxz_ghd_diffusion: Delta > 1");
    const double eta = std::acosh(delta);
    double sum = 0;
    for (int s = 1; s < 100000; ++s) {
        const double term =
            (1.0 + s) * ((s + 2.0) / std::sinh(eta * s) - s / std::sinh(eta * (s + 2.0)));
        sum += term;
        if (std::abs(term) < 1e-14) break;
    }
    return 2.0 * std::sinh(eta) / (9.0 * M_PI) * sum;
}

// GHD prediction for the Heisenberg superdiffusion coefficient
inline double ghd_gamma_target() { return 2.0 / 3.0 * std::pow(10.0 * M_PI / 27.0, 4.0 / 3.0); }

struct RhoFit {
    double rho = 0;
    double stderr_rho = 0;
    std::size_t points = 0;
};

// Least-squares fit of log p_{2n}(0)^2 against the zero-mode scaling law for
// given (p, q):
//   p > 1:  log p_{2n}(0)^2 = C + rho x_n + off_n,
//           x_n = (1 - 1/p) log n + (q/p) loglog n,  off_n = -(1/p) log n + (q/p) loglog n
//   p = 1:  log p_{2n}(0)^2 = C - log n + (rho + q(1+rho)) loglog n
// The fit uses the upper three quarters of the available even indices; the
// p = 1 case is refused by default (convergence of h_n(0) is polylog-slow and
// n must be extremely large before the fit is meaningful).
inline RhoFit estimate_rho(const LanczosSequence& seq, double p, double q, bool force = false) {
    if (!(p >= 1.0)) throw std::invalid_argument("estimate_rho: p >= 1");
    if (p == 1.0 && !force)
        throw std::invalid_argument(
            "estimate_rho: refusing p = 1 (quasi-linear coefficients need extremely large n "
            "before the zero-mode fit converges; pass force to override)");

    std::vector<double> xs, ys;
    const int half_max = seq.size() / 2;
    for (int k = std::max(2, half_max / 4); k <= half_max; ++k) {
        const double n = k;
        const double ln = std::log(n), lln = std::log(std::log(n));
        const double logp2 = log_zero_mode_amplitude(seq, 2 * k);
        if (p > 1.0) {
            xs.push_back((1.0 - 1.0 / p) * ln + (q / p) * lln);
            ys.push_back(logp2 - (-(1.0 / p) * ln + (q / p) * lln));
        } else {
            xs.push_back(lln);
            ys.push_back(logp2 + ln);
        }
    }
    if (xs.size() < 3) throw InsufficientPoints("estimate_rho: need at least 3 even indices");

    const std::size_t m = xs.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < m; ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    const double det = m * sxx - sx * sx;
    const double slope = (m * sxy - sx * sy) / det;
    const double icept = (sy - slope * sx) / m;
    double ss = 0;
    for (std::size_t i = 0; i < m; ++i) {
        const double r = ys[i] - icept - slope * xs[i];
        ss += r * r;
    }
    const double s2 = ss / std::max<std::size_t>(1, m - 2);
    const double var_slope = s2 * m / det;

    RhoFit fit;
    fit.points = m;
    if (p > 1.0) {
        fit.rho = slope;
        fit.stderr_rho = std::sqrt(std::max(0.0, var_slope));
    } else {
        fit.rho = (slope - q) / (1.0 + q);
        fit.stderr_rho = std::sqrt(std::max(0.0, var_slope)) / (1.0 + q);
    }
    if (fit.stderr_rho > 0.5)
        throw FitUnstable("estimate_rho: stderr " + std::to_string(fit.stderr_rho) + " > 0.5");
    return fit;
}

}  // namespace krylov
