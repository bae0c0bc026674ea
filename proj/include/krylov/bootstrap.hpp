// bootstrap.hpp — the three spectral-bootstrap ODE solvers.
//
// Each solver integrates a first-order ODE for the cumulative equilibrium
// density (bulk, Bessel) or the phase function f_n (Airy), recovering the
// spectral function pointwise from exact polynomial data along the way. The
// default integrator is explicit Euler, exactly the published numbered steps;
// a 4th-order Runge-Kutta variant sits behind an option for runs that need
// integration error well below the asymptotic error.

#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "krylov/errors.hpp"
#include "krylov/greens.hpp"
#include "krylov/ortho_poly.hpp"
#include "krylov/sequence.hpp"
#include "krylov/special.hpp"

namespace krylov {

enum class Integrator { Euler, Rk4 };

struct SpectralEstimate {
    int n = 0;
    double rho = 0;
    double beta_n = 0;
    double d_omega = 0;
    std::string solver;     // "bulk" | "bessel" | "airy"
    bool envelope = false;  // true: phi column holds exp(-Q); else Phi(omega)
    std::vector<double> omega;
    std::vector<double> phi;
    std::vector<double> sigma;
    std::vector<double> cumulative;  // I_n
    std::vector<double> fn;          // airy only: f_n(omega/beta_n)

    // w(omega) = Phi(omega)/2pi at grid index i
    double weight_at(std::size_t i) const {
        if (!envelope) return phi[i] / (2 * M_PI);
        return std::pow(std::abs(omega[i]), rho) * phi[i];
    }
};

struct BootstrapOptions {
    double d_omega = 1e-3;
    Integrator integrator = Integrator::Euler;
    bool step_check = true;      // halve d_omega and compare (StepTooCoarse)
    double beta_override = 0.0;  // 0: use 2 b_n
    bool allow_odd_bessel = false;
    bool full_bessel = false;  // keep the subleading staggered terms
};

namespace bootstrap_detail {

inline double sign_n(int n) { return (n % 2 == 0) ? 1.0 : -1.0; }

// clamp tiny negative sigma from roundoff; anything materially negative aborts
inline double check_sigma(double s, double scale, double omega, const char* solver) {
    if (s >= 0) return s;
    if (s > -1e-12 * std::max(1.0, scale)) return 0.0;
    throw SigmaNegative(std::string(solver) + ": sigma_n(" + std::to_string(omega) +
                        ") = " + std::to_string(s) + " < 0");
}

template <typename F>
double advance(Integrator kind, double omega, double state, double h, F&& deriv) {
    if (kind == Integrator::Euler) return state + h * deriv(omega, state);
    const double k1 = deriv(omega, state);
    const double k2 = deriv(omega + h / 2, state + h / 2 * k1);
    const double k3 = deriv(omega + h / 2, state + h / 2 * k2);
    const double k4 = deriv(omega + h, state + h * k3);
    return state + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
}

}  // namespace bootstrap_detail

// ------------------------------ bulk (rho = 0) ------------------------------

namespace bootstrap_detail {

struct BulkEqs {
    const LanczosSequence& seq;
    int n;
    double beta;
    double sgn;

    double phi(double w, double I) const {
        const auto e = eval_polys(seq, w, n);
        const double pp = e.values[n - 1] * e.values[n - 1] + e.values[n] * e.values[n];
        return 4.0 / beta * (beta - sgn * w * std::sin(2 * M_PI * I)) /
               (pp * std::sqrt(beta * beta - w * w));
    }

    double sigma(double w, double I) const {
        const auto e = eval_polys(seq, w, n);
        const double pp = e.values[n - 1] * e.values[n - 1] + e.values[n] * e.values[n];
        const double phi_v = 4.0 / beta * (beta - sgn * w * std::sin(2 * M_PI * I)) /
                             (pp * std::sqrt(beta * beta - w * w));
        const double kn =
            seq.at(n) * (e.values[n - 1] * e.derivs[n] - e.derivs[n - 1] * e.values[n]);
        return phi_v / (2 * M_PI) * kn +
               sgn * beta * std::cos(2 * M_PI * I) / (2 * M_PI * (beta * beta - w * w));
    }
};

inline SpectralEstimate bulk_solve(const LanczosSequence& seq, int n, double omega0, double I0,
                                   double omega_max, const BootstrapOptions& opt) {
    const double beta = opt.beta_override > 0 ? opt.beta_override : 2.0 * seq.at(n);
    BulkEqs eq{seq, n, beta, sign_n(n)};
    SpectralEstimate est;
    est.n = n;
    est.rho = 0;
    est.beta_n = beta;
    est.d_omega = opt.d_omega;
    est.solver = "bulk";

    auto deriv = [&](double w, double I) { return eq.sigma(w, I); };
    double w = omega0, I = I0;
    double sigma_scale = 0;
    while (w <= omega_max + 1e-12 * omega_max) {
        const double phi_v = eq.phi(w, I);
        double sigma_v = eq.sigma(w, I);
        sigma_v = check_sigma(sigma_v, sigma_scale, w, "bulk_bootstrap");
        sigma_scale = std::max(sigma_scale, sigma_v);
        est.omega.push_back(w);
        est.phi.push_back(phi_v);
        est.sigma.push_back(sigma_v);
        est.cumulative.push_back(I);
        I = advance(opt.integrator, w, I, opt.d_omega, deriv);
        w += opt.d_omega;
    }
    return est;
}

}  // namespace bootstrap_detail

inline SpectralEstimate bulk_bootstrap(const LanczosSequence& seq, int n, double omega_max,
                                       const BootstrapOptions& opt = {}) {
    if (n < 1 || n > seq.size()) throw std::invalid_argument("bulk_bootstrap: 1 <= n <= len(b)");
    const double beta = opt.beta_override > 0 ? opt.beta_override : 2.0 * seq.at(n);
    if (!(omega_max > 0) || omega_max >= beta)
        throw std::invalid_argument("bulk_bootstrap: need 0 < omega_max < beta_n");
    if (!(opt.d_omega > 0)) throw std::invalid_argument("bulk_bootstrap: d_omega > 0");

    auto est = bootstrap_detail::bulk_solve(seq, n, 0.0, 0.0, omega_max, opt);
    if (opt.step_check) {
        BootstrapOptions half = opt;
        half.step_check = false;
        half.d_omega = opt.d_omega / 2;
        auto fine = bootstrap_detail::bulk_solve(seq, n, 0.0, 0.0, omega_max, half);
        const double a = est.phi.back(), b = fine.phi.back();
        if (std::abs(a - b) > 1e-3 * std::abs(b))
            throw StepTooCoarse("bulk_bootstrap: halving d_omega moved Phi(omega_max) by rel " +
                                std::to_string(std::abs(a - b) / std::abs(b)));
    }
    return est;
}

// Bulk bootstrap started at a nonzero frequency: Phi(omega0) is seeded from the
// semicircle-terminator continued fraction, I_n(omega0) mod 1 is solved from
// the Phi equation, and the cos branch is picked by matching the continued
// fraction at omega0 + d_omega.
inline SpectralEstimate bulk_bootstrap_from(const LanczosSequence& seq, int n, double omega0,
                                            double omega_max, const BootstrapOptions& opt = {}) {
    if (!(omega0 > 0)) throw std::invalid_argument("bulk_bootstrap_from: omega0 > 0");
    const double beta = opt.beta_override > 0 ? opt.beta_override : 2.0 * seq.at(n);
    bootstrap_detail::BulkEqs eq{seq, n, beta, bootstrap_detail::sign_n(n)};

    auto cf_phi = [&](double w) {
        const auto g = continued_fraction(seq, Terminator::semicircle(beta), n, w, Side::Minus);
        return 2.0 * g.imag();
    };
    const double phi0 = cf_phi(omega0);
    const auto e = eval_polys(seq, omega0, n);
    const double pp = e.values[n - 1] * e.values[n - 1] + e.values[n] * e.values[n];
    // invert the Phi equation for sin(2 pi I)
    double s = (beta - phi0 * pp * std::sqrt(beta * beta - omega0 * omega0) * beta / 4.0) /
               (eq.sgn * omega0);
    s = std::clamp(s, -1.0, 1.0);
    const double base = std::asin(s) / (2 * M_PI);  // cos > 0 branch
    const double alt = 0.5 - base;                  // cos < 0 branch
    // probe one step with each branch and keep the one tracking the CF value
    double best = base, err_best = std::numeric_limits<double>::infinity();
    for (double I0 : {base, alt}) {
        const double I1 = I0 + opt.d_omega * eq.sigma(omega0, I0);
        const double err = std::abs(eq.phi(omega0 + opt.d_omega, I1) - cf_phi(omega0 + opt.d_omega));
        if (err < err_best) {
            err_best = err;
            best = I0;
        }
    }
    return bootstrap_detail::bulk_solve(seq, n, omega0, best, omega_max, opt);
}

// --------------------------- Bessel (general rho) ---------------------------

namespace bootstrap_detail {

struct BesselEqs {
    const LanczosSequence& seq;
    int n;
    double rho;
    double beta;
    double sgn;
    bool full;  // keep the subleading staggered terms (supplement forms)

    // envelope exp(-Q) at (omega, I); the simplified form drops the term
    // proportional to sin{rho arcsin(omega/beta)}
    double envelope(double w, double I) const {
        const auto e = eval_polys(seq, w, n);
        const double pp = e.values[n - 1] * e.values[n - 1] + e.values[n] * e.values[n];
        const double x = M_PI * I;
        const double ja = special::bessel_j((rho - 1) / 2, x);
        const double jb = special::bessel_j((rho + 1) / 2, x);
        const double ang = rho * std::asin(std::min(1.0, w / beta));
        double bracket = ja * ja + jb * jb -
                         sgn * (w / beta) * 2.0 * ja * jb * std::cos(ang);
        if (full) bracket -= sgn * (w / beta) * (ja * ja - jb * jb) * std::sin(ang);
        return 1.0 / (pp * std::sqrt(beta * beta - w * w)) * (M_PI * I / std::pow(w, rho)) *
               bracket;
    }

    double sigma(double w, double I, double env) const {
        const auto e = eval_polys(seq, w, n);
        const double kn =
            seq.at(n) * (e.values[n - 1] * e.derivs[n] - e.derivs[n - 1] * e.values[n]);
        const double x = M_PI * I;
        const double ja = special::bessel_j((rho - 1) / 2, x);
        const double jb = special::bessel_j((rho + 1) / 2, x);
        const double jc = special::bessel_j((rho - 3) / 2, x);
        const double jd = special::bessel_j((rho + 3) / 2, x);
        const double combo = ja * ja + jb * jb - jc * jb - ja * jd;
        if (combo == 0.0) throw BesselDomain("bessel_bootstrap: vanishing Bessel combination");
        const double weight = std::pow(w, rho) * env;
        if (!full) return 4.0 / M_PI * kn * weight / (M_PI * I) / combo;
        // solve the full K_n expression for sigma
        const double ang = rho * std::asin(std::min(1.0, w / beta));
        const double sub1 = rho * (ja * ja + jb * jb) / std::sqrt(beta * beta - w * w);
        const double sub2 = sgn * beta / (beta * beta - w * w) *
                            ((jb * jb - ja * ja) * std::cos(ang) + 2 * ja * jb * std::sin(ang));
        return (4.0 * kn * weight / (M_PI * I) - sub1 - sub2) / (M_PI * combo);
    }

    // omega = 0 initial values (limits of the finite-omega equations)
    double envelope0() const {
        const auto e = eval_polys(seq, 0.0, n);
        const double pp = e.values[n - 1] * e.values[n - 1] + e.values[n] * e.values[n];
        const double k0 = cd_kernel(seq, 0.0, 0.0, n);
        const double g = special::gamma_fn((1 + rho) / 2);
        return 2.0 * std::pow(1.0 + rho, rho) / (g * g) * std::pow(k0, rho) /
               std::pow(beta * pp, 1.0 + rho);
    }

    double sigma0(double env0) const {
        const double k0 = cd_kernel(seq, 0.0, 0.0, n);
        const double g1 = special::gamma_fn((1 + rho) / 2), g3 = special::gamma_fn((3 + rho) / 2);
        return 2.0 / M_PI * std::pow(g1 * g3 * env0 * k0, 1.0 / (1.0 + rho));
    }
};

inline SpectralEstimate bessel_solve(const LanczosSequence& seq, int n, double rho,
                                     double omega_max, const BootstrapOptions& opt) {
    const double beta = opt.beta_override > 0 ? opt.beta_override : 2.0 * seq.at(n);
    BesselEqs eq{seq, n, rho, beta, sign_n(n), opt.full_bessel};
    SpectralEstimate est;
    est.n = n;
    est.rho = rho;
    est.beta_n = beta;
    est.d_omega = opt.d_omega;
    est.solver = "bessel";
    est.envelope = true;

    const double env0 = eq.envelope0();
    const double sig0 = eq.sigma0(env0);

    auto deriv = [&](double w, double I) {
        if (w <= 0 || I <= 0) return sig0;
        return eq.sigma(w, I, eq.envelope(w, I));
    };

    double w = 0, I = 0;
    double sigma_scale = 0;
    while (w <= omega_max + 1e-12 * std::max(1.0, omega_max)) {
        double phi_v, sigma_v;
        if (w == 0.0) {
            phi_v = env0;
            sigma_v = sig0;
        } else {
            phi_v = eq.envelope(w, I);
            sigma_v = eq.sigma(w, I, phi_v);
        }
        sigma_v = check_sigma(sigma_v, sigma_scale, w, "bessel_bootstrap");
        sigma_scale = std::max(sigma_scale, sigma_v);
        if (phi_v < 0)
            throw NegativePhi("bessel_bootstrap: negative envelope at omega = " + std::to_string(w));
        est.omega.push_back(w);
        est.phi.push_back(phi_v);
        est.sigma.push_back(sigma_v);
        est.cumulative.push_back(I);
        I = advance(opt.integrator, w, I, opt.d_omega, deriv);
        w += opt.d_omega;
    }
    return est;
}

}  // namespace bootstrap_detail

inline SpectralEstimate bessel_bootstrap(const LanczosSequence& seq, int n, double rho,
                                         double omega_max, const BootstrapOptions& opt = {}) {
    if (n < 1 || n > seq.size())
        throw std::invalid_argument("bessel_bootstrap: 1 <= n <= len(b)");
    if (rho <= -1.0) throw NonIntegrable("bessel_bootstrap: rho <= -1");
    if (n % 2 != 0 && !opt.allow_odd_bessel)
        throw std::invalid_argument(
            "bessel_bootstrap: even n required (the (-1)^n staggering differs between the even "
            "and odd subsequences); pass allow_odd_bessel to override");
    if (!(opt.d_omega > 0)) throw std::invalid_argument("bessel_bootstrap: d_omega > 0");

    auto est = bootstrap_detail::bessel_solve(seq, n, rho, omega_max, opt);
    if (opt.step_check) {
        BootstrapOptions half = opt;
        half.step_check = false;
        half.d_omega = opt.d_omega / 2;
        auto fine = bootstrap_detail::bessel_solve(seq, n, rho, omega_max, half);
        const double a = est.phi.back(), b = fine.phi.back();
        if (std::abs(a - b) > 1e-3 * std::abs(b))
            throw StepTooCoarse("bessel_bootstrap: halving d_omega moved the envelope by rel " +
                                std::to_string(std::abs(a - b) / std::abs(b)));
    }
    return est;
}

// ------------------------------- Airy (edge) --------------------------------

namespace bootstrap_detail {

struct AiryEqs {
    const LanczosSequence& seq;
    int n;
    double rho;
    double beta;

    // h_n(1) from the edge values of p_n, p_{n-1}: with g = (2 n h_n(1))^{1/6},
    //   p_n(beta)   ~ g Ai(0) - (rho+1) Ai'(0)/g
    //   p_{n-1}(beta) ~ g Ai(0) - (rho-1) Ai'(0)/g
    // so g^2 = (Ai'(0)/Ai(0)) [rho - (p_n + p_{n-1})/(p_n - p_{n-1})]
    double hn1_estimate() const {
        const auto e = eval_polys(seq, beta, n);
        const double pn = e.values[n], pnm1 = e.values[n - 1];
        const double ratio = (pn + pnm1) / (pn - pnm1);
        const double ai_ratio = special::airy_ai0_prime() / special::airy_ai0();
        const double c = rho - ratio;
        return 1.0 / (2.0 * n) * ai_ratio * ai_ratio * ai_ratio * c * c * c;
    }

    double phi_endpoint(double fp1) const {
        const auto e = eval_polys(seq, beta, n);
        const double pn2 = e.values[n] * e.values[n];
        const double v = std::pow(2 * fp1, 0.25) * special::airy_ai0() -
                         (1 + rho) * std::pow(2 * fp1, -0.25) * special::airy_ai0_prime();
        return 2 * M_PI / (beta * pn2) * v;
    }

    // Phi(omega) from (x = omega/beta, f = f_n(x))
    double phi(double x, double f) const {
        if (f >= 0) throw AiryDomain("airy_bootstrap: f_n must be negative below the edge");
        const double w = x * beta;
        const auto e = eval_polys(seq, w, n);
        const double pp = e.values[n] * e.values[n] + e.values[n - 1] * e.values[n - 1];
        const double ai = special::airy_ai(f), aip = special::airy_ai_prime(f);
        const double cosr = std::cos(rho * std::acos(std::clamp(x, -1.0, 1.0)));
        const double sinr = std::sin(rho * std::acos(std::clamp(x, -1.0, 1.0)));
        const double mf = -f;
        const double bracket = -2 * x * ai * aip * sinr +
                               std::sqrt(mf) * ai * ai * (x * cosr + 1) -
                               aip * aip / std::sqrt(mf) * (x * cosr - 1);
        return 2 * M_PI * 2.0 / beta / pp / std::sqrt(1 - x * x) * bracket;
    }

    // f_n'(x) from (x, f, Phi)
    double fprime(double x, double f, double phi_v) const {
        const double w = x * beta;
        const double kn = cd_kernel(seq, w, w, n);
        const double ai = special::airy_ai(f), aip = special::airy_ai_prime(f);
        const double cosr = std::cos(rho * std::acos(std::clamp(x, -1.0, 1.0)));
        const double sinr = std::sin(rho * std::acos(std::clamp(x, -1.0, 1.0)));
        const double mf = -f;
        const double den = 2 * ai * ai * f * f - 2 * aip * aip * f - ai * aip;
        if (den == 0.0) throw AiryDomain("airy_bootstrap: vanishing denominator in f_n'");
        const double term1 = -2 * beta * (phi_v / (2 * M_PI)) * kn * f;
        const double term2 = 2.0 / (1 - x * x) * ai * aip * cosr * f;
        const double term3 = -sinr / (1 - x * x) *
                             (ai * ai * std::pow(mf, 1.5) - aip * aip * std::sqrt(mf));
        const double term4 =
            -rho / std::sqrt(1 - x * x) * (ai * ai * std::pow(mf, 1.5) + aip * aip * std::sqrt(mf));
        return (term1 + term2 + term3 + term4) / den;
    }
};

}  // namespace bootstrap_detail

inline SpectralEstimate airy_bootstrap(const LanczosSequence& seq, int n, double rho,
                                       double omega_min, const BootstrapOptions& opt = {}) {
    if (n < 1 || n > seq.size()) throw std::invalid_argument("airy_bootstrap: 1 <= n <= len(b)");
    const double beta = opt.beta_override > 0 ? opt.beta_override : 2.0 * seq.at(n);
    if (!(omega_min >= 0) || omega_min >= beta)
        throw std::invalid_argument("airy_bootstrap: need 0 <= omega_min < beta_n");
    if (!(opt.d_omega > 0)) throw std::invalid_argument("airy_bootstrap: d_omega > 0");

    bootstrap_detail::AiryEqs eq{seq, n, rho, beta};
    SpectralEstimate est;
    est.n = n;
    est.rho = rho;
    est.beta_n = beta;
    est.d_omega = opt.d_omega;
    est.solver = "airy";

    const double hn1 = eq.hn1_estimate();
    if (!(hn1 > 0)) throw AiryDomain("airy_bootstrap: nonpositive h_n(1) estimate");
    double fp = std::pow(n * hn1 / std::sqrt(2.0), 2.0 / 3.0);  // f_n'(1)
    double f = 0.0, w = beta;

    est.omega.push_back(w);
    est.phi.push_back(eq.phi_endpoint(fp));
    est.fn.push_back(f);
    est.sigma.push_back(0.0);  // sqrt vanishing at the edge
    est.cumulative.push_back(n / 2.0);

    while (w - opt.d_omega >= omega_min - 1e-12 * beta) {
        f -= fp * opt.d_omega / beta;
        w -= opt.d_omega;
        const double x = w / beta;
        const double phi_v = eq.phi(x, f);
        if (phi_v < 0)
            throw NegativePhi("airy_bootstrap: negative Phi at omega = " + std::to_string(w));
        fp = eq.fprime(x, f, phi_v);
        est.omega.push_back(w);
        est.phi.push_back(phi_v);
        est.fn.push_back(f);
        // I_n = n/2 - (2/3pi)(-f)^{3/2}, sigma = dI/domega
        est.sigma.push_back(std::sqrt(-f) * fp / (M_PI * beta));
        est.cumulative.push_back(n / 2.0 - 2.0 / (3 * M_PI) * std::pow(-f, 1.5));
    }
    // flip into ascending omega order
    std::reverse(est.omega.begin(), est.omega.end());
    std::reverse(est.phi.begin(), est.phi.end());
    std::reverse(est.fn.begin(), est.fn.end());
    std::reverse(est.sigma.begin(), est.sigma.end());
    std::reverse(est.cumulative.begin(), est.cumulative.end());
    return est;
}

}  // namespace krylov
