// universality.hpp — weighted Christoffel-Darboux kernel, spectral unfolding,
// and the sine / Bessel / Airy reference kernels.

#pragma once

#include <cmath>
#include <complex>
#include <memory>
#include <optional>
#include <vector>

#include "krylov/bootstrap.hpp"
#include "krylov/coulomb_gas.hpp"
#include "krylov/errors.hpp"
#include "krylov/interp.hpp"
#include "krylov/ortho_poly.hpp"
#include "krylov/special.hpp"
#include "krylov/weights.hpp"

namespace krylov {

// w(omega) = Phi(omega)/2pi, either analytic or tabulated from a bootstrap
// estimate (even extension; WeightUnavailable outside the tabulated range)
class WeightView {
public:
    explicit WeightView(WeightSpec spec) : spec_(std::move(spec)) {}

    explicit WeightView(const SpectralEstimate& est) : rho_(est.rho), envelope_(est.envelope) {
        std::vector<double> x, y;
        for (std::size_t i = 0; i < est.omega.size(); ++i) {
            x.push_back(est.omega[i]);
            y.push_back(est.envelope ? est.phi[i] : est.phi[i] / (2 * M_PI));
        }
        table_ = std::make_shared<MonotoneCubic>(std::move(x), std::move(y));
    }

    double operator()(double omega) const {
        if (spec_) return eval_weight(*spec_, omega);
        const double x = std::abs(omega);
        if (!table_->contains(x))
            throw WeightUnavailable("WeightView: omega outside the tabulated range");
        const double v = std::max(0.0, (*table_)(x));
        if (!envelope_) return v;
        return std::pow(x, rho_) * v;  // envelope tables hold exp(-Q)
    }

private:
    std::optional<WeightSpec> spec_;
    std::shared_ptr<MonotoneCubic> table_;
    double rho_ = 0;
    bool envelope_ = false;
};

// K_hat_n(x,y) = sqrt(w(x) w(y)) K_n(x,y)
inline double weighted_kernel(const LanczosSequence& seq, const WeightView& w, double x,
                              double y, int n) {
    return std::sqrt(w(x) * w(y)) * cd_kernel(seq, x, y, n);
}

// Unfolding map F(x) = I_n(x) - I_n(omega0) (bulk/Bessel) or f_n(x/beta_n)
// (Airy mode); inverse by monotone bisection on the table.
class UnfoldingMap {
public:
    // bulk / Bessel mode: I_n sampled on [0, omega_max], odd extension
    static UnfoldingMap from_cumulative(const std::vector<double>& omega,
                                        const std::vector<double>& I, double omega0) {
        UnfoldingMap m;
        m.table_ = std::make_shared<MonotoneCubic>(omega, I);
        m.omega0_ = omega0;
        m.f0_ = m.eval_I(omega0);
        m.lo_ = -omega.back();
        m.hi_ = omega.back();
        return m;
    }

    static UnfoldingMap from_estimate(const SpectralEstimate& est, double omega0) {
        if (est.solver == "airy") {
            UnfoldingMap m;
            m.airy_ = true;
            m.table_ = std::make_shared<MonotoneCubic>(est.omega, est.fn);
            m.omega0_ = est.beta_n;
            m.f0_ = 0.0;
            m.lo_ = est.omega.front();
            m.hi_ = est.omega.back();
            return m;
        }
        return from_cumulative(est.omega, est.cumulative, omega0);
    }

    static UnfoldingMap from_measure(const EquilibriumMeasure& meas, double omega0) {
        return from_cumulative(meas.grid, meas.cumulative, omega0);
    }

    double omega0() const { return omega0_; }

    double operator()(double x) const {
        if (airy_) return eval_I(x);  // table already holds f_n
        return eval_I(x) - f0_;
    }

    // monotone bisection at 1e-10 tolerance
    double inverse(double u) const {
        double lo = lo_, hi = hi_;
        if (u < (*this)(lo) - 1e-12 || u > (*this)(hi) + 1e-12)
            throw InversionOutOfRange("UnfoldingMap: u outside the tabulated image");
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            ((*this)(mid) < u ? lo : hi) = mid;
            if (hi - lo < 1e-10 * (1.0 + std::abs(hi))) break;
        }
        return 0.5 * (lo + hi);
    }

    // local density at x: sigma_n(x) (bulk) or dF/dx (airy)
    double density(double x) const {
        const double ax = airy_ ? x : std::abs(x);
        return table_->derivative(ax);
    }

private:
    double eval_I(double x) const {
        if (airy_) {
            if (!table_->contains(x))
                throw InversionOutOfRange("UnfoldingMap: x outside the Airy table");
            return (*table_)(x);
        }
        const double ax = std::abs(x);
        if (!table_->contains(ax))
            throw InversionOutOfRange("UnfoldingMap: |x| outside the cumulative table");
        const double v = (*table_)(ax);
        return x >= 0 ? v : -v;
    }

    std::shared_ptr<MonotoneCubic> table_;
    double omega0_ = 0, f0_ = 0, lo_ = 0, hi_ = 0;
    bool airy_ = false;
};

// LHS of the unfolded universality statement:
//   ((F^{-1}(u) - F^{-1}(v)) / (u - v)) K_hat_n(F^{-1}(u), F^{-1}(v))
inline double unfolded_kernel_ratio(const LanczosSequence& seq, const WeightView& w,
                                    const UnfoldingMap& F, double u, double v, int n) {
    if (std::abs(u - v) < 1e-12) {
        const double x = F.inverse(u);
        return weighted_kernel(seq, w, x, x, n) / F.density(x);
    }
    const double x = F.inverse(u), y = F.inverse(v);
    return (x - y) / (u - v) * weighted_kernel(seq, w, x, y, n);
}

// ------------------------- reference kernels --------------------------------

inline double sine_kernel(double u, double v) {
    const double d = u - v;
    if (std::abs(d) < 1e-10) return 1.0;
    return std::sin(M_PI * d) / (M_PI * d);
}

inline double airy_kernel(double u, double v) {
    if (std::abs(u - v) < 1e-8) {
        const double m = 0.5 * (u + v);
        const double ai = special::airy_ai(m), aip = special::airy_ai_prime(m);
        return aip * aip - m * ai * ai;
    }
    return (special::airy_ai(u) * special::airy_ai_prime(v) -
            special::airy_ai(v) * special::airy_ai_prime(u)) /
           (u - v);
}

namespace universality_detail {

// J_nu(pi u) continued to u < 0 through the upper half plane:
// J_nu(|z| e^{i pi}) = e^{i pi nu} J_nu(|z|)
inline std::complex<double> bessel_j_signed(double nu, double u) {
    const double j = special::bessel_j(nu, M_PI * std::abs(u));
    if (u >= 0) return j;
    return std::polar(1.0, M_PI * nu) * j;
}

inline std::complex<double> sqrt_signed(double u) {
    if (u >= 0) return std::sqrt(u);
    return std::complex<double>(0.0, std::sqrt(-u));  // (|u| e^{i pi})^{1/2}
}

inline double bessel_jprime(double nu, double x) {
    return 0.5 * (special::bessel_j(nu - 1, x) - special::bessel_j(nu + 1, x));
}

}  // namespace universality_detail

// Bessel kernel J_{rho/2}(u,v) = pi sqrt(u) sqrt(v)
//   [J_{(rho+1)/2}(pi u) J_{(rho-1)/2}(pi v) - J_{(rho-1)/2}(pi u) J_{(rho+1)/2}(pi v)]
//   / (2 (u - v)),
// complex-valued for negative arguments (principal branches through the upper
// half plane). Comparisons against unfolded data use the real part together
// with the phase e^{-i rho (arg u + arg v)/2}.
inline std::complex<double> bessel_kernel(double rho, double u, double v) {
    using namespace universality_detail;
    const double a = (rho - 1) / 2, b = (rho + 1) / 2;
    if (std::abs(u - v) < 1e-10) {
        if (u <= 0)
            throw SpecialFunctionDomain("bessel_kernel: diagonal limit implemented for u > 0");
        const double x = M_PI * u;
        const double deriv = special::bessel_j(a, x) * bessel_jprime(b, x) -
                             special::bessel_j(b, x) * bessel_jprime(a, x);
        return M_PI * M_PI * u / 2.0 * deriv;
    }
    const std::complex<double> num = bessel_j_signed(b, u) * bessel_j_signed(a, v) -
                                     bessel_j_signed(a, u) * bessel_j_signed(b, v);
    return M_PI * sqrt_signed(u) * sqrt_signed(v) * num / (2.0 * (u - v));
}

// phase prefactor of the Bessel universality statement at (u, v)
inline std::complex<double> bessel_universality_phase(double rho, double u, double v) {
    const double arg_u = u >= 0 ? 0.0 : M_PI;
    const double arg_v = v >= 0 ? 0.0 : M_PI;
    return std::polar(1.0, -rho / 2.0 * (arg_u + arg_v));
}

}  // namespace krylov
