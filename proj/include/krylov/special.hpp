// special.hpp — special functions used across the library.
//
// Bessel J/Y of real order, Airy Ai/Ai' and Gamma come from boost::math.
// The generalized exponential integral E_nu(w) of complex argument (needed for
// the Gaussian-rho model Green's function) is not in boost, so it is built here
// from its power series and a continued fraction, matched by |w|.

#pragma once

#include <boost/math/special_functions/airy.hpp>
#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <complex>
#include <limits>

#include "krylov/errors.hpp"

namespace krylov::special {

inline double bessel_j(double nu, double x) {
    try {
        return boost::math::cyl_bessel_j(nu, x);
    } catch (const std::exception& e) {
        throw SpecialFunctionDomain(std::string("cyl_bessel_j: ") + e.what());
    }
}

inline double bessel_y(double nu, double x) {
    try {
        return boost::math::cyl_neumann(nu, x);
    } catch (const std::exception& e) {
        throw SpecialFunctionDomain(std::string("cyl_neumann: ") + e.what());
    }
}

inline double airy_ai(double x) { return boost::math::airy_ai(x); }
inline double airy_ai_prime(double x) { return boost::math::airy_ai_prime(x); }

// Ai(0) = 3^{-2/3}/Gamma(2/3), Ai'(0) = -3^{-1/3}/Gamma(1/3)
inline double airy_ai0() { return boost::math::airy_ai(0.0); }
inline double airy_ai0_prime() { return boost::math::airy_ai_prime(0.0); }

inline double gamma_fn(double x) { return boost::math::tgamma(x); }

// Scaled generalized exponential integral, e^{w} E_nu(w) with
// E_nu(w) = \int_1^\infty e^{-wt} t^{-nu} dt (principal branch). The scaled
// form is what resolvents need: e^{-z^2} E_nu(-z^2) stays O(1) where the
// separate factors overflow/underflow.
//
// Series branch (|w| <= 30, nu non-integer):
//   E_nu(w) = Gamma(1-nu) w^{nu-1} - sum_{k>=0} (-w)^k / (k! (k+1-nu))
// Continued-fraction branch (Re w > 0), evaluated bottom-up:
//   e^{w} E_nu(w) = 1 / (w + nu/(1 + 1/(w + (nu+1)/(1 + 2/(w + ...)))))
inline std::complex<double> expint_en_scaled(double nu, std::complex<double> w) {
    using cplx = std::complex<double>;
    if (std::abs(nu - std::round(nu)) < 1e-12)
        throw SpecialFunctionDomain("expint_en: integer order not supported");

    const double aw = std::abs(w);
    if (aw <= 30.0) {
        cplx sum = 0.0, term = 1.0;  // term = (-w)^k / k!
        for (int k = 0; k < 400; ++k) {
            cplx add = term / (k + 1.0 - nu);
            sum += add;
            term *= -w / double(k + 1);
            if (std::abs(add) < 1e-18 * (1.0 + std::abs(sum)) && k > 4) break;
        }
        // principal branch of w^{nu-1}
        const cplx pw = std::exp((nu - 1.0) * std::log(w));
        return std::exp(w) * (boost::math::tgamma(1.0 - nu) * pw - sum);
    }
    if (w.real() > 0.0) {
        auto backward = [&](int levels) {
            cplx acc = 0.0;
            for (int i = levels; i >= 1; --i) {
                const double ai = (i % 2 == 1) ? (nu + (i - 1) / 2) : double(i / 2);
                const cplx bi = (i % 2 == 1) ? cplx(1.0) : w;
                acc = ai / (bi + acc);
            }
            return 1.0 / (w + acc);
        };
        const cplx coarse = backward(150), fine = backward(300);
        if (std::abs(fine - coarse) > 1e-13 * std::abs(fine))
            throw SpecialFunctionDomain("expint_en: continued fraction did not converge");
        return fine;
    }
    throw SpecialFunctionDomain("expint_en: argument outside supported region");
}

inline std::complex<double> expint_en(double nu, std::complex<double> w) {
    return std::exp(-w) * expint_en_scaled(nu, w);
}

}  // namespace krylov::special
