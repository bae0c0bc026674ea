// greens.hpp — level-n terminators, continued-fraction assembly of G(z), and
// spectral-function extraction.
//
// Boundary values on the real axis are computed by explicit branch bookkeeping
// (Side flag), never by a finite imaginary offset; the one exception is the
// ExactModel terminator whose closed form needs an epsilon (default 1e-14).

#pragma once

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "krylov/errors.hpp"
#include "krylov/ortho_poly.hpp"
#include "krylov/sequence.hpp"
#include "krylov/special.hpp"
#include "krylov/weights.hpp"

namespace krylov {

enum class Side { Plus, Minus };  // omega + i0 / omega - i0

inline Side flip(Side s) { return s == Side::Plus ? Side::Minus : Side::Plus; }

// G_n(z) ~ (2/beta^2)(z - sqrt(z-beta) sqrt(z+beta)), principal branches
inline std::complex<double> semicircle_green(double beta_n, std::complex<double> z) {
    const std::complex<double> s = std::sqrt(z - beta_n) * std::sqrt(z + beta_n);
    return 2.0 / (beta_n * beta_n) * (z - s);
}

inline std::complex<double> semicircle_green(double beta_n, double omega, Side side) {
    if (std::abs(omega) < beta_n) {
        const double root = std::sqrt(beta_n * beta_n - omega * omega);
        const double im = (side == Side::Minus) ? root : -root;
        return 2.0 / (beta_n * beta_n) * std::complex<double>(omega, im);
    }
    const double root = std::sqrt(omega * omega - beta_n * beta_n);
    return 2.0 / (beta_n * beta_n) * (omega - (omega > 0 ? root : -root));
}

// G_{2n}(omega +/- i0) ~ (-2/beta_{2n}) (J_{(rho-1)/2} +/- i Y_{(rho-1)/2}) /
//                                       (J_{(rho+1)/2} +/- i Y_{(rho+1)/2})
// at argument pi sigma_{2n}(0) omega.
inline std::complex<double> bessel_green(double rho, double sigma0, double beta_2n,
                                         double omega, Side side) {
    if (omega == 0.0)
        throw SpecialFunctionDomain("bessel_green: Y_nu undefined at omega = 0");
    if (omega < 0.0) return -std::conj(bessel_green(rho, sigma0, beta_2n, -omega, side));
    const double a = M_PI * sigma0 * omega;
    const double i_sign = (side == Side::Plus) ? 1.0 : -1.0;
    const std::complex<double> num(special::bessel_j((rho - 1) / 2, a),
                                   i_sign * special::bessel_y((rho - 1) / 2, a));
    const std::complex<double> den(special::bessel_j((rho + 1) / 2, a),
                                   i_sign * special::bessel_y((rho + 1) / 2, a));
    return (-2.0 / beta_2n) * num / den;
}

// endpoint value G_{n,+/-}(beta_n), f_n'(1) = (n h_n(1)/sqrt 2)^{2/3}
inline std::complex<double> airy_endpoint_green(double rho, double hn1, int n, double beta_n,
                                                Side side) {
    if (!(hn1 > 0)) throw std::invalid_argument("airy_endpoint_green: h_n(1) > 0 required");
    const double fp1 = std::pow(n * hn1 / std::sqrt(2.0), 2.0 / 3.0);
    const double phase = (side == Side::Plus) ? M_PI / 3 : -M_PI / 3;
    const std::complex<double> e = std::polar(1.0, phase);
    const double ai0 = special::airy_ai0(), ai0p = special::airy_ai0_prime();
    const std::complex<double> num = 2.0 * ai0 * std::sqrt(fp1) + e * std::sqrt(2.0) * ai0p * (rho + 1);
    const std::complex<double> den = 2.0 * ai0 * std::sqrt(fp1) + e * std::sqrt(2.0) * ai0p * (rho - 1);
    return (2.0 / beta_n) * num / den;
}

struct Terminator {
    enum class Kind { Semicircle, Bessel, ExactModel };
    Kind kind = Kind::Semicircle;
    double beta_n = 0;   // semicircle / bessel bandwidth (default 2 b_n)
    double rho = 0;      // bessel
    double sigma0 = 0;   // bessel: sigma_{2n}(0)
    WeightSpec model;    // ExactModel (GaussianRhoModel)
    double eps = 1e-14;  // ExactModel boundary offset

    static Terminator semicircle(double beta) {
        Terminator t;
        t.kind = Kind::Semicircle;
        t.beta_n = beta;
        return t;
    }
    static Terminator bessel(double rho, double sigma0, double beta_2n) {
        Terminator t;
        t.kind = Kind::Bessel;
        t.rho = rho;
        t.sigma0 = sigma0;
        t.beta_n = beta_2n;
        return t;
    }
    static Terminator exact_model(WeightSpec model, double eps = 1e-14) {
        Terminator t;
        t.kind = Kind::ExactModel;
        t.model = std::move(model);
        t.eps = eps;
        return t;
    }

    // boundary value of G_level(omega +/- i0)
    std::complex<double> value(double omega, Side side, int level) const {
        switch (kind) {
            case Kind::Semicircle:
                return semicircle_green(beta_n, omega, side);
            case Kind::Bessel:
                if (level % 2 != 0)
                    throw std::invalid_argument(
                        "Bessel terminator requires even n: the even/odd distinction matters "
                        "near omega = 0 for rho != 0");
                return bessel_green(rho, sigma0, beta_n, omega, side);
            case Kind::ExactModel: {
                // forward-recurse the model's G_0 to level n with the model's
                // own closed-form coefficients
                const std::complex<double> z(omega, side == Side::Plus ? eps : -eps);
                std::complex<double> g = reference_green(model, z);
                if (level == 0) return g;
                auto ref = reference_coefficients(model, level);
                for (int k = 0; k < level; ++k) g = (z - 1.0 / g) / (ref.b[k] * ref.b[k]);
                return g;
            }
        }
        throw std::logic_error("unreachable");
    }
};

// Backward evaluation G_k = 1/(z - b_{k+1}^2 G_{k+1}) from the terminator at
// level n down to G_0; returns ||A||^2 G_0 (unnormalized seed convention).
inline std::complex<double> continued_fraction(const LanczosSequence& seq, const Terminator& term,
                                               int n, double omega, Side side) {
    if (n < 0 || n > seq.size())
        throw std::invalid_argument("continued_fraction: 0 <= n <= len(b)");
    std::complex<double> g = term.value(omega, side, n);
    for (int k = n - 1; k >= 0; --k) {
        const double b = seq.at(k + 1);
        const std::complex<double> den = omega - b * b * g;
        if (std::abs(den) < 1e-14)
            throw PoleProximity("continued_fraction: denominator < 1e-14 at level " +
                                std::to_string(k));
        g = 1.0 / den;
    }
    return seq.norm2 * g;
}

struct SpectralFromGreen {
    std::vector<double> phi;
    bool negative_flag = false;  // excursions below -1e-8 * max (diagnostic)
};

// Phi(omega) = -/+ 2 Im[G(omega +/- i0)]
inline SpectralFromGreen spectral_from_green(const std::vector<std::complex<double>>& g,
                                             Side side) {
    SpectralFromGreen out;
    out.phi.reserve(g.size());
    const double sign = (side == Side::Plus) ? -2.0 : 2.0;
    double peak = 0;
    for (const auto& v : g) {
        out.phi.push_back(sign * v.imag());
        peak = std::max(peak, std::abs(out.phi.back()));
    }
    for (double v : out.phi)
        if (v < -1e-8 * peak) out.negative_flag = true;
    return out;
}

}  // namespace krylov
