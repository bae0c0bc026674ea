// ortho_poly.hpp — orthonormal polynomials of a LanczosSequence: forward
// recurrence values and derivatives, zero-mode amplitudes, and the
// Christoffel-Darboux kernel.
//
// Conventions: p_0 = 1/||A|| and b_n p_n = omega p_{n-1} - b_{n-1} p_{n-2},
// so the p_n are orthonormal against Phi(omega)/2pi.

#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "krylov/errors.hpp"
#include "krylov/sequence.hpp"

namespace krylov {

struct PolyEval {
    double omega = 0;
    std::vector<double> values;  // p_0 .. p_n
    std::vector<double> derivs;  // p_0' .. p_n'
    bool outside_bulk = false;   // |omega| > 1.5 * (2 b_n): exponential growth regime
};

inline PolyEval eval_polys(const LanczosSequence& seq, double omega, int n) {
    if (n < 0 || n > seq.size())
        throw std::invalid_argument("eval_polys: need 0 <= n <= len(b)");
    PolyEval e;
    e.omega = omega;
    e.values.resize(n + 1);
    e.derivs.assign(n + 1, 0.0);
    e.values[0] = 1.0 / std::sqrt(seq.norm2);
    for (int k = 1; k <= n; ++k) {
        const double bk = seq.at(k), bkm1 = (k >= 2) ? seq.at(k - 1) : 0.0;
        const double pm2 = (k >= 2) ? e.values[k - 2] : 0.0;
        const double dm2 = (k >= 2) ? e.derivs[k - 2] : 0.0;
        e.values[k] = (omega * e.values[k - 1] - bkm1 * pm2) / bk;
        e.derivs[k] = (e.values[k - 1] + omega * e.derivs[k - 1] - bkm1 * dm2) / bk;
    }
    if (n >= 1 && std::abs(omega) > 1.5 * 2.0 * seq.at(n)) e.outside_bulk = true;
    return e;
}

// log-magnitude + sign form for sweeps far outside the bulk, where the plain
// recurrence would overflow
struct PolyEvalLog {
    std::vector<double> log_abs;
    std::vector<int> sign;
};

inline PolyEvalLog eval_polys_log(const LanczosSequence& seq, double omega, int n) {
    PolyEvalLog e;
    e.log_abs.resize(n + 1);
    e.sign.resize(n + 1);
    double pm1 = 1.0 / std::sqrt(seq.norm2), pm2 = 0.0;
    double scale_log = 0.0;  // true p_k = stored * exp(scale_log)
    e.log_abs[0] = std::log(std::abs(pm1));
    e.sign[0] = 1;
    for (int k = 1; k <= n; ++k) {
        const double bk = seq.at(k), bkm1 = (k >= 2) ? seq.at(k - 1) : 0.0;
        double pk = (omega * pm1 - bkm1 * pm2) / bk;
        pm2 = pm1;
        pm1 = pk;
        const double m = std::max(std::abs(pm1), std::abs(pm2));
        if (m > 1e150) {
            pm1 /= m;
            pm2 /= m;
            scale_log += std::log(m);
        }
        e.sign[k] = (pm1 > 0) - (pm1 < 0);
        e.log_abs[k] = (pm1 == 0.0) ? -std::numeric_limits<double>::infinity()
                                    : std::log(std::abs(pm1)) + scale_log;
    }
    return e;
}

// log p_{2n}(0)^2 = -log||A||^2 + 2 sum_k [log b_{2k-1} - log b_{2k}]
inline double log_zero_mode_amplitude(const LanczosSequence& seq, int n_even) {
    if (n_even % 2 != 0 || n_even < 0)
        throw std::invalid_argument("zero_mode_amplitude: even index required");
    if (n_even > seq.size()) throw std::invalid_argument("zero_mode_amplitude: index > len(b)");
    double acc = -std::log(seq.norm2);
    for (int k = 1; 2 * k <= n_even; ++k)
        acc += 2.0 * (std::log(seq.at(2 * k - 1)) - std::log(seq.at(2 * k)));
    return acc;
}

inline double zero_mode_amplitude(const LanczosSequence& seq, int n_even) {
    return std::exp(log_zero_mode_amplitude(seq, n_even));
}

// K_n(x,y) = sum_{m<n} p_m(x) p_m(y); off-diagonal via the ratio formula,
// |x-y| < 1e-8 routes to the determinant (derivative) branch at the midpoint.
inline double cd_kernel(const LanczosSequence& seq, double x, double y, int n) {
    if (n < 1 || n > seq.size()) throw std::invalid_argument("cd_kernel: 1 <= n <= len(b)");
    const double bn = seq.at(n);
    if (std::abs(x - y) < 1e-8) {
        const double m = 0.5 * (x + y);
        const auto e = eval_polys(seq, m, n);
        return bn * (e.values[n - 1] * e.derivs[n] - e.derivs[n - 1] * e.values[n]);
    }
    const auto ex = eval_polys(seq, x, n);
    const auto ey = eval_polys(seq, y, n);
    return bn * (ex.values[n] * ey.values[n - 1] - ex.values[n - 1] * ey.values[n]) / (x - y);
}

// direct summation; the oracle for cd_kernel and the path taken by the
// weighted universality kernel
inline double cd_kernel_direct(const LanczosSequence& seq, double x, double y, int n) {
    if (n < 1 || n > seq.size())
        throw std::invalid_argument("cd_kernel_direct: 1 <= n <= len(b)");
    const auto ex = eval_polys(seq, x, n - 1);
    const auto ey = (x == y) ? ex : eval_polys(seq, y, n - 1);
    double s = 0;
    for (int m = 0; m < n; ++m) s += ex.values[m] * ey.values[m];
    return s;
}

}  // namespace krylov
