// mp.hpp — extended-precision arithmetic and composite Gauss quadrature.
//
// mpfloat is a dynamic-precision MPFR float. Quadrature panels use Gauss-Jacobi
// rules with weight (1+t)^rho on [-1,1]: the panel containing 0 absorbs the
// |omega|^rho singularity of the spectral weight, all other panels use rho = 0
// (Gauss-Legendre). Nodes are seeded by a double-precision tridiagonal
// eigensolve and polished with MPFR Newton steps; weights are Christoffel
// numbers 1/K_N(x_i, x_i).

#pragma once

#include <boost/math/constants/constants.hpp>
#include <boost/multiprecision/mpfr.hpp>

#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "krylov/errors.hpp"

namespace krylov {

using mpfloat = boost::multiprecision::mpfr_float;

inline unsigned bits_to_digits10(unsigned bits) {
    return static_cast<unsigned>(std::ceil(bits * 0.30103)) + 2;
}

class PrecisionGuard {
public:
    explicit PrecisionGuard(unsigned digits10)
        : saved_(mpfloat::default_precision()) {
        mpfloat::default_precision(digits10);
    }
    ~PrecisionGuard() { mpfloat::default_precision(saved_); }
    PrecisionGuard(const PrecisionGuard&) = delete;
    PrecisionGuard& operator=(const PrecisionGuard&) = delete;

private:
    unsigned saved_;
};

namespace quad {

struct Rule {
    std::vector<mpfloat> nodes;    // on [-1, 1]
    std::vector<mpfloat> weights;  // for weight (1+t)^rho
};

namespace detail {

// Monic Jacobi(alpha=0, beta=rho) recurrence on [-1,1]:
//   pi_{k+1} = (x - a_k) pi_k - bsq_k pi_{k-1}
// Fills a[0..n-1] and bsq[0..n]; bsq[n] is needed to orthonormalize p_n.
inline void jacobi_recurrence(double rho, int n, std::vector<mpfloat>& a,
                              std::vector<mpfloat>& bsq, mpfloat& mu0) {
    a.assign(n, mpfloat(0));
    bsq.assign(n + 1, mpfloat(0));
    const mpfloat r(rho);
    mu0 = pow(mpfloat(2), r + 1) / (r + 1);  // int_{-1}^1 (1+t)^rho dt
    for (int k = 0; k < n; ++k) {
        if (k == 0) {
            a[0] = r / (r + 2);
        } else {
            const mpfloat s = 2 * mpfloat(k) + r;
            a[k] = (r * r) / (s * (s + 2));
        }
    }
    for (int k = 1; k <= n; ++k) {
        const mpfloat s = 2 * mpfloat(k) + r;
        bsq[k] = 4 * mpfloat(k) * mpfloat(k) * (mpfloat(k) + r) * (mpfloat(k) + r) /
                 (s * s * (s + 1) * (s - 1));
    }
}

// orthonormal p_0..p_N and p_N' at x from the monic (a, bsq) data
inline void eval_orthonormal(const std::vector<mpfloat>& a, const std::vector<mpfloat>& bsq,
                             const mpfloat& mu0, const mpfloat& x, int N,
                             std::vector<mpfloat>& p, mpfloat& pN_prime) {
    std::vector<mpfloat> b(N + 1);
    b[0] = sqrt(mu0);
    for (int k = 1; k <= N; ++k) b[k] = sqrt(bsq[k]);
    p.assign(N + 1, mpfloat(0));
    std::vector<mpfloat> dp(N + 1, mpfloat(0));
    p[0] = 1 / b[0];
    dp[0] = 0;
    mpfloat pm1 = 0, dpm1 = 0;
    for (int k = 0; k < N; ++k) {
        p[k + 1] = ((x - a[k]) * p[k] - (k > 0 ? b[k] : mpfloat(0)) * pm1) / b[k + 1];
        dp[k + 1] = (p[k] + (x - a[k]) * dp[k] - (k > 0 ? b[k] : mpfloat(0)) * dpm1) / b[k + 1];
        pm1 = p[k];
        dpm1 = dp[k];
    }
    pN_prime = dp[N];
}

}  // namespace detail

// N-point Gauss rule for int_{-1}^1 f(t) (1+t)^rho dt
inline std::shared_ptr<const Rule> gauss_jacobi(int N, double rho) {
    struct CacheKey {
        int n;
        long long rho_bits;
        unsigned digits;
        auto operator<=>(const CacheKey&) const = default;
    };
    static std::map<CacheKey, std::shared_ptr<const Rule>> cache;
    static std::mutex mu;
    CacheKey key{N, (long long)(rho * (1ll << 40)), mpfloat::default_precision()};
    {
        std::lock_guard<std::mutex> lk(mu);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
    }

    std::vector<mpfloat> a, bsq;
    mpfloat mu0;
    detail::jacobi_recurrence(rho, N, a, bsq, mu0);

    // double-precision eigenvalues of the symmetrized Jacobi matrix seed Newton
    Eigen::VectorXd diag(N), sub(N - 1);
    for (int k = 0; k < N; ++k) diag[k] = a[k].convert_to<double>();
    for (int k = 1; k < N; ++k) sub[k - 1] = std::sqrt(bsq[k].convert_to<double>());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);

    auto rule = std::make_shared<Rule>();
    rule->nodes.resize(N);
    rule->weights.resize(N);
    std::vector<mpfloat> p;
    mpfloat dpN;
    for (int i = 0; i < N; ++i) {
        mpfloat x(es.eigenvalues()[i]);
        for (int it = 0; it < 10; ++it) {
            detail::eval_orthonormal(a, bsq, mu0, x, N, p, dpN);
            const mpfloat step = p[N] / dpN;
            x -= step;
            if (abs(step) < abs(x) * std::numeric_limits<double>::min()) break;
        }
        detail::eval_orthonormal(a, bsq, mu0, x, N, p, dpN);
        mpfloat kn = 0;
        for (int k = 0; k < N; ++k) kn += p[k] * p[k];
        rule->nodes[i] = x;
        rule->weights[i] = 1 / kn;
    }
    std::lock_guard<std::mutex> lk(mu);
    cache[key] = rule;
    return rule;
}

}  // namespace quad

// Composite grid on [0, omega_cut] such that
//   int_0^cut f(w) |w|^rho exp(-Q(w)) dw  ~=  sum_i weights[i] * f(nodes[i]):
// the rho power and the weight function are folded into weights[].
struct QuadratureGrid {
    std::vector<mpfloat> nodes;
    std::vector<mpfloat> weights;
    std::vector<double> panel_edges;
    unsigned precision_bits = 0;
    int nodes_per_panel = 0;

    template <typename F>
    mpfloat integrate(F&& f) const {  // sequential, index order: deterministic
        mpfloat s = 0;
        for (std::size_t i = 0; i < nodes.size(); ++i) s += weights[i] * f(nodes[i]);
        return s;
    }
};

// weight_mp(w) must return exp(-Q(w)) (without the |w|^rho factor) at mpfloat
// precision for w > 0.
inline QuadratureGrid build_weight_grid(double rho, double omega_cut,
                                        const std::function<mpfloat(const mpfloat&)>& weight_mp,
                                        int nodes_per_panel, unsigned precision_bits,
                                        double panel_width = 0.75) {
    QuadratureGrid g;
    g.precision_bits = precision_bits;
    g.nodes_per_panel = nodes_per_panel;

    const double h0 = std::min(0.5, omega_cut / 8.0);
    g.panel_edges.push_back(0.0);
    g.panel_edges.push_back(h0);
    const int k_rest = std::max(1, (int)std::ceil((omega_cut - h0) / panel_width));
    for (int k = 1; k <= k_rest; ++k)
        g.panel_edges.push_back(h0 + (omega_cut - h0) * k / double(k_rest));

    const auto jac = quad::gauss_jacobi(nodes_per_panel, rho);
    const auto leg = quad::gauss_jacobi(nodes_per_panel, 0.0);

    for (std::size_t pnl = 0; pnl + 1 < g.panel_edges.size(); ++pnl) {
        const mpfloat a(g.panel_edges[pnl]), b(g.panel_edges[pnl + 1]);
        const mpfloat half = (b - a) / 2, mid = (a + b) / 2;
        const bool singular = (pnl == 0 && rho != 0.0);
        const auto& rule = singular ? *jac : *leg;
        // singular panel: w = h(1+t)/2, measure (h/2)^{1+rho} (1+t)^rho dt
        const mpfloat scale = singular ? pow(half, mpfloat(1.0 + rho)) : half;
        for (int i = 0; i < nodes_per_panel; ++i) {
            const mpfloat w = mid + half * rule.nodes[i];
            if (w <= 0) continue;
            mpfloat wt = scale * rule.weights[i] * weight_mp(w);
            if (!singular && rho != 0.0) wt *= pow(w, mpfloat(rho));
            g.nodes.push_back(w);
            g.weights.push_back(wt);
        }
    }
    return g;
}

}  // namespace krylov
