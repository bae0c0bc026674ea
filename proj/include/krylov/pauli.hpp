// pauli.hpp — exact infinite-temperature Lanczos iteration for spin-1/2 chains.
//
// Operators are sums of Pauli strings over a sliding window of <= 64 sites,
// encoded as (x_mask, z_mask) with Y at site i <=> bit i set in both masks.
// Two modes share the algebra:
//   Translation — sum over all lattice translates of each stored representative
//                 (zero-wavevector sector), keys left-aligned to bit 0;
//   Local       — a single operator, keys carry the absolute window offset.
// Inner products are Hilbert-Schmidt per site: Pauli strings are orthonormal
// under tr/2^L, and for translation sums the density normalization (A|B)/L
// collapses to a plain sum over matching canonical representatives.

#pragma once

#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "krylov/errors.hpp"
#include "krylov/sequence.hpp"

namespace krylov {

using cplx = std::complex<double>;

struct PauliString {
    std::uint64_t x = 0;
    std::uint64_t z = 0;

    int length() const { return std::bit_width(x | z); }
    bool identity() const { return (x | z) == 0; }
    bool canonical() const { return identity() || ((x | z) & 1u); }

    friend bool operator==(const PauliString&, const PauliString&) = default;

    // e.g. "YZ" for Y_0 Z_1
    std::string str() const {
        static const char* names = "IXZY";
        std::string s;
        for (int i = 0; i < length(); ++i) {
            const int c = int((x >> i) & 1) | int(((z >> i) & 1) << 1);
            s.push_back(names[c]);
        }
        return s.empty() ? "I" : s;
    }
};

namespace pauli_detail {

inline int pc(std::uint64_t v) { return std::popcount(v); }

// P_{x,z} = i^{popcount(x&z)} X^x Z^z. Product of two strings in a common
// window: P1 P2 = i^k P_{x1^x2, z1^z2}, k below (mod 4).
inline int phase_exponent(const PauliString& a, const PauliString& b) {
    const int c1 = pc(a.x & a.z), c2 = pc(b.x & b.z);
    const int c12 = pc((a.x ^ b.x) & (a.z ^ b.z));
    const int swap = pc(a.z & b.x);
    return ((c1 + c2 - c12 + 2 * swap) % 4 + 4) % 4;
}

inline cplx ipow(int k) {
    switch (k & 3) {
        case 0: return {1, 0};
        case 1: return {0, 1};
        case 2: return {-1, 0};
        default: return {0, -1};
    }
}

inline bool anticommute(const PauliString& a, const PauliString& b) {
    return ((pc(a.x & b.z) + pc(a.z & b.x)) & 1) != 0;
}

struct Key {
    std::uint64_t x, z;
    std::int32_t off;
    friend bool operator==(const Key&, const Key&) = default;
};

struct KeyHash {
    std::size_t operator()(const Key& k) const {
        auto mix = [](std::uint64_t v) {
            v += 0x9e3779b97f4a7c15ull;
            v = (v ^ (v >> 30)) * 0xbf58476d1ce4e5b9ull;
            v = (v ^ (v >> 27)) * 0x94d049bb133111ebull;
            return v ^ (v >> 31);
        };
        return mix(k.x ^ mix(k.z + std::uint64_t(std::uint32_t(k.off))));
    }
};

}  // namespace pauli_detail

enum class OpMode { Translation, Local };

class OpSum {
public:
    using Map = std::unordered_map<pauli_detail::Key, cplx, pauli_detail::KeyHash>;

    explicit OpSum(OpMode mode = OpMode::Translation) : mode_(mode) {}

    OpMode mode() const { return mode_; }
    const Map& terms() const { return terms_; }
    std::size_t term_count() const { return terms_.size(); }
    bool empty() const { return terms_.empty(); }

    int support_bound() const {
        int s = 0;
        for (const auto& [k, c] : terms_)
            s = std::max(s, PauliString{k.x, k.z}.length());
        return s;
    }

    // adds coeff * (string at absolute offset), canonicalizing the key
    void add(PauliString p, std::int32_t offset, cplx coeff) {
        if (p.identity() || coeff == cplx{}) return;
        const int shift = std::countr_zero(p.x | p.z);
        p.x >>= shift;
        p.z >>= shift;
        offset += shift;
        pauli_detail::Key key{p.x, p.z, mode_ == OpMode::Translation ? 0 : offset};
        auto [it, inserted] = terms_.try_emplace(key, coeff);
        if (!inserted) {
            it->second += coeff;
            if (it->second == cplx{}) terms_.erase(it);
        }
    }

    OpSum& operator*=(cplx s) {
        for (auto& [k, c] : terms_) c *= s;
        return *this;
    }

    // *this -= s * other (keys must be of the same mode)
    void axpy(cplx s, const OpSum& other) {
        for (const auto& [k, c] : other.terms_) {
            auto [it, inserted] = terms_.try_emplace(k, -s * c);
            if (!inserted) {
                it->second -= s * c;
                if (it->second == cplx{}) terms_.erase(it);
            }
        }
    }

    double norm2() const {
        double s = 0;
        for (const auto& [k, c] : terms_) s += std::norm(c);
        return s;
    }

    void prune(double threshold) {
        if (threshold <= 0) return;
        for (auto it = terms_.begin(); it != terms_.end();)
            it = (std::abs(it->second) < threshold) ? terms_.erase(it) : std::next(it);
    }

    // one-site shift of every representative; a no-op on canonical translation
    // sums after re-canonicalization (used by the invariance test)
    OpSum shifted(int d) const {
        OpSum out(mode_);
        for (const auto& [k, c] : terms_) out.add({k.x, k.z}, k.off + d, c);
        return out;
    }

private:
    OpMode mode_;
    Map terms_;
};

inline cplx inner_product(const OpSum& a, const OpSum& b) {
    if (a.mode() != b.mode())
        throw std::invalid_argument("inner_product: mixed operator modes");
    // iterate over the smaller map
    const OpSum& s = a.term_count() <= b.term_count() ? a : b;
    const OpSum& l = a.term_count() <= b.term_count() ? b : a;
    const bool swapped = &s != &a;
    cplx acc = 0;
    for (const auto& [k, c] : s.terms()) {
        auto it = l.terms().find(k);
        if (it == l.terms().end()) continue;
        acc += swapped ? std::conj(it->second) * c : std::conj(c) * it->second;
    }
    return acc;
}

// --------------------------- Hamiltonians -----------------------------------

struct HamiltonianTerm {
    PauliString p;  // canonical template within the unit cell
    double coupling;
};

struct HamiltonianSpec {
    enum class Model { MFIM, XXZ, Heisenberg, TFIM, Custom };
    Model model = Model::Custom;
    double gx = 0, gz = 0, delta = 0, g = 0;
    std::vector<HamiltonianTerm> terms;  // per unit cell, support <= 2 sites
    std::string tag = "custom";
};

namespace hamiltonians {

constexpr PauliString X0{1, 0}, Z0{0, 1}, Y0{1, 1};

// Two-site strings spelled out: bit 0 = left site.
inline PauliString two(char a, char b) {
    auto bits = [](char c) -> std::pair<std::uint64_t, std::uint64_t> {
        switch (c) {
            case 'X': return {1, 0};
            case 'Y': return {1, 1};
            case 'Z': return {0, 1};
            default: return {0, 0};
        }
    };
    auto [ax, az] = bits(a);
    auto [bx, bz] = bits(b);
    return PauliString{ax | (bx << 1), az | (bz << 1)};
}

inline HamiltonianSpec mfim(double gx, double gz) {
    HamiltonianSpec h;
    h.model = HamiltonianSpec::Model::MFIM;
    h.gx = gx;
    h.gz = gz;
    h.tag = "mfim";
    h.terms = {{two('Z', 'Z'), 1.0}, {X0, gx}, {Z0, gz}};
    return h;
}

inline HamiltonianSpec xxz(double delta) {
    HamiltonianSpec h;
    h.model = HamiltonianSpec::Model::XXZ;
    h.delta = delta;
    h.tag = "xxz";
    h.terms = {{two('X', 'X'), 0.25}, {two('Y', 'Y'), 0.25}, {two('Z', 'Z'), 0.25 * delta}};
    return h;
}

inline HamiltonianSpec heisenberg() {
    HamiltonianSpec h = xxz(1.0);
    h.model = HamiltonianSpec::Model::Heisenberg;
    h.tag = "heisenberg";
    return h;
}

inline HamiltonianSpec tfim(double g) {
    HamiltonianSpec h;
    h.model = HamiltonianSpec::Model::TFIM;
    h.g = g;
    h.tag = "tfim";
    h.terms = {{two('Z', 'Z'), 1.0}, {X0, g}};
    return h;
}

inline HamiltonianSpec custom(std::vector<HamiltonianTerm> terms) {
    HamiltonianSpec h;
    h.terms = std::move(terms);
    return h;
}

}  // namespace hamiltonians

// ----------------------------- seeds ----------------------------------------

namespace seeds {

// MFIM energy current J = sum_i gx (Y_i Z_{i+1} - Z_i Y_{i+1}); ||A||^2 = 2 gx^2
inline OpSum energy_current(const HamiltonianSpec& h) {
    if (h.model != HamiltonianSpec::Model::MFIM)
        throw std::invalid_argument("energy-current seed is defined for the MFIM");
    OpSum op(OpMode::Translation);
    op.add(hamiltonians::two('Y', 'Z'), 0, h.gx);
    op.add(hamiltonians::two('Z', 'Y'), 0, -h.gx);
    return op;
}

// XXZ spin current J = (1/4) sum_i (X_i Y_{i+1} - Y_i X_{i+1}); ||A||^2 = 1/8
inline OpSum spin_current(const HamiltonianSpec& h) {
    if (h.model != HamiltonianSpec::Model::XXZ && h.model != HamiltonianSpec::Model::Heisenberg)
        throw std::invalid_argument("spin-current seed is defined for XXZ/Heisenberg");
    OpSum op(OpMode::Translation);
    op.add(hamiltonians::two('X', 'Y'), 0, 0.25);
    op.add(hamiltonians::two('Y', 'X'), 0, -0.25);
    return op;
}

// MFIM local energy density h_0 = (1/2)(Z_{-1}Z_0 + Z_0 Z_1) + gx X_0 + gz Z_0
inline OpSum energy_density(const HamiltonianSpec& h) {
    if (h.model != HamiltonianSpec::Model::MFIM)
        throw std::invalid_argument("energy-density seed is defined for the MFIM");
    OpSum op(OpMode::Local);
    op.add(hamiltonians::two('Z', 'Z'), -1, 0.5);
    op.add(hamiltonians::two('Z', 'Z'), 0, 0.5);
    op.add(hamiltonians::X0, 0, h.gx);
    op.add(hamiltonians::Z0, 0, h.gz);
    return op;
}

inline OpSum local_z() {
    OpSum op(OpMode::Local);
    op.add(hamiltonians::Z0, 0, 1.0);
    return op;
}

inline OpSum yy_bond() {
    OpSum op(OpMode::Translation);
    op.add(hamiltonians::two('Y', 'Y'), 0, 1.0);
    return op;
}

// translation sum of Z_0 (per-site magnetization at zero wavevector)
inline OpSum z_sum() {
    OpSum op(OpMode::Translation);
    op.add(hamiltonians::Z0, 0, 1.0);
    return op;
}

inline OpSum hamiltonian_as_opsum(const HamiltonianSpec& h) {
    OpSum op(OpMode::Translation);
    for (const auto& t : h.terms) op.add(t.p, 0, t.coupling);
    return op;
}

}  // namespace seeds

// ------------------------- Liouvillian --------------------------------------

// [H, O] for a translation-invariant H. For a representative P at offset o the
// contributions are sum_d [T_d h, P] over all placements d where the supports
// overlap; translation sums discard the offset after canonical re-alignment.
inline OpSum liouvillian_apply(const HamiltonianSpec& H, const OpSum& O,
                               int max_support = 64) {
    if (max_support > 64)
        throw std::invalid_argument("liouvillian_apply: max_support <= 64 with 64-bit masks");
    OpSum out(O.mode());
    for (const auto& [key, coeff] : O.terms()) {
        const PauliString P{key.x, key.z};
        const int lp = P.length();
        for (const auto& ht : H.terms) {
            const int lh = ht.p.length();
            for (int d = -(lh - 1); d <= lp - 1; ++d) {
                PauliString a = ht.p, b = P;
                int window_off = key.off;
                if (d >= 0) {
                    if (d + lh > 64) throw SupportOverflow("liouvillian_apply: window > 64 sites");
                    a.x <<= d;
                    a.z <<= d;
                } else {
                    if (-d + lp > 64) throw SupportOverflow("liouvillian_apply: window > 64 sites");
                    b.x <<= -d;
                    b.z <<= -d;
                    window_off += d;
                }
                if (!pauli_detail::anticommute(a, b)) continue;
                // [A, B] = 2 A B when {A,B} anticommute
                const cplx phase = pauli_detail::ipow(pauli_detail::phase_exponent(a, b));
                PauliString prod{a.x ^ b.x, a.z ^ b.z};
                if (prod.length() > max_support)
                    throw SupportOverflow("liouvillian_apply: support " +
                                          std::to_string(prod.length()) + " exceeds max " +
                                          std::to_string(max_support));
                out.add(prod, window_off, 2.0 * ht.coupling * phase * coeff);
            }
        }
    }
    return out;
}

// --------------------------- Lanczos driver ---------------------------------

struct PauliLanczosOptions {
    int n_max = 20;
    double trunc = 0.0;  // relative coefficient-magnitude pruning threshold
    int max_support = 64;
    double breakdown_tol = 1e-12;
};

inline LanczosSequence lanczos_from_hamiltonian(const HamiltonianSpec& H, const OpSum& seed,
                                                const PauliLanczosOptions& opt) {
    if (opt.n_max < 1) throw std::invalid_argument("lanczos: n_max >= 1");
    if (opt.trunc < 0) throw std::invalid_argument("lanczos: trunc >= 0");

    const double norm2 = inner_product(seed, seed).real();
    if (!(norm2 > 0)) throw std::invalid_argument("lanczos: seed has zero norm");

    LanczosSequence seq;
    seq.norm2 = norm2;
    seq.meta["model"] = H.tag;
    seq.meta["engine"] = seed.mode() == OpMode::Translation ? "pauli-translation" : "pauli-local";
    seq.meta["n"] = std::to_string(opt.n_max);
    seq.meta["trunc"] = meta_num(opt.trunc);

    OpSum prev = seed;
    prev *= 1.0 / std::sqrt(norm2);
    OpSum prev2(seed.mode());
    double b_prev = 0.0;
    std::size_t pruned_total = 0, peak_terms = prev.term_count();

    for (int n = 1; n <= opt.n_max; ++n) {
        OpSum a = liouvillian_apply(H, prev, opt.max_support);
        if (b_prev != 0.0) a.axpy(b_prev, prev2);
        if (opt.trunc > 0) {
            const std::size_t before = a.term_count();
            a.prune(opt.trunc * std::sqrt(a.norm2()));
            pruned_total += before - a.term_count();
        }
        const double bn = std::sqrt(std::max(0.0, inner_product(a, a).real()));
        if (bn < opt.breakdown_tol)
            throw BreakdownError("lanczos: b_" + std::to_string(n) +
                                 " < 1e-12, Krylov space exhausted (conserved seed?)");
        a *= 1.0 / bn;
        seq.b.push_back(bn);
        prev2 = std::move(prev);
        prev = std::move(a);
        b_prev = bn;
        peak_terms = std::max(peak_terms, prev.term_count());
    }
    seq.meta["peak_terms"] = std::to_string(peak_terms);
    if (opt.trunc > 0) seq.meta["pruned_terms"] = std::to_string(pruned_total);
    return seq;
}

}  // namespace krylov
