// sequence.hpp — the Lanczos coefficient sequence and its provenance metadata

#pragma once

#include <cstdio>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace krylov {

// numeric meta values, full double precision
inline std::string meta_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

struct LanczosSequence {
    std::vector<double> b;  // b_1..b_N, all > 0, frequency units
    double norm2 = 1.0;     // (A|A) of the unnormalized seed
    std::map<std::string, std::string> meta;

    int size() const { return static_cast<int>(b.size()); }

    double at(int n) const {  // 1-based, matching b_n
        if (n < 1 || n > size()) throw std::out_of_range("LanczosSequence: index");
        return b[static_cast<std::size_t>(n - 1)];
    }

    void check() const {
        if (norm2 <= 0.0) throw std::invalid_argument("LanczosSequence: norm2 must be > 0");
        for (double v : b)
            if (!(v > 0.0)) throw std::invalid_argument("LanczosSequence: all b_n must be > 0");
    }
};

}  // namespace krylov
