// interp.hpp — monotone cubic (Fritsch–Carlson) interpolation on a nonuniform grid

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace krylov {

class MonotoneCubic {
public:
    MonotoneCubic() = default;

    MonotoneCubic(std::vector<double> x, std::vector<double> y)
        : x_(std::move(x)), y_(std::move(y)) {
        const std::size_t n = x_.size();
        if (n < 2 || y_.size() != n)
            throw std::invalid_argument("MonotoneCubic: need >= 2 matching points");
        for (std::size_t i = 1; i < n; ++i)
            if (!(x_[i] > x_[i - 1]))
                throw std::invalid_argument("MonotoneCubic: x must be strictly increasing");

        std::vector<double> d(n - 1);
        for (std::size_t i = 0; i + 1 < n; ++i)
            d[i] = (y_[i + 1] - y_[i]) / (x_[i + 1] - x_[i]);

        m_.assign(n, 0.0);
        m_[0] = d[0];
        m_[n - 1] = d[n - 2];
        for (std::size_t i = 1; i + 1 < n; ++i) {
            if (d[i - 1] * d[i] <= 0.0) {
                m_[i] = 0.0;
            } else {
                const double h0 = x_[i] - x_[i - 1], h1 = x_[i + 1] - x_[i];
                const double w0 = 2.0 * h1 + h0, w1 = h1 + 2.0 * h0;
                m_[i] = (w0 + w1) / (w0 / d[i - 1] + w1 / d[i]);
            }
        }
        // Fritsch-Carlson clamping keeps each segment monotone
        for (std::size_t i = 0; i + 1 < n; ++i) {
            if (d[i] == 0.0) {
                m_[i] = m_[i + 1] = 0.0;
                continue;
            }
            const double a = m_[i] / d[i], b = m_[i + 1] / d[i];
            const double s = a * a + b * b;
            if (s > 9.0) {
                const double t = 3.0 / std::sqrt(s);
                m_[i] = t * a * d[i];
                m_[i + 1] = t * b * d[i];
            }
        }
    }

    double x_min() const { return x_.front(); }
    double x_max() const { return x_.back(); }
    bool contains(double x) const { return x >= x_.front() && x <= x_.back(); }

    double operator()(double x) const {
        const std::size_t i = segment(x);
        const double h = x_[i + 1] - x_[i];
        const double t = (x - x_[i]) / h;
        const double t2 = t * t, t3 = t2 * t;
        const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t;
        const double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
        return h00 * y_[i] + h10 * h * m_[i] + h01 * y_[i + 1] + h11 * h * m_[i + 1];
    }

    double derivative(double x) const {
        const std::size_t i = segment(x);
        const double h = x_[i + 1] - x_[i];
        const double t = (x - x_[i]) / h;
        const double t2 = t * t;
        const double dh00 = (6 * t2 - 6 * t) / h, dh10 = (3 * t2 - 4 * t + 1);
        const double dh01 = (-6 * t2 + 6 * t) / h, dh11 = (3 * t2 - 2 * t);
        return dh00 * y_[i] + dh10 * m_[i] + dh01 * y_[i + 1] + dh11 * m_[i + 1];
    }

private:
    std::size_t segment(double x) const {
        auto it = std::upper_bound(x_.begin(), x_.end(), x);
        std::size_t i = (it == x_.begin()) ? 0 : std::size_t(it - x_.begin()) - 1;
        return std::min(i, x_.size() - 2);
    }

    std::vector<double> x_, y_, m_;
};

}  // namespace krylov
