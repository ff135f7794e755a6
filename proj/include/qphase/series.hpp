#ifndef QPHASE_SERIES_HPP
#define QPHASE_SERIES_HPP

// Truncated Taylor series arithmetic.
//
// A Series<T> holds the coefficients c_0..c_K of f(x0 + h) = sum_k c_k h^k.
// All operations truncate to the shorter operand, so derivatives lose one
// order of depth and products never invent coefficients that were not
// determined by the inputs.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace qphase {

template <typename T>
class Series {
public:
    Series() = default;
    explicit Series(std::vector<T> coeffs) : c_(std::move(coeffs)) {}

    static Series constant(T value, std::size_t order) {
        std::vector<T> c(order + 1, T{});
        c[0] = value;
        return Series(std::move(c));
    }

    std::size_t size() const { return c_.size(); }
    /// Highest retained power; a series of size 0 has no defined order.
    std::size_t order() const { return c_.empty() ? 0 : c_.size() - 1; }
    bool empty() const { return c_.empty(); }

    const T& operator[](std::size_t k) const { return c_[k]; }
    T& operator[](std::size_t k) { return c_[k]; }
    const std::vector<T>& coeffs() const { return c_; }

    Series truncated(std::size_t order) const {
        std::vector<T> c(c_.begin(), c_.begin() + std::min(c_.size(), order + 1));
        return Series(std::move(c));
    }

    /// d/dh, one order shorter.
    Series derivative() const {
        if (c_.size() <= 1) return Series();
        std::vector<T> d(c_.size() - 1);
        for (std::size_t k = 1; k < c_.size(); ++k) d[k - 1] = T(static_cast<double>(k)) * c_[k];
        return Series(std::move(d));
    }

    Series& operator+=(const Series& o) {
        resize_to_min(o);
        for (std::size_t k = 0; k < c_.size(); ++k) c_[k] += o.c_[k];
        return *this;
    }
    Series& operator-=(const Series& o) {
        resize_to_min(o);
        for (std::size_t k = 0; k < c_.size(); ++k) c_[k] -= o.c_[k];
        return *this;
    }
    Series& operator*=(T s) {
        for (auto& v : c_) v *= s;
        return *this;
    }

    friend Series operator+(Series a, const Series& b) { return a += b; }
    friend Series operator-(Series a, const Series& b) { return a -= b; }
    friend Series operator*(Series a, T s) { return a *= s; }
    friend Series operator*(T s, Series a) { return a *= s; }

    friend Series operator*(const Series& a, const Series& b) {
        const std::size_t n = std::min(a.size(), b.size());
        std::vector<T> c(n, T{});
        for (std::size_t k = 0; k < n; ++k)
            for (std::size_t j = 0; j <= k; ++j) c[k] += a.c_[j] * b.c_[k - j];
        return Series(std::move(c));
    }

    friend Series operator/(const Series& a, const Series& b) {
        const std::size_t n = std::min(a.size(), b.size());
        if (n == 0) return Series();
        if (b.c_[0] == T{}) throw std::domain_error("series division by a series with zero constant term");
        std::vector<T> q(n, T{});
        for (std::size_t k = 0; k < n; ++k) {
            T acc = a.c_[k];
            for (std::size_t j = 1; j <= k; ++j) acc -= b.c_[j] * q[k - j];
            q[k] = acc / b.c_[0];
        }
        return Series(std::move(q));
    }

    /// Principal square root; requires a nonzero constant term.
    friend Series sqrt(const Series& a) {
        const std::size_t n = a.size();
        if (n == 0) return Series();
        if (a.c_[0] == T{}) throw std::domain_error("series sqrt of a series with zero constant term");
        std::vector<T> s(n, T{});
        using std::sqrt;
        s[0] = sqrt(a.c_[0]);
        for (std::size_t k = 1; k < n; ++k) {
            T acc = a.c_[k];
            for (std::size_t j = 1; j < k; ++j) acc -= s[j] * s[k - j];
            s[k] = acc / (T(2.0) * s[0]);
        }
        return Series(std::move(s));
    }

    /// (1 + h/x0)^power scaled by x0^power, i.e. the jet of x^power at x0.
    static Series power_jet(double x0, double power, std::size_t order) {
        std::vector<T> c(order + 1);
        double coef = std::pow(x0, power);
        for (std::size_t k = 0; k <= order; ++k) {
            c[k] = T(coef);
            coef *= (power - static_cast<double>(k)) / (static_cast<double>(k + 1) * x0);
        }
        return Series(std::move(c));
    }

private:
    void resize_to_min(const Series& o) {
        if (o.c_.size() < c_.size()) c_.resize(o.c_.size());
    }

    std::vector<T> c_;
};

using RealSeries = Series<double>;
using ComplexSeries = Series<std::complex<double>>;

inline ComplexSeries to_complex(const RealSeries& r) {
    std::vector<std::complex<double>> c(r.coeffs().begin(), r.coeffs().end());
    return ComplexSeries(std::move(c));
}

}  // namespace qphase

#endif  // QPHASE_SERIES_HPP
