#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

namespace chaoscope {

/// Floating value with an explicit wide binary exponent: v = frac * 2^exp,
/// frac == 0 or 0.5 <= |frac| < 1. Orbit coordinates of expanding shifts
/// span far more than the double exponent range (amplitudes like k*2^(-k^2)
/// with k in the hundreds), so plain doubles silently flush the tail of the
/// canonical block vectors to zero.
struct ScaledReal {
    double frac = 0.0;
    std::int64_t exp = 0;

    constexpr ScaledReal() = default;

    static ScaledReal from_double(double v) {
        ScaledReal r;
        if (v == 0.0) return r;
        int e = 0;
        r.frac = std::frexp(v, &e);
        r.exp = e;
        return r;
    }

    /// Exact 2^e.
    static ScaledReal pow2(std::int64_t e) {
        ScaledReal r;
        r.frac = 0.5;
        r.exp = e + 1;
        return r;
    }

    static ScaledReal make(double frac_in, std::int64_t exp_in) {
        ScaledReal r;
        if (frac_in == 0.0) return r;
        int e = 0;
        r.frac = std::frexp(frac_in, &e);
        r.exp = exp_in + e;
        return r;
    }

    bool is_zero() const { return frac == 0.0; }
    bool negative() const { return frac < 0.0; }

    /// Conversion saturates: huge exponents map to +/-inf, tiny ones to 0.
    double to_double() const {
        if (frac == 0.0) return 0.0;
        if (exp > 1100) return frac > 0 ? std::numeric_limits<double>::infinity()
                                        : -std::numeric_limits<double>::infinity();
        if (exp < -1100) return 0.0;
        return std::ldexp(frac, static_cast<int>(exp));
    }

    ScaledReal operator-() const {
        ScaledReal r = *this;
        r.frac = -r.frac;
        return r;
    }

    ScaledReal abs() const {
        ScaledReal r = *this;
        r.frac = std::fabs(r.frac);
        return r;
    }

    friend ScaledReal operator*(const ScaledReal& a, const ScaledReal& b) {
        if (a.is_zero() || b.is_zero()) return {};
        return make(a.frac * b.frac, a.exp + b.exp);
    }

    friend ScaledReal operator+(ScaledReal a, ScaledReal b) {
        if (a.is_zero()) return b;
        if (b.is_zero()) return a;
        if (a.exp < b.exp) std::swap(a, b);
        std::int64_t diff = a.exp - b.exp;
        if (diff > 128) return a;  // addend below one ulp of the result
        double sum = a.frac + std::ldexp(b.frac, -static_cast<int>(diff));
        return make(sum, a.exp);
    }

    friend ScaledReal operator-(const ScaledReal& a, const ScaledReal& b) { return a + (-b); }

    ScaledReal& operator+=(const ScaledReal& o) { return *this = *this + o; }
    ScaledReal& operator*=(const ScaledReal& o) { return *this = *this * o; }

    /// |this|^p for p > 0; requires a nonnegative base in practice.
    ScaledReal pow(double p) const {
        if (is_zero()) return {};
        double m = std::fabs(frac);
        double t = static_cast<double>(exp) * p;
        double fl = std::floor(t);
        double m2 = std::pow(m, p) * std::exp2(t - fl);
        return make(m2, static_cast<std::int64_t>(fl));
    }

    ScaledReal sqrt() const { return pow(0.5); }

    /// Multiplicative inverse (nonzero values only).
    ScaledReal inverse() const { return make(1.0 / frac, -exp); }

    /// Integer power by repeated squaring; stays normalized for exponents far
    /// beyond the double range.
    ScaledReal ipow(std::int64_t n) const {
        if (n < 0) return inverse().ipow(-n);
        ScaledReal r = from_double(1.0);
        ScaledReal b = *this;
        while (n > 0) {
            if (n & 1) r *= b;
            b *= b;
            n >>= 1;
        }
        return r;
    }

    /// Magnitude comparison.
    friend bool mag_less(const ScaledReal& a, const ScaledReal& b) {
        if (a.is_zero()) return !b.is_zero();
        if (b.is_zero()) return false;
        if (a.exp != b.exp) return a.exp < b.exp;
        return std::fabs(a.frac) < std::fabs(b.frac);
    }

    friend bool operator<(const ScaledReal& a, const ScaledReal& b) {
        bool an = a.frac < 0.0, bn = b.frac < 0.0;
        if (an != bn) return an;
        if (!an) return mag_less(a, b);
        return mag_less(b, a);
    }

    friend bool operator==(const ScaledReal& a, const ScaledReal& b) {
        return a.frac == b.frac && (a.is_zero() || a.exp == b.exp);
    }
    friend bool operator!=(const ScaledReal& a, const ScaledReal& b) { return !(a == b); }
};

/// Relative difference |a-b| / max(|a|,|b|); 0 when both vanish.
inline double relative_diff(const ScaledReal& a, const ScaledReal& b) {
    if (a.is_zero() && b.is_zero()) return 0.0;
    ScaledReal d = (a - b).abs();
    ScaledReal m = mag_less(a.abs(), b.abs()) ? b.abs() : a.abs();
    ScaledReal q = ScaledReal::make(d.frac / m.frac, d.exp - m.exp);
    double r = q.to_double();
    return std::fabs(r);
}

}  // namespace chaoscope
