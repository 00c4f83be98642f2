#pragma once

#include <cstdint>
#include <numeric>
#include <ostream>
#include <string>

#include "pinchflow/errors.hpp"

namespace pinchflow {

// ============================================================================
// Exact rational arithmetic
// ============================================================================
//
// Curvature components of the spaces handled here are half-integers, and the
// frame contractions we evaluate exactly only ever multiply and add a handful
// of them, so a normalized int64 fraction is plenty.  Overflow is checked via
// __int128 intermediates and throws rather than wrapping.

class Rational {
public:
    Rational() : num_(0), den_(1) {}
    Rational(long long n) : num_(n), den_(1) {}
    Rational(long long n, long long d) : num_(n), den_(d) { normalize(); }

    long long num() const { return num_; }
    long long den() const { return den_; }

    Rational operator-() const { return Rational(-num_, den_, already_normalized{}); }

    friend Rational operator+(const Rational& a, const Rational& b) {
        __int128 n = (__int128)a.num_ * b.den_ + (__int128)b.num_ * a.den_;
        __int128 d = (__int128)a.den_ * b.den_;
        return make_checked(n, d);
    }
    friend Rational operator-(const Rational& a, const Rational& b) { return a + (-b); }
    friend Rational operator*(const Rational& a, const Rational& b) {
        __int128 n = (__int128)a.num_ * b.num_;
        __int128 d = (__int128)a.den_ * b.den_;
        return make_checked(n, d);
    }
    friend Rational operator/(const Rational& a, const Rational& b) {
        if (b.num_ == 0) throw ValidationError("Rational: division by zero");
        __int128 n = (__int128)a.num_ * b.den_;
        __int128 d = (__int128)a.den_ * b.num_;
        return make_checked(n, d);
    }

    Rational& operator+=(const Rational& o) { return *this = *this + o; }
    Rational& operator-=(const Rational& o) { return *this = *this - o; }
    Rational& operator*=(const Rational& o) { return *this = *this * o; }

    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
    friend bool operator<(const Rational& a, const Rational& b) {
        return (__int128)a.num_ * b.den_ < (__int128)b.num_ * a.den_;
    }

    double to_double() const { return double(num_) / double(den_); }

    std::string str() const {
        if (den_ == 1) return std::to_string(num_);
        return std::to_string(num_) + "/" + std::to_string(den_);
    }
    friend std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

private:
    struct already_normalized {};
    Rational(long long n, long long d, already_normalized) : num_(n), den_(d) {}

    static Rational make_checked(__int128 n, __int128 d) {
        if (d < 0) { n = -n; d = -d; }
        if (d == 0) throw ValidationError("Rational: zero denominator");
        __int128 g = gcd128(n < 0 ? -n : n, d);
        if (g > 1) { n /= g; d /= g; }
        if (n > INT64_MAX || n < INT64_MIN || d > INT64_MAX)
            throw NumericalError("Rational: overflow");
        return Rational((long long)n, (long long)d, already_normalized{});
    }

    static __int128 gcd128(__int128 a, __int128 b) {
        while (b != 0) { __int128 t = a % b; a = b; b = t; }
        return a == 0 ? 1 : a;
    }

    void normalize() {
        if (den_ == 0) throw ValidationError("Rational: zero denominator");
        if (den_ < 0) { num_ = -num_; den_ = -den_; }
        long long g = std::gcd(num_ < 0 ? -num_ : num_, den_);
        if (g > 1) { num_ /= g; den_ /= g; }
    }

    long long num_;
    long long den_;
};

/// Complex number with exact rational real/imaginary parts.  Used for the
/// exact frame contractions where tangent entries are Gaussian rationals.
struct RationalComplex {
    Rational re;
    Rational im;

    RationalComplex() = default;
    RationalComplex(Rational r) : re(r), im(0) {}
    RationalComplex(Rational r, Rational i) : re(r), im(i) {}

    static RationalComplex unit_i() { return RationalComplex(Rational(0), Rational(1)); }

    RationalComplex conj() const { return RationalComplex(re, -im); }
    bool is_zero() const { return re == Rational(0) && im == Rational(0); }

    friend RationalComplex operator+(const RationalComplex& a, const RationalComplex& b) {
        return RationalComplex(a.re + b.re, a.im + b.im);
    }
    friend RationalComplex operator-(const RationalComplex& a, const RationalComplex& b) {
        return RationalComplex(a.re - b.re, a.im - b.im);
    }
    friend RationalComplex operator*(const RationalComplex& a, const RationalComplex& b) {
        return RationalComplex(a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re);
    }
    friend bool operator==(const RationalComplex& a, const RationalComplex& b) {
        return a.re == b.re && a.im == b.im;
    }
};

} // namespace pinchflow
