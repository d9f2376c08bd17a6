#pragma once

#include <cstdint>
#include <ostream>
#include <stdexcept>

namespace rcga {

// Exact rational arithmetic on 64-bit numerator/denominator.
//
// All probability masses in this project are integer counts over a common
// denominator K, so values stay tiny; intermediates are computed in 128-bit
// arithmetic and construction throws if a reduced value does not fit into
// 64 bits. Denominators are kept strictly positive.
class Rational {
  public:
    constexpr Rational() = default;
    constexpr Rational(long long value) : num_(value), den_(1) {}

    Rational(long long num, long long den) { assign(num, den); }

    static Rational from_i128(__int128 num, __int128 den) {
        Rational r;
        r.assign(num, den);
        return r;
    }

    constexpr long long num() const { return num_; }
    constexpr long long den() const { return den_; }

    double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

    friend Rational operator+(const Rational& a, const Rational& b) {
        return from_i128(i128(a.num_) * b.den_ + i128(b.num_) * a.den_, i128(a.den_) * b.den_);
    }
    friend Rational operator-(const Rational& a, const Rational& b) {
        return from_i128(i128(a.num_) * b.den_ - i128(b.num_) * a.den_, i128(a.den_) * b.den_);
    }
    friend Rational operator*(const Rational& a, const Rational& b) {
        return from_i128(i128(a.num_) * b.num_, i128(a.den_) * b.den_);
    }
    friend Rational operator/(const Rational& a, const Rational& b) {
        if (b.num_ == 0) throw std::domain_error("Rational: division by zero");
        return from_i128(i128(a.num_) * b.den_, i128(a.den_) * b.num_);
    }

    Rational& operator+=(const Rational& o) { return *this = *this + o; }
    Rational& operator-=(const Rational& o) { return *this = *this - o; }
    Rational& operator*=(const Rational& o) { return *this = *this * o; }
    Rational& operator/=(const Rational& o) { return *this = *this / o; }

    friend Rational operator-(const Rational& a) { return Rational(-a.num_, a.den_); }

    // den_ > 0 on both sides, so cross multiplication preserves order.
    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
    friend bool operator<(const Rational& a, const Rational& b) {
        return i128(a.num_) * b.den_ < i128(b.num_) * a.den_;
    }
    friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
    friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }
    friend bool operator>=(const Rational& a, const Rational& b) { return !(a < b); }

    friend std::ostream& operator<<(std::ostream& os, const Rational& x) {
        return os << x.num_ << '/' << x.den_;
    }

  private:
    using i128 = __int128;

    static constexpr i128 gcd128(i128 a, i128 b) {
        if (a < 0) a = -a;
        if (b < 0) b = -b;
        while (b != 0) {
            i128 t = a % b;
            a = b;
            b = t;
        }
        return a;
    }

    void assign(i128 num, i128 den) {
        if (den == 0) throw std::domain_error("Rational: zero denominator");
        if (den < 0) {
            num = -num;
            den = -den;
        }
        if (num == 0) {
            num_ = 0;
            den_ = 1;
            return;
        }
        const i128 g = gcd128(num, den);
        num /= g;
        den /= g;
        constexpr i128 lo = INT64_MIN, hi = INT64_MAX;
        if (num < lo || num > hi || den > hi)
            throw std::overflow_error("Rational: reduced value exceeds 64 bits");
        num_ = static_cast<long long>(num);
        den_ = static_cast<long long>(den);
    }

    long long num_ = 0;
    long long den_ = 1;
};

inline Rational abs(const Rational& x) { return x.num() < 0 ? -x : x; }

} // namespace rcga
