#pragma once

#include <cstdint>
#include <numeric>
#include <string>

#include "ptile/error.hpp"

namespace ptile {

/// Exact non-negative-denominator fraction; always stored in lowest terms.
class Rational {
public:
    constexpr Rational() = default;
    Rational(std::int64_t num, std::int64_t den = 1) : num_(num), den_(den)
    {
        if (den_ == 0)
            throw Error("zero denominator");
        if (den_ < 0) {
            num_ = -num_;
            den_ = -den_;
        }
        auto g = std::gcd(num_ < 0 ? -num_ : num_, den_);
        if (g > 1) {
            num_ /= g;
            den_ /= g;
        }
    }

    std::int64_t num() const { return num_; }
    std::int64_t den() const { return den_; }
    double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

    friend bool operator==(const Rational& a, const Rational& b) { return a.num_ == b.num_ && a.den_ == b.den_; }
    friend int compare(const Rational& a, const Rational& b)
    {
        __int128 l = static_cast<__int128>(a.num_) * b.den_;
        __int128 r = static_cast<__int128>(b.num_) * a.den_;
        return l < r ? -1 : (l > r ? 1 : 0);
    }
    friend bool operator<(const Rational& a, const Rational& b) { return compare(a, b) < 0; }
    friend bool operator<=(const Rational& a, const Rational& b) { return compare(a, b) <= 0; }
    friend bool operator>(const Rational& a, const Rational& b) { return compare(a, b) > 0; }
    friend bool operator>=(const Rational& a, const Rational& b) { return compare(a, b) >= 0; }

    friend Rational operator-(const Rational& a, const Rational& b)
    {
        return Rational(a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_);
    }
    friend Rational operator*(const Rational& a, const Rational& b)
    {
        return Rational(a.num_ * b.num_, a.den_ * b.den_);
    }
    friend Rational abs(const Rational& a) { return Rational(a.num_ < 0 ? -a.num_ : a.num_, a.den_); }

    std::string to_string() const
    {
        return den_ == 1 ? std::to_string(num_) : std::to_string(num_) + "/" + std::to_string(den_);
    }

    /// Parses "p/q" or an integer literal.
    static Rational parse(const std::string& text);

private:
    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

} // namespace ptile
