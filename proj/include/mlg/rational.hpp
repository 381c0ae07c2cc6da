#pragma once

#include <compare>
#include <ostream>
#include <stdexcept>
#include <string>

#include "intmath.hpp"

namespace mlg
{

/**
 * Exact rational number with 64-bit numerator and denominator.
 * Always normalized: den > 0 and gcd(num, den) = 1.
 */
class Rational
{
public:
    constexpr Rational() noexcept = default;
    Rational(Int n) noexcept : num_(n), den_(1) {}
    Rational(Int n, Int d) : num_(n), den_(d) { normalize(); }

    Int num() const noexcept { return num_; }
    Int den() const noexcept { return den_; }
    bool is_integer() const noexcept { return den_ == 1; }

    Rational operator-() const { return Rational(checked_sub(0, num_), den_); }

    friend Rational operator+(const Rational& a, const Rational& b)
    {
        Int g = gcd(a.den_, b.den_);
        Int da = a.den_ / g;
        return Rational(checked_add(checked_mul(a.num_, b.den_ / g), checked_mul(b.num_, da)),
                        checked_mul(da, b.den_));
    }
    friend Rational operator-(const Rational& a, const Rational& b) { return a + (-b); }
    friend Rational operator*(const Rational& a, const Rational& b)
    {
        Int g1 = gcd(a.num_, b.den_);
        Int g2 = gcd(b.num_, a.den_);
        if (g1 == 0)
            g1 = 1;
        if (g2 == 0)
            g2 = 1;
        return Rational(checked_mul(a.num_ / g1, b.num_ / g2), checked_mul(a.den_ / g2, b.den_ / g1));
    }
    friend Rational operator/(const Rational& a, const Rational& b)
    {
        if (b.num_ == 0)
            throw std::domain_error("rational division by zero");
        return a * Rational(b.den_, b.num_);
    }
    Rational& operator+=(const Rational& o) { return *this = *this + o; }
    Rational& operator-=(const Rational& o) { return *this = *this - o; }
    Rational& operator*=(const Rational& o) { return *this = *this * o; }

    friend bool operator==(const Rational&, const Rational&) = default;
    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b)
    {
        __int128 l = static_cast<__int128>(a.num_) * b.den_;
        __int128 r = static_cast<__int128>(b.num_) * a.den_;
        return l <=> r;
    }

    Int floor() const { return floor_div(num_, den_); }

    std::string to_string() const
    {
        if (den_ == 1)
            return std::to_string(num_);
        return std::to_string(num_) + "/" + std::to_string(den_);
    }

    /// Parses "p", "p/q" or "-p/q". Floating-point literals are rejected.
    static Rational parse(const std::string& s)
    {
        auto slash = s.find('/');
        auto parse_int = [&](const std::string& part) -> Int {
            if (part.empty())
                throw std::invalid_argument("malformed rational '" + s + "'");
            std::size_t pos = 0;
            Int v = 0;
            try {
                v = std::stoll(part, &pos);
            } catch (const std::exception&) {
                throw std::invalid_argument("malformed rational '" + s + "'");
            }
            if (pos != part.size())
                throw std::invalid_argument("malformed rational '" + s + "'");
            return v;
        };
        if (slash == std::string::npos)
            return Rational(parse_int(s));
        Int d = parse_int(s.substr(slash + 1));
        if (d == 0)
            throw std::invalid_argument("zero denominator in '" + s + "'");
        return Rational(parse_int(s.substr(0, slash)), d);
    }

    friend std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.to_string(); }

private:
    void normalize()
    {
        if (den_ == 0)
            throw std::domain_error("rational with zero denominator");
        if (den_ < 0) {
            num_ = checked_sub(0, num_);
            den_ = checked_sub(0, den_);
        }
        Int g = gcd(num_, den_);
        if (g > 1) {
            num_ /= g;
            den_ /= g;
        }
    }

    Int num_ = 0;
    Int den_ = 1;
};

/**
 * An element of Q/Z, stored by its representative in [0, 1).
 *
 * This is the additive model of the torsion of C^x: exp(2 pi i x) <-> x.
 */
class QZ
{
public:
    QZ() = default;
    QZ(const Rational& r) : value_(reduce(r)) {}
    QZ(Int num, Int den) : value_(reduce(Rational(num, den))) {}

    const Rational& value() const noexcept { return value_; }
    Int den() const noexcept { return value_.den(); }
    bool is_zero() const noexcept { return value_.num() == 0; }

    friend QZ operator+(const QZ& a, const QZ& b) { return QZ(a.value_ + b.value_); }
    friend QZ operator-(const QZ& a, const QZ& b) { return QZ(a.value_ - b.value_); }
    QZ operator-() const { return QZ(-value_); }
    friend QZ operator*(Int k, const QZ& a)
    {
        // k * (p/q) mod 1 == (k mod q) * p / q mod 1
        Int km = mod(k, a.den());
        return QZ(Rational(mulmod(km, a.value_.num(), a.den()), a.den()));
    }
    QZ& operator+=(const QZ& o) { return *this = *this + o; }
    QZ& operator-=(const QZ& o) { return *this = *this - o; }

    /// The representative x/d of (this representative)/d; one of the d preimages under
    /// multiplication by d.
    QZ divided_by(Int d) const { return QZ(value_ / Rational(d)); }

    /// True iff d*x = 0 in Q/Z.
    bool killed_by(Int d) const { return d % den() == 0; }

    friend bool operator==(const QZ&, const QZ&) = default;
    friend std::strong_ordering operator<=>(const QZ& a, const QZ& b) { return a.value_ <=> b.value_; }

    std::string to_string() const
    {
        if (value_.num() == 0)
            return "0";
        return std::to_string(value_.num()) + "/" + std::to_string(value_.den());
    }
    static QZ parse(const std::string& s) { return QZ(Rational::parse(s)); }

    friend std::ostream& operator<<(std::ostream& os, const QZ& x) { return os << x.to_string(); }

private:
    static Rational reduce(const Rational& r)
    {
        Int n = mod(r.num(), r.den());
        return Rational(n, r.den());
    }

    Rational value_;
};

} // namespace mlg
