#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <tuple>

namespace mlg
{

using Int = std::int64_t;

// Overflow-checked 64-bit arithmetic. Every quantity in the toolkit is exact,
// so silent wraparound is never acceptable.
inline Int checked_add(Int a, Int b)
{
    Int r;
    if (__builtin_add_overflow(a, b, &r))
        throw std::overflow_error("integer overflow in addition");
    return r;
}

inline Int checked_sub(Int a, Int b)
{
    Int r;
    if (__builtin_sub_overflow(a, b, &r))
        throw std::overflow_error("integer overflow in subtraction");
    return r;
}

inline Int checked_mul(Int a, Int b)
{
    Int r;
    if (__builtin_mul_overflow(a, b, &r))
        throw std::overflow_error("integer overflow in multiplication");
    return r;
}

/// Least nonnegative residue of a modulo m (m > 0).
inline Int mod(Int a, Int m)
{
    Int r = a % m;
    return r < 0 ? r + m : r;
}

inline Int mulmod(Int a, Int b, Int m)
{
    __int128 r = static_cast<__int128>(mod(a, m)) * static_cast<__int128>(mod(b, m));
    return static_cast<Int>(r % m);
}

inline Int addmod(Int a, Int b, Int m)
{
    return static_cast<Int>((static_cast<__int128>(mod(a, m)) + mod(b, m)) % m);
}

inline Int powmod(Int base, Int exp, Int m)
{
    if (m == 1)
        return 0;
    Int result = 1;
    base = mod(base, m);
    while (exp > 0) {
        if (exp & 1)
            result = mulmod(result, base, m);
        base = mulmod(base, base, m);
        exp >>= 1;
    }
    return result;
}

inline Int gcd(Int a, Int b)
{
    return std::gcd(a, b);
}

inline Int lcm(Int a, Int b)
{
    if (a == 0 || b == 0)
        return 0;
    return checked_mul(a / gcd(a, b), b < 0 ? -b : b);
}

// Returns (g, x, y) with a*x + b*y = g = gcd(a, b) >= 0.
inline std::tuple<Int, Int, Int> ext_gcd(Int a, Int b)
{
    Int old_r = a, r = b;
    Int old_s = 1, s = 0;
    Int old_t = 0, t = 1;
    while (r != 0) {
        Int q = old_r / r;
        std::tie(old_r, r) = std::make_tuple(r, old_r - q * r);
        std::tie(old_s, s) = std::make_tuple(s, old_s - q * s);
        std::tie(old_t, t) = std::make_tuple(t, old_t - q * t);
    }
    if (old_r < 0)
        return {-old_r, -old_s, -old_t};
    return {old_r, old_s, old_t};
}

/// Inverse of a modulo m; requires gcd(a, m) = 1. Modulus 1 yields 0.
inline Int inverse_mod(Int a, Int m)
{
    if (m == 1)
        return 0;
    auto [g, x, y] = ext_gcd(mod(a, m), m);
    (void)y;
    if (g != 1)
        throw std::domain_error("inverse_mod: " + std::to_string(a) + " not invertible mod " +
                                std::to_string(m));
    return mod(x, m);
}

/// Integer power; throws on overflow.
inline Int ipow(Int base, Int exp)
{
    Int r = 1;
    for (Int i = 0; i < exp; ++i)
        r = checked_mul(r, base);
    return r;
}

// Floor division for signed integers (b > 0).
inline Int floor_div(Int a, Int b)
{
    Int q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0)))
        --q;
    return q;
}

/// If q = p^e for a prime p and e >= 1, returns p; otherwise 0.
inline Int prime_power_base(Int q)
{
    if (q < 2)
        return 0;
    Int p = 0;
    for (Int d = 2; d * d <= q; ++d) {
        if (q % d == 0) {
            p = d;
            break;
        }
    }
    if (p == 0)
        return q;
    while (q % p == 0)
        q /= p;
    return q == 1 ? p : 0;
}

} // namespace mlg
