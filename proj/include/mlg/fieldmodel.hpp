#pragma once

#include <optional>
#include <string>
#include <vector>

#include "errors.hpp"
#include "extcalc.hpp"
#include "rational.hpp"

namespace mlg
{

/// Frob^i in the cyclic Galois group Z/k.
struct GaloisElement {
    Int i = 0;
    friend auto operator<=>(const GaloisElement&, const GaloisElement&) = default;
};

/**
 * Cyclic model of the multiplicative group of F_{q^k}: an element is an
 * exponent e mod N = q^k - 1 of a fixed generator g, and Frobenius acts by
 * e -> q e. Roots that do not exist in F_{q^k} are taken in F_{q^{kn}}, whose
 * modulus M is fixed at construction.
 */
struct FieldModel {
    Int q = 2;
    Int n = 1;
    Int k = 1;
    Int N = 1;
    Int epsilon_unit = 1;
    Int registry_modulus = 1;

    Int base_step() const { return N / (q - 1); }   // F^x = <g^base_step>
    Int mu_step() const { return N / n; }            // mu_n = <g^mu_step>
    Int registry_factor() const { return registry_modulus / N; }

    GaloisElement identity() const { return {0}; }
    GaloisElement compose(GaloisElement a, GaloisElement b) const { return {mod(a.i + b.i, k)}; }
    GaloisElement inverse(GaloisElement a) const { return {mod(-a.i, k)}; }
    std::vector<GaloisElement> galois_elements() const
    {
        std::vector<GaloisElement> out;
        for (Int i = 0; i < k; ++i)
            out.push_back({i});
        return out;
    }
    FiniteGroupTable galois_table() const { return FiniteGroupTable::cyclic(static_cast<std::size_t>(k)); }

    /// Multiplier by which gamma acts on exponents mod N.
    Int frobenius_factor(GaloisElement g) const { return powmod(q, mod(g.i, k), N); }
    Int apply(GaloisElement g, Int e) const { return mulmod(frobenius_factor(g), e, N); }
    Int apply_inverse(GaloisElement g, Int e) const { return apply(inverse(g), e); }

    bool in_base_field(Int e) const { return mod(e, N) % base_step() == 0; }
    bool in_mu_n(Int e) const { return mod(e, N) % mu_step() == 0; }

    friend bool operator==(const FieldModel&, const FieldModel&) = default;
};

/// Least k >= 1 with n | (q^k - 1)/(q - 1); throws if q^k overflows first.
inline Int default_extension_degree(Int q, Int n)
{
    // (q^k - 1)/(q - 1) = 1 + q + ... + q^{k-1}; computed mod n.
    Int s = 0, p = 1;
    for (Int k = 1; k <= n * (q + 1) + 1; ++k) {
        s = addmod(s, p, n);
        p = mulmod(p, q, n);
        if (s == 0)
            return k;
    }
    throw StructuralError("no extension degree found for q=" + std::to_string(q) + ", n=" + std::to_string(n));
}

/**
 * Builds and validates the field model. Violations raise StructuralError
 * whose message names the broken invariant.
 */
inline FieldModel build_field_model(Int q, Int n, std::optional<Int> k = std::nullopt, Int epsilon_unit = 1)
{
    if (prime_power_base(q) == 0)
        throw StructuralError("field.q: q=" + std::to_string(q) + " is not a prime power");
    if (n < 1)
        throw StructuralError("field.n: cover degree must be positive");
    if ((q - 1) % n != 0)
        throw StructuralError("field invariant n | q-1 violated: n=" + std::to_string(n) + " does not divide q-1=" +
                              std::to_string(q - 1) + " (mu_n(F) must have exactly n elements; choose q = 1 mod " +
                              std::to_string(n) + ")");
    if (gcd(mod(epsilon_unit, n), n) != 1 && n > 1)
        throw StructuralError("field.epsilon_unit: " + std::to_string(epsilon_unit) + " is not a unit mod " +
                              std::to_string(n));
    FieldModel fm;
    fm.q = q;
    fm.n = n;
    fm.epsilon_unit = mod(epsilon_unit, n);
    if (n == 1)
        fm.epsilon_unit = 0;
    fm.k = k ? *k : default_extension_degree(q, n);
    if (fm.k < 1)
        throw StructuralError("field.k: extension degree must be positive");
    try {
        fm.N = ipow(q, fm.k) - 1;
        fm.registry_modulus = ipow(q, checked_mul(fm.k, n)) - 1;
    } catch (const std::overflow_error&) {
        throw StructuralError("field model q^(k n) exceeds 64-bit range (q=" + std::to_string(q) +
                              ", k=" + std::to_string(fm.k) + ", n=" + std::to_string(n) + ")");
    }
    if ((fm.N / (q - 1)) % n != 0)
        throw StructuralError("field invariant n | (q^k-1)/(q-1) violated for k=" + std::to_string(fm.k));
    if (fm.registry_factor() % n != 0)
        throw StructuralError("field model registry is not divisible by n");
    return fm;
}

/// MuNValue: epsilon of an element of mu_n, as a value in (1/n)Z/Z.
inline QZ epsilon(const FieldModel& fm, Int zeta)
{
    if (!fm.in_mu_n(zeta))
        throw std::domain_error("epsilon: g^" + std::to_string(mod(zeta, fm.N)) + " is not in mu_n");
    Int j = mod(zeta, fm.N) / fm.mu_step();
    return QZ(mulmod(fm.epsilon_unit, j, fm.n), fm.n);
}

/// An n-th root, living either in the model itself or in the degree-n registry.
struct RootValue {
    Int exponent = 0;
    Int modulus = 1;
    bool in_registry = false;
    friend bool operator==(const RootValue&, const RootValue&) = default;
};

/// n-th root of g^u with the least nonnegative exponent in the smallest model holding one.
inline RootValue nth_root(const FieldModel& fm, Int u)
{
    u = mod(u, fm.N);
    if (u % fm.n == 0)
        return {u / fm.n, fm.N, false};
    Int lifted = mulmod(u, fm.registry_factor(), fm.registry_modulus);
    return {lifted / fm.n, fm.registry_modulus, true};
}

/// All n roots of g^u, starting with the canonical one.
inline std::vector<RootValue> nth_roots(const FieldModel& fm, Int u)
{
    RootValue v = nth_root(fm, u);
    std::vector<RootValue> out;
    for (Int j = 0; j < fm.n; ++j)
        out.push_back({addmod(v.exponent, checked_mul(j, v.modulus / fm.n), v.modulus), v.modulus, v.in_registry});
    return out;
}

/// v^n read back in the model of v, for checking.
inline Int root_power(const FieldModel& fm, const RootValue& v)
{
    return mulmod(v.exponent, fm.n, v.modulus);
}

/**
 * epsilon(gamma^{-1}(v)/v * g^twist) for the root v. twist is an exponent in
 * the base model. Throws std::domain_error if the product is not in mu_n.
 * In the registry gamma^{-1} is Frob^{k - i}.
 */
inline QZ kummer_epsilon(const FieldModel& fm, GaloisElement g, const RootValue& v, Int twist = 0)
{
    Int M = v.modulus;
    Int e = mod(fm.k - mod(g.i, fm.k), fm.k);
    Int ratio = mulmod(powmod(fm.q, e, M) - 1, v.exponent, M);
    Int factor = M / fm.N;
    Int w = addmod(ratio, mulmod(twist, factor, M), M);
    Int step = M / fm.n;
    if (w % step != 0)
        throw std::domain_error("kummer_epsilon: value g^" + std::to_string(w) + " is not in mu_n");
    return QZ(mulmod(fm.epsilon_unit, w / step, fm.n), fm.n);
}

inline QZ kummer_epsilon(const FieldModel& fm, GaloisElement g, Int u, Int twist = 0)
{
    return kummer_epsilon(fm, g, nth_root(fm, u), twist);
}

/// The Artin-symbol character gamma -> (u -> epsilon(gamma^{-1} v / v)), v^n = u.
inline QZ artin_character(const FieldModel& fm, GaloisElement g, Int u)
{
    if (!fm.in_base_field(u))
        throw std::domain_error("artin_character: g^" + std::to_string(mod(u, fm.N)) +
                                " is not in the base field");
    return kummer_epsilon(fm, g, u);
}

} // namespace mlg
