#pragma once

#include <optional>
#include <string>
#include <vector>

#include "errors.hpp"
#include "fieldmodel.hpp"
#include "metaplectic.hpp"

namespace mlg
{

/// Element of Hom(Y_{Q,n}, F^x-bar): exponents mod N on the Y_{Q,n} basis.
using TorusCharacter = IntVec;

/// The splitting y -> (y, t(y)) relative to the base section.
struct Splitting {
    TorusCharacter t;
    friend bool operator==(const Splitting&, const Splitting&) = default;
};

/// Element E_alpha = (over, g^value) supplied for a simple root; `over` is in Y-coordinates.
struct EInput {
    IntVec over;
    Int value = 0;
};

/**
 * Trivialized model of D-bar_{Q,n} = Y_{Q,n} x F^x-bar. Frob^i acts by
 * (y, u) -> (y, q^i u + c[i] . y) on exponents.
 */
struct DModel {
    MetaplecticDualDatum dd;
    FieldModel fm;
    std::vector<TorusCharacter> c;   // one row per Frob^i, i = 0..k-1
    std::vector<EInput> e_inputs;    // one per simple root, in simple-root order
    IntVec signs;                    // r_alpha used for each simple root
    IntVec s_psi;                    // exponent of s_psi on each modified simple coroot
    IntVec lifts;                    // invariant lift exponent over each Y_{Q,n} basis vector

    std::size_t rank() const { return dd.rank(); }
    const IntMat& sc_basis() const { return dd.ysc_basis; }
    /// Generator g^{N/(q-1)} of the base-field kernel F^x.
    Int kernel_generator() const { return fm.base_step(); }
};

// Exponent of c_gamma(y).
inline Int cocycle_value(const DModel& dm, GaloisElement g, const IntVec& y)
{
    return dot_mod(dm.c[static_cast<std::size_t>(mod(g.i, dm.fm.k))], y, dm.fm.N);
}

/// gamma . (y, u), returning the new F^x-bar coordinate.
inline Int act(const DModel& dm, GaloisElement g, const IntVec& y, Int u)
{
    return addmod(dm.fm.apply(g, u), cocycle_value(dm, g, y), dm.fm.N);
}

inline bool is_invariant(const DModel& dm, const IntVec& y, Int u)
{
    for (auto g : dm.fm.galois_elements())
        if (act(dm, g, y, u) != mod(u, dm.fm.N))
            return false;
    return true;
}

/// Full table c_i from c_1 via c_{i+1} = q c_i + c_1.
inline std::vector<TorusCharacter> cocycle_from_generator(const FieldModel& fm, const TorusCharacter& c1)
{
    std::vector<TorusCharacter> c{TorusCharacter(c1.size(), 0)};
    for (Int i = 1; i < fm.k; ++i) {
        TorusCharacter next(c1.size());
        for (std::size_t j = 0; j < c1.size(); ++j)
            next[j] = addmod(mulmod(fm.q, c.back()[j], fm.N), c1[j], fm.N);
        c.push_back(next);
    }
    return c;
}

struct CocycleViolation {
    Int i = 0, j = 0;
    std::size_t coordinate = 0;
};

/// First (i, j, coordinate) where c_{i+j} != q^i c_j + c_i, if any.
inline std::optional<CocycleViolation> find_action_cocycle_violation(const FieldModel& fm,
                                                                     const std::vector<TorusCharacter>& c,
                                                                     std::size_t rank)
{
    if (c.size() != static_cast<std::size_t>(fm.k))
        throw StructuralError("action cocycle needs k=" + std::to_string(fm.k) + " rows, got " +
                              std::to_string(c.size()));
    for (const auto& row : c)
        if (row.size() != rank)
            throw StructuralError("action cocycle rows must have length " + std::to_string(rank));
    for (Int i = 0; i < fm.k; ++i)
        for (Int j = 0; j < fm.k; ++j)
            for (std::size_t x = 0; x < rank; ++x) {
                Int lhs = mod(c[static_cast<std::size_t>((i + j) % fm.k)][x], fm.N);
                Int rhs = addmod(mulmod(powmod(fm.q, i, fm.N), c[j][x], fm.N), c[i][x], fm.N);
                if (lhs != rhs)
                    return CocycleViolation{i, j, x};
            }
    return std::nullopt;
}

/// Least exponent w with (y_j, w) Gamma-invariant, for each basis vector y_j.
inline IntVec invariant_lifts(const FieldModel& fm, const std::vector<TorusCharacter>& c, std::size_t rank)
{
    IntVec lifts(rank, 0);
    if (fm.k == 1)
        return lifts;
    for (std::size_t j = 0; j < rank; ++j) {
        // Frob invariance: q w + c_1 = w, i.e. (q - 1) w = -c_1 (mod N).
        auto sol = solve_mod({{fm.q - 1}}, {mod(-c[1][j], fm.N)}, fm.N, 1);
        if (!sol)
            throw ModelError("bdmodel.hilbert90", "basis " + std::to_string(j),
                             "no Gamma-invariant lift over basis vector " + std::to_string(j));
        Int step = fm.N / gcd(fm.q - 1, fm.N);   // solutions repeat with this period
        lifts[j] = mod(sol->particular[0], step);
    }
    return lifts;
}

/**
 * Validates the data and assembles the D-model. sign_overrides, when given,
 * replaces the computed r_alpha (used only to build negative controls).
 */
inline DModel build_d_model(const MetaplecticDualDatum& dd, const FieldModel& fm, std::vector<TorusCharacter> c,
                            std::vector<EInput> e_inputs, std::optional<IntVec> sign_overrides = std::nullopt)
{
    if (fm.n != dd.cover.n)
        throw StructuralError("field model degree n=" + std::to_string(fm.n) + " differs from cover degree n=" +
                              std::to_string(dd.cover.n));
    const std::size_t r = dd.rank();
    if (auto v = find_action_cocycle_violation(fm, c, r))
        throw ModelError("bdmodel.cocycle",
                         "(" + std::to_string(v->i) + "," + std::to_string(v->j) + ") coordinate " +
                             std::to_string(v->coordinate),
                         "action table is not a 1-cocycle: c_{i+j} != q^i c_j + c_i");

    DModel dm;
    dm.dd = dd;
    dm.fm = fm;
    for (auto& row : c)
        row = reduced(row, fm.N);
    dm.c = std::move(c);

    const auto& simple = dd.cover.rd.simple;
    if (e_inputs.size() != simple.size())
        throw StructuralError("expected " + std::to_string(simple.size()) + " E_alpha inputs, got " +
                              std::to_string(e_inputs.size()));
    if (sign_overrides && sign_overrides->size() != simple.size())
        throw StructuralError("sign_overrides must list one sign per simple root");
    for (std::size_t a = 0; a < simple.size(); ++a) {
        const auto& e = e_inputs[a];
        const IntVec& expected = dd.modified_coroots[simple[a]];
        if (e.over != expected)
            throw ModelError("bdmodel.e_input", detail::vec_str(e.over),
                             "E_alpha for simple root " + std::to_string(a) + " must lie over " +
                                 detail::vec_str(expected));
        const IntVec& yb = dd.ysc_basis[a];
        if (!is_invariant(dm, yb, e.value))
            throw ModelError("bdmodel.e_input", "simple root " + std::to_string(a),
                             "E_alpha is not Gamma-invariant");
        Int sign = sign_overrides ? (*sign_overrides)[a] : dd.r_alpha[simple[a]];
        if (sign != 1 && sign != -1)
            throw StructuralError("signs must be +1 or -1");
        Int value = mod(e.value, fm.N);
        if (sign == -1) {
            if (fm.q % 2 == 0)
                throw ModelError("bdmodel.sign", "simple root " + std::to_string(a),
                                 "r_alpha = -1 requires odd q");
            value = addmod(value, fm.N / 2, fm.N);
        }
        dm.signs.push_back(sign);
        dm.s_psi.push_back(value);
        if (!is_invariant(dm, yb, value))
            throw ModelError("bdmodel.s_psi_invariance", "simple root " + std::to_string(a),
                             "s_psi is not Gamma-invariant");
    }
    dm.e_inputs = std::move(e_inputs);
    dm.lifts = invariant_lifts(fm, dm.c, r);
    return dm;
}

// ----------------------------------------------------------------------------
// Splittings

/// Exponents of s on the modified simple coroots.
inline IntVec restrict_splitting(const DModel& dm, const Splitting& s)
{
    IntVec out;
    for (const auto& b : dm.sc_basis())
        out.push_back(dot_mod(b, s.t, dm.fm.N));
    return out;
}

inline bool restricts_to_s_psi(const DModel& dm, const Splitting& s)
{
    return restrict_splitting(dm, s) == dm.s_psi;
}

/**
 * Up to `count` distinct splittings restricting to `target` on the SC basis.
 * The first is deterministic; further ones add kernel generators of the
 * restriction map. Throws ModelError if no extension exists.
 */
inline std::vector<Splitting> extend_splitting(const DModel& dm, const IntVec& target, std::size_t count = 1)
{
    const std::size_t r = dm.rank();
    auto sol = solve_mod(dm.sc_basis(), reduced(target, dm.fm.N), dm.fm.N, r);
    if (!sol)
        throw ModelError("bdmodel.extend", detail::vec_str(target), "restriction target does not extend");
    std::vector<Splitting> out{{sol->particular}};
    for (std::size_t i = 0; out.size() < count && i < sol->kernel.size(); ++i)
        out.push_back({reduced(added(sol->particular, sol->kernel[i]), dm.fm.N)});
    return out;
}

/// (x * s)(y) = x(y) t(y)
inline Splitting twist_splitting(const DModel& dm, const TorusCharacter& x, const Splitting& s)
{
    return {reduced(added(x, s.t), dm.fm.N)};
}

/// Exponents of y -> gamma^{-1}(t(y)) c_{gamma^{-1}}(y) / t(y) on the basis.
inline TorusCharacter gamma_s_over_s(const DModel& dm, GaloisElement g, const Splitting& s)
{
    const auto& fm = dm.fm;
    GaloisElement gi = fm.inverse(g);
    TorusCharacter out(dm.rank());
    for (std::size_t j = 0; j < dm.rank(); ++j)
        out[j] = mod(fm.apply(gi, s.t[j]) + dm.c[static_cast<std::size_t>(gi.i)][j] - s.t[j], fm.N);
    return out;
}

/// gamma^{-1}(x)/x for a character x.
inline TorusCharacter gamma_x_over_x(const FieldModel& fm, GaloisElement g, const TorusCharacter& x)
{
    TorusCharacter out(x.size());
    for (std::size_t j = 0; j < x.size(); ++j)
        out[j] = mod(fm.apply_inverse(g, x[j]) - x[j], fm.N);
    return out;
}

inline bool is_gamma_invariant(const DModel& dm, const Splitting& s)
{
    for (auto g : dm.fm.galois_elements())
        for (std::size_t j = 0; j < dm.rank(); ++j)
            if (addmod(dm.fm.apply(g, s.t[j]), dm.c[static_cast<std::size_t>(g.i)][j], dm.fm.N) !=
                mod(s.t[j], dm.fm.N))
                return false;
    return true;
}

// ----------------------------------------------------------------------------
// Invariant points D_{Q,n}

/**
 * D_{Q,n} is generated by d_j = (e_j, g^{lifts[j]}) and the base-field unit
 * g^{N/(q-1)}; the coordinates of an invariant (y, u) in these generators.
 */
struct DCoordinates {
    IntVec y;
    Int kernel_multiple = 0;   // exponent of the base-field generator, mod q-1
};

inline DCoordinates d_coordinates(const DModel& dm, const IntVec& y, Int u)
{
    if (!is_invariant(dm, y, u))
        throw std::domain_error("element (" + detail::vec_str(y) + ", g^" + std::to_string(mod(u, dm.fm.N)) +
                                ") is not Gamma-invariant");
    Int rest = mod(u - dot_mod(y, dm.lifts, dm.fm.N), dm.fm.N);
    if (rest % dm.kernel_generator() != 0)
        throw ModelError("bdmodel.hilbert90", detail::vec_str(y), "invariant element not in the presented group");
    return {y, rest / dm.kernel_generator()};
}

struct InvariantPresentation {
    std::vector<std::pair<IntVec, Int>> generators;   // (e_j, lift exponent)
    Int kernel_generator = 0;
    Int kernel_order = 0;
    bool surjective = true;
};

/// Presentation of D_{Q,n} with surjectivity onto Y_{Q,n} and exactness rechecked.
inline InvariantPresentation invariant_points(const DModel& dm)
{
    InvariantPresentation p;
    const std::size_t r = dm.rank();
    for (std::size_t j = 0; j < r; ++j) {
        IntVec e(r, 0);
        e[j] = 1;
        p.surjective = p.surjective && is_invariant(dm, e, dm.lifts[j]);
        p.generators.emplace_back(e, dm.lifts[j]);
    }
    p.kernel_generator = dm.kernel_generator();
    p.kernel_order = dm.fm.q - 1;
    // Exactness: the invariant elements over y = 0 are exactly F^x.
    for (Int u = 0; u < dm.fm.N && dm.fm.N <= 100000; ++u)
        if (is_invariant(dm, IntVec(r, 0), u) != dm.fm.in_base_field(u))
            throw ModelError("bdmodel.exactness", "g^" + std::to_string(u),
                             "kernel of D_{Q,n} -> Y_{Q,n} differs from F^x");
    return p;
}

} // namespace mlg
