#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "errors.hpp"
#include "matrix.hpp"

namespace mlg
{

/**
 * A based root datum (X, Phi, Delta, Y, Phi^v, Delta^v) with X = Y = Z^rank in
 * explicit coordinates. roots[i] and coroots[i] correspond; the pairing is
 * <x, y> = x^T P y.
 */
struct RootDatum {
    std::size_t rank = 0;
    IntMat roots;
    IntMat coroots;
    IntMat pairing;
    std::vector<std::size_t> simple;

    Int pair(const IntVec& x, const IntVec& y) const { return dot(x, mat_vec(pairing, y)); }

    friend bool operator==(const RootDatum&, const RootDatum&) = default;
};

/**
 * Integer quadratic form on Y: Q(y) = sum_i diagonal[i] y_i^2 + sum_{i<j} off[i][j] y_i y_j.
 * off[i][j] = B_Q(e_i, e_j) for i != j; the diagonal of `off` is ignored (kept 0).
 */
struct QuadraticForm {
    IntVec diagonal;
    IntMat off_diagonal;

    std::size_t rank() const { return diagonal.size(); }

    /// Gram matrix of the polarization B_Q.
    IntMat gram() const
    {
        const std::size_t r = rank();
        IntMat g(r, IntVec(r, 0));
        for (std::size_t i = 0; i < r; ++i)
            for (std::size_t j = 0; j < r; ++j)
                g[i][j] = (i == j) ? checked_mul(2, diagonal[i]) : off_diagonal[i][j];
        return g;
    }

    Int operator()(const IntVec& y) const
    {
        if (y.size() != rank())
            throw StructuralError("quadratic form: rank mismatch");
        Int s = 0;
        for (std::size_t i = 0; i < rank(); ++i) {
            s = checked_add(s, checked_mul(diagonal[i], checked_mul(y[i], y[i])));
            for (std::size_t j = i + 1; j < rank(); ++j)
                s = checked_add(s, checked_mul(off_diagonal[i][j], checked_mul(y[i], y[j])));
        }
        return s;
    }

    static QuadraticForm diagonal_form(const IntVec& d)
    {
        return QuadraticForm{d, IntMat(d.size(), IntVec(d.size(), 0))};
    }

    friend bool operator==(const QuadraticForm&, const QuadraticForm&) = default;
};

/// Z^free_rank + Z/d_1 + ... + Z/d_t with d_1 | ... | d_t and every d_i >= 2.
struct FiniteAbelianPresentation {
    std::size_t free_rank = 0;
    IntVec invariant_factors;

    bool is_finite() const { return free_rank == 0; }
    Int order() const
    {
        if (!is_finite())
            throw std::domain_error("order of an infinite group");
        Int o = 1;
        for (Int d : invariant_factors)
            o = checked_mul(o, d);
        return o;
    }
    std::size_t coordinate_count() const { return invariant_factors.size() + free_rank; }

    friend bool operator==(const FiniteAbelianPresentation&, const FiniteAbelianPresentation&) = default;
};

// ----------------------------------------------------------------------------
// Validation

struct AxiomViolation {
    std::string axiom;
    std::string witness;
};

struct ValidationReport {
    std::vector<AxiomViolation> violations;
    bool ok() const { return violations.empty(); }
};

namespace detail
{
inline std::string vec_str(const IntVec& v)
{
    std::string s = "(";
    for (std::size_t i = 0; i < v.size(); ++i)
        s += (i ? "," : "") + std::to_string(v[i]);
    return s + ")";
}

inline void check_structure(const RootDatum& rd)
{
    if (rd.rank == 0 && !rd.roots.empty())
        throw StructuralError("root datum: rank 0 with roots");
    if (rd.roots.size() != rd.coroots.size())
        throw StructuralError("root datum: " + std::to_string(rd.roots.size()) + " roots but " +
                              std::to_string(rd.coroots.size()) + " coroots");
    for (std::size_t i = 0; i < rd.roots.size(); ++i) {
        if (rd.roots[i].size() != rd.rank)
            throw StructuralError("root datum: roots[" + std::to_string(i) + "] has length " +
                                  std::to_string(rd.roots[i].size()) + ", expected rank " +
                                  std::to_string(rd.rank));
        if (rd.coroots[i].size() != rd.rank)
            throw StructuralError("root datum: coroots[" + std::to_string(i) + "] has length " +
                                  std::to_string(rd.coroots[i].size()) + ", expected rank " +
                                  std::to_string(rd.rank));
    }
    if (rd.pairing.size() != rd.rank)
        throw StructuralError("root datum: pairing must be rank x rank");
    for (const auto& row : rd.pairing)
        if (row.size() != rd.rank)
            throw StructuralError("root datum: pairing must be rank x rank");
    std::set<std::size_t> seen;
    for (std::size_t s : rd.simple) {
        if (s >= rd.roots.size())
            throw StructuralError("root datum: simple index " + std::to_string(s) + " out of range");
        if (!seen.insert(s).second)
            throw StructuralError("root datum: duplicate simple index " + std::to_string(s));
    }
}

inline std::optional<std::size_t> index_of(const IntMat& list, const IntVec& v)
{
    for (std::size_t i = 0; i < list.size(); ++i)
        if (list[i] == v)
            return i;
    return std::nullopt;
}

/// Rational coefficients c with sum c_k basis[k] = v, for linearly independent rows
/// `basis`; nullopt if v is outside their rational span.
inline std::optional<RatVec> span_coefficients(const IntMat& basis, const IntVec& v)
{
    const std::size_t m = basis.size();
    if (m == 0) {
        if (std::all_of(v.begin(), v.end(), [](Int x) { return x == 0; }))
            return RatVec{};
        return std::nullopt;
    }
    const std::size_t r = v.size();
    IntMat cols_t = transpose(basis, r);   // r x m
    std::vector<std::size_t> rows;
    IntMat chosen;
    for (std::size_t c = 0; c < r && rows.size() < m; ++c) {
        IntMat trial = chosen;
        trial.push_back(cols_t[c]);
        if (integer_rank(trial) == trial.size()) {
            chosen = trial;
            rows.push_back(c);
        }
    }
    if (rows.size() != m)
        throw std::invalid_argument("span_coefficients: basis is not independent");
    RatMat square;
    RatVec rhs;
    for (std::size_t c : rows) {
        square.push_back(to_rational(IntMat{cols_t[c]})[0]);
        rhs.emplace_back(v[c]);
    }
    RatVec coeff = mat_vec(inverse(square), rhs);
    for (std::size_t c = 0; c < r; ++c) {
        Rational s(0);
        for (std::size_t k = 0; k < m; ++k)
            s += coeff[k] * Rational(basis[k][c]);
        if (s != Rational(v[c]))
            return std::nullopt;
    }
    return coeff;
}
} // namespace detail

/// Reflection s_alpha(x) = x - <x, alpha^v> alpha on X.
inline IntVec reflect_root_side(const RootDatum& rd, std::size_t alpha, const IntVec& x)
{
    if (alpha >= rd.roots.size())
        throw StructuralError("reflect: root index " + std::to_string(alpha) + " out of range");
    Int c = rd.pair(x, rd.coroots[alpha]);
    return added(x, scaled(rd.roots[alpha], -c));
}

/// Coroot-side reflection y - <alpha, y> alpha^v; an involution of Y.
inline IntVec reflect(const RootDatum& rd, std::size_t alpha, const IntVec& y)
{
    if (alpha >= rd.roots.size())
        throw StructuralError("reflect: root index " + std::to_string(alpha) + " out of range");
    if (y.size() != rd.rank)
        throw StructuralError("reflect: vector rank mismatch");
    Int c = rd.pair(rd.roots[alpha], y);
    return added(y, scaled(rd.coroots[alpha], -c));
}

/**
 * Checks the root datum axioms. Throws StructuralError on malformed input;
 * otherwise lists every violated axiom with a witness.
 */
inline ValidationReport validate_root_datum(const RootDatum& rd)
{
    detail::check_structure(rd);
    using detail::vec_str;
    ValidationReport rep;
    auto fail = [&](std::string axiom, std::string witness) {
        rep.violations.push_back({std::move(axiom), std::move(witness)});
    };

    const std::size_t nr = rd.roots.size();
    for (std::size_t i = 0; i < nr; ++i) {
        Int p = rd.pair(rd.roots[i], rd.coroots[i]);
        if (p != 2)
            fail("<alpha,alpha^v>=2", "root " + std::to_string(i) + ": pairing " + std::to_string(p));
        bool zero = std::all_of(rd.roots[i].begin(), rd.roots[i].end(), [](Int x) { return x == 0; });
        if (zero)
            fail("roots nonzero", "root " + std::to_string(i));
        for (std::size_t j = i + 1; j < nr; ++j)
            if (rd.roots[i] == rd.roots[j])
                fail("roots distinct", "roots " + std::to_string(i) + " and " + std::to_string(j));
    }

    for (std::size_t a = 0; a < nr; ++a) {
        for (std::size_t b = 0; b < nr; ++b) {
            IntVec img = reflect_root_side(rd, a, rd.roots[b]);
            auto ib = detail::index_of(rd.roots, img);
            if (!ib) {
                fail("s_alpha permutes roots",
                     "s_" + std::to_string(a) + "(root " + std::to_string(b) + ") = " + vec_str(img));
                continue;
            }
            IntVec cimg = reflect(rd, a, rd.coroots[b]);
            if (cimg != rd.coroots[*ib])
                fail("s_alpha^v permutes coroots compatibly",
                     "s_" + std::to_string(a) + "(coroot " + std::to_string(b) + ") = " + vec_str(cimg));
        }
    }

    IntMat simple_roots;
    for (std::size_t s : rd.simple)
        simple_roots.push_back(rd.roots[s]);
    if (!simple_roots.empty() && integer_rank(simple_roots) != simple_roots.size()) {
        fail("Delta linearly independent", std::to_string(simple_roots.size()) + " simple roots, rank " +
                                               std::to_string(integer_rank(simple_roots)));
    } else {
        // Every root is an integral combination of Delta with coefficients of one sign.
        for (std::size_t i = 0; i < nr; ++i) {
            auto coeff = detail::span_coefficients(simple_roots, rd.roots[i]);
            bool ok = coeff.has_value();
            if (ok) {
                bool pos = true, neg = true;
                for (const auto& c : *coeff) {
                    if (!c.is_integer())
                        ok = false;
                    if (c.num() < 0)
                        pos = false;
                    if (c.num() > 0)
                        neg = false;
                }
                ok = ok && (pos || neg);
            }
            if (!ok)
                fail("Delta is a base", "root " + std::to_string(i) + " = " + vec_str(rd.roots[i]));
        }
    }

    IntMat simple_coroots;
    for (std::size_t s : rd.simple)
        simple_coroots.push_back(rd.coroots[s]);
    if (!simple_coroots.empty() && integer_rank(simple_coroots) != simple_coroots.size())
        fail("Delta^v linearly independent", std::to_string(simple_coroots.size()) + " simple coroots");
    return rep;
}

/// Langlands dual datum: X <-> Y, roots <-> coroots, pairing transposed.
inline RootDatum dualize(const RootDatum& rd)
{
    return RootDatum{rd.rank, rd.coroots, rd.roots, transpose(rd.pairing, rd.rank), rd.simple};
}

// ----------------------------------------------------------------------------
// Quadratic forms

inline void check_form(const QuadraticForm& Q, std::size_t rank)
{
    if (Q.diagonal.size() != rank || Q.off_diagonal.size() != rank)
        throw StructuralError("quadratic form rank " + std::to_string(Q.diagonal.size()) +
                              " does not match lattice rank " + std::to_string(rank));
    for (std::size_t i = 0; i < rank; ++i) {
        if (Q.off_diagonal[i].size() != rank)
            throw StructuralError("quadratic form: off_diagonal must be square");
        if (Q.off_diagonal[i][i] != 0)
            throw StructuralError("quadratic form: off_diagonal has nonzero diagonal");
        for (std::size_t j = 0; j < rank; ++j)
            if (Q.off_diagonal[i][j] != Q.off_diagonal[j][i])
                throw StructuralError("quadratic form: off_diagonal is not symmetric");
    }
}

/// Polarization B_Q(y1, y2) = Q(y1 + y2) - Q(y1) - Q(y2).
inline Int bq(const QuadraticForm& Q, const IntVec& y1, const IntVec& y2)
{
    if (y1.size() != Q.rank() || y2.size() != Q.rank())
        throw StructuralError("bq: rank mismatch");
    return dot(y1, mat_vec(Q.gram(), y2));
}

struct WeylInvarianceResult {
    bool invariant = true;
    std::optional<std::size_t> root;   // simple root index of the counterexample
    IntVec vector;
};

/// Q(s_alpha(y)) == Q(y) for every simple alpha and y in {e_i} U {e_i + e_j}.
inline WeylInvarianceResult check_weyl_invariance(const RootDatum& rd, const QuadraticForm& Q)
{
    detail::check_structure(rd);
    check_form(Q, rd.rank);
    std::vector<IntVec> tests;
    for (std::size_t i = 0; i < rd.rank; ++i) {
        IntVec e(rd.rank, 0);
        e[i] = 1;
        tests.push_back(e);
        for (std::size_t j = i + 1; j < rd.rank; ++j) {
            IntVec f = e;
            f[j] = 1;
            tests.push_back(f);
        }
    }
    for (std::size_t s : rd.simple)
        for (const auto& y : tests)
            if (Q(reflect(rd, s, y)) != Q(y))
                return {false, s, y};
    return {};
}

// ----------------------------------------------------------------------------
// Lattice quotients

/**
 * Structure of Z^ambient_rank / span(sub_basis), where sub_basis is a list of
 * generating vectors (each stored as a row).
 */
inline FiniteAbelianPresentation smith_quotient(const IntMat& sub_basis, std::size_t ambient_rank)
{
    for (const auto& v : sub_basis)
        if (v.size() != ambient_rank)
            throw StructuralError("smith_quotient: generator length does not match ambient rank");
    FiniteAbelianPresentation out;
    if (sub_basis.empty()) {
        out.free_rank = ambient_rank;
        return out;
    }
    SmithForm sf = smith_normal_form(sub_basis, ambient_rank);
    for (std::size_t i = 0; i < sf.rank; ++i)
        if (sf.diagonal[i] > 1)
            out.invariant_factors.push_back(sf.diagonal[i]);
    out.free_rank = ambient_rank - sf.rank;
    return out;
}

// ----------------------------------------------------------------------------
// Builders for common data

/**
 * Simply connected root datum of a Cartan matrix A (A[i][j] = <alpha_i, alpha_j^v>):
 * Y has the simple coroots as basis, X the fundamental weights, pairing = identity.
 */
inline RootDatum simply_connected_datum(const IntMat& cartan)
{
    const std::size_t r = cartan.size();
    RootDatum rd;
    rd.rank = r;
    rd.pairing = identity_matrix(r);
    IntMat roots, coroots;
    for (std::size_t i = 0; i < r; ++i) {
        roots.push_back(cartan[i]);
        IntVec e(r, 0);
        e[i] = 1;
        coroots.push_back(e);
    }
    RootDatum simple_only{r, roots, coroots, rd.pairing, {}};
    // Close under simple reflections.
    for (std::size_t cur = 0; cur < roots.size(); ++cur) {
        for (std::size_t s = 0; s < r; ++s) {
            IntVec a = reflect_root_side(simple_only, s, roots[cur]);
            if (!detail::index_of(roots, a)) {
                roots.push_back(a);
                coroots.push_back(reflect(simple_only, s, coroots[cur]));
            }
        }
    }
    rd.roots = roots;
    rd.coroots = coroots;
    for (std::size_t i = 0; i < r; ++i)
        rd.simple.push_back(i);
    return rd;
}

/// Orthogonal sum of two root data.
inline RootDatum direct_sum(const RootDatum& a, const RootDatum& b)
{
    RootDatum rd;
    rd.rank = a.rank + b.rank;
    auto pad = [&](const IntVec& v, bool first) {
        IntVec out(rd.rank, 0);
        for (std::size_t i = 0; i < v.size(); ++i)
            out[first ? i : a.rank + i] = v[i];
        return out;
    };
    for (std::size_t i = 0; i < a.roots.size(); ++i) {
        rd.roots.push_back(pad(a.roots[i], true));
        rd.coroots.push_back(pad(a.coroots[i], true));
    }
    for (std::size_t i = 0; i < b.roots.size(); ++i) {
        rd.roots.push_back(pad(b.roots[i], false));
        rd.coroots.push_back(pad(b.coroots[i], false));
    }
    rd.pairing = IntMat(rd.rank, IntVec(rd.rank, 0));
    for (std::size_t i = 0; i < a.rank; ++i)
        for (std::size_t j = 0; j < a.rank; ++j)
            rd.pairing[i][j] = a.pairing[i][j];
    for (std::size_t i = 0; i < b.rank; ++i)
        for (std::size_t j = 0; j < b.rank; ++j)
            rd.pairing[a.rank + i][a.rank + j] = b.pairing[i][j];
    rd.simple = a.simple;
    for (std::size_t s : b.simple)
        rd.simple.push_back(a.roots.size() + s);
    return rd;
}

inline RootDatum torus_datum(std::size_t rank)
{
    return RootDatum{rank, {}, {}, identity_matrix(rank), {}};
}

/**
 * The Weyl-invariant form on a simply connected datum with Q(alpha_i^v) = q[i]:
 * B_Q(alpha_i^v, alpha_j^v) = q[i] * A[i][j]. Requires q[i] A[i][j] symmetric.
 */
inline QuadraticForm invariant_form(const IntMat& cartan, const IntVec& q)
{
    const std::size_t r = cartan.size();
    QuadraticForm Q{q, IntMat(r, IntVec(r, 0))};
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < r; ++j)
            if (i != j) {
                Int b = checked_mul(q[i], cartan[i][j]);
                if (b != checked_mul(q[j], cartan[j][i]))
                    throw StructuralError("invariant_form: q does not symmetrize the Cartan matrix");
                Q.off_diagonal[i][j] = b;
            }
    return Q;
}

} // namespace mlg
