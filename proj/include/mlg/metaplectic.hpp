#pragma once

#include <optional>
#include <string>
#include <vector>

#include "errors.hpp"
#include "rootdatum.hpp"

namespace mlg
{

/// Invariants of a degree-n cover: root datum, first invariant Q, degree n.
struct CoverDatum {
    RootDatum rd;
    QuadraticForm Q;
    Int n = 1;
};

/**
 * Dual root datum of a cover together with the lattices it is built from.
 *
 * All lattice bases are row-HNF in Y (or rational rows in X (x) Q). The dual
 * datum itself, in lattice coordinates, is `dual`: its "roots" are the
 * modified coroots in Y_{Q,n}-coordinates and its "coroots" the modified roots
 * in X_{Q,n}-coordinates, with the identity pairing.
 */
struct MetaplecticDualDatum {
    CoverDatum cover;
    IntMat y_qn_basis;
    IntVec n_alpha;
    IntVec r_alpha;
    IntMat modified_coroots;
    RatMat modified_roots;
    RatMat x_qn_basis;
    IntMat ysc_basis;                  // modified simple coroots, Y_{Q,n}-coordinates
    FiniteAbelianPresentation center;  // Y_{Q,n} / Y_{Q,n}^{SC}
    RootDatum dual;

    std::size_t rank() const { return cover.rd.rank; }
    std::size_t simple_count() const { return ysc_basis.size(); }
};

struct AssumptionCheck {
    bool ok = true;
    std::optional<IntVec> witness;
};

/// n even or n = 1 (a degree-one cover is split), or Q even on every e_i and e_i + e_j.
inline AssumptionCheck check_cover_assumption(const CoverDatum& cd)
{
    if (cd.n <= 0)
        throw StructuralError("cover degree n must be positive");
    check_form(cd.Q, cd.rd.rank);
    if (cd.n % 2 == 0 || cd.n == 1)
        return {};
    const std::size_t r = cd.rd.rank;
    for (std::size_t i = 0; i < r; ++i) {
        IntVec e(r, 0);
        e[i] = 1;
        if (mod(cd.Q(e), 2) != 0)
            return {false, e};
        for (std::size_t j = i + 1; j < r; ++j) {
            IntVec f = e;
            f[j] = 1;
            if (mod(cd.Q(f), 2) != 0)
                return {false, f};
        }
    }
    return {};
}

/// Least m >= 1 with n | m Q(alpha^v).
inline Int compute_n_alpha(const CoverDatum& cd, std::size_t alpha)
{
    if (alpha >= cd.rd.coroots.size())
        throw StructuralError("compute_n_alpha: root index out of range");
    Int qa = mod(cd.Q(cd.rd.coroots[alpha]), cd.n);
    if (qa == 0)
        return 1;
    return cd.n / gcd(cd.n, qa);
}

/// (-1)^(Q(alpha^v) n_alpha (n_alpha - 1) / 2)
inline Int compute_r_alpha(const CoverDatum& cd, std::size_t alpha)
{
    Int na = compute_n_alpha(cd, alpha);
    Int qa = mod(cd.Q(cd.rd.coroots[alpha]), 2);
    Int tri = mod(na * (na - 1) / 2, 2);
    return (qa * tri) % 2 == 0 ? 1 : -1;
}

/// Row-HNF basis of {y in Y : B_Q(y, e_i) = 0 mod n for all i}.
inline IntMat compute_y_qn(const CoverDatum& cd)
{
    const std::size_t r = cd.rd.rank;
    check_form(cd.Q, r);
    if (r == 0)
        return {};
    auto sol = solve_mod(cd.Q.gram(), IntVec(r, 0), cd.n, r);
    IntMat gens = sol->kernel;
    for (std::size_t i = 0; i < r; ++i) {
        IntVec e(r, 0);
        e[i] = cd.n;
        gens.push_back(e);
    }
    return hermite_normal_form(gens);
}

/// Checks the structural invariants of a dual datum; returns violated ones.
inline std::vector<AxiomViolation> validate_dual_datum(const MetaplecticDualDatum& dd)
{
    std::vector<AxiomViolation> out;
    const auto& rd = dd.cover.rd;
    const std::size_t r = rd.rank;
    for (std::size_t i = 0; i < r; ++i) {
        IntVec e(r, 0);
        e[i] = dd.cover.n;
        if (!lattice_coordinates(dd.y_qn_basis, e))
            out.push_back({"nY in Y_{Q,n}", detail::vec_str(e)});
    }
    for (std::size_t a = 0; a < rd.roots.size(); ++a) {
        if (dd.cover.n % dd.n_alpha[a] != 0)
            out.push_back({"n_alpha divides n", "root " + std::to_string(a)});
        if (!lattice_coordinates(dd.y_qn_basis, dd.modified_coroots[a]))
            out.push_back({"modified coroot in Y_{Q,n}", "root " + std::to_string(a)});
        Rational p(0);
        for (std::size_t i = 0; i < r; ++i)
            for (std::size_t j = 0; j < r; ++j)
                p += dd.modified_roots[a][i] * Rational(rd.pairing[i][j] * dd.modified_coroots[a][j]);
        if (p != Rational(2))
            out.push_back({"<modified root, modified coroot> = 2", "root " + std::to_string(a)});
    }
    for (const auto& v : validate_root_datum(dd.dual).violations)
        out.push_back({"dual datum: " + v.axiom, v.witness});
    // Modified simple coroots generate all modified coroots over Z.
    IntMat sc = hermite_normal_form(dd.ysc_basis);
    for (std::size_t a = 0; a < dd.dual.roots.size(); ++a)
        if (!dd.ysc_basis.empty() && !lattice_coordinates(sc, dd.dual.roots[a]))
            out.push_back({"modified simple coroots span modified coroots", "root " + std::to_string(a)});
    return out;
}

/**
 * Assembles the dual datum of a cover. Throws ModelError with check
 * "metaplectic.assumption" (witness y with odd Q(y)) when n is odd and Q is
 * not even, and "metaplectic.internal" if a structural invariant fails.
 */
inline MetaplecticDualDatum compute_dual_datum(const CoverDatum& cd)
{
    auto rep = validate_root_datum(cd.rd);
    if (!rep.ok())
        throw ModelError("root_datum.axioms", rep.violations.front().witness,
                         "root datum violates " + rep.violations.front().axiom);
    auto weyl = check_weyl_invariance(cd.rd, cd.Q);
    if (!weyl.invariant)
        throw ModelError("quadratic_form.weyl_invariance", detail::vec_str(weyl.vector),
                         "Q is not invariant under simple reflection " + std::to_string(*weyl.root));
    auto assumption = check_cover_assumption(cd);
    if (!assumption.ok)
        throw ModelError("metaplectic.assumption", detail::vec_str(*assumption.witness),
                         "n is odd but Q takes an odd value at " + detail::vec_str(*assumption.witness));

    const auto& rd = cd.rd;
    const std::size_t r = rd.rank;
    MetaplecticDualDatum dd;
    dd.cover = cd;
    dd.y_qn_basis = compute_y_qn(cd);

    for (std::size_t a = 0; a < rd.roots.size(); ++a) {
        Int na = compute_n_alpha(cd, a);
        dd.n_alpha.push_back(na);
        dd.r_alpha.push_back(compute_r_alpha(cd, a));
        dd.modified_coroots.push_back(scaled(rd.coroots[a], na));
        RatVec mr;
        for (Int x : rd.roots[a])
            mr.emplace_back(x, na);
        dd.modified_roots.push_back(mr);
    }

    // Dual basis of Y_{Q,n} inside X (x) Q: rows of (P B^T)^{-1}.
    RatMat W = to_rational(multiply(rd.pairing, transpose(dd.y_qn_basis, r)));
    if (r > 0)
        dd.x_qn_basis = inverse(W);
    RatMat Wt = transpose(W);

    dd.dual.rank = r;
    dd.dual.pairing = identity_matrix(r);
    dd.dual.simple = rd.simple;
    for (std::size_t a = 0; a < rd.roots.size(); ++a) {
        auto yc = lattice_coordinates(dd.y_qn_basis, dd.modified_coroots[a]);
        if (!yc)
            throw ModelError("metaplectic.internal", "root " + std::to_string(a),
                             "modified coroot outside Y_{Q,n}");
        dd.dual.roots.push_back(*yc);
        RatVec z = mat_vec(Wt, dd.modified_roots[a]);
        IntVec zi;
        for (const auto& c : z) {
            if (!c.is_integer())
                throw ModelError("metaplectic.internal", "root " + std::to_string(a),
                                 "modified root not integral on Y_{Q,n}");
            zi.push_back(c.num());
        }
        dd.dual.coroots.push_back(zi);
    }
    for (std::size_t s : rd.simple)
        dd.ysc_basis.push_back(dd.dual.roots[s]);
    dd.center = smith_quotient(dd.ysc_basis, r);

    auto bad = validate_dual_datum(dd);
    if (!bad.empty())
        throw ModelError("metaplectic.internal", bad.front().witness,
                         "dual datum invariant failed: " + bad.front().axiom);
    return dd;
}

} // namespace mlg
