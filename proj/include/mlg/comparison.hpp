#pragma once

#include <algorithm>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "bdmodel.hpp"
#include "extcalc.hpp"

namespace mlg
{

// ----------------------------------------------------------------------------
// Characters of Y_{Q,n} / Y^{SC}

/**
 * Z-tilde-dual = Hom(Y_{Q,n}/Y^{SC}, Q/Z). With U S V = D the Smith form of
 * the SC basis, a character is zeta = V w where d_i w_i = 0 and w_i is free
 * beyond the SC rank. Free directions are cut down to the (1/m)-torsion with
 * m = n * d_max, which is all of the group when the quotient is finite.
 */
struct CenterDual {
    std::size_t rank = 0;
    std::size_t sc_rank = 0;
    IntMat V;
    IntMat V_inverse;
    IntVec diag;   // d_i for i < sc_rank
    Int window = 1;
    KernelGroup group;
    std::vector<std::size_t> coordinate_of;   // group coordinate -> index of w
    bool finite_quotient = true;

    /// Values zeta(e_j) on the Y_{Q,n} basis.
    std::vector<QZ> values(const KernelElement& w) const
    {
        std::vector<QZ> full(rank);
        for (std::size_t c = 0; c < coordinate_of.size(); ++c)
            full[coordinate_of[c]] = w[c];
        std::vector<QZ> out(rank);
        for (std::size_t j = 0; j < rank; ++j)
            for (std::size_t i = 0; i < rank; ++i)
                out[j] += V[j][i] * full[i];
        return out;
    }

    /// Inverse of values(); nullopt if the character lies outside the window.
    std::optional<KernelElement> coordinates(const std::vector<QZ>& zeta) const
    {
        std::vector<QZ> full(rank);
        for (std::size_t i = 0; i < rank; ++i)
            for (std::size_t j = 0; j < rank; ++j)
                full[i] += V_inverse[i][j] * zeta[j];
        for (std::size_t i = 0; i < rank; ++i) {
            Int bound = i < sc_rank ? diag[i] : window;
            if (!full[i].killed_by(bound))
                return std::nullopt;
        }
        KernelElement w;
        for (std::size_t c = 0; c < coordinate_of.size(); ++c)
            w.push_back(full[coordinate_of[c]]);
        return w;
    }
};

inline CenterDual build_center_dual(const DModel& dm)
{
    CenterDual cd;
    cd.rank = dm.rank();
    const IntMat& S = dm.sc_basis();
    cd.sc_rank = S.size();
    cd.finite_quotient = cd.sc_rank == cd.rank;
    if (cd.sc_rank == 0) {
        cd.V = identity_matrix(cd.rank);
    } else {
        SmithForm sf = smith_normal_form(S, cd.rank);
        if (sf.rank != cd.sc_rank)
            throw ModelError("comparison.center", "", "modified simple coroots are dependent");
        cd.V = sf.V;
        cd.diag = sf.diagonal;
    }
    cd.V_inverse = unimodular_inverse(cd.V);
    Int dmax = 1;
    for (Int d : cd.diag)
        dmax = std::max(dmax, d);
    cd.window = checked_mul(dm.fm.n, dmax);
    for (std::size_t i = 0; i < cd.sc_rank; ++i)
        if (cd.diag[i] > 1) {
            cd.group.invariant_factors.push_back(cd.diag[i]);
            cd.coordinate_of.push_back(i);
        }
    if (cd.window > 1)
        for (std::size_t i = cd.sc_rank; i < cd.rank; ++i) {
            cd.group.invariant_factors.push_back(cd.window);
            cd.coordinate_of.push_back(i);
        }
    return cd;
}

// ----------------------------------------------------------------------------
// Z-hat = characters trivial on Y^{SC}

inline bool in_z_hat(const DModel& dm, const TorusCharacter& x)
{
    for (const auto& b : dm.sc_basis())
        if (dot_mod(b, x, dm.fm.N) != 0)
            return false;
    return true;
}

/// Generators of Z-hat inside (Z/N)^r.
inline std::vector<IntVec> z_hat_generators(const DModel& dm)
{
    return solve_mod(dm.sc_basis(), IntVec(dm.sc_basis().size(), 0), dm.fm.N, dm.rank())->kernel;
}

/// All n-torsion points of Z-hat, as exponent vectors mod N.
inline std::vector<IntVec> z_hat_n(const DModel& dm)
{
    const Int n = dm.fm.n;
    const std::size_t r = dm.rank();
    auto sol = solve_mod(dm.sc_basis(), IntVec(dm.sc_basis().size(), 0), n, r);
    std::vector<IntVec> out;
    for (const auto& m : enumerate_subgroup(sol->kernel, n, r))
        out.push_back(reduced(scaled(m, dm.fm.N / n), dm.fm.N));
    std::sort(out.begin(), out.end());
    return out;
}

inline std::vector<QZ> epsilon_values(const FieldModel& fm, const TorusCharacter& xi)
{
    std::vector<QZ> out;
    for (Int e : xi)
        out.push_back(epsilon(fm, e));
    return out;
}

// ----------------------------------------------------------------------------
// Convenient base points and the fundamental group

struct ConvenientBasePoint {
    std::shared_ptr<const DModel> dm;
    Splitting s;
    CenterDual center;
    std::vector<IntVec> zn;   // Z-hat[n]

    bool same_as(const ConvenientBasePoint& o) const { return dm == o.dm && s == o.s; }
};

inline ConvenientBasePoint make_base_point(std::shared_ptr<const DModel> dm, Splitting s)
{
    if (s.t.size() != dm->rank())
        throw StructuralError("splitting has " + std::to_string(s.t.size()) + " entries, rank is " +
                              std::to_string(dm->rank()));
    s.t = reduced(s.t, dm->fm.N);
    IntVec res = restrict_splitting(*dm, s);
    if (res != dm->s_psi)
        throw ModelError("comparison.base_point", "restriction " + detail::vec_str(res) + " vs s_psi " +
                                                      detail::vec_str(dm->s_psi),
                         "splitting does not restrict to s_psi on Y^{SC}");
    ConvenientBasePoint bp{dm, s, build_center_dual(*dm), z_hat_n(*dm)};
    return bp;
}

struct Pi1Element {
    GaloisElement gamma;
    TorusCharacter tau;
    KernelElement zeta;   // center-dual window coordinates
    friend auto operator<=>(const Pi1Element&, const Pi1Element&) = default;
};

inline std::string to_string(const Pi1Element& p)
{
    return "(gamma=" + std::to_string(p.gamma.i) + ", tau=" + detail::vec_str(p.tau) +
           ", zeta=" + kernel_to_string(p.zeta) + ")";
}

/// tau^n = gamma^{-1}s/s and tau in Z-hat.
inline bool in_pi1_fiber(const ConvenientBasePoint& bp, GaloisElement g, const TorusCharacter& tau)
{
    const auto& dm = *bp.dm;
    TorusCharacter rho = gamma_s_over_s(dm, g, bp.s);
    for (std::size_t j = 0; j < dm.rank(); ++j)
        if (mulmod(dm.fm.n, tau[j], dm.fm.N) != rho[j])
            return false;
    return in_z_hat(dm, tau);
}

/// Lexicographically least representative of (xi tau, zeta - epsilon(xi)).
inline Pi1Element canonicalize(const ConvenientBasePoint& bp, Pi1Element p)
{
    const auto& fm = bp.dm->fm;
    TorusCharacter best = reduced(p.tau, fm.N);
    const IntVec* best_xi = nullptr;
    for (const auto& xi : bp.zn) {
        TorusCharacter cand = reduced(added(p.tau, xi), fm.N);
        if (cand < best) {
            best = cand;
            best_xi = &xi;
        }
    }
    p.tau = best;
    if (best_xi) {
        auto shift = bp.center.coordinates(epsilon_values(fm, *best_xi));
        if (!shift)
            throw ModelError("comparison.internal", detail::vec_str(*best_xi), "epsilon(xi) outside window");
        p.zeta = kernel_sub(p.zeta, *shift);
    }
    return p;
}

/// Canonical tau over gamma, or nullopt when the fiber is empty.
inline std::optional<TorusCharacter> solve_pi1_tau(const ConvenientBasePoint& bp, GaloisElement g)
{
    const auto& dm = *bp.dm;
    const std::size_t r = dm.rank();
    IntMat A;
    IntVec rhs = gamma_s_over_s(dm, g, bp.s);
    for (std::size_t j = 0; j < r; ++j) {
        IntVec row(r, 0);
        row[j] = dm.fm.n;
        A.push_back(row);
    }
    for (const auto& b : dm.sc_basis()) {
        A.push_back(b);
        rhs.push_back(0);
    }
    auto sol = solve_mod(A, rhs, dm.fm.N, r);
    if (!sol)
        return std::nullopt;
    Pi1Element p{g, sol->particular, kernel_zero(bp.center.group)};
    return canonicalize(bp, p).tau;
}

inline std::vector<Pi1Element> enumerate_pi1_fiber(const ConvenientBasePoint& bp, GaloisElement g)
{
    auto tau = solve_pi1_tau(bp, g);
    if (!tau)
        throw ModelError("comparison.empty_fiber", "gamma=" + std::to_string(g.i),
                         "no tau with tau^n = gamma^{-1}s/s in Z-hat");
    std::vector<Pi1Element> out;
    for (const auto& w : kernel_elements(bp.center.group))
        out.push_back({g, *tau, w});
    return out;
}

inline Pi1Element pi1_act(const KernelElement& z, const Pi1Element& p)
{
    return {p.gamma, p.tau, kernel_add(z, p.zeta)};
}

enum class CompositionRule {
    standard, // (gamma_2^{-1}(tau_1) tau_2, zeta_1 zeta_2)
    offset,   // deliberately wrong: shifts zeta when both gammas are nontrivial
};

inline Pi1Element pi1_compose(const ConvenientBasePoint& bp, const Pi1Element& a, const Pi1Element& b,
                              CompositionRule rule = CompositionRule::standard)
{
    const auto& fm = bp.dm->fm;
    Pi1Element p;
    p.gamma = fm.compose(a.gamma, b.gamma);
    p.tau.resize(a.tau.size());
    for (std::size_t j = 0; j < a.tau.size(); ++j)
        p.tau[j] = addmod(fm.apply_inverse(b.gamma, a.tau[j]), b.tau[j], fm.N);
    p.zeta = kernel_add(a.zeta, b.zeta);
    if (rule == CompositionRule::offset && a.gamma.i != 0 && b.gamma.i != 0 && !p.zeta.empty())
        p.zeta = kernel_add(p.zeta, kernel_generator(bp.center.group, 0));
    if (!in_pi1_fiber(bp, p.gamma, p.tau))
        throw ModelError("comparison.pi1_compose", to_string(a) + " o " + to_string(b),
                         "composite violates the fiber condition over gamma_1 gamma_2");
    return canonicalize(bp, p);
}

// ----------------------------------------------------------------------------
// The second twist E_2

/// chi on the generators d_j = (e_j, lift_j) and on the base-field generator.
struct E2Element {
    GaloisElement gamma;
    std::vector<QZ> chi;
    QZ chi_kernel;
    friend auto operator<=>(const E2Element&, const E2Element&) = default;
};

inline std::string to_string(const E2Element& e)
{
    return "(gamma=" + std::to_string(e.gamma.i) + ", chi=" + kernel_to_string(e.chi) +
           ", chi(u0)=" + e.chi_kernel.to_string() + ")";
}

/// s_psi(b) = sum b_j d_j + m_b u0; returns m_b for each SC basis vector b.
inline IntVec s_psi_kernel_multiples(const DModel& dm)
{
    IntVec out;
    for (std::size_t a = 0; a < dm.sc_basis().size(); ++a)
        out.push_back(d_coordinates(dm, dm.sc_basis()[a], dm.s_psi[a]).kernel_multiple);
    return out;
}

/// Empty if e satisfies both defining conditions, else the violated one.
inline std::string e2_defect(const DModel& dm, const E2Element& e)
{
    if (e.chi.size() != dm.rank())
        return "wrong number of generator values";
    if (!e.chi_kernel.killed_by(dm.fm.q - 1))
        return "value on F^x does not respect its order";
    if (e.chi_kernel != artin_character(dm.fm, e.gamma, dm.kernel_generator()))
        return "chi(u) differs from the Artin symbol";
    IntVec mb = s_psi_kernel_multiples(dm);
    for (std::size_t a = 0; a < dm.sc_basis().size(); ++a) {
        QZ v = mb[a] * e.chi_kernel;
        for (std::size_t j = 0; j < dm.rank(); ++j)
            v += dm.sc_basis()[a][j] * e.chi[j];
        if (!v.is_zero())
            return "chi is nontrivial on s_psi of SC basis vector " + std::to_string(a);
    }
    return {};
}

inline QZ e2_evaluate(const DModel& dm, const E2Element& e, const IntVec& y, Int u)
{
    DCoordinates dc = d_coordinates(dm, y, u);
    QZ v = dc.kernel_multiple * e.chi_kernel;
    for (std::size_t j = 0; j < dm.rank(); ++j)
        v += y[j] * e.chi[j];
    return v;
}

/// [eta * chi](d) = eta(y) chi(d)
inline E2Element e2_act(const CenterDual& cd, const KernelElement& eta, const E2Element& e)
{
    E2Element out = e;
    auto vals = cd.values(eta);
    for (std::size_t j = 0; j < out.chi.size(); ++j)
        out.chi[j] += vals[j];
    return out;
}

inline E2Element e2_compose(const FieldModel& fm, const E2Element& a, const E2Element& b)
{
    E2Element out{fm.compose(a.gamma, b.gamma), {}, a.chi_kernel + b.chi_kernel};
    for (std::size_t j = 0; j < a.chi.size(); ++j)
        out.chi.push_back(a.chi[j] + b.chi[j]);
    return out;
}

/// One element of E_{2,gamma} from the Smith form of the SC basis.
inline E2Element e2_particular(const DModel& dm, const CenterDual& cd, GaloisElement g)
{
    const std::size_t r = dm.rank();
    const IntMat& S = dm.sc_basis();
    E2Element e{g, std::vector<QZ>(r), artin_character(dm.fm, g, dm.kernel_generator())};
    if (S.empty())
        return e;
    IntVec mb = s_psi_kernel_multiples(dm);
    std::vector<QZ> rhs;
    for (std::size_t a = 0; a < S.size(); ++a)
        rhs.push_back(-(mb[a] * e.chi_kernel));
    SmithForm sf = smith_normal_form(S, r);
    std::vector<QZ> w(r);
    for (std::size_t i = 0; i < S.size(); ++i) {
        QZ ur;
        for (std::size_t a = 0; a < S.size(); ++a)
            ur += sf.U[i][a] * rhs[a];
        w[i] = ur.divided_by(sf.diagonal[i]);
    }
    for (std::size_t j = 0; j < r; ++j)
        for (std::size_t i = 0; i < r; ++i)
            e.chi[j] += sf.V[j][i] * w[i];
    (void)cd;
    if (auto d = e2_defect(dm, e); !d.empty())
        throw ModelError("comparison.e2", to_string(e), "particular solution invalid: " + d);
    return e;
}

inline std::vector<E2Element> enumerate_e2_fiber(const DModel& dm, const CenterDual& cd, GaloisElement g)
{
    E2Element base = e2_particular(dm, cd, g);
    std::vector<E2Element> out;
    for (const auto& eta : kernel_elements(cd.group))
        out.push_back(e2_act(cd, eta, base));
    std::sort(out.begin(), out.end());
    return out;
}

// ----------------------------------------------------------------------------
// The comparison map

/**
 * C_gamma(tau, zeta)(s(y) u) = epsilon(gamma^{-1}(v)/v * tau(y)) + zeta(y) with
 * v^n = u, for an invariant d = (y, w) whose F^x-bar coordinate relative to s
 * is u = w - t(y). root_index picks among the n roots of u.
 */
inline QZ comparison_apply(const ConvenientBasePoint& bp, const Pi1Element& p, const IntVec& y, Int w,
                           std::size_t root_index = 0)
{
    const auto& dm = *bp.dm;
    const auto& fm = dm.fm;
    if (!is_invariant(dm, y, w))
        throw std::domain_error("comparison_apply: element is not Gamma-invariant");
    Int u = mod(w - dot_mod(y, bp.s.t, fm.N), fm.N);
    auto roots = nth_roots(fm, u);
    Int twist = dot_mod(y, p.tau, fm.N);
    QZ value = kummer_epsilon(fm, p.gamma, roots.at(root_index), twist);
    auto z = bp.center.values(p.zeta);
    for (std::size_t j = 0; j < y.size(); ++j)
        value += y[j] * z[j];
    return value;
}

inline E2Element comparison_map(const ConvenientBasePoint& bp, const Pi1Element& p)
{
    const auto& dm = *bp.dm;
    const std::size_t r = dm.rank();
    E2Element e{p.gamma, {}, comparison_apply(bp, p, IntVec(r, 0), dm.kernel_generator())};
    for (std::size_t j = 0; j < r; ++j) {
        IntVec ej(r, 0);
        ej[j] = 1;
        e.chi.push_back(comparison_apply(bp, p, ej, dm.lifts[j]));
    }
    return e;
}

// ----------------------------------------------------------------------------
// Change of base point

/// All b in Z-hat with b^n = s_1/s_2.
inline std::vector<TorusCharacter> iota_b_choices(const ConvenientBasePoint& bp1, const ConvenientBasePoint& bp2)
{
    if (bp1.dm != bp2.dm)
        throw StructuralError("base points belong to different D-models");
    const auto& dm = *bp1.dm;
    const std::size_t r = dm.rank();
    IntMat A;
    IntVec rhs;
    for (std::size_t j = 0; j < r; ++j) {
        IntVec row(r, 0);
        row[j] = dm.fm.n;
        A.push_back(row);
        rhs.push_back(mod(bp1.s.t[j] - bp2.s.t[j], dm.fm.N));
    }
    for (const auto& b : dm.sc_basis()) {
        A.push_back(b);
        rhs.push_back(0);
    }
    auto sol = solve_mod(A, rhs, dm.fm.N, r);
    if (!sol)
        return {};
    std::vector<TorusCharacter> out;
    for (const auto& xi : bp1.zn)
        out.push_back(reduced(added(sol->particular, xi), dm.fm.N));
    std::sort(out.begin(), out.end());
    return out;
}

/// iota(tau, zeta) = (tau b / gamma^{-1} b, zeta), canonicalized at bp2.
inline Pi1Element base_change_iota(const ConvenientBasePoint& bp1, const ConvenientBasePoint& bp2,
                                   const Pi1Element& p, std::optional<TorusCharacter> b = std::nullopt)
{
    if (!b) {
        auto choices = iota_b_choices(bp1, bp2);
        if (choices.empty())
            throw ModelError("comparison.iota", detail::vec_str(bp1.s.t) + " -> " + detail::vec_str(bp2.s.t),
                             "no b in Z-hat with b^n = s1/s2; the base points are not isomorphic");
        b = choices.front();
    }
    const auto& fm = bp1.dm->fm;
    TorusCharacter ratio = gamma_x_over_x(fm, p.gamma, *b);
    Pi1Element out{p.gamma, {}, p.zeta};
    for (std::size_t j = 0; j < p.tau.size(); ++j)
        out.tau.push_back(mod(p.tau[j] - ratio[j], fm.N));
    if (!in_pi1_fiber(bp2, out.gamma, out.tau))
        throw ModelError("comparison.iota", to_string(p), "iota(p) violates the fiber condition at bp2");
    return canonicalize(bp2, out);
}

// ----------------------------------------------------------------------------
// Extensions read from the fibers

inline FiberExtraction<Pi1Element> pi1_extension(const ConvenientBasePoint& bp,
                                                 CompositionRule rule = CompositionRule::standard)
{
    const auto& fm = bp.dm->fm;
    std::vector<std::vector<Pi1Element>> fibers;
    for (auto g : fm.galois_elements())
        fibers.push_back(enumerate_pi1_fiber(bp, g));
    return extension_from_fibers(
        fm.galois_table(), bp.center.group, fibers, [](const KernelElement& a, const Pi1Element& x) { return pi1_act(a, x); },
        [&](const Pi1Element& x, const Pi1Element& y) { return pi1_compose(bp, x, y, rule); });
}

inline FiberExtraction<E2Element> e2_extension(const DModel& dm, const CenterDual& cd)
{
    std::vector<std::vector<E2Element>> fibers;
    for (auto g : dm.fm.galois_elements())
        fibers.push_back(enumerate_e2_fiber(dm, cd, g));
    return extension_from_fibers(
        dm.fm.galois_table(), cd.group, fibers,
        [&](const KernelElement& a, const E2Element& x) { return e2_act(cd, a, x); },
        [&](const E2Element& x, const E2Element& y) { return e2_compose(dm.fm, x, y); });
}

} // namespace mlg
