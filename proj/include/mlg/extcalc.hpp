#pragma once

#include <algorithm>
#include <array>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "errors.hpp"
#include "rootdatum.hpp"

namespace mlg
{

// ----------------------------------------------------------------------------
// Finite groups

struct FiniteGroupTable {
    std::size_t order = 0;
    std::vector<std::vector<std::size_t>> mult;
    std::size_t identity = 0;
    std::vector<std::size_t> inverse;

    std::size_t operator()(std::size_t a, std::size_t b) const { return mult[a][b]; }

    /// Throws StructuralError unless the table is a group.
    void validate() const
    {
        if (mult.size() != order || inverse.size() != order || identity >= order)
            throw StructuralError("group table: dimension mismatch");
        for (const auto& row : mult) {
            if (row.size() != order)
                throw StructuralError("group table: dimension mismatch");
            for (std::size_t x : row)
                if (x >= order)
                    throw StructuralError("group table: entry out of range");
        }
        for (std::size_t a = 0; a < order; ++a) {
            if (mult[identity][a] != a || mult[a][identity] != a)
                throw StructuralError("group table: identity law fails at " + std::to_string(a));
            if (mult[a][inverse[a]] != identity || mult[inverse[a]][a] != identity)
                throw StructuralError("group table: inverse law fails at " + std::to_string(a));
            for (std::size_t b = 0; b < order; ++b)
                for (std::size_t c = 0; c < order; ++c)
                    if (mult[mult[a][b]][c] != mult[a][mult[b][c]])
                        throw StructuralError("group table: associativity fails at (" + std::to_string(a) +
                                              "," + std::to_string(b) + "," + std::to_string(c) + ")");
        }
    }

    static FiniteGroupTable from_table(std::vector<std::vector<std::size_t>> table)
    {
        FiniteGroupTable g;
        g.order = table.size();
        g.mult = std::move(table);
        if (g.order == 0)
            throw StructuralError("group table: empty");
        g.identity = g.order;
        for (std::size_t e = 0; e < g.order && g.identity == g.order; ++e) {
            bool ok = true;
            for (std::size_t a = 0; a < g.order && ok; ++a)
                ok = g.mult[e].size() == g.order && g.mult[e][a] == a && g.mult[a][e] == a;
            if (ok)
                g.identity = e;
        }
        if (g.identity == g.order)
            throw StructuralError("group table: no identity element");
        g.inverse.assign(g.order, g.order);
        for (std::size_t a = 0; a < g.order; ++a)
            for (std::size_t b = 0; b < g.order; ++b)
                if (g.mult[a][b] == g.identity)
                    g.inverse[a] = b;
        for (std::size_t a = 0; a < g.order; ++a)
            if (g.inverse[a] == g.order)
                throw StructuralError("group table: element " + std::to_string(a) + " has no inverse");
        g.validate();
        return g;
    }

    /// Z/n with element i <-> i.
    static FiniteGroupTable cyclic(std::size_t n)
    {
        std::vector<std::vector<std::size_t>> t(n, std::vector<std::size_t>(n));
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < n; ++b)
                t[a][b] = (a + b) % n;
        return from_table(std::move(t));
    }

    /// G x H with (g, h) <-> g * |H| + h.
    static FiniteGroupTable direct_product(const FiniteGroupTable& G, const FiniteGroupTable& H)
    {
        std::size_t n = G.order * H.order;
        std::vector<std::vector<std::size_t>> t(n, std::vector<std::size_t>(n));
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < n; ++b)
                t[a][b] = G(a / H.order, b / H.order) * H.order + H(a % H.order, b % H.order);
        return from_table(std::move(t));
    }

    friend bool operator==(const FiniteGroupTable&, const FiniteGroupTable&) = default;
};

// ----------------------------------------------------------------------------
// Kernel groups: A = Z/d_1 + ... + Z/d_t + (Q/Z)^f written additively in Q/Z
// coordinates. A Z/d coordinate holds a value in (1/d)Z/Z.

using KernelGroup = FiniteAbelianPresentation;
using KernelElement = std::vector<QZ>;

inline KernelElement kernel_zero(const KernelGroup& A)
{
    return KernelElement(A.coordinate_count());
}

inline bool kernel_contains(const KernelGroup& A, const KernelElement& x)
{
    if (x.size() != A.coordinate_count())
        return false;
    for (std::size_t i = 0; i < A.invariant_factors.size(); ++i)
        if (!x[i].killed_by(A.invariant_factors[i]))
            return false;
    return true;
}

inline KernelElement kernel_add(const KernelElement& a, const KernelElement& b)
{
    KernelElement out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        out[i] = a[i] + b[i];
    return out;
}

inline KernelElement kernel_sub(const KernelElement& a, const KernelElement& b)
{
    KernelElement out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        out[i] = a[i] - b[i];
    return out;
}

inline KernelElement kernel_scale(Int k, const KernelElement& a)
{
    KernelElement out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        out[i] = k * a[i];
    return out;
}

inline bool kernel_is_zero(const KernelElement& a)
{
    return std::all_of(a.begin(), a.end(), [](const QZ& x) { return x.is_zero(); });
}

/// Generator i of the torsion part: 1/d_i in coordinate i.
inline KernelElement kernel_generator(const KernelGroup& A, std::size_t i)
{
    KernelElement g = kernel_zero(A);
    g[i] = QZ(1, A.invariant_factors.at(i));
    return g;
}

/// All elements of a finite kernel group, in lexicographic coordinate order.
inline std::vector<KernelElement> kernel_elements(const KernelGroup& A, std::size_t limit = 1u << 20)
{
    if (!A.is_finite())
        throw std::domain_error("kernel_elements: group has free Q/Z directions");
    std::vector<KernelElement> out{kernel_zero(A)};
    for (std::size_t i = 0; i < A.invariant_factors.size(); ++i) {
        Int d = A.invariant_factors[i];
        std::vector<KernelElement> next;
        for (const auto& x : out)
            for (Int a = 0; a < d; ++a) {
                KernelElement y = x;
                y[i] = QZ(a, d);
                next.push_back(std::move(y));
            }
        out = std::move(next);
        if (out.size() > limit)
            throw std::length_error("kernel_elements: group too large");
    }
    return out;
}

inline std::string kernel_to_string(const KernelElement& x)
{
    std::string s = "[";
    for (std::size_t i = 0; i < x.size(); ++i)
        s += (i ? "," : "") + x[i].to_string();
    return s + "]";
}

/**
 * Homomorphism A -> A'. images[i] is the image of the torsion generator 1/d_i;
 * free Q/Z coordinates map by the integer matrix free_map (rows: target free
 * coordinates, columns: source free coordinates).
 */
struct KernelHom {
    KernelGroup source;
    KernelGroup target;
    std::vector<KernelElement> images;
    IntMat free_map;

    /// Empty string if this is a well-defined homomorphism, else the reason.
    std::string defect() const
    {
        if (images.size() != source.invariant_factors.size())
            return "image count does not match source generators";
        for (std::size_t i = 0; i < images.size(); ++i) {
            if (!kernel_contains(target, images[i]))
                return "image of generator " + std::to_string(i) + " is not in the target";
            if (!kernel_is_zero(kernel_scale(source.invariant_factors[i], images[i])))
                return "relation d_" + std::to_string(i) + " * g_" + std::to_string(i) +
                       " = 0 is not preserved";
        }
        if (source.free_rank > 0) {
            if (free_map.size() != target.free_rank)
                return "free_map has wrong row count";
            for (const auto& row : free_map)
                if (row.size() != source.free_rank)
                    return "free_map has wrong column count";
        }
        return {};
    }

    KernelElement operator()(const KernelElement& x) const
    {
        KernelElement out = kernel_zero(target);
        const std::size_t t = source.invariant_factors.size();
        for (std::size_t i = 0; i < t; ++i) {
            Int d = source.invariant_factors[i];
            Int k = mod(x[i].value().num() * (d / x[i].den()), d);
            out = kernel_add(out, kernel_scale(k, images[i]));
        }
        for (std::size_t f = 0; f < source.free_rank; ++f)
            for (std::size_t g = 0; g < target.free_rank; ++g)
                out[target.invariant_factors.size() + g] += free_map[g][f] * x[t + f];
        return out;
    }

    static KernelHom identity(const KernelGroup& A)
    {
        KernelHom h{A, A, {}, identity_matrix(A.free_rank)};
        for (std::size_t i = 0; i < A.invariant_factors.size(); ++i)
            h.images.push_back(kernel_generator(A, i));
        return h;
    }

    static KernelHom zero(const KernelGroup& A, const KernelGroup& B)
    {
        return KernelHom{A, B, std::vector<KernelElement>(A.invariant_factors.size(), kernel_zero(B)),
                         IntMat(B.free_rank, IntVec(A.free_rank, 0))};
    }
};

/// g o f
inline KernelHom compose(const KernelHom& g, const KernelHom& f)
{
    KernelHom h{f.source, g.target, {}, {}};
    for (const auto& im : f.images)
        h.images.push_back(g(im));
    if (f.source.free_rank > 0)
        h.free_map = multiply(g.free_map, f.free_map);
    else
        h.free_map = IntMat(g.target.free_rank, IntVec{});
    return h;
}

// ----------------------------------------------------------------------------
// Cocycles and extensions

/// Normalized 2-cocycle Gamma x Gamma -> A with trivial action.
struct Cocycle2 {
    FiniteGroupTable group;
    KernelGroup kernel;
    std::vector<std::vector<KernelElement>> table;

    friend bool operator==(const Cocycle2&, const Cocycle2&) = default;
};

struct CentralExtension {
    Cocycle2 cocycle;

    const FiniteGroupTable& group() const { return cocycle.group; }
    const KernelGroup& kernel() const { return cocycle.kernel; }

    friend bool operator==(const CentralExtension&, const CentralExtension&) = default;
};

struct CocycleCheck {
    bool ok = true;
    std::string reason;
    std::optional<std::array<std::size_t, 3>> triple;
};

inline void check_cocycle_dimensions(const Cocycle2& c)
{
    if (c.table.size() != c.group.order)
        throw StructuralError("cocycle table has " + std::to_string(c.table.size()) + " rows, group order " +
                              std::to_string(c.group.order));
    for (const auto& row : c.table) {
        if (row.size() != c.group.order)
            throw StructuralError("cocycle table row length does not match group order");
        for (const auto& x : row)
            if (x.size() != c.kernel.coordinate_count())
                throw StructuralError("cocycle entry has wrong number of kernel coordinates");
    }
}

/// Normalization and c(a,b) + c(ab,c) = c(b,c) + c(a,bc) everywhere.
inline CocycleCheck validate_cocycle(const Cocycle2& c)
{
    check_cocycle_dimensions(c);
    const auto& G = c.group;
    for (std::size_t a = 0; a < G.order; ++a)
        for (std::size_t b = 0; b < G.order; ++b)
            if (!kernel_contains(c.kernel, c.table[a][b]))
                return {false, "entry outside kernel", std::array<std::size_t, 3>{a, b, G.identity}};
    for (std::size_t a = 0; a < G.order; ++a) {
        if (!kernel_is_zero(c.table[G.identity][a]))
            return {false, "not normalized", std::array<std::size_t, 3>{G.identity, a, G.identity}};
        if (!kernel_is_zero(c.table[a][G.identity]))
            return {false, "not normalized", std::array<std::size_t, 3>{a, G.identity, G.identity}};
    }
    for (std::size_t a = 0; a < G.order; ++a)
        for (std::size_t b = 0; b < G.order; ++b)
            for (std::size_t d = 0; d < G.order; ++d) {
                auto lhs = kernel_add(c.table[a][b], c.table[G(a, b)][d]);
                auto rhs = kernel_add(c.table[b][d], c.table[a][G(b, d)]);
                if (lhs != rhs)
                    return {false, "cocycle identity fails", std::array<std::size_t, 3>{a, b, d}};
            }
    return {};
}

inline Cocycle2 zero_cocycle(const FiniteGroupTable& G, const KernelGroup& A)
{
    return Cocycle2{G, A, std::vector<std::vector<KernelElement>>(
                              G.order, std::vector<KernelElement>(G.order, kernel_zero(A)))};
}

inline CentralExtension split_extension(const FiniteGroupTable& G, const KernelGroup& A)
{
    return CentralExtension{zero_cocycle(G, A)};
}

inline CentralExtension baer_sum(const CentralExtension& e1, const CentralExtension& e2)
{
    if (!(e1.group() == e2.group()))
        throw StructuralError("baer_sum: extensions of different groups");
    if (!(e1.kernel() == e2.kernel()))
        throw StructuralError("baer_sum: extensions with different kernels");
    Cocycle2 c = e1.cocycle;
    for (std::size_t a = 0; a < c.group.order; ++a)
        for (std::size_t b = 0; b < c.group.order; ++b)
            c.table[a][b] = kernel_add(c.table[a][b], e2.cocycle.table[a][b]);
    return CentralExtension{c};
}

/// Inverse class in Ext: the negated cocycle.
inline CentralExtension baer_negate(const CentralExtension& e)
{
    Cocycle2 c = e.cocycle;
    for (auto& row : c.table)
        for (auto& x : row)
            x = kernel_scale(-1, x);
    return CentralExtension{c};
}

inline CentralExtension pushout_extension(const CentralExtension& e, const KernelHom& f)
{
    if (!(f.source == e.kernel()))
        throw StructuralError("pushout: homomorphism source differs from the extension kernel");
    if (auto d = f.defect(); !d.empty())
        throw StructuralError("pushout: not a homomorphism: " + d);
    Cocycle2 c{e.group(), f.target, {}};
    for (const auto& row : e.cocycle.table) {
        std::vector<KernelElement> out;
        for (const auto& x : row)
            out.push_back(f(x));
        c.table.push_back(out);
    }
    return CentralExtension{c};
}

/// Group homomorphism source -> target given by images of elements.
struct GroupHom {
    FiniteGroupTable source;
    FiniteGroupTable target;
    std::vector<std::size_t> map;

    std::optional<std::pair<std::size_t, std::size_t>> defect() const
    {
        if (map.size() != source.order)
            return std::make_pair(source.order, source.order);
        for (std::size_t a = 0; a < source.order; ++a) {
            if (map[a] >= target.order)
                return std::make_pair(a, a);
            for (std::size_t b = 0; b < source.order; ++b)
                if (map[source(a, b)] != target(map[a], map[b]))
                    return std::make_pair(a, b);
        }
        return std::nullopt;
    }
};

inline GroupHom compose(const GroupHom& g, const GroupHom& f)
{
    GroupHom h{f.source, g.target, {}};
    for (std::size_t x : f.map)
        h.map.push_back(g.map[x]);
    return h;
}

inline CentralExtension pullback_extension(const CentralExtension& e, const GroupHom& h)
{
    if (!(h.target == e.group()))
        throw StructuralError("pullback: homomorphism target differs from the extension group");
    if (auto d = h.defect())
        throw StructuralError("pullback: not a homomorphism at (" + std::to_string(d->first) + "," +
                              std::to_string(d->second) + ")");
    Cocycle2 c = zero_cocycle(h.source, e.kernel());
    for (std::size_t a = 0; a < h.source.order; ++a)
        for (std::size_t b = 0; b < h.source.order; ++b)
            c.table[a][b] = e.cocycle.table[h.map[a]][h.map[b]];
    return CentralExtension{c};
}

// ----------------------------------------------------------------------------
// Coboundaries

using Cochain1 = std::vector<KernelElement>;

/// (d b)(x, y) = b(x) + b(y) - b(xy).
inline Cocycle2 coboundary(const FiniteGroupTable& G, const KernelGroup& A, const Cochain1& b)
{
    Cocycle2 c = zero_cocycle(G, A);
    for (std::size_t x = 0; x < G.order; ++x)
        for (std::size_t y = 0; y < G.order; ++y)
            c.table[x][y] = kernel_sub(kernel_add(b[x], b[y]), b[G(x, y)]);
    return c;
}

enum class SolveMethod { linear, exhaustive };

namespace detail
{
inline std::optional<Cochain1> coboundary_linear(const Cocycle2& c)
{
    const auto& G = c.group;
    const std::size_t g = G.order;
    const std::size_t t = c.kernel.invariant_factors.size();
    Cochain1 b(g, kernel_zero(c.kernel));
    // Each kernel coordinate decouples into its own system over Z/M.
    for (std::size_t coord = 0; coord < c.kernel.coordinate_count(); ++coord) {
        Int M = 1;
        if (coord < t) {
            M = c.kernel.invariant_factors[coord];
        } else {
            Int L = 1;
            for (const auto& row : c.table)
                for (const auto& x : row)
                    L = lcm(L, x[coord].den());
            M = checked_mul(L, static_cast<Int>(g));
        }
        IntMat A;
        IntVec v;
        for (std::size_t x = 0; x < g; ++x)
            for (std::size_t y = 0; y < g; ++y) {
                IntVec row(g, 0);
                row[x] += 1;
                row[y] += 1;
                row[G(x, y)] -= 1;
                A.push_back(row);
                const QZ& e = c.table[x][y][coord];
                v.push_back(mod(e.value().num() * (M / e.den()), M));
            }
        auto sol = solve_mod(A, v, M, g);
        if (!sol)
            return std::nullopt;
        for (std::size_t x = 0; x < g; ++x)
            b[x][coord] = QZ(sol->particular[x], M);
    }
    return b;
}

inline std::optional<Cochain1> coboundary_exhaustive(const Cocycle2& c, std::size_t limit)
{
    const auto& G = c.group;
    auto elems = kernel_elements(c.kernel);
    std::vector<std::size_t> others;
    for (std::size_t x = 0; x < G.order; ++x)
        if (x != G.identity)
            others.push_back(x);
    double total = 1;
    for (std::size_t i = 0; i < others.size(); ++i)
        total *= static_cast<double>(elems.size());
    if (total > static_cast<double>(limit))
        throw std::length_error("coboundary_solve: exhaustive search space too large");
    std::vector<std::size_t> idx(others.size(), 0);
    while (true) {
        Cochain1 b(G.order, kernel_zero(c.kernel));
        for (std::size_t i = 0; i < others.size(); ++i)
            b[others[i]] = elems[idx[i]];
        if (coboundary(G, c.kernel, b).table == c.table)
            return b;
        std::size_t pos = 0;
        while (pos < idx.size() && ++idx[pos] == elems.size())
            idx[pos++] = 0;
        if (pos == idx.size())
            return std::nullopt;
    }
}
} // namespace detail

/**
 * A 1-cochain b with d b = c, or nullopt if c is not a coboundary. The linear
 * path solves one congruence system per kernel coordinate; the exhaustive path
 * enumerates normalized cochains (finite kernels only).
 */
inline std::optional<Cochain1> coboundary_solve(const Cocycle2& c, SolveMethod method = SolveMethod::linear,
                                                std::size_t exhaustive_limit = 10'000'000)
{
    check_cocycle_dimensions(c);
    if (method == SolveMethod::exhaustive)
        return detail::coboundary_exhaustive(c, exhaustive_limit);
    return detail::coboundary_linear(c);
}

/// Same class in H^2: the difference cocycle is a coboundary.
inline bool cohomologous(const CentralExtension& a, const CentralExtension& b,
                         SolveMethod method = SolveMethod::linear)
{
    return coboundary_solve(baer_sum(a, baer_negate(b)).cocycle, method).has_value();
}

inline bool is_split(const CentralExtension& e, SolveMethod method = SolveMethod::linear)
{
    return coboundary_solve(e.cocycle, method).has_value();
}

// ----------------------------------------------------------------------------
// Extensions from fiber systems

template <class Elem>
struct FiberExtraction {
    CentralExtension extension;
    std::vector<Elem> base;   // chosen base element per group element
    std::map<Elem, std::pair<std::size_t, KernelElement>> label;   // x = a * base(gamma)
};

/**
 * Reads off the cocycle of an extension presented fiberwise.
 *
 * fibers[g] lists the elements over g; act(a, x) is the kernel action and
 * mult(x, y) the composition, which must land in fibers[g1 g2]. The identity
 * fiber's base is its idempotent, so the cocycle comes out normalized.
 * All element triples are tested for associativity when there are at most
 * associativity_limit of them.
 * Violations raise ModelError with check "extcalc.fibers".
 */
template <class Elem, class Action, class Mult>
FiberExtraction<Elem> extension_from_fibers(const FiniteGroupTable& G, const KernelGroup& A,
                                            const std::vector<std::vector<Elem>>& fibers, Action act,
                                            Mult mult, std::size_t associativity_limit = 1u << 16)
{
    auto fail = [](const std::string& w, const std::string& msg) -> void {
        throw ModelError("extcalc.fibers", w, msg);
    };
    if (fibers.size() != G.order)
        throw StructuralError("extension_from_fibers: one fiber per group element required");
    const auto elems = kernel_elements(A);
    FiberExtraction<Elem> out;
    out.base.resize(G.order);

    for (std::size_t g = 0; g < G.order; ++g) {
        if (fibers[g].empty())
            fail("fiber " + std::to_string(g), "empty fiber");
        Elem base = fibers[g].front();
        if (g == G.identity) {
            bool found = false;
            for (const auto& x : fibers[g])
                if (mult(x, x) == x) {
                    base = x;
                    found = true;
                    break;
                }
            if (!found)
                fail("fiber " + std::to_string(g), "identity fiber has no idempotent");
        }
        out.base[g] = base;
        std::map<Elem, KernelElement> orbit;
        for (const auto& a : elems)
            if (!orbit.emplace(act(a, base), a).second)
                fail("fiber " + std::to_string(g) + ", a=" + kernel_to_string(a), "action is not free");
        if (orbit.size() != fibers[g].size())
            fail("fiber " + std::to_string(g), "action is not transitive");
        for (const auto& x : fibers[g]) {
            auto it = orbit.find(x);
            if (it == orbit.end())
                fail("fiber " + std::to_string(g), "action is not transitive");
            if (!out.label.emplace(x, std::make_pair(g, it->second)).second)
                fail("fiber " + std::to_string(g), "element lies in two fibers");
        }
    }

    auto locate = [&](const Elem& x, std::size_t expect, const std::string& where) {
        auto it = out.label.find(x);
        if (it == out.label.end() || it->second.first != expect)
            fail(where, "product does not land in the expected fiber");
        return it->second.second;
    };

    // Equivariance on generators of A, all pairs of elements.
    std::vector<KernelElement> gens;
    for (std::size_t i = 0; i < A.invariant_factors.size(); ++i)
        gens.push_back(kernel_generator(A, i));
    for (std::size_t g1 = 0; g1 < G.order; ++g1)
        for (std::size_t g2 = 0; g2 < G.order; ++g2)
            for (const auto& x : fibers[g1])
                for (const auto& y : fibers[g2]) {
                    Elem xy = mult(x, y);
                    std::string where = "(" + std::to_string(g1) + "," + std::to_string(g2) + ")";
                    locate(xy, G(g1, g2), where);
                    for (const auto& a : gens) {
                        Elem axy = act(a, xy);
                        if (!(mult(act(a, x), y) == axy) || !(mult(x, act(a, y)) == axy))
                            fail(where + ", a=" + kernel_to_string(a), "composition is not A-equivariant");
                    }
                }

    // With equivariance in hand, associativity on the base elements implies it
    // everywhere; the full triple check runs when it is affordable.
    std::size_t total = out.label.size();
    bool exhaustive = static_cast<double>(total) * total * total <= static_cast<double>(associativity_limit);
    auto assoc = [&](const Elem& x, const Elem& y, const Elem& z, std::size_t g1, std::size_t g2, std::size_t g3) {
        if (!(mult(mult(x, y), z) == mult(x, mult(y, z))))
            fail("(" + std::to_string(g1) + "," + std::to_string(g2) + "," + std::to_string(g3) + ")",
                 "composition is not associative");
    };
    for (std::size_t g1 = 0; g1 < G.order; ++g1)
        for (std::size_t g2 = 0; g2 < G.order; ++g2)
            for (std::size_t g3 = 0; g3 < G.order; ++g3) {
                if (!exhaustive) {
                    assoc(out.base[g1], out.base[g2], out.base[g3], g1, g2, g3);
                    continue;
                }
                for (const auto& x : fibers[g1])
                    for (const auto& y : fibers[g2])
                        for (const auto& z : fibers[g3])
                            assoc(x, y, z, g1, g2, g3);
            }

    Cocycle2 c = zero_cocycle(G, A);
    for (std::size_t g1 = 0; g1 < G.order; ++g1)
        for (std::size_t g2 = 0; g2 < G.order; ++g2) {
            std::size_t g12 = G(g1, g2);
            KernelElement a = locate(mult(out.base[g1], out.base[g2]), g12, "bases");
            KernelElement a0 = out.label.at(out.base[g12]).second;
            c.table[g1][g2] = kernel_sub(a, a0);
        }
    out.extension = CentralExtension{c};
    return out;
}

/// Element (g, a) of the extension group built from a cocycle.
struct ExtensionElement {
    std::size_t g = 0;
    KernelElement a;
    friend auto operator<=>(const ExtensionElement&, const ExtensionElement&) = default;
};

/// The fiber system of the group Gamma x_c A: (g, a)(h, b) = (gh, a + b + c(g, h)).
struct ExtensionFibers {
    CentralExtension extension;
    std::vector<std::vector<ExtensionElement>> fibers;

    ExtensionElement act(const KernelElement& a, const ExtensionElement& x) const
    {
        return {x.g, kernel_add(a, x.a)};
    }
    ExtensionElement mult(const ExtensionElement& x, const ExtensionElement& y) const
    {
        const auto& c = extension.cocycle;
        return {c.group(x.g, y.g), kernel_add(kernel_add(x.a, y.a), c.table[x.g][y.g])};
    }
};

inline ExtensionFibers fibers_from_extension(const CentralExtension& e)
{
    ExtensionFibers f{e, {}};
    auto elems = kernel_elements(e.kernel());
    for (std::size_t g = 0; g < e.group().order; ++g) {
        std::vector<ExtensionElement> fiber;
        for (const auto& a : elems)
            fiber.push_back({g, a});
        f.fibers.push_back(fiber);
    }
    return f;
}

} // namespace mlg
