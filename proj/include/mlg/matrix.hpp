#pragma once

#include <algorithm>
#include <cstdlib>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <vector>

#include "intmath.hpp"
#include "rational.hpp"

namespace mlg
{

using IntVec = std::vector<Int>;
/// Row-major integer matrix. Lattice bases are stored as lists of row vectors.
using IntMat = std::vector<IntVec>;
using RatVec = std::vector<Rational>;
using RatMat = std::vector<RatVec>;

inline IntMat identity_matrix(std::size_t n)
{
    IntMat m(n, IntVec(n, 0));
    for (std::size_t i = 0; i < n; ++i)
        m[i][i] = 1;
    return m;
}

inline std::size_t cols(const IntMat& m, std::size_t fallback = 0)
{
    return m.empty() ? fallback : m.front().size();
}

inline IntMat transpose(const IntMat& m, std::size_t ncols_if_empty = 0)
{
    std::size_t r = m.size(), c = cols(m, ncols_if_empty);
    IntMat t(c, IntVec(r, 0));
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j)
            t[j][i] = m[i][j];
    return t;
}

inline IntMat multiply(const IntMat& a, const IntMat& b)
{
    std::size_t p = a.size(), inner = b.size(), r = cols(b);
    IntMat out(p, IntVec(r, 0));
    for (std::size_t i = 0; i < p; ++i) {
        if (a[i].size() != inner)
            throw std::invalid_argument("matrix dimension mismatch");
        for (std::size_t k = 0; k < inner; ++k)
            for (std::size_t j = 0; j < r; ++j)
                out[i][j] = checked_add(out[i][j], checked_mul(a[i][k], b[k][j]));
    }
    return out;
}

inline IntVec mat_vec(const IntMat& a, const IntVec& v)
{
    IntVec out(a.size(), 0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].size() != v.size())
            throw std::invalid_argument("matrix/vector dimension mismatch");
        for (std::size_t j = 0; j < v.size(); ++j)
            out[i] = checked_add(out[i], checked_mul(a[i][j], v[j]));
    }
    return out;
}

inline Int dot(const IntVec& a, const IntVec& b)
{
    if (a.size() != b.size())
        throw std::invalid_argument("dot: length mismatch");
    Int s = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        s = checked_add(s, checked_mul(a[i], b[i]));
    return s;
}

inline Int dot_mod(const IntVec& a, const IntVec& b, Int m)
{
    if (a.size() != b.size())
        throw std::invalid_argument("dot_mod: length mismatch");
    Int s = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        s = addmod(s, mulmod(a[i], b[i], m), m);
    return s;
}

inline IntVec scaled(const IntVec& v, Int k)
{
    IntVec out(v);
    for (auto& x : out)
        x = checked_mul(x, k);
    return out;
}

inline IntVec added(const IntVec& a, const IntVec& b)
{
    IntVec out(a);
    for (std::size_t i = 0; i < a.size(); ++i)
        out[i] = checked_add(out[i], b[i]);
    return out;
}

inline IntVec reduced(IntVec v, Int m)
{
    for (auto& x : v)
        x = mod(x, m);
    return v;
}

// ----------------------------------------------------------------------------
// Smith normal form

struct SmithForm {
    IntMat U;            // p x p unimodular
    IntMat V;            // r x r unimodular
    IntMat D;            // p x r diagonal, U * A * V = D
    IntVec diagonal;     // D[i][i] for i < min(p, r); d_1 | d_2 | ... with zeros last
    std::size_t rank = 0;
};

/// Smith normal form of a p x r integer matrix together with the transforms.
inline SmithForm smith_normal_form(const IntMat& A, std::size_t ncols_if_empty = 0)
{
    const std::size_t p = A.size();
    const std::size_t r = cols(A, ncols_if_empty);
    for (const auto& row : A)
        if (row.size() != r)
            throw std::invalid_argument("smith_normal_form: ragged matrix");

    SmithForm sf;
    sf.D = A;
    sf.U = identity_matrix(p);
    sf.V = identity_matrix(r);
    auto& D = sf.D;
    auto& U = sf.U;
    auto& V = sf.V;

    auto row_axpy = [&](std::size_t dst, std::size_t src, Int k) {
        // row_dst -= k * row_src
        for (std::size_t j = 0; j < r; ++j)
            D[dst][j] = checked_sub(D[dst][j], checked_mul(k, D[src][j]));
        for (std::size_t j = 0; j < p; ++j)
            U[dst][j] = checked_sub(U[dst][j], checked_mul(k, U[src][j]));
    };
    auto col_axpy = [&](std::size_t dst, std::size_t src, Int k) {
        for (std::size_t i = 0; i < p; ++i)
            D[i][dst] = checked_sub(D[i][dst], checked_mul(k, D[i][src]));
        for (std::size_t i = 0; i < r; ++i)
            V[i][dst] = checked_sub(V[i][dst], checked_mul(k, V[i][src]));
    };
    auto swap_rows = [&](std::size_t a, std::size_t b) {
        std::swap(D[a], D[b]);
        std::swap(U[a], U[b]);
    };
    auto swap_cols = [&](std::size_t a, std::size_t b) {
        for (auto& row : D)
            std::swap(row[a], row[b]);
        for (auto& row : V)
            std::swap(row[a], row[b]);
    };

    const std::size_t m = std::min(p, r);
    std::size_t t = 0;
    for (; t < m; ++t) {
        while (true) {
            // Smallest nonzero pivot in the trailing block.
            std::size_t bi = p, bj = r;
            for (std::size_t i = t; i < p; ++i)
                for (std::size_t j = t; j < r; ++j)
                    if (D[i][j] != 0 && (bi == p || std::abs(D[i][j]) < std::abs(D[bi][bj]))) {
                        bi = i;
                        bj = j;
                    }
            if (bi == p)
                goto done;
            swap_rows(t, bi);
            swap_cols(t, bj);

            bool clean = true;
            for (std::size_t i = t + 1; i < p; ++i) {
                if (D[i][t] != 0) {
                    row_axpy(i, t, D[i][t] / D[t][t]);
                    if (D[i][t] != 0)
                        clean = false;
                }
            }
            for (std::size_t j = t + 1; j < r; ++j) {
                if (D[t][j] != 0) {
                    col_axpy(j, t, D[t][j] / D[t][t]);
                    if (D[t][j] != 0)
                        clean = false;
                }
            }
            if (!clean)
                continue;

            bool divides = true;
            for (std::size_t i = t + 1; i < p && divides; ++i)
                for (std::size_t j = t + 1; j < r; ++j)
                    if (D[i][j] % D[t][t] != 0) {
                        // Fold row i into row t and redo the pivot.
                        row_axpy(t, i, -1);
                        divides = false;
                        break;
                    }
            if (divides)
                break;
        }
        if (D[t][t] < 0) {
            for (auto& x : D[t])
                x = -x;
            for (auto& x : U[t])
                x = -x;
        }
    }
done:
    sf.rank = t;
    sf.diagonal.assign(m, 0);
    for (std::size_t i = 0; i < m; ++i)
        sf.diagonal[i] = D[i][i];
    return sf;
}

// ----------------------------------------------------------------------------
// Hermite normal form (row style)

/**
 * Row Hermite normal form of the lattice spanned by the rows of M.
 * Rows of the result are a basis in echelon form: leading entries positive,
 * entries above each leading entry reduced into [0, lead).
 */
inline IntMat hermite_normal_form(const IntMat& M)
{
    if (M.empty())
        return {};
    IntMat A = M;
    const std::size_t r = A.front().size();
    std::size_t row = 0;
    for (std::size_t col = 0; col < r && row < A.size(); ++col) {
        while (true) {
            std::size_t best = A.size();
            for (std::size_t i = row; i < A.size(); ++i)
                if (A[i][col] != 0 && (best == A.size() || std::abs(A[i][col]) < std::abs(A[best][col])))
                    best = i;
            if (best == A.size())
                break;
            std::swap(A[row], A[best]);
            bool clean = true;
            for (std::size_t i = row + 1; i < A.size(); ++i) {
                if (A[i][col] != 0) {
                    Int k = A[i][col] / A[row][col];
                    for (std::size_t j = 0; j < r; ++j)
                        A[i][j] = checked_sub(A[i][j], checked_mul(k, A[row][j]));
                    if (A[i][col] != 0)
                        clean = false;
                }
            }
            if (clean)
                break;
        }
        if (A[row][col] == 0)
            continue;
        if (A[row][col] < 0)
            for (auto& x : A[row])
                x = -x;
        for (std::size_t i = 0; i < row; ++i) {
            Int k = floor_div(A[i][col], A[row][col]);
            if (k != 0)
                for (std::size_t j = 0; j < r; ++j)
                    A[i][j] = checked_sub(A[i][j], checked_mul(k, A[row][j]));
        }
        ++row;
    }
    A.resize(row);
    return A;
}

/// Coordinates of v in the row-HNF basis H, or nullopt if v is not in the lattice.
inline std::optional<IntVec> lattice_coordinates(const IntMat& H, const IntVec& v)
{
    IntVec rest = v;
    IntVec coeffs(H.size(), 0);
    for (std::size_t k = 0; k < H.size(); ++k) {
        std::size_t pivot = 0;
        while (pivot < H[k].size() && H[k][pivot] == 0)
            ++pivot;
        for (std::size_t j = 0; j < pivot; ++j)
            if (rest[j] != 0)
                return std::nullopt;
        if (rest[pivot] % H[k][pivot] != 0)
            return std::nullopt;
        Int c = rest[pivot] / H[k][pivot];
        coeffs[k] = c;
        for (std::size_t j = 0; j < rest.size(); ++j)
            rest[j] = checked_sub(rest[j], checked_mul(c, H[k][j]));
    }
    for (Int x : rest)
        if (x != 0)
            return std::nullopt;
    return coeffs;
}

inline std::size_t integer_rank(const IntMat& M)
{
    return hermite_normal_form(M).size();
}

// ----------------------------------------------------------------------------
// Rational linear algebra

inline RatMat to_rational(const IntMat& m)
{
    RatMat out;
    for (const auto& row : m) {
        RatVec rr;
        for (Int x : row)
            rr.emplace_back(x);
        out.push_back(rr);
    }
    return out;
}

/// Inverse of a square rational matrix; throws if singular.
inline RatMat inverse(const RatMat& m)
{
    const std::size_t n = m.size();
    RatMat a = m;
    RatMat inv(n, RatVec(n, Rational(0)));
    for (std::size_t i = 0; i < n; ++i)
        inv[i][i] = Rational(1);
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = n;
        for (std::size_t i = c; i < n; ++i)
            if (a[i][c].num() != 0) {
                piv = i;
                break;
            }
        if (piv == n)
            throw std::domain_error("matrix is singular");
        std::swap(a[c], a[piv]);
        std::swap(inv[c], inv[piv]);
        Rational p = a[c][c];
        for (std::size_t j = 0; j < n; ++j) {
            a[c][j] = a[c][j] / p;
            inv[c][j] = inv[c][j] / p;
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (i == c || a[i][c].num() == 0)
                continue;
            Rational f = a[i][c];
            for (std::size_t j = 0; j < n; ++j) {
                a[i][j] -= f * a[c][j];
                inv[i][j] -= f * inv[c][j];
            }
        }
    }
    return inv;
}

inline RatMat transpose(const RatMat& m)
{
    if (m.empty())
        return {};
    RatMat t(m.front().size(), RatVec(m.size()));
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = 0; j < m[i].size(); ++j)
            t[j][i] = m[i][j];
    return t;
}

inline RatVec mat_vec(const RatMat& a, const RatVec& v)
{
    RatVec out(a.size(), Rational(0));
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < v.size(); ++j)
            out[i] += a[i][j] * v[j];
    return out;
}

/// Inverse of a unimodular integer matrix.
inline IntMat unimodular_inverse(const IntMat& m)
{
    if (m.empty())
        return {};
    RatMat inv = inverse(to_rational(m));
    IntMat out(inv.size(), IntVec(inv.size(), 0));
    for (std::size_t i = 0; i < inv.size(); ++i)
        for (std::size_t j = 0; j < inv.size(); ++j) {
            if (!inv[i][j].is_integer())
                throw std::domain_error("matrix is not unimodular");
            out[i][j] = inv[i][j].num();
        }
    return out;
}

// ----------------------------------------------------------------------------
// Linear congruences

/// Solution set {particular + span(kernel)} of A x = v (mod M), as a coset in (Z/M)^r.
struct ModularSolution {
    IntVec particular;
    std::vector<IntVec> kernel;
};

/**
 * Solves A x = v (mod M) for a p x r matrix A (r given explicitly so that
 * p = 0 is allowed). Returns nullopt when the system is inconsistent.
 */
inline std::optional<ModularSolution> solve_mod(const IntMat& A, const IntVec& v, Int M, std::size_t r)
{
    if (M < 1)
        throw std::invalid_argument("solve_mod: modulus must be positive");
    const std::size_t p = A.size();
    if (v.size() != p)
        throw std::invalid_argument("solve_mod: right-hand side length mismatch");
    SmithForm sf = smith_normal_form(A, r);
    IntVec rhs(p, 0);
    for (std::size_t i = 0; i < p; ++i)
        rhs[i] = dot_mod(sf.U[i], reduced(v, M), M);

    IntVec y(r, 0);
    std::vector<IntVec> kernel_y;
    for (std::size_t i = 0; i < std::max(p, r); ++i) {
        Int d = (i < p && i < r) ? sf.D[i][i] : 0;
        if (i < p) {
            Int g = gcd(d, M);
            if (rhs[i] % g != 0)
                return std::nullopt;
            if (i < r) {
                Int Mg = M / g;
                y[i] = mulmod(rhs[i] / g, inverse_mod(mod(d / g, Mg), Mg), Mg);
                if (Mg != M) {
                    IntVec k(r, 0);
                    k[i] = Mg;
                    kernel_y.push_back(k);
                }
            }
        } else {
            IntVec k(r, 0);
            k[i] = 1;
            kernel_y.push_back(k);
        }
    }
    ModularSolution sol;
    sol.particular = reduced(mat_vec(sf.V, y), M);
    for (const auto& k : kernel_y) {
        IntVec g = reduced(mat_vec(sf.V, k), M);
        if (std::any_of(g.begin(), g.end(), [](Int x) { return x != 0; }))
            sol.kernel.push_back(g);
    }
    return sol;
}

/**
 * All elements of the subgroup of (Z/M)^r generated by gens, sorted
 * lexicographically. Throws if the subgroup exceeds `limit` elements.
 */
inline std::vector<IntVec> enumerate_subgroup(const std::vector<IntVec>& gens, Int M, std::size_t r,
                                              std::size_t limit = 1u << 20)
{
    std::set<IntVec> seen;
    std::vector<IntVec> frontier{IntVec(r, 0)};
    seen.insert(frontier.front());
    while (!frontier.empty()) {
        std::vector<IntVec> next;
        for (const auto& x : frontier)
            for (const auto& g : gens) {
                IntVec y(r);
                for (std::size_t i = 0; i < r; ++i)
                    y[i] = addmod(x[i], g[i], M);
                if (seen.insert(y).second) {
                    if (seen.size() > limit)
                        throw std::length_error("subgroup enumeration exceeds limit");
                    next.push_back(std::move(y));
                }
            }
        frontier = std::move(next);
    }
    return {seen.begin(), seen.end()};
}

} // namespace mlg
