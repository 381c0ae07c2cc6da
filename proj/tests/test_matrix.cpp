#include <gtest/gtest.h>

#include <random>
#include <set>

#include "mlg/matrix.hpp"

using namespace mlg;

namespace
{

// Cofactor expansion; fine for the 4x4 matrices used here.
Int det(const IntMat& m)
{
    const std::size_t n = m.size();
    if (n == 0)
        return 1;
    if (n == 1)
        return m[0][0];
    Int total = 0;
    for (std::size_t c = 0; c < n; ++c) {
        IntMat minor;
        for (std::size_t i = 1; i < n; ++i) {
            IntVec row;
            for (std::size_t j = 0; j < n; ++j)
                if (j != c)
                    row.push_back(m[i][j]);
            minor.push_back(row);
        }
        total += (c % 2 ? -1 : 1) * m[0][c] * det(minor);
    }
    return total;
}

IntMat random_matrix(std::mt19937_64& rng, std::size_t p, std::size_t r, Int bound)
{
    std::uniform_int_distribution<Int> d(-bound, bound);
    IntMat m(p, IntVec(r));
    for (auto& row : m)
        for (auto& x : row)
            x = d(rng);
    return m;
}

// Membership in the row lattice by bounded search; only for tiny examples.
bool in_row_span_brute(const IntMat& rows, const IntVec& v, Int bound)
{
    std::vector<Int> c(rows.size(), -bound);
    while (true) {
        IntVec s(v.size(), 0);
        for (std::size_t i = 0; i < rows.size(); ++i)
            for (std::size_t j = 0; j < v.size(); ++j)
                s[j] += c[i] * rows[i][j];
        if (s == v)
            return true;
        std::size_t i = 0;
        while (i < c.size() && c[i] == bound)
            c[i++] = -bound;
        if (i == c.size())
            return false;
        ++c[i];
    }
}

} // namespace

TEST(SmithForm, TransformsReproduceDiagonal)
{
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        std::size_t p = 1 + rng() % 4, r = 1 + rng() % 4;
        IntMat A = random_matrix(rng, p, r, 6);
        SmithForm sf = smith_normal_form(A, r);
        EXPECT_EQ(multiply(multiply(sf.U, A), sf.V), sf.D);
        EXPECT_EQ(std::abs(det(sf.U)), 1);
        EXPECT_EQ(std::abs(det(sf.V)), 1);
        for (std::size_t i = 0; i + 1 < sf.diagonal.size(); ++i) {
            if (sf.diagonal[i + 1] != 0) {
                EXPECT_EQ(sf.diagonal[i + 1] % sf.diagonal[i], 0);
            }
            EXPECT_GE(sf.diagonal[i], 0);
        }
        EXPECT_EQ(sf.rank, integer_rank(A));
    }
}

TEST(SmithForm, KnownExample)
{
    SmithForm sf = smith_normal_form({{1, 3}, {2, 4}}, 2);
    EXPECT_EQ(sf.diagonal, (IntVec{1, 2}));
}

TEST(HermiteForm, SpansSameLatticeAndIsEchelon)
{
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 60; ++trial) {
        IntMat A = random_matrix(rng, 3, 2, 3);
        IntMat H = hermite_normal_form(A);
        for (const auto& row : A)
            EXPECT_TRUE(lattice_coordinates(H, row).has_value());
        for (const auto& row : H)
            EXPECT_TRUE(in_row_span_brute(A, row, 12)) << "trial " << trial;
        std::size_t last = 0;
        for (std::size_t k = 0; k < H.size(); ++k) {
            std::size_t pivot = 0;
            while (H[k][pivot] == 0)
                ++pivot;
            if (k > 0) {
                EXPECT_GT(pivot, last);
            }
            last = pivot;
            EXPECT_GT(H[k][pivot], 0);
            for (std::size_t i = 0; i < k; ++i) {
                EXPECT_GE(H[i][pivot], 0);
                EXPECT_LT(H[i][pivot], H[k][pivot]);
            }
        }
    }
}

TEST(HermiteForm, LatticeCoordinatesRejectsOutsiders)
{
    IntMat H = hermite_normal_form({{2, 0}, {0, 3}});
    EXPECT_FALSE(lattice_coordinates(H, {1, 0}).has_value());
    EXPECT_EQ(lattice_coordinates(H, {4, -3}), (IntVec{2, -1}));
}

TEST(SolveMod, MatchesExhaustiveSearch)
{
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 150; ++trial) {
        const Int M = 2 + rng() % 11;
        std::size_t p = 1 + rng() % 3, r = 1 + rng() % 2;
        IntMat A = random_matrix(rng, p, r, 5);
        IntVec v(p);
        for (auto& x : v)
            x = static_cast<Int>(rng() % M);

        std::set<IntVec> brute;
        IntVec x(r, 0);
        while (true) {
            bool ok = true;
            for (std::size_t i = 0; i < p; ++i)
                ok = ok && mod(dot(A[i], x) - v[i], M) == 0;
            if (ok)
                brute.insert(x);
            std::size_t i = 0;
            while (i < r && x[i] == M - 1)
                x[i++] = 0;
            if (i == r)
                break;
            ++x[i];
        }

        auto sol = solve_mod(A, v, M, r);
        ASSERT_EQ(sol.has_value(), !brute.empty()) << "trial " << trial;
        if (!sol)
            continue;
        std::set<IntVec> found;
        for (const auto& k : enumerate_subgroup(sol->kernel, M, r))
            found.insert(reduced(added(sol->particular, k), M));
        EXPECT_EQ(found, brute) << "trial " << trial;
    }
}

TEST(SolveMod, EmptySystemHasWholeSpace)
{
    auto sol = solve_mod({}, {}, 6, 2);
    ASSERT_TRUE(sol);
    EXPECT_EQ(enumerate_subgroup(sol->kernel, 6, 2).size(), 36u);
}

TEST(EnumerateSubgroup, SortedAndClosed)
{
    auto g = enumerate_subgroup({{2, 0}, {0, 3}}, 6, 2);
    EXPECT_EQ(g.size(), 6u);
    EXPECT_TRUE(std::is_sorted(g.begin(), g.end()));
    EXPECT_THROW(enumerate_subgroup({{1, 0}, {0, 1}}, 100, 2, 50), std::length_error);
}

TEST(RationalMatrix, InverseTimesMatrixIsIdentity)
{
    RatMat m = to_rational({{2, 1}, {5, 3}});
    RatMat inv = inverse(m);
    EXPECT_EQ(inv[0][0], Rational(3));
    EXPECT_EQ(inv[0][1], Rational(-1));
    EXPECT_EQ(unimodular_inverse({{2, 1}, {5, 3}}), (IntMat{{3, -1}, {-5, 2}}));
    EXPECT_THROW(inverse(to_rational({{1, 2}, {2, 4}})), std::domain_error);
}
