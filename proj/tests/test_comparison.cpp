#include <gtest/gtest.h>

#include <memory>

#include "models.hpp"

using namespace mlg;
using namespace mlg::testing;

namespace
{

/// SL2, Q = 1, n = 2, q = 5, k = 4 with trivial action and an invariant E_alpha.
std::shared_ptr<const DModel> sl2_n2_model()
{
    auto dd = compute_dual_datum({sl2(), sl2_form(1), 2});
    auto fm = build_field_model(5, 2, 4);
    std::vector<TorusCharacter> c(4, TorusCharacter{0});
    return std::make_shared<const DModel>(build_d_model(dd, fm, c, {{{2}, 0}}));
}

HarnessModel harness(const GridCase& gc, std::uint64_t seed = 42, std::size_t points = 3)
{
    return generate_harness_model({gc.name, gc.cover, gc.q, std::nullopt, seed, points});
}

const GridCase& grid_case(const std::string& name)
{
    static const auto grid = comparison_grid();
    for (const auto& g : grid)
        if (g.name == name)
            return g;
    throw std::out_of_range(name);
}

// Every tau in (Z/N)^r meeting the fiber condition, by direct scan (rank 1 only).
std::vector<TorusCharacter> scan_fiber_taus(const ConvenientBasePoint& bp, GaloisElement g)
{
    std::vector<TorusCharacter> out;
    for (Int t = 0; t < bp.dm->fm.N; ++t)
        if (in_pi1_fiber(bp, g, {t}))
            out.push_back({t});
    return out;
}

// All chi with values in (1/L)Z/Z satisfying the two E2 conditions.
std::vector<E2Element> brute_e2_fiber(const DModel& dm, GaloisElement g, Int L)
{
    const std::size_t r = dm.rank();
    QZ ck = artin_character(dm.fm, g, dm.kernel_generator());
    std::vector<E2Element> out;
    std::vector<Int> a(r, 0);
    while (true) {
        E2Element e{g, {}, ck};
        for (Int x : a)
            e.chi.push_back(QZ(x, L));
        if (e2_defect(dm, e).empty())
            out.push_back(e);
        std::size_t pos = 0;
        while (pos < r && ++a[pos] == L)
            a[pos++] = 0;
        if (pos == r)
            break;
    }
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace

TEST(CenterDual, Sl2DegreeTwo)
{
    auto dm = sl2_n2_model();
    auto cd = build_center_dual(*dm);
    EXPECT_EQ(cd.group.invariant_factors, (IntVec{2}));
    EXPECT_TRUE(cd.finite_quotient);
    auto v = cd.values(kernel_generator(cd.group, 0));
    EXPECT_EQ(v, (std::vector<QZ>{QZ(1, 2)}));
    EXPECT_EQ(cd.coordinates(v), kernel_generator(cd.group, 0));
    EXPECT_FALSE(cd.coordinates({QZ(1, 4)}).has_value());
}

TEST(CenterDual, CharactersKillTheSimpleCoroots)
{
    for (const auto& gc : comparison_grid()) {
        auto hm = harness(gc);
        auto cd = build_center_dual(*hm.dm);
        for (const auto& w : kernel_elements(cd.group)) {
            auto vals = cd.values(w);
            for (const auto& b : hm.dm->sc_basis()) {
                QZ s;
                for (std::size_t j = 0; j < b.size(); ++j)
                    s += b[j] * vals[j];
                EXPECT_TRUE(s.is_zero()) << gc.name;
            }
            EXPECT_EQ(cd.coordinates(vals), w);
        }
        if (cd.finite_quotient) {
            Int order = hm.dm->dd.center.is_finite() ? hm.dm->dd.center.order() : 0;
            EXPECT_EQ(cd.group.order(), order) << gc.name;
        }
    }
}

TEST(Pi1Fiber, IdentityFiberOfInvariantSplitting)
{
    auto dm = sl2_n2_model();
    Splitting s{{156}};
    ASSERT_TRUE(is_gamma_invariant(*dm, s));
    auto bp = make_base_point(dm, s);
    auto fiber = enumerate_pi1_fiber(bp, dm->fm.identity());
    ASSERT_EQ(fiber.size(), 2u);
    for (const auto& p : fiber)
        EXPECT_EQ(p.tau, (TorusCharacter{0}));
    EXPECT_NE(fiber[0].zeta, fiber[1].zeta);
    for (auto g : dm->fm.galois_elements())
        EXPECT_EQ(enumerate_pi1_fiber(bp, g).size(), 2u);
}

TEST(Pi1Fiber, BasePointMustRestrictToSPsi)
{
    auto dm = sl2_n2_model();
    try {
        make_base_point(dm, Splitting{{0}});
        FAIL() << "expected ModelError";
    } catch (const ModelError& e) {
        EXPECT_EQ(e.check(), "comparison.base_point");
    }
}

TEST(Pi1Fiber, TauSolvesTheCongruenceFoundByScan)
{
    for (const char* name : {"sl2_q5_n2", "sl2_q5_n4", "sl2_q13_n4", "sl2_q7_n3"}) {
        auto hm = harness(grid_case(name));
        const auto& fm = hm.dm->fm;
        ASSERT_LE(fm.N, 30000);
        for (const auto& s : hm.base_points) {
            auto bp = make_base_point(hm.dm, s);
            for (auto g : fm.galois_elements()) {
                auto brute = scan_fiber_taus(bp, g);
                auto tau = solve_pi1_tau(bp, g);
                ASSERT_EQ(tau.has_value(), !brute.empty()) << name;
                if (!tau)
                    continue;
                EXPECT_EQ(*tau, brute.front()) << name << " gamma=" << g.i;
                EXPECT_EQ(brute.size(), bp.zn.size()) << name;
                auto rho = gamma_s_over_s(*hm.dm, g, s);
                EXPECT_EQ(mulmod(fm.n, (*tau)[0], fm.N), rho[0]);
            }
        }
    }
}

TEST(Pi1Fiber, FiberSizeIsTheWindowOrder)
{
    for (const auto& gc : comparison_grid()) {
        auto hm = harness(gc);
        auto bp = make_base_point(hm.dm, hm.base_points.front());
        for (auto g : hm.dm->fm.galois_elements())
            EXPECT_EQ(static_cast<Int>(enumerate_pi1_fiber(bp, g).size()), bp.center.group.order()) << gc.name;
    }
}

TEST(Pi1Compose, IdentityAndSquares)
{
    auto hm = harness(grid_case("sl2_q5_n2"));
    auto bp = make_base_point(hm.dm, hm.base_points.front());
    const auto& fm = hm.dm->fm;
    ASSERT_EQ(fm.k, 2);
    auto e = enumerate_pi1_fiber(bp, fm.identity());
    Pi1Element unit{fm.identity(), e.front().tau, kernel_zero(bp.center.group)};
    ASSERT_EQ(unit.tau, (TorusCharacter{0}));
    for (auto g : fm.galois_elements())
        for (const auto& x : enumerate_pi1_fiber(bp, g)) {
            EXPECT_EQ(pi1_compose(bp, unit, x), x);
            EXPECT_EQ(pi1_compose(bp, x, unit), x);
        }
    for (const auto& x : enumerate_pi1_fiber(bp, {1})) {
        auto sq = pi1_compose(bp, x, x);
        EXPECT_EQ(sq.gamma, fm.identity());
        EXPECT_TRUE(in_pi1_fiber(bp, sq.gamma, sq.tau));
    }
}

TEST(Pi1Compose, AssociativeOnAllTriples)
{
    for (const char* name : {"sl2_q5_n4", "t1sl2_q5_n2"}) {
        auto hm = harness(grid_case(name));
        auto bp = make_base_point(hm.dm, hm.base_points.front());
        std::vector<Pi1Element> all;
        for (auto g : hm.dm->fm.galois_elements())
            for (const auto& p : enumerate_pi1_fiber(bp, g))
                all.push_back(p);
        ASSERT_LE(all.size(), 64u);
        for (const auto& a : all)
            for (const auto& b : all)
                for (const auto& c : all)
                    ASSERT_EQ(pi1_compose(bp, pi1_compose(bp, a, b), c), pi1_compose(bp, a, pi1_compose(bp, b, c)))
                        << name;
    }
}

TEST(E2Fiber, IdentityFiberWithTrivialAction)
{
    auto dm = sl2_n2_model();
    auto cd = build_center_dual(*dm);
    auto fiber = enumerate_e2_fiber(*dm, cd, dm->fm.identity());
    EXPECT_EQ(fiber.size(), 2u);
    for (const auto& e : fiber)
        EXPECT_TRUE(e.chi_kernel.is_zero());
    std::vector<E2Element> dual;
    for (const auto& w : kernel_elements(cd.group))
        dual.push_back({dm->fm.identity(), cd.values(w), QZ()});
    std::sort(dual.begin(), dual.end());
    EXPECT_EQ(fiber, dual);
}

TEST(E2Fiber, Sl2DegreeTwoHasTwoClassesPerGamma)
{
    auto dm = sl2_n2_model();
    auto cd = build_center_dual(*dm);
    for (auto g : dm->fm.galois_elements())
        EXPECT_EQ(enumerate_e2_fiber(*dm, cd, g).size(), 2u);
}

TEST(E2Fiber, MatchesBruteForceSolutionSet)
{
    for (const auto& gc : comparison_grid()) {
        if (gc.cover.rd.rank != gc.cover.rd.simple.size())
            continue;   // with a torus factor the fiber is infinite; only its window is enumerated
        auto hm = harness(gc);
        auto cd = build_center_dual(*hm.dm);
        Int dmax = 1;
        for (Int d : cd.diag)
            dmax = std::max(dmax, d);
        Int L = hm.dm->fm.n * dmax;
        for (auto g : hm.dm->fm.galois_elements())
            EXPECT_EQ(enumerate_e2_fiber(*hm.dm, cd, g), brute_e2_fiber(*hm.dm, g, L)) << gc.name;
    }
}

TEST(ComparisonApply, SplittingValuesAndBaseFieldUnits)
{
    auto dm = sl2_n2_model();
    auto bp = make_base_point(dm, Splitting{{156}});
    const auto& fm = dm->fm;
    Pi1Element p{fm.identity(), {0}, kernel_zero(bp.center.group)};
    for (Int y = -3; y <= 3; ++y)
        EXPECT_TRUE(comparison_apply(bp, p, {y}, mod(156 * y, fm.N)).is_zero());
    for (auto g : fm.galois_elements())
        for (const auto& q : enumerate_pi1_fiber(bp, g))
            for (Int a = 0; a < fm.q - 1; ++a) {
                Int u = a * fm.base_step();
                EXPECT_EQ(comparison_apply(bp, q, {0}, u), artin_character(fm, g, u));
            }
}

TEST(ComparisonApply, RepresentativeAndRootIndependence)
{
    for (const auto& gc : comparison_grid()) {
        auto hm = harness(gc);
        const auto& fm = hm.dm->fm;
        auto bp = make_base_point(hm.dm, hm.base_points.front());
        for (auto g : fm.galois_elements())
            for (const auto& p : enumerate_pi1_fiber(bp, g))
                for (const auto& [y, w] : detail::d_generators(*hm.dm)) {
                    QZ v = comparison_apply(bp, p, y, w);
                    for (std::size_t ri = 1; ri < static_cast<std::size_t>(fm.n); ++ri)
                        EXPECT_EQ(comparison_apply(bp, p, y, w, ri), v) << gc.name;
                    for (const auto& xi : bp.zn) {
                        auto shift = bp.center.coordinates(epsilon_values(fm, xi));
                        ASSERT_TRUE(shift) << gc.name;
                        Pi1Element q{p.gamma, reduced(added(p.tau, xi), fm.N), kernel_sub(p.zeta, *shift)};
                        EXPECT_EQ(comparison_apply(bp, q, y, w), v) << gc.name;
                    }
                }
    }
}

TEST(ComparisonMap, LandsInE2AndIsMultiplicative)
{
    for (const auto& gc : comparison_grid()) {
        auto hm = harness(gc);
        const auto& fm = hm.dm->fm;
        auto bp = make_base_point(hm.dm, hm.base_points.front());
        std::vector<Pi1Element> all;
        for (auto g : fm.galois_elements())
            for (const auto& p : enumerate_pi1_fiber(bp, g)) {
                all.push_back(p);
                EXPECT_TRUE(e2_defect(*hm.dm, comparison_map(bp, p)).empty()) << gc.name;
            }
        for (const auto& a : all)
            for (const auto& b : all)
                ASSERT_EQ(comparison_map(bp, pi1_compose(bp, a, b)),
                          e2_compose(fm, comparison_map(bp, a), comparison_map(bp, b)))
                    << gc.name << " " << to_string(a) << " " << to_string(b);
    }
}

TEST(ComparisonMap, OffsetRuleBreaksMultiplicativity)
{
    auto hm = harness(grid_case("sl2_q5_n2"));
    auto bp = make_base_point(hm.dm, hm.base_points.front());
    auto x = enumerate_pi1_fiber(bp, {1}).front();
    EXPECT_NE(comparison_map(bp, pi1_compose(bp, x, x, CompositionRule::offset)),
              e2_compose(hm.dm->fm, comparison_map(bp, x), comparison_map(bp, x)));
}

TEST(BaseChange, SameBasePointIsIdentity)
{
    auto hm = harness(grid_case("t1sl2_q5_n4"));
    auto bp = make_base_point(hm.dm, hm.base_points.front());
    auto choices = iota_b_choices(bp, bp);
    ASSERT_FALSE(choices.empty());
    EXPECT_NE(std::find(choices.begin(), choices.end(), TorusCharacter(hm.dm->rank(), 0)), choices.end());
    for (auto g : hm.dm->fm.galois_elements())
        for (const auto& p : enumerate_pi1_fiber(bp, g))
            EXPECT_EQ(base_change_iota(bp, bp, p), p);
}

TEST(BaseChange, PowerTwistUsesInverseCharacter)
{
    for (const char* name : {"t1sl2_q5_n2", "t1sl2_q13_n4", "t1sl2_q7_n3"}) {
        auto hm = harness(grid_case(name));
        const auto& fm = hm.dm->fm;
        auto bp1 = make_base_point(hm.dm, hm.base_points.front());
        // A character of Z-hat that is not Galois-fixed, so the sign of the correction matters.
        TorusCharacter x;
        for (const auto& gen : z_hat_generators(*hm.dm))
            if (gamma_x_over_x(fm, {1}, gen) != TorusCharacter(hm.dm->rank(), 0)) {
                x = gen;
                break;
            }
        ASSERT_FALSE(x.empty()) << name;
        auto bp2 = make_base_point(hm.dm, Splitting{reduced(added(bp1.s.t, scaled(x, fm.n)), fm.N)});
        TorusCharacter b = reduced(scaled(x, -1), fm.N);
        auto choices = iota_b_choices(bp1, bp2);
        EXPECT_NE(std::find(choices.begin(), choices.end(), b), choices.end()) << name;
        bool flipped_fails = false;
        for (auto g : fm.galois_elements())
            for (const auto& p : enumerate_pi1_fiber(bp1, g)) {
                auto ip = base_change_iota(bp1, bp2, p, b);
                EXPECT_EQ(comparison_map(bp2, ip), comparison_map(bp1, p)) << name;
                // The other sign, tau * gamma^{-1}b / b, is not the base change.
                TorusCharacter r = gamma_x_over_x(fm, g, b);
                Pi1Element wrong{g, reduced(added(p.tau, r), fm.N), p.zeta};
                if (!in_pi1_fiber(bp2, g, wrong.tau) ||
                    comparison_map(bp2, canonicalize(bp2, wrong)) != comparison_map(bp1, p))
                    flipped_fails = true;
            }
        EXPECT_TRUE(flipped_fails) << name;
    }
}

TEST(BaseChange, IndependentOfTheChoiceOfB)
{
    for (const auto& gc : comparison_grid()) {
        auto hm = harness(gc);
        std::vector<ConvenientBasePoint> bps;
        for (const auto& s : hm.base_points)
            bps.push_back(make_base_point(hm.dm, s));
        for (const auto& bp1 : bps)
            for (const auto& bp2 : bps) {
                auto choices = iota_b_choices(bp1, bp2);
                for (auto g : hm.dm->fm.galois_elements())
                    for (const auto& p : enumerate_pi1_fiber(bp1, g))
                        for (const auto& b : choices)
                            EXPECT_EQ(base_change_iota(bp1, bp2, p, b), base_change_iota(bp1, bp2, p, choices.front()))
                                << gc.name;
            }
    }
}

TEST(BaseChange, NonIsomorphicPointsHaveNoB)
{
    auto dm = sl2_n2_model();
    auto bp1 = make_base_point(dm, Splitting{{156}});
    auto bp2 = make_base_point(dm, Splitting{{468}});
    EXPECT_TRUE(iota_b_choices(bp1, bp2).empty());
    auto p = enumerate_pi1_fiber(bp1, {0}).front();
    EXPECT_THROW(base_change_iota(bp1, bp2, p), ModelError);
}

TEST(Extensions, ReadFromFibersAndAgree)
{
    for (const auto& gc : comparison_grid()) {
        auto hm = harness(gc);
        auto bp = make_base_point(hm.dm, hm.base_points.front());
        auto ep = pi1_extension(bp);
        auto ee = e2_extension(*hm.dm, bp.center);
        EXPECT_TRUE(validate_cocycle(ep.extension.cocycle).ok) << gc.name;
        EXPECT_TRUE(validate_cocycle(ee.extension.cocycle).ok) << gc.name;
        EXPECT_TRUE(cohomologous(ep.extension, ee.extension)) << gc.name;
    }
}

TEST(Extensions, OffsetRuleIsNotAnExtension)
{
    auto hm = harness(grid_case("sl2_q5_n4"));
    auto bp = make_base_point(hm.dm, hm.base_points.front());
    bool broken = false;
    try {
        auto ep = pi1_extension(bp, CompositionRule::offset);
        broken = !cohomologous(ep.extension, e2_extension(*hm.dm, bp.center).extension);
    } catch (const ModelError& e) {
        broken = e.check() == "extcalc.fibers";
    }
    EXPECT_TRUE(broken);
}

TEST(VerifyModel, DegreeOneModelHasSingletonFibers)
{
    CoverDatum cd{sl2(), sl2_form(1), 1};
    auto hm = generate_harness_model({"sl2_n1", cd, 5, std::nullopt, 1, 1});
    auto rep = verify_harness_model(hm);
    EXPECT_TRUE(rep.passed());
    for (auto s : rep.pi1_fiber_sizes)
        EXPECT_EQ(s, 1u);
    for (auto s : rep.e2_fiber_sizes)
        EXPECT_EQ(s, 1u);
}

TEST(VerifyModel, Sl2DegreeTwoPasses)
{
    auto dm = sl2_n2_model();
    auto rep = verify_model("sl2_n2", dm, {Splitting{{156}}, Splitting{{468}}});
    EXPECT_TRUE(rep.passed());
    EXPECT_EQ(rep.base_points, 2u);
    EXPECT_EQ(rep.non_isomorphic_pairs, 2u);
    ASSERT_NE(rep.find("multiplicativity", "bp0"), nullptr);
    EXPECT_GT(rep.find("multiplicativity", "bp0")->count, 0u);
}

TEST(VerifyModel, OffsetRuleFailsWithWitness)
{
    auto dm = sl2_n2_model();
    auto rep = verify_model("sl2_n2", dm, {Splitting{{156}}}, {CompositionRule::offset, 1});
    EXPECT_FALSE(rep.passed());
    const auto* m = rep.find("multiplicativity");
    ASSERT_NE(m, nullptr);
    EXPECT_FALSE(m->passed);
    EXPECT_NE(m->witness.find("C("), std::string::npos);
}

TEST(VerifyModel, GridPassesExceptWhereOnlyOneBasePointExists)
{
    for (const auto& gc : comparison_grid()) {
        auto hm = harness(gc);
        auto rep = verify_harness_model(hm, {CompositionRule::standard, 2});
        bool trivial_center = hm.dm->dd.center.is_finite() && hm.dm->dd.center.order() == 1;
        for (const auto& c : rep.checks) {
            if (c.name == "distinct_base_points")
                EXPECT_EQ(c.passed, !trivial_center) << gc.name;
            else
                EXPECT_TRUE(c.passed) << gc.name << " " << c.name << " [" << c.scope << "] " << c.witness;
        }
        if (trivial_center) {
            // Z-hat is trivial, so the splitting extending s_psi is unique.
            EXPECT_TRUE(z_hat_generators(*hm.dm).empty()) << gc.name;
            EXPECT_EQ(rep.base_points, 1u);
        }
    }
}
