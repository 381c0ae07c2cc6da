#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "comparison.hpp"
#include "harness.hpp"

namespace mlg
{

struct CheckOutcome {
    std::string name;
    std::string scope;   // "model", "bp<i>" or "bp<i>->bp<j>"
    bool passed = true;
    std::size_t count = 0;
    std::string witness;
};

struct ModelReport {
    std::string name;
    FieldModel fm;
    std::size_t rank = 0;
    KernelGroup center;
    KernelGroup window;
    std::size_t base_points = 0;
    std::size_t isomorphic_pairs = 0;
    std::size_t non_isomorphic_pairs = 0;
    std::vector<std::size_t> pi1_fiber_sizes;
    std::vector<std::size_t> e2_fiber_sizes;
    std::vector<CheckOutcome> checks;

    bool passed() const
    {
        return std::all_of(checks.begin(), checks.end(), [](const CheckOutcome& c) { return c.passed; });
    }
    const CheckOutcome* find(const std::string& name, const std::string& scope = "") const
    {
        for (const auto& c : checks)
            if (c.name == name && (scope.empty() || c.scope == scope))
                return &c;
        return nullptr;
    }
};

struct VerifyOptions {
    CompositionRule rule = CompositionRule::standard;
    std::size_t min_base_points = 1;
};

namespace detail
{
class CheckRecorder
{
public:
    explicit CheckRecorder(std::vector<CheckOutcome>& out, std::string name, std::string scope) : out_(out)
    {
        c_.name = std::move(name);
        c_.scope = std::move(scope);
    }
    ~CheckRecorder() { out_.push_back(c_); }
    CheckRecorder(const CheckRecorder&) = delete;
    CheckRecorder& operator=(const CheckRecorder&) = delete;

    /// Records one evaluation; keeps the first failing witness.
    bool expect(bool ok, const std::function<std::string()>& witness)
    {
        ++c_.count;
        if (!ok && c_.passed) {
            c_.passed = false;
            c_.witness = witness();
        }
        return ok;
    }
    void fail(const std::string& witness)
    {
        ++c_.count;
        if (c_.passed) {
            c_.passed = false;
            c_.witness = witness;
        }
    }
    bool ok() const { return c_.passed; }

private:
    std::vector<CheckOutcome>& out_;
    CheckOutcome c_;
};

inline std::vector<std::pair<IntVec, Int>> d_generators(const DModel& dm)
{
    std::vector<std::pair<IntVec, Int>> gens;
    const std::size_t r = dm.rank();
    for (std::size_t j = 0; j < r; ++j) {
        IntVec e(r, 0);
        e[j] = 1;
        gens.emplace_back(e, dm.lifts[j]);
    }
    gens.emplace_back(IntVec(r, 0), dm.kernel_generator());
    return gens;
}

inline std::string model_error_text(const ModelError& e)
{
    return e.check() + ": " + e.what() + (e.witness().empty() ? "" : " [" + e.witness() + "]");
}
} // namespace detail

/**
 * Runs every comparison identity on one D-model and its base points: fiber
 * bijection, torsor equivariance, multiplicativity, independence of root and
 * representative, extension-level closure, and the base-point change for
 * every isomorphic pair.
 */
inline ModelReport verify_model(const std::string& name, const std::shared_ptr<const DModel>& dm,
                                const std::vector<Splitting>& points, const VerifyOptions& opt = {})
{
    ModelReport rep;
    rep.name = name;
    rep.fm = dm->fm;
    rep.rank = dm->rank();
    rep.center = dm->dd.center;
    const auto& fm = dm->fm;
    const auto gammas = fm.galois_elements();
    const auto gens = detail::d_generators(*dm);

    std::vector<ConvenientBasePoint> bps;
    {
        detail::CheckRecorder rec(rep.checks, "base_point_restriction", "model");
        for (std::size_t i = 0; i < points.size(); ++i) {
            try {
                bps.push_back(make_base_point(dm, points[i]));
                rec.expect(true, {});
            } catch (const ModelError& e) {
                rec.fail("bp" + std::to_string(i) + ": " + detail::model_error_text(e));
            }
        }
    }
    {
        std::set<TorusCharacter> distinct;
        for (const auto& s : points)
            distinct.insert(reduced(s.t, fm.N));
        rep.base_points = distinct.size();
        detail::CheckRecorder rec(rep.checks, "distinct_base_points", "model");
        rec.expect(distinct.size() >= opt.min_base_points, [&] {
            return std::to_string(distinct.size()) + " distinct convenient base point(s), " +
                   std::to_string(opt.min_base_points) + " required";
        });
    }
    if (bps.empty())
        return rep;

    const CenterDual& cd = bps.front().center;
    rep.window = cd.group;
    std::vector<std::vector<E2Element>> e2;
    for (auto g : gammas) {
        e2.push_back(enumerate_e2_fiber(*dm, cd, g));
        rep.e2_fiber_sizes.push_back(e2.back().size());
    }

    std::vector<std::vector<std::vector<Pi1Element>>> pi1(bps.size());
    for (std::size_t b = 0; b < bps.size(); ++b) {
        const auto& bp = bps[b];
        const std::string scope = "bp" + std::to_string(b);
        std::map<Pi1Element, E2Element> image;

        {
            detail::CheckRecorder rec(rep.checks, "fiber_bijection", scope);
            for (auto g : gammas) {
                std::vector<Pi1Element> fiber;
                try {
                    fiber = enumerate_pi1_fiber(bp, g);
                } catch (const ModelError& e) {
                    rec.fail(detail::model_error_text(e));
                    pi1[b].push_back({});
                    continue;
                }
                if (b == 0)
                    rep.pi1_fiber_sizes.push_back(fiber.size());
                std::set<E2Element> seen;
                for (const auto& p : fiber) {
                    E2Element e = comparison_map(bp, p);
                    image.emplace(p, e);
                    std::string d = e2_defect(*dm, e);
                    rec.expect(d.empty(), [&] { return to_string(p) + " -> " + to_string(e) + ": " + d; });
                    rec.expect(seen.insert(e).second,
                               [&] { return "C not injective at " + to_string(p) + " -> " + to_string(e); });
                }
                const auto& target = e2[static_cast<std::size_t>(g.i)];
                rec.expect(fiber.size() == target.size(), [&] {
                    return "gamma=" + std::to_string(g.i) + ": |pi1 fiber|=" + std::to_string(fiber.size()) +
                           " |E2 fiber|=" + std::to_string(target.size());
                });
                rec.expect(std::vector<E2Element>(seen.begin(), seen.end()) == target,
                           [&] { return "gamma=" + std::to_string(g.i) + ": image of C differs from E2 fiber"; });
                pi1[b].push_back(std::move(fiber));
            }
        }
        if (image.empty())
            continue;
        auto C = [&](const Pi1Element& p) {
            auto it = image.find(p);
            return it != image.end() ? it->second : comparison_map(bp, p);
        };

        {
            detail::CheckRecorder rec(rep.checks, "torsor_equivariance", scope);
            std::vector<KernelElement> wgens;
            for (std::size_t i = 0; i < cd.group.invariant_factors.size(); ++i)
                wgens.push_back(kernel_generator(cd.group, i));
            for (const auto& fiber : pi1[b])
                for (const auto& p : fiber)
                    for (const auto& z : wgens) {
                        Pi1Element zp = pi1_act(z, p);
                        rec.expect(C(zp) == e2_act(cd, z, C(p)),
                                   [&] { return to_string(p) + " acted on by " + kernel_to_string(z); });
                    }
        }

        {
            detail::CheckRecorder rec(rep.checks, "multiplicativity", scope);
            for (const auto& f1 : pi1[b])
                for (const auto& f2 : pi1[b])
                    for (const auto& p1 : f1)
                        for (const auto& p2 : f2) {
                            Pi1Element p12;
                            try {
                                p12 = pi1_compose(bp, p1, p2, opt.rule);
                            } catch (const ModelError& e) {
                                rec.fail(detail::model_error_text(e));
                                continue;
                            }
                            E2Element lhs = C(p12);
                            E2Element rhs = e2_compose(fm, C(p1), C(p2));
                            for (std::size_t j = 0; j <= rep.rank; ++j) {
                                bool ok = j < rep.rank ? lhs.chi[j] == rhs.chi[j] : lhs.chi_kernel == rhs.chi_kernel;
                                rec.expect(ok, [&] {
                                    return "C(" + to_string(p1) + " o " + to_string(p2) + ") = " + to_string(lhs) +
                                           " but C(p1) C(p2) = " + to_string(rhs) + " at generator " +
                                           std::to_string(j);
                                });
                            }
                        }
        }

        {
            detail::CheckRecorder rec(rep.checks, "representative_independence", scope);
            for (const auto& fiber : pi1[b])
                for (const auto& p : fiber)
                    for (const auto& xi : bp.zn) {
                        auto shift = cd.coordinates(epsilon_values(fm, xi));
                        Pi1Element q{p.gamma, reduced(added(p.tau, xi), fm.N), kernel_sub(p.zeta, *shift)};
                        for (const auto& [y, w] : gens)
                            rec.expect(comparison_apply(bp, q, y, w) == comparison_apply(bp, p, y, w), [&] {
                                return to_string(p) + " vs representative with xi=" + detail::vec_str(xi) +
                                       " at generator " + detail::vec_str(y);
                            });
                    }
        }

        {
            detail::CheckRecorder rec(rep.checks, "root_independence", scope);
            for (const auto& fiber : pi1[b])
                for (const auto& p : fiber)
                    for (const auto& [y, w] : gens) {
                        QZ v0 = comparison_apply(bp, p, y, w, 0);
                        for (std::size_t ri = 1; ri < static_cast<std::size_t>(fm.n); ++ri)
                            rec.expect(comparison_apply(bp, p, y, w, ri) == v0, [&] {
                                return to_string(p) + " at generator " + detail::vec_str(y) + ", root " +
                                       std::to_string(ri);
                            });
                    }
        }

        {
            detail::CheckRecorder rec(rep.checks, "extension_closure", scope);
            try {
                auto ep = pi1_extension(bp, opt.rule);
                auto ee = e2_extension(*dm, cd);
                bool same = cohomologous(ep.extension, ee.extension);
                rec.expect(same, [] { return std::string("pi1 and E2 cocycles differ by a non-coboundary"); });
            } catch (const ModelError& e) {
                rec.fail(detail::model_error_text(e));
            }
        }
    }

    for (std::size_t i = 0; i < bps.size(); ++i)
        for (std::size_t j = 0; j < bps.size(); ++j) {
            if (i == j || pi1[i].empty() || pi1[j].empty())
                continue;
            const std::string scope = "bp" + std::to_string(i) + "->bp" + std::to_string(j);
            auto choices = iota_b_choices(bps[i], bps[j]);
            if (choices.empty()) {
                ++rep.non_isomorphic_pairs;
                continue;
            }
            ++rep.isomorphic_pairs;
            detail::CheckRecorder thm(rep.checks, "iota_theorem", scope);
            detail::CheckRecorder indep(rep.checks, "iota_b_independence", scope);
            for (const auto& fiber : pi1[i])
                for (const auto& p : fiber) {
                    Pi1Element ip;
                    try {
                        ip = base_change_iota(bps[i], bps[j], p, choices.front());
                    } catch (const ModelError& e) {
                        thm.fail(detail::model_error_text(e));
                        continue;
                    }
                    thm.expect(comparison_map(bps[j], ip) == comparison_map(bps[i], p),
                               [&] { return to_string(p) + " -> " + to_string(ip); });
                    for (const auto& b : choices)
                        indep.expect(base_change_iota(bps[i], bps[j], p, b) == ip, [&] {
                            return to_string(p) + " with b=" + detail::vec_str(b);
                        });
                }
        }
    return rep;
}

inline ModelReport verify_harness_model(const HarnessModel& hm, const VerifyOptions& opt = {})
{
    return verify_model(hm.name, hm.dm, hm.base_points, opt);
}

} // namespace mlg
