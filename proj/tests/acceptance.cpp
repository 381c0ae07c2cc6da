// Acceptance run: one PASS/FAIL line per criterion, followed by indented details.
// Exit status is 0 only if every criterion passes.

#include <chrono>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <iostream>

#include "ext_oracles.hpp"
#include "mlg/cli.hpp"
#include "models.hpp"

using namespace mlg;
using namespace mlg::testing;
namespace fs = std::filesystem;

namespace
{

struct Outcome {
    std::size_t checked = 0;
    std::vector<std::string> failures;
    std::vector<std::string> notes;
    // Failures that are a property of the inputs rather than of the code.
    std::vector<std::string> unattainable;

    void check(bool ok, const std::string& what)
    {
        ++checked;
        if (!ok && failures.size() < 20)
            failures.push_back(what);
        else if (!ok)
            failures.back() = "(further failures omitted)";
    }
};

std::string src(const std::string& rel)
{
    return (fs::path(MLG_SOURCE_DIR) / rel).string();
}

std::vector<std::string> json_files(const std::string& dir)
{
    std::vector<std::string> out;
    for (const auto& e : fs::directory_iterator(src(dir)))
        if (e.path().extension() == ".json")
            out.push_back(e.path().string());
    std::sort(out.begin(), out.end());
    return out;
}

// ---------------------------------------------------------------- AC1

Outcome dual_datum_examples()
{
    Outcome o;
    auto sl2dd = compute_dual_datum({sl2(), sl2_form(1), 2});
    o.check(sl2dd.y_qn_basis == IntMat{{1}}, "SL2 n=2: Y_{Q,2} != Y");
    o.check(sl2dd.modified_coroots[0] == IntVec{2} && sl2dd.modified_coroots[1] == IntVec{-2},
            "SL2 n=2: modified coroots are not +-2 alpha^v");
    o.check(sl2dd.center.free_rank == 0 && sl2dd.center.invariant_factors == IntVec{2}, "SL2 n=2: center is not Z/2");

    for (const auto& [rd, Q] : bundled_data()) {
        auto dd = compute_dual_datum({rd, Q, 1});
        o.check(dd.y_qn_basis == identity_matrix(rd.rank), "n=1: Y_{Q,1} != Y for rank " + std::to_string(rd.rank));
        o.check(dd.dual == dualize(rd), "n=1: modified datum differs from the Langlands dual");
    }

    auto sl3dd = compute_dual_datum({sl3(), sl3_form(1), 2});
    o.check(sl3dd.y_qn_basis == (IntMat{{2, 0}, {0, 2}}), "SL3 n=2: Y_{Q,2} != 2Y");
    o.check(sl3dd.center.free_rank == 0 && sl3dd.center.invariant_factors.empty(), "SL3 n=2: center is not trivial");
    return o;
}

// ---------------------------------------------------------------- AC2

Outcome n_alpha_oracle()
{
    Outcome o;
    std::size_t data = 0;
    for (const auto& [rd, Q] : bundled_data()) {
        ++data;
        o.check(rd.rank <= 3, "bundled datum of rank > 3");
        for (Int n = 1; n <= 12; ++n) {
            CoverDatum cd{rd, Q, n};
            for (std::size_t a = 0; a < rd.coroots.size(); ++a) {
                Int qa = Q(rd.coroots[a]);
                Int m = 1;
                while (mod(m * qa, n) != 0)
                    ++m;
                o.check(compute_n_alpha(cd, a) == m, "rank " + std::to_string(rd.rank) + " n=" + std::to_string(n) +
                                                         " root " + std::to_string(a));
            }
        }
    }
    o.notes.push_back(std::to_string(data) + " bundled data, n = 1..12, " + std::to_string(o.checked) + " roots checked");
    return o;
}

// ---------------------------------------------------------------- AC3

std::vector<GroupHom> all_homs(const FiniteGroupTable& H, const FiniteGroupTable& G)
{
    std::vector<GroupHom> out;
    std::vector<std::size_t> m(H.order, 0);
    while (true) {
        GroupHom h{H, G, m};
        if (m[H.identity] == G.identity && !h.defect())
            out.push_back(h);
        std::size_t pos = 0;
        while (pos < m.size() && ++m[pos] == G.order)
            m[pos++] = 0;
        if (pos == m.size())
            break;
    }
    return out;
}

std::vector<KernelHom> all_kernel_homs(Int d, Int e)
{
    std::vector<KernelHom> out;
    for (Int j = 0; j < e; ++j) {
        KernelHom f{cyclic_kernel(d), cyclic_kernel(e), {{QZ(j, e)}}, {}};
        if (f.defect().empty())
            out.push_back(f);
    }
    return out;
}

Outcome ext_laws()
{
    Outcome o;
    const std::vector<FiniteGroupTable> groups{FiniteGroupTable::cyclic(2), FiniteGroupTable::cyclic(4), klein()};
    const std::vector<Int> kernels{2, 4};
    std::size_t fallbacks = 0;

    for (const auto& lc : law_cases()) {
        const std::string tag = std::string(lc.name) + ": ";
        auto cen = census(lc.G, lc.d);
        auto reps = class_representatives(cen, lc.d);
        o.check(reps.size() == lc.h2, tag + "brute-force H^2 order");

        // The solver's notion of "same class" agrees with the brute-force one.
        auto same = [&](const CentralExtension& a, const CentralExtension& b) {
            bool lin = cohomologous(a, b, SolveMethod::linear);
            if (!lin && cohomologous(a, b, SolveMethod::exhaustive)) {
                ++fallbacks;
                return true;
            }
            return lin;
        };
        for (const auto& c : cen.cocycles)
            for (const auto& r : reps)
                o.check(same(c, r) == brute_cohomologous(cen, c, r, lc.d), tag + "class membership");

        auto split = split_extension(lc.G, cyclic_kernel(lc.d));
        for (const auto& a : reps) {
            o.check(same(baer_sum(a, split), a), tag + "split class is the identity");
            o.check(same(baer_sum(a, baer_negate(a)), split), tag + "inverse");
            for (const auto& b : reps) {
                auto ab = baer_sum(a, b);
                o.check(validate_cocycle(ab.cocycle).ok, tag + "closure");
                o.check(same(ab, baer_sum(b, a)), tag + "commutativity");
                for (const auto& c : reps)
                    o.check(same(baer_sum(ab, c), baer_sum(a, baer_sum(b, c))), tag + "associativity");
            }
        }
        // Well defined on classes.
        for (const auto& e : cen.cocycles)
            for (const auto& a : reps)
                if (brute_cohomologous(cen, e, a, lc.d))
                    for (const auto& b : reps)
                        o.check(same(baer_sum(e, b), baer_sum(a, b)), tag + "sum depends on the representative");

        // Functoriality, exact on cocycles.
        for (Int e1 : kernels)
            for (Int e2 : kernels)
                for (const auto& f : all_kernel_homs(lc.d, e1))
                    for (const auto& g : all_kernel_homs(e1, e2))
                        for (const auto& x : reps)
                            o.check(pushout_extension(pushout_extension(x, f), g) == pushout_extension(x, compose(g, f)),
                                    tag + "pushout composition");
        for (Int e1 : kernels)
            for (const auto& f : all_kernel_homs(lc.d, e1))
                for (const auto& x : reps)
                    for (const auto& y : reps)
                        o.check(pushout_extension(baer_sum(x, y), f) ==
                                    baer_sum(pushout_extension(x, f), pushout_extension(y, f)),
                                tag + "pushout additivity");
        for (const auto& H : groups)
            for (const auto& h2 : all_homs(H, lc.G)) {
                for (const auto& x : reps) {
                    for (const auto& y : reps)
                        o.check(pullback_extension(baer_sum(x, y), h2) ==
                                    baer_sum(pullback_extension(x, h2), pullback_extension(y, h2)),
                                tag + "pullback additivity");
                    for (Int e1 : kernels)
                        for (const auto& f : all_kernel_homs(lc.d, e1))
                            o.check(pushout_extension(pullback_extension(x, h2), f) ==
                                        pullback_extension(pushout_extension(x, f), h2),
                                    tag + "pushout and pullback commute");
                }
                for (const auto& K : groups)
                    for (const auto& h1 : all_homs(K, H))
                        for (const auto& x : reps)
                            o.check(pullback_extension(pullback_extension(x, h2), h1) ==
                                        pullback_extension(x, compose(h2, h1)),
                                    tag + "pullback composition");
            }
    }
    o.notes.push_back(std::to_string(o.checked) + " identities over 6 (Gamma, A) cases; exhaustive fallback used " +
                      std::to_string(fallbacks) + " times");
    return o;
}

// ---------------------------------------------------------------- AC4 / AC5

struct GridModel {
    std::string name;
    ConfiguredModel model;
};

const std::vector<GridModel>& grid_models()
{
    static const std::vector<GridModel> models = [] {
        std::vector<GridModel> out;
        for (const auto& path : json_files("configs/grid")) {
            auto cfg = parse_config(path);
            out.push_back({cfg.name, build_configured_model(cfg)});
        }
        return out;
    }();
    return models;
}

bool center_is_trivial(const DModel& dm)
{
    return z_hat_generators(dm).empty();
}

Outcome comparison_suite()
{
    Outcome o;
    const auto& models = grid_models();
    // The grid is {SL2, SL3, T1 x SL2} x {(5,2), (5,4), (7,3), (13,4)}.
    std::set<std::string> expected;
    for (const char* g : {"sl2", "sl3", "t1sl2"})
        for (const char* f : {"q5_n2", "q5_n4", "q7_n3", "q13_n4"})
            expected.insert(std::string(g) + "_" + f);
    std::set<std::string> present;
    for (const auto& gm : models)
        present.insert(gm.name);
    o.check(present == expected, "grid configs do not cover the 12-model grid");

    std::size_t evaluations = 0;
    for (const auto& gm : models) {
        auto rep = verify_model(gm.name, gm.model.dm, gm.model.base_points, {CompositionRule::standard, 2});
        for (const auto& c : rep.checks) {
            evaluations += c.count;
            if (c.passed)
                continue;
            if (c.name == "distinct_base_points" && center_is_trivial(*gm.model.dm)) {
                ++o.checked;
                o.unattainable.push_back(gm.name + ": " + c.witness +
                                         "; Y_{Q,n} = Y^{SC}, so s_psi has exactly one extension");
            } else {
                o.check(false, gm.name + " " + c.name + " [" + c.scope + "]: " + c.witness);
            }
        }
        o.check(rep.pi1_fiber_sizes == rep.e2_fiber_sizes, gm.name + ": fiber sizes differ");
    }
    o.notes.push_back(std::to_string(models.size()) + " models, " + std::to_string(evaluations) + " check evaluations");
    return o;
}

Outcome extension_closure()
{
    Outcome o;
    for (const auto& gm : grid_models())
        for (std::size_t i = 0; i < gm.model.base_points.size(); ++i) {
            auto bp = make_base_point(gm.model.dm, gm.model.base_points[i]);
            auto ep = pi1_extension(bp);
            auto ee = e2_extension(*gm.model.dm, bp.center);
            const std::string tag = gm.name + " bp" + std::to_string(i);
            o.check(validate_cocycle(ep.extension.cocycle).ok, tag + ": pi1 cocycle invalid");
            o.check(validate_cocycle(ee.extension.cocycle).ok, tag + ": E2 cocycle invalid");
            o.check(cohomologous(ep.extension, ee.extension), tag + ": no coboundary between the two cocycles");
        }
    return o;
}

// ---------------------------------------------------------------- AC6

std::string model_error_check(const std::function<void()>& f, std::string* witness = nullptr)
{
    try {
        f();
    } catch (const ModelError& e) {
        if (witness)
            *witness = e.witness();
        return e.check();
    }
    return "";
}

struct Fixture {
    std::string name;
    std::shared_ptr<const DModel> dm;
    std::vector<Splitting> base_points;
};

std::vector<Fixture> model_fixtures()
{
    std::vector<Fixture> out;
    auto cfg = parse_config(src("configs/sl2_n2.json"));
    auto cm = build_configured_model(cfg);
    out.push_back({cfg.name, cm.dm, cm.base_points});
    for (const auto& gm : grid_models())
        out.push_back({gm.name, gm.model.dm, gm.model.base_points});
    return out;
}

Outcome negative_controls()
{
    Outcome o;
    std::size_t rule_skipped = 0;
    for (const auto& fx : model_fixtures()) {
        const DModel& dm = *fx.dm;
        const Int N = dm.fm.N;

        // Every single entry of the action cocycle, bumped by one.
        for (std::size_t i = 0; i < dm.c.size(); ++i)
            for (std::size_t j = 0; j < dm.rank(); ++j) {
                auto c = dm.c;
                c[i][j] = mod(c[i][j] + 1, N);
                std::string w;
                auto check = model_error_check([&] { build_d_model(dm.dd, dm.fm, c, dm.e_inputs); }, &w);
                o.check(check == "bdmodel.cocycle" && !w.empty(),
                        fx.name + ": action cocycle entry (" + std::to_string(i) + "," + std::to_string(j) + ")");
            }

        // Every sign r_alpha, flipped, against the fixture's own base points.
        for (std::size_t a = 0; a < dm.signs.size(); ++a) {
            IntVec signs = dm.signs;
            signs[a] = -signs[a];
            auto bad = std::make_shared<const DModel>(build_d_model(dm.dd, dm.fm, dm.c, dm.e_inputs, signs));
            auto rep = verify_model(fx.name, bad, fx.base_points);
            const auto* c = rep.find("base_point_restriction");
            o.check(c && !c->passed && !c->witness.empty(), fx.name + ": flipped sign of simple root " + std::to_string(a));
        }

        // The multiplication rule. The offset rule only moves zeta, so it is
        // invisible when the center-dual window is trivial or Gamma has order 1.
        auto center = build_center_dual(dm);
        if (center.group.order() == 1 || dm.fm.k == 1) {
            ++rule_skipped;
        } else {
            auto rep = verify_model(fx.name, fx.dm, fx.base_points, {CompositionRule::offset, 1});
            const auto* m = rep.find("multiplicativity");
            bool flagged = false;
            for (const auto& c : rep.checks)
                flagged = flagged || (c.name == "multiplicativity" && !c.passed && !c.witness.empty());
            o.check(m && flagged, fx.name + ": offset composition rule not detected");
        }
    }

    // Every entry of every extension cocycle with |Gamma| >= 3.
    std::vector<std::pair<std::string, CentralExtension>> exts;
    auto laws = parse_config(src("configs/ext_laws.json"));
    for (const auto& e : laws.ext_calc->extensions)
        if (e.explicit_extension)
            exts.emplace_back("ext_laws." + e.name, *e.explicit_extension);
    for (const auto& lc : law_cases())
        for (const auto& r : class_representatives(census(lc.G, lc.d), lc.d))
            exts.emplace_back(lc.name, r);
    std::size_t entries = 0;
    for (const auto& [name, e] : exts) {
        const auto& G = e.group();
        if (G.order < 3)
            continue;
        const auto& A = e.kernel();
        for (std::size_t a = 0; a < G.order; ++a)
            for (std::size_t b = 0; b < G.order; ++b)
                for (std::size_t gi = 0; gi < A.invariant_factors.size(); ++gi) {
                    auto c = e.cocycle;
                    c.table[a][b] = kernel_add(c.table[a][b], kernel_generator(A, gi));
                    auto v = validate_cocycle(c);
                    ++entries;
                    o.check(!v.ok && (v.triple || !v.reason.empty()),
                            name + ": cocycle entry (" + std::to_string(a) + "," + std::to_string(b) + ")");
                }
    }

    // Bundled negative fixtures fail with the label they declare.
    std::size_t fixtures = 0;
    for (const auto& path : json_files("configs/negative")) {
        ++fixtures;
        Json raw = [&] {
            std::ifstream in(path);
            return Json::parse(in);
        }();
        const std::string label = raw.value("expect_failure", "");
        const std::string name = fs::path(path).stem().string();
        o.check(!label.empty(), name + ": no expect_failure label");
        try {
            auto res = run_command(parse_config(path), "all");
            auto labels = failure_labels(res.report);
            o.check(res.status == exit_check_failure &&
                        std::find(labels.begin(), labels.end(), label) != labels.end(),
                    name + ": did not fail as " + label);
        } catch (const ConfigError& e) {
            bool named = false;
            for (const auto& msg : e.errors())
                named = named || msg.find(label) != std::string::npos;
            o.check(named, name + ": rejected, but not for " + label);
        }
    }
    o.notes.push_back(std::to_string(entries) + " extension cocycle entries corrupted; Gamma = Z/2 has one free entry, "
                                                "which no cocycle identity constrains");
    o.notes.push_back("offset rule skipped on " + std::to_string(rule_skipped) + " fixtures with a trivial window");
    o.notes.push_back(std::to_string(fixtures) + " bundled negative fixtures");
    return o;
}

struct Criterion {
    const char* id;
    const char* title;
    double budget_s;
    std::function<Outcome()> run;
};

} // namespace

int main()
{
    const std::vector<Criterion> criteria{
        {"AC1", "dual-datum correctness", 1.0, dual_datum_examples},
        {"AC2", "n_alpha oracle equivalence", 1.0, n_alpha_oracle},
        {"AC3", "extension calculus laws", 10.0, ext_laws},
        {"AC4", "comparison suite on the grid", 60.0, comparison_suite},
        {"AC5", "extension-level closure", 10.0, extension_closure},
        {"AC6", "negative controls", 0.0, negative_controls},
    };
    bool all = true;
    for (const auto& c : criteria) {
        auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o.check(false, std::string("exception: ") + e.what());
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        bool over = c.budget_s > 0 && secs > c.budget_s;
        bool pass = o.failures.empty() && o.unattainable.empty() && !over;
        all = all && pass;
        std::cout << c.id << " " << (pass ? "PASS" : "FAIL") << "  " << c.title << " (" << std::fixed
                  << std::setprecision(3) << secs << " s";
        if (c.budget_s > 0)
            std::cout << ", budget " << std::setprecision(0) << c.budget_s << " s";
        std::cout << ", " << o.checked << " checks)";
        if (!pass && o.failures.empty() && !over)
            std::cout << " [unattainable for some inputs, see below]";
        std::cout << "\n";
        if (over)
            std::cout << "    over time budget\n";
        for (const auto& f : o.failures)
            std::cout << "    failed: " << f << "\n";
        for (const auto& u : o.unattainable)
            std::cout << "    unattainable: " << u << "\n";
        for (const auto& n : o.notes)
            std::cout << "    " << n << "\n";
    }
    return all ? 0 : 1;
}
