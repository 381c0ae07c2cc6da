#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "harness.hpp"
#include "verify.hpp"

namespace mlg
{

using Json = nlohmann::ordered_json;

// ----------------------------------------------------------------------------
// Serialization. Rationals are always strings "p/q".

inline Json to_json(const IntVec& v)
{
    Json j = Json::array();
    for (Int x : v)
        j.push_back(x);
    return j;
}

inline Json to_json(const IntMat& m)
{
    Json j = Json::array();
    for (const auto& row : m)
        j.push_back(to_json(row));
    return j;
}

inline Json to_json(const RatMat& m)
{
    Json j = Json::array();
    for (const auto& row : m) {
        Json r = Json::array();
        for (const auto& x : row)
            r.push_back(x.to_string());
        j.push_back(r);
    }
    return j;
}

inline Json to_json(const KernelElement& x)
{
    Json j = Json::array();
    for (const auto& c : x)
        j.push_back(c.to_string());
    return j;
}

inline Json to_json(const KernelGroup& g)
{
    return Json{{"free_rank", g.free_rank}, {"invariant_factors", to_json(g.invariant_factors)}};
}

inline Json to_json(const RootDatum& rd)
{
    Json s = Json::array();
    for (auto i : rd.simple)
        s.push_back(i);
    return Json{{"rank", rd.rank},
                {"roots", to_json(rd.roots)},
                {"coroots", to_json(rd.coroots)},
                {"pairing", to_json(rd.pairing)},
                {"simple", s}};
}

inline Json to_json(const Cocycle2& c)
{
    Json table = Json::array();
    for (const auto& row : c.table) {
        Json r = Json::array();
        for (const auto& x : row)
            r.push_back(to_json(x));
        table.push_back(r);
    }
    return Json{{"group_order", c.group.order}, {"kernel", to_json(c.kernel)}, {"cocycle", table}};
}

inline Json to_json(const MetaplecticDualDatum& dd)
{
    return Json{{"y_qn_basis", to_json(dd.y_qn_basis)},
                {"n_alpha", to_json(dd.n_alpha)},
                {"r_alpha", to_json(dd.r_alpha)},
                {"modified_coroots", to_json(dd.modified_coroots)},
                {"modified_roots", to_json(dd.modified_roots)},
                {"x_qn_basis", to_json(dd.x_qn_basis)},
                {"modified_simple_coroots", to_json(dd.ysc_basis)},
                {"center", to_json(dd.center)},
                {"dual_root_datum", to_json(dd.dual)}};
}

inline Json to_json(const ModelReport& rep)
{
    Json checks = Json::array();
    for (const auto& c : rep.checks) {
        Json cj{{"name", c.name}, {"scope", c.scope}, {"passed", c.passed}, {"count", c.count}};
        if (!c.passed)
            cj["witness"] = c.witness;
        checks.push_back(cj);
    }
    Json sizes1 = Json::array(), sizes2 = Json::array();
    for (auto s : rep.pi1_fiber_sizes)
        sizes1.push_back(s);
    for (auto s : rep.e2_fiber_sizes)
        sizes2.push_back(s);
    return Json{{"model", rep.name},
                {"field", Json{{"q", rep.fm.q}, {"n", rep.fm.n}, {"k", rep.fm.k}, {"N", rep.fm.N}}},
                {"rank", rep.rank},
                {"center", to_json(rep.center)},
                {"center_dual_window", to_json(rep.window)},
                {"base_points", rep.base_points},
                {"isomorphic_pairs", rep.isomorphic_pairs},
                {"non_isomorphic_pairs", rep.non_isomorphic_pairs},
                {"pi1_fiber_sizes", sizes1},
                {"e2_fiber_sizes", sizes2},
                {"checks", checks},
                {"status", rep.passed() ? "pass" : "fail"}};
}

// ----------------------------------------------------------------------------
// Config parsing

/// All schema violations of a config, each prefixed with its field path.
class ConfigError : public std::runtime_error
{
public:
    explicit ConfigError(std::vector<std::string> errors)
        : std::runtime_error(join(errors)), errors_(std::move(errors))
    {
    }
    const std::vector<std::string>& errors() const noexcept { return errors_; }

private:
    static std::string join(const std::vector<std::string>& e)
    {
        std::string s;
        for (const auto& x : e)
            s += (s.empty() ? "" : "\n") + x;
        return s;
    }
    std::vector<std::string> errors_;
};

struct GroupSpec {
    FiniteGroupTable table;
};

struct ExtensionSource {
    std::string name;
    std::optional<CentralExtension> explicit_extension;
    std::string twist;   // "pi1" or "e2" when taken from the configured model
};

struct ExtOperation {
    std::string op;
    std::vector<std::string> args;
    std::string as;
    std::optional<bool> expect;
    std::optional<KernelGroup> target;
    std::vector<KernelElement> images;
    IntMat free_map;
    std::optional<FiniteGroupTable> source_group;
    std::vector<std::size_t> map;
};

struct ExtCalcConfig {
    std::vector<ExtensionSource> extensions;
    std::vector<ExtOperation> operations;
};

struct BdModelConfig {
    bool harness = false;
    std::uint64_t seed = 0;
    std::size_t harness_points = 2;
    std::vector<TorusCharacter> c;
    std::vector<EInput> e_inputs;
    std::optional<IntVec> sign_overrides;
    std::vector<Splitting> base_points;
};

struct RunConfig {
    std::string path;
    std::string name;
    CoverDatum cover;
    Int q = 0;
    std::optional<Int> k;
    Int epsilon_unit = 1;
    std::optional<BdModelConfig> bdmodel;
    VerifyOptions verify;
    std::optional<ExtCalcConfig> ext_calc;
    std::optional<std::string> expect_failure;
};

namespace detail
{
class SchemaReader
{
public:
    std::vector<std::string> errors;

    void error(const std::string& path, const std::string& msg) { errors.push_back(path + ": " + msg); }

    const Json* member(const Json& j, const std::string& key, const std::string& path, bool required = true)
    {
        if (!j.is_object()) {
            error(path, "expected an object");
            return nullptr;
        }
        auto it = j.find(key);
        if (it == j.end()) {
            if (required)
                error(path + "." + key, "missing required field");
            return nullptr;
        }
        return &*it;
    }

    std::optional<Int> integer(const Json* j, const std::string& path)
    {
        if (!j)
            return std::nullopt;
        if (!j->is_number_integer()) {
            error(path, "expected an integer");
            return std::nullopt;
        }
        return j->get<Int>();
    }

    std::optional<std::string> string(const Json* j, const std::string& path)
    {
        if (!j)
            return std::nullopt;
        if (!j->is_string()) {
            error(path, "expected a string");
            return std::nullopt;
        }
        return j->get<std::string>();
    }

    std::optional<IntVec> int_vector(const Json* j, const std::string& path, std::optional<std::size_t> len = {})
    {
        if (!j)
            return std::nullopt;
        if (!j->is_array()) {
            error(path, "expected an array of integers");
            return std::nullopt;
        }
        IntVec v;
        bool ok = true;
        for (std::size_t i = 0; i < j->size(); ++i) {
            auto x = integer(&(*j)[i], path + "[" + std::to_string(i) + "]");
            ok = ok && x.has_value();
            v.push_back(x.value_or(0));
        }
        if (len && v.size() != *len) {
            error(path, "expected length " + std::to_string(*len) + ", got " + std::to_string(v.size()));
            ok = false;
        }
        return ok ? std::optional<IntVec>(v) : std::nullopt;
    }

    std::optional<IntMat> int_matrix(const Json* j, const std::string& path, std::optional<std::size_t> rows,
                                     std::optional<std::size_t> cols)
    {
        if (!j)
            return std::nullopt;
        if (!j->is_array()) {
            error(path, "expected an array of rows");
            return std::nullopt;
        }
        IntMat m;
        bool ok = true;
        for (std::size_t i = 0; i < j->size(); ++i) {
            auto row = int_vector(&(*j)[i], path + "[" + std::to_string(i) + "]", cols);
            ok = ok && row.has_value();
            m.push_back(row.value_or(IntVec{}));
        }
        if (rows && m.size() != *rows) {
            error(path, "expected " + std::to_string(*rows) + " rows, got " + std::to_string(m.size()));
            ok = false;
        }
        return ok ? std::optional<IntMat>(m) : std::nullopt;
    }

    /// "g^e" exponent literal.
    std::optional<Int> exponent(const Json* j, const std::string& path)
    {
        auto s = string(j, path);
        if (!s)
            return std::nullopt;
        if (s->rfind("g^", 0) != 0) {
            error(path, "expected an element literal of the form \"g^e\", got \"" + *s + "\"");
            return std::nullopt;
        }
        try {
            std::size_t pos = 0;
            Int e = std::stoll(s->substr(2), &pos);
            if (pos != s->size() - 2)
                throw std::invalid_argument("trailing characters");
            return e;
        } catch (const std::exception&) {
            error(path, "malformed exponent in \"" + *s + "\"");
            return std::nullopt;
        }
    }

    std::optional<QZ> qz(const Json* j, const std::string& path)
    {
        if (!j)
            return std::nullopt;
        if (j->is_number_integer())
            return QZ(j->get<Int>(), 1);
        if (!j->is_string()) {
            error(path, "expected a rational string \"p/q\"");
            return std::nullopt;
        }
        try {
            return QZ::parse(j->get<std::string>());
        } catch (const std::exception& e) {
            error(path, e.what());
            return std::nullopt;
        }
    }

    std::optional<KernelElement> kernel_element(const Json* j, const std::string& path, const KernelGroup& A)
    {
        if (!j)
            return std::nullopt;
        std::size_t cc = A.coordinate_count();
        if (!j->is_array()) {
            if (cc == 1) {
                auto x = qz(j, path);
                return x ? std::optional<KernelElement>(KernelElement{*x}) : std::nullopt;
            }
            error(path, "expected an array of " + std::to_string(cc) + " rationals");
            return std::nullopt;
        }
        if (j->size() != cc) {
            error(path, "expected " + std::to_string(cc) + " coordinates, got " + std::to_string(j->size()));
            return std::nullopt;
        }
        KernelElement x;
        for (std::size_t i = 0; i < cc; ++i) {
            auto v = qz(&(*j)[i], path + "[" + std::to_string(i) + "]");
            if (!v)
                return std::nullopt;
            x.push_back(*v);
        }
        return x;
    }

    std::optional<KernelGroup> kernel_group(const Json* j, const std::string& path)
    {
        if (!j)
            return std::nullopt;
        KernelGroup A;
        auto inv = int_vector(member(*j, "invariant_factors", path), path + ".invariant_factors");
        auto fr = integer(member(*j, "free_rank", path, false), path + ".free_rank");
        if (!inv)
            return std::nullopt;
        for (std::size_t i = 0; i < inv->size(); ++i) {
            if ((*inv)[i] < 2) {
                error(path + ".invariant_factors[" + std::to_string(i) + "]", "invariant factors must be >= 2");
                return std::nullopt;
            }
            if (i > 0 && (*inv)[i] % (*inv)[i - 1] != 0) {
                error(path + ".invariant_factors", "must form a divisibility chain d_1 | d_2 | ...");
                return std::nullopt;
            }
        }
        A.invariant_factors = *inv;
        if (fr) {
            if (*fr < 0) {
                error(path + ".free_rank", "must be nonnegative");
                return std::nullopt;
            }
            A.free_rank = static_cast<std::size_t>(*fr);
        }
        return A;
    }

    std::optional<FiniteGroupTable> group(const Json* j, const std::string& path)
    {
        if (!j)
            return std::nullopt;
        if (!j->is_object()) {
            error(path, "expected {\"cyclic\": n}, {\"product\": [n, ...]} or {\"table\": [[...]]}");
            return std::nullopt;
        }
        try {
            if (j->contains("cyclic")) {
                auto n = integer(&(*j)["cyclic"], path + ".cyclic");
                if (!n)
                    return std::nullopt;
                if (*n < 1 || *n > 256) {
                    error(path + ".cyclic", "order must be in [1, 256]");
                    return std::nullopt;
                }
                return FiniteGroupTable::cyclic(static_cast<std::size_t>(*n));
            }
            if (j->contains("product")) {
                auto f = int_vector(&(*j)["product"], path + ".product");
                if (!f)
                    return std::nullopt;
                FiniteGroupTable G = FiniteGroupTable::cyclic(1);
                for (Int n : *f) {
                    if (n < 1 || n > 256) {
                        error(path + ".product", "factor orders must be in [1, 256]");
                        return std::nullopt;
                    }
                    G = FiniteGroupTable::direct_product(G, FiniteGroupTable::cyclic(static_cast<std::size_t>(n)));
                }
                if (G.order > 256) {
                    error(path + ".product", "group order exceeds 256");
                    return std::nullopt;
                }
                return G;
            }
            if (j->contains("table")) {
                auto t = int_matrix(&(*j)["table"], path + ".table", std::nullopt, std::nullopt);
                if (!t)
                    return std::nullopt;
                std::vector<std::vector<std::size_t>> tab;
                for (const auto& row : *t) {
                    std::vector<std::size_t> r;
                    for (Int x : row) {
                        if (x < 0) {
                            error(path + ".table", "entries must be nonnegative");
                            return std::nullopt;
                        }
                        r.push_back(static_cast<std::size_t>(x));
                    }
                    tab.push_back(r);
                }
                return FiniteGroupTable::from_table(tab);
            }
        } catch (const StructuralError& e) {
            error(path, e.what());
            return std::nullopt;
        }
        error(path, "expected one of the keys cyclic, product, table");
        return std::nullopt;
    }
};
} // namespace detail

/**
 * Parses and validates a run configuration. Every schema violation is
 * collected and reported together in a ConfigError.
 */
inline RunConfig parse_config_json(const Json& j, const std::string& origin = "<config>")
{
    detail::SchemaReader rd;
    RunConfig cfg;
    cfg.path = origin;

    auto version = rd.integer(rd.member(j, "version", "$"), "$.version");
    if (version && *version != 1)
        rd.error("$.version", "unsupported schema version " + std::to_string(*version) + " (expected 1)");
    if (auto n = rd.string(rd.member(j, "name", "$", false), "$.name"))
        cfg.name = *n;
    if (cfg.name.empty()) {
        auto slash = origin.find_last_of('/');
        cfg.name = origin.substr(slash == std::string::npos ? 0 : slash + 1);
        if (cfg.name.size() > 5 && cfg.name.substr(cfg.name.size() - 5) == ".json")
            cfg.name.resize(cfg.name.size() - 5);
    }
    if (auto e = rd.string(rd.member(j, "expect_failure", "$", false), "$.expect_failure"))
        cfg.expect_failure = *e;

    // Root datum.
    std::size_t rank = 0;
    bool rd_ok = false;
    if (const Json* r = rd.member(j, "root_datum", "$")) {
        const std::string p = "$.root_datum";
        auto rk = rd.integer(rd.member(*r, "rank", p), p + ".rank");
        if (rk && *rk < 0)
            rd.error(p + ".rank", "must be nonnegative");
        if (rk && *rk >= 0 && *rk <= 12) {
            rank = static_cast<std::size_t>(*rk);
            auto roots = rd.int_matrix(rd.member(*r, "roots", p), p + ".roots", std::nullopt, rank);
            std::optional<std::size_t> nroots;
            if (roots)
                nroots = roots->size();
            auto coroots = rd.int_matrix(rd.member(*r, "coroots", p), p + ".coroots", nroots, rank);
            auto pairing = rd.int_matrix(rd.member(*r, "pairing", p), p + ".pairing", rank, rank);
            auto simple = rd.int_vector(rd.member(*r, "simple", p), p + ".simple");
            bool idx_ok = true;
            if (simple && roots)
                for (std::size_t i = 0; i < simple->size(); ++i)
                    if ((*simple)[i] < 0 || static_cast<std::size_t>((*simple)[i]) >= roots->size()) {
                        rd.error(p + ".simple[" + std::to_string(i) + "]", "root index out of range");
                        idx_ok = false;
                    }
            if (roots && coroots && pairing && simple && idx_ok) {
                cfg.cover.rd.rank = rank;
                cfg.cover.rd.roots = *roots;
                cfg.cover.rd.coroots = *coroots;
                cfg.cover.rd.pairing = *pairing;
                for (Int s : *simple)
                    cfg.cover.rd.simple.push_back(static_cast<std::size_t>(s));
                rd_ok = true;
            }
        } else if (rk) {
            rd.error(p + ".rank", "rank must be at most 12");
        }
    }

    if (const Json* qf = rd.member(j, "quadratic_form", "$")) {
        const std::string p = "$.quadratic_form";
        auto diag = rd.int_vector(rd.member(*qf, "diagonal", p), p + ".diagonal", rank);
        auto off = rd.int_matrix(rd.member(*qf, "off_diagonal", p), p + ".off_diagonal", rank, rank);
        if (off) {
            for (std::size_t a = 0; a < rank; ++a)
                for (std::size_t b = 0; b < rank; ++b) {
                    if (a == b && (*off)[a][b] != 0)
                        rd.error(p + ".off_diagonal[" + std::to_string(a) + "][" + std::to_string(a) + "]",
                                 "diagonal of the polarization matrix must be 0");
                    if ((*off)[a][b] != (*off)[b][a])
                        rd.error(p + ".off_diagonal", "must be symmetric");
                }
        }
        if (diag && off) {
            cfg.cover.Q.diagonal = *diag;
            cfg.cover.Q.off_diagonal = *off;
        }
    }

    if (const Json* cv = rd.member(j, "cover", "$")) {
        auto n = rd.integer(rd.member(*cv, "n", "$.cover"), "$.cover.n");
        if (n && *n < 1)
            rd.error("$.cover.n", "cover degree must be positive");
        else if (n)
            cfg.cover.n = *n;
    }

    if (const Json* fj = rd.member(j, "field", "$")) {
        auto q = rd.integer(rd.member(*fj, "q", "$.field"), "$.field.q");
        const Json* kj = rd.member(*fj, "k", "$.field", false);
        auto k = rd.integer(kj, "$.field.k");
        auto eps = rd.integer(rd.member(*fj, "epsilon_unit", "$.field", false), "$.field.epsilon_unit");
        if (q) {
            cfg.q = *q;
            cfg.k = k;
            cfg.epsilon_unit = eps.value_or(1);
            try {
                (void)build_field_model(cfg.q, cfg.cover.n, cfg.k, cfg.epsilon_unit);
            } catch (const StructuralError& e) {
                rd.error("$.field", e.what());
            }
        }
    }

    if (const Json* bj = rd.member(j, "bdmodel", "$", false)) {
        const std::string p = "$.bdmodel";
        BdModelConfig bc;
        if (const Json* h = rd.member(*bj, "harness", p, false)) {
            bc.harness = true;
            auto seed = rd.integer(rd.member(*h, "seed", p + ".harness"), p + ".harness.seed");
            auto pts = rd.integer(rd.member(*h, "base_points", p + ".harness", false), p + ".harness.base_points");
            if (seed)
                bc.seed = static_cast<std::uint64_t>(*seed);
            if (pts) {
                if (*pts < 1 || *pts > 8)
                    rd.error(p + ".harness.base_points", "must be in [1, 8]");
                else
                    bc.harness_points = static_cast<std::size_t>(*pts);
            }
        } else {
            std::optional<std::size_t> krows;
            if (cfg.q > 1) {
                try {
                    krows = static_cast<std::size_t>(build_field_model(cfg.q, cfg.cover.n, cfg.k).k);
                } catch (const StructuralError&) {
                }
            }
            if (const Json* cj = rd.member(*bj, "action_cocycle", p, false)) {
                if (auto c = rd.int_matrix(cj, p + ".action_cocycle", krows, rank))
                    bc.c = *c;
            } else if (const Json* gj = rd.member(*bj, "action_generator", p, false)) {
                if (auto g = rd.int_vector(gj, p + ".action_generator", rank); g && krows)
                    bc.c = cocycle_from_generator(build_field_model(cfg.q, cfg.cover.n, cfg.k), *g);
            } else {
                rd.error(p, "one of action_cocycle, action_generator or harness is required");
            }
            if (const Json* ej = rd.member(*bj, "e_inputs", p)) {
                if (!ej->is_array()) {
                    rd.error(p + ".e_inputs", "expected an array");
                } else {
                    if (rd_ok && ej->size() != cfg.cover.rd.simple.size())
                        rd.error(p + ".e_inputs", "expected one entry per simple root (" +
                                                      std::to_string(cfg.cover.rd.simple.size()) + ")");
                    for (std::size_t i = 0; i < ej->size(); ++i) {
                        const std::string ep = p + ".e_inputs[" + std::to_string(i) + "]";
                        auto over = rd.int_vector(rd.member((*ej)[i], "over", ep), ep + ".over", rank);
                        auto val = rd.exponent(rd.member((*ej)[i], "value", ep), ep + ".value");
                        if (over && val)
                            bc.e_inputs.push_back({*over, *val});
                    }
                }
            }
            if (const Json* sj = rd.member(*bj, "sign_overrides", p, false)) {
                if (auto s = rd.int_vector(sj, p + ".sign_overrides")) {
                    for (Int x : *s)
                        if (x != 1 && x != -1)
                            rd.error(p + ".sign_overrides", "entries must be +1 or -1");
                    bc.sign_overrides = *s;
                }
            }
            if (const Json* pj = rd.member(*bj, "base_points", p)) {
                if (auto m = rd.int_matrix(pj, p + ".base_points", std::nullopt, rank)) {
                    if (m->empty())
                        rd.error(p + ".base_points", "at least one base point is required");
                    for (const auto& row : *m)
                        bc.base_points.push_back({row});
                }
            }
        }
        cfg.bdmodel = bc;
    }

    if (const Json* vj = rd.member(j, "verify", "$", false)) {
        if (auto rule = rd.string(rd.member(*vj, "composition_rule", "$.verify", false), "$.verify.composition_rule")) {
            if (*rule == "standard")
                cfg.verify.rule = CompositionRule::standard;
            else if (*rule == "offset")
                cfg.verify.rule = CompositionRule::offset;
            else
                rd.error("$.verify.composition_rule", "expected \"standard\" or \"offset\"");
        }
        if (auto m = rd.integer(rd.member(*vj, "min_base_points", "$.verify", false), "$.verify.min_base_points")) {
            if (*m < 1)
                rd.error("$.verify.min_base_points", "must be positive");
            else
                cfg.verify.min_base_points = static_cast<std::size_t>(*m);
        }
    }

    if (const Json* xj = rd.member(j, "ext_calc", "$", false)) {
        const std::string p = "$.ext_calc";
        ExtCalcConfig ec;
        std::map<std::string, bool> known;
        if (const Json* ej = rd.member(*xj, "extensions", p)) {
            if (!ej->is_object())
                rd.error(p + ".extensions", "expected an object mapping names to extensions");
            else
                for (auto it = ej->begin(); it != ej->end(); ++it) {
                    const std::string ep = p + ".extensions." + it.key();
                    ExtensionSource src{it.key(), std::nullopt, ""};
                    if (auto s = rd.string(rd.member(it.value(), "source", ep, false), ep + ".source")) {
                        if (*s != "pi1" && *s != "e2")
                            rd.error(ep + ".source", "expected \"pi1\" or \"e2\"");
                        else if (!j.contains("bdmodel"))
                            rd.error(ep + ".source", "a model-derived extension needs a bdmodel block");
                        src.twist = *s;
                    } else {
                        auto G = rd.group(rd.member(it.value(), "group", ep), ep + ".group");
                        auto A = rd.kernel_group(rd.member(it.value(), "kernel", ep), ep + ".kernel");
                        const Json* tj = rd.member(it.value(), "cocycle", ep);
                        if (G && A && tj) {
                            bool ok = tj->is_array() && tj->size() == G->order;
                            Cocycle2 c{*G, *A, {}};
                            for (std::size_t a = 0; ok && a < G->order; ++a) {
                                const Json& row = (*tj)[a];
                                ok = row.is_array() && row.size() == G->order;
                                std::vector<KernelElement> r;
                                for (std::size_t b = 0; ok && b < G->order; ++b) {
                                    auto x = rd.kernel_element(&row[b], ep + ".cocycle[" + std::to_string(a) + "][" +
                                                                            std::to_string(b) + "]",
                                                               *A);
                                    ok = x.has_value();
                                    if (x)
                                        r.push_back(*x);
                                }
                                c.table.push_back(r);
                            }
                            if (!ok)
                                rd.error(ep + ".cocycle",
                                         "expected a " + std::to_string(G->order) + "x" + std::to_string(G->order) +
                                             " table of kernel elements");
                            else
                                src.explicit_extension = CentralExtension{c};
                        }
                    }
                    known[src.name] = true;
                    ec.extensions.push_back(src);
                }
        }
        if (const Json* oj = rd.member(*xj, "operations", p, false)) {
            if (!oj->is_array())
                rd.error(p + ".operations", "expected an array");
            else
                for (std::size_t i = 0; i < oj->size(); ++i) {
                    const Json& o = (*oj)[i];
                    const std::string op_path = p + ".operations[" + std::to_string(i) + "]";
                    ExtOperation op;
                    op.op = rd.string(rd.member(o, "op", op_path), op_path + ".op").value_or("");
                    if (const Json* aj = rd.member(o, "args", op_path, false)) {
                        if (!aj->is_array())
                            rd.error(op_path + ".args", "expected an array of names");
                        else
                            for (std::size_t a = 0; a < aj->size(); ++a)
                                if (auto s = rd.string(&(*aj)[a], op_path + ".args[" + std::to_string(a) + "]"))
                                    op.args.push_back(*s);
                    }
                    for (const auto& a : op.args)
                        if (!known.count(a))
                            rd.error(op_path + ".args", "unknown extension \"" + a + "\"");
                    op.as = rd.string(rd.member(o, "as", op_path, false), op_path + ".as").value_or("");
                    if (const Json* e = rd.member(o, "expect", op_path, false)) {
                        if (!e->is_boolean())
                            rd.error(op_path + ".expect", "expected a boolean");
                        else
                            op.expect = e->get<bool>();
                    }
                    static const std::map<std::string, std::size_t> arity{
                        {"baer_sum", 2}, {"negate", 1}, {"pushout", 1}, {"pullback", 1},
                        {"is_split", 1}, {"cohomologous", 2}, {"validate", 1}};
                    auto ar = arity.find(op.op);
                    if (ar == arity.end()) {
                        rd.error(op_path + ".op", "unknown operation \"" + op.op +
                                                      "\" (baer_sum, negate, pushout, pullback, is_split, "
                                                      "cohomologous, validate)");
                    } else if (op.args.size() != ar->second) {
                        rd.error(op_path + ".args", op.op + " takes " + std::to_string(ar->second) + " argument(s)");
                    }
                    bool produces = op.op == "baer_sum" || op.op == "negate" || op.op == "pushout" || op.op == "pullback";
                    if (produces && op.as.empty())
                        rd.error(op_path + ".as", "result name required");
                    if (produces && !op.as.empty())
                        known[op.as] = true;
                    if (op.op == "pushout") {
                        op.target = rd.kernel_group(rd.member(o, "target", op_path), op_path + ".target");
                        const Json* ij = rd.member(o, "images", op_path);
                        if (op.target && ij) {
                            if (!ij->is_array())
                                rd.error(op_path + ".images", "expected an array");
                            else
                                for (std::size_t a = 0; a < ij->size(); ++a)
                                    if (auto x = rd.kernel_element(&(*ij)[a],
                                                                   op_path + ".images[" + std::to_string(a) + "]",
                                                                   *op.target))
                                        op.images.push_back(*x);
                        }
                        if (const Json* fm = rd.member(o, "free_map", op_path, false))
                            if (auto m = rd.int_matrix(fm, op_path + ".free_map", std::nullopt, std::nullopt))
                                op.free_map = *m;
                    }
                    if (op.op == "pullback") {
                        op.source_group = rd.group(rd.member(o, "source_group", op_path), op_path + ".source_group");
                        if (auto m = rd.int_vector(rd.member(o, "map", op_path), op_path + ".map")) {
                            for (Int x : *m) {
                                if (x < 0)
                                    rd.error(op_path + ".map", "entries must be nonnegative");
                                op.map.push_back(static_cast<std::size_t>(std::max<Int>(x, 0)));
                            }
                        }
                    }
                    ec.operations.push_back(op);
                }
        }
        cfg.ext_calc = ec;
    }

    if (rd_ok && cfg.cover.Q.diagonal.size() == rank) {
        try {
            check_form(cfg.cover.Q, rank);
        } catch (const StructuralError& e) {
            rd.error("$.quadratic_form", e.what());
        }
    }
    if (!rd.errors.empty())
        throw ConfigError(rd.errors);
    return cfg;
}

inline RunConfig parse_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError({path + ": cannot open file"});
    std::stringstream ss;
    ss << in.rdbuf();
    Json j;
    try {
        j = Json::parse(ss.str());
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError({path + ": syntax error at byte " + std::to_string(e.byte) + ": " + e.what()});
    }
    return parse_config_json(j, path);
}

} // namespace mlg
