#pragma once

#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "io.hpp"

namespace mlg
{

enum ExitCode : int { exit_pass = 0, exit_check_failure = 1, exit_invalid_input = 2 };

struct CommandResult {
    int status = exit_pass;
    Json report;
    std::string text;
};

inline int combine_status(int a, int b)
{
    if (a == exit_invalid_input || b == exit_invalid_input)
        return exit_invalid_input;
    return std::max(a, b);
}

inline Json error_json(const ModelError& e)
{
    return Json{{"check", e.check()}, {"witness", e.witness()}, {"message", e.what()}};
}

/// D-model and base points described by a config's bdmodel block.
struct ConfiguredModel {
    std::shared_ptr<const DModel> dm;
    std::vector<Splitting> base_points;
};

inline ConfiguredModel build_configured_model(const RunConfig& cfg)
{
    if (!cfg.bdmodel)
        throw StructuralError("config has no bdmodel block");
    const auto& bc = *cfg.bdmodel;
    if (bc.harness) {
        HarnessSpec spec{cfg.name, cfg.cover, cfg.q, cfg.k, bc.seed, bc.harness_points};
        auto hm = generate_harness_model(spec);
        return {hm.dm, hm.base_points};
    }
    auto dd = compute_dual_datum(cfg.cover);
    auto fm = build_field_model(cfg.q, cfg.cover.n, cfg.k, cfg.epsilon_unit);
    auto dm = std::make_shared<const DModel>(build_d_model(dd, fm, bc.c, bc.e_inputs, bc.sign_overrides));
    return {dm, bc.base_points};
}

namespace detail
{
inline std::string matrix_text(const IntMat& m)
{
    std::string s = "[";
    for (std::size_t i = 0; i < m.size(); ++i)
        s += (i ? ", " : "") + vec_str(m[i]);
    return s + "]";
}

inline std::string group_text(const KernelGroup& g)
{
    std::string s;
    for (Int d : g.invariant_factors)
        s += (s.empty() ? "" : " + ") + ("Z/" + std::to_string(d));
    for (std::size_t i = 0; i < g.free_rank; ++i)
        s += (s.empty() ? "" : " + ") + std::string("Z");
    return s.empty() ? "0" : s;
}
} // namespace detail

inline CommandResult run_dual_datum(const RunConfig& cfg)
{
    CommandResult res;
    res.report = Json{{"command", "dual-datum"}};
    try {
        auto dd = compute_dual_datum(cfg.cover);
        res.report["dual_datum"] = to_json(dd);
        std::ostringstream os;
        os << "dual datum for " << cfg.name << " (n=" << cfg.cover.n << ")\n"
           << "  Y_{Q,n} basis      " << detail::matrix_text(dd.y_qn_basis) << "\n"
           << "  n_alpha            " << detail::vec_str(dd.n_alpha) << "\n"
           << "  r_alpha            " << detail::vec_str(dd.r_alpha) << "\n"
           << "  modified coroots   " << detail::matrix_text(dd.modified_coroots) << "\n"
           << "  simple (Y_{Q,n})   " << detail::matrix_text(dd.ysc_basis) << "\n"
           << "  center             " << detail::group_text(dd.center) << "\n"
           << "  invariant factors  " << detail::vec_str(dd.center.invariant_factors) << "\n";
        res.text = os.str();
    } catch (const ModelError& e) {
        res.status = exit_check_failure;
        res.report["error"] = error_json(e);
        res.text = "dual-datum FAILED: " + e.check() + ": " + e.what() + " [" + e.witness() + "]\n";
    }
    return res;
}

inline CommandResult run_ext_calc(const RunConfig& cfg)
{
    CommandResult res;
    res.report = Json{{"command", "ext-calc"}};
    if (!cfg.ext_calc) {
        res.status = exit_invalid_input;
        res.report["error"] = Json{{"check", "config"}, {"witness", ""}, {"message", "config has no ext_calc block"}};
        res.text = "ext-calc: config has no ext_calc block\n";
        return res;
    }
    std::ostringstream os;
    std::map<std::string, CentralExtension> ext;
    Json imported = Json::array();
    Json ops = Json::array();
    try {
        std::optional<ConfiguredModel> model;
        for (const auto& src : cfg.ext_calc->extensions) {
            CentralExtension e;
            if (src.explicit_extension) {
                e = *src.explicit_extension;
                auto chk = validate_cocycle(e.cocycle);
                if (!chk.ok) {
                    const auto& t = *chk.triple;
                    throw ModelError("extcalc.cocycle",
                                     src.name + " at (" + std::to_string(t[0]) + "," + std::to_string(t[1]) + "," +
                                         std::to_string(t[2]) + ")",
                                     "imported table is not a normalized 2-cocycle: " + chk.reason);
                }
            } else {
                if (!model)
                    model = build_configured_model(cfg);
                auto bp = make_base_point(model->dm, model->base_points.at(0));
                e = src.twist == "pi1" ? pi1_extension(bp, cfg.verify.rule).extension
                                       : e2_extension(*model->dm, bp.center).extension;
            }
            ext[src.name] = e;
            Json ij = to_json(e.cocycle);
            ij = Json{{"name", src.name}, {"source", src.twist.empty() ? "table" : src.twist}, {"extension", ij}};
            imported.push_back(ij);
            os << "extension " << src.name << ": |Gamma|=" << e.group().order << ", A=" << detail::group_text(e.kernel())
               << "\n";
        }
        for (const auto& op : cfg.ext_calc->operations) {
            Json oj{{"op", op.op}, {"args", op.args}};
            std::optional<bool> verdict;
            std::optional<CentralExtension> produced;
            try {
                if (op.op == "baer_sum")
                    produced = baer_sum(ext.at(op.args[0]), ext.at(op.args[1]));
                else if (op.op == "negate")
                    produced = baer_negate(ext.at(op.args[0]));
                else if (op.op == "pushout")
                    produced = pushout_extension(
                        ext.at(op.args[0]),
                        KernelHom{ext.at(op.args[0]).kernel(), *op.target, op.images,
                                  op.free_map.empty() ? IntMat(op.target->free_rank,
                                                               IntVec(ext.at(op.args[0]).kernel().free_rank, 0))
                                                      : op.free_map});
                else if (op.op == "pullback")
                    produced = pullback_extension(ext.at(op.args[0]),
                                                  GroupHom{*op.source_group, ext.at(op.args[0]).group(), op.map});
                else if (op.op == "is_split")
                    verdict = is_split(ext.at(op.args[0]));
                else if (op.op == "cohomologous")
                    verdict = cohomologous(ext.at(op.args[0]), ext.at(op.args[1]));
                else if (op.op == "validate")
                    verdict = validate_cocycle(ext.at(op.args[0]).cocycle).ok;
            } catch (const StructuralError& e) {
                throw ModelError("extcalc." + op.op, "", e.what());
            }
            if (produced) {
                ext[op.as] = *produced;
                oj["as"] = op.as;
                oj["result"] = to_json(produced->cocycle);
                os << op.op << " -> " << op.as << "\n";
            }
            if (verdict) {
                oj["result"] = *verdict;
                os << op.op << "(";
                for (std::size_t i = 0; i < op.args.size(); ++i)
                    os << (i ? ", " : "") << op.args[i];
                os << ") = " << (*verdict ? "true" : "false");
                if (op.expect) {
                    bool ok = *op.expect == *verdict;
                    oj["expect"] = *op.expect;
                    oj["passed"] = ok;
                    os << (ok ? "  [ok]" : "  [MISMATCH]");
                    if (!ok)
                        res.status = exit_check_failure;
                }
                os << "\n";
            }
            ops.push_back(oj);
        }
    } catch (const ModelError& e) {
        res.status = exit_check_failure;
        res.report["error"] = error_json(e);
        os << "ext-calc FAILED: " << e.check() << ": " << e.what() << " [" << e.witness() << "]\n";
    }
    res.report["extensions"] = imported;
    res.report["operations"] = ops;
    res.text = os.str();
    return res;
}

inline CommandResult run_verify(const RunConfig& cfg)
{
    CommandResult res;
    res.report = Json{{"command", "verify"}};
    if (!cfg.bdmodel) {
        res.status = exit_invalid_input;
        res.report["error"] = Json{{"check", "config"}, {"witness", ""}, {"message", "config has no bdmodel block"}};
        res.text = "verify: config has no bdmodel block\n";
        return res;
    }
    std::ostringstream os;
    try {
        auto model = build_configured_model(cfg);
        ModelReport rep = verify_model(cfg.name, model.dm, model.base_points, cfg.verify);
        res.report["comparison"] = to_json(rep);
        if (!rep.passed())
            res.status = exit_check_failure;
        os << "verify " << cfg.name << ": q=" << rep.fm.q << " n=" << rep.fm.n << " k=" << rep.fm.k
           << " center=" << detail::group_text(rep.center) << " base points=" << rep.base_points
           << " (isomorphic pairs " << rep.isomorphic_pairs << ")\n";
        for (const auto& c : rep.checks) {
            os << "  " << (c.passed ? "pass" : "FAIL") << "  " << c.name << " [" << c.scope << "] " << c.count
               << " evaluations";
            if (!c.passed)
                os << "\n        witness: " << c.witness;
            os << "\n";
        }
    } catch (const ModelError& e) {
        res.status = exit_check_failure;
        res.report["error"] = error_json(e);
        os << "verify FAILED: " << e.check() << ": " << e.what() << " [" << e.witness() << "]\n";
    }
    res.text = os.str();
    return res;
}

/// Runs one command on one parsed config. `command` is dual-datum, ext-calc, verify or all.
inline CommandResult run_command(const RunConfig& cfg, const std::string& command)
{
    CommandResult out;
    out.report = Json{{"config", cfg.path}, {"model", cfg.name}};
    if (cfg.expect_failure)
        out.report["expect_failure"] = *cfg.expect_failure;
    std::vector<std::pair<std::string, CommandResult>> parts;
    try {
        if (command == "dual-datum" || command == "all")
            parts.emplace_back("dual-datum", run_dual_datum(cfg));
        if (command == "ext-calc" || (command == "all" && cfg.ext_calc))
            parts.emplace_back("ext-calc", run_ext_calc(cfg));
        if (command == "verify" || (command == "all" && cfg.bdmodel))
            parts.emplace_back("verify", run_verify(cfg));
    } catch (const StructuralError& e) {
        out.status = exit_invalid_input;
        out.report["error"] = Json{{"check", "structure"}, {"witness", ""}, {"message", e.what()}};
        out.text = "invalid input: " + std::string(e.what()) + "\n";
    }
    if (parts.empty() && out.status == exit_pass)
        throw std::invalid_argument("unknown command '" + command + "'");
    Json sections = Json::object();
    for (auto& [name, r] : parts) {
        out.status = combine_status(out.status, r.status);
        r.report.erase("command");
        sections[name] = r.report;
        out.text += r.text;
    }
    out.report["results"] = sections;
    out.report["status"] = out.status == exit_pass ? "pass" : (out.status == exit_check_failure ? "fail" : "invalid");
    return out;
}

/// Check names behind every failure in one report entry: module errors and failed comparison checks.
inline std::vector<std::string> failure_labels(const Json& entry)
{
    std::vector<std::string> out;
    if (entry.contains("error"))
        out.push_back(entry["error"].value("check", ""));
    const Json results = entry.value("results", Json::object());
    for (const auto& [section, r] : results.items()) {
        if (r.contains("error"))
            out.push_back(r["error"].value("check", ""));
        if (r.contains("comparison"))
            for (const auto& c : r["comparison"].value("checks", Json::array()))
                if (!c.value("passed", true))
                    out.push_back(c.value("name", ""));
        for (const auto& op : r.value("operations", Json::array()))
            if (!op.value("passed", true))
                out.push_back("extcalc." + op.value("op", std::string()));
    }
    return out;
}

/// Shape check of a report produced by the CLI; returns the list of violations.
inline std::vector<std::string> validate_report_json(const Json& j)
{
    std::vector<std::string> errs;
    auto need = [&](const Json& o, const char* key, bool (Json::*pred)() const, const std::string& path) {
        if (!o.is_object() || !o.contains(key) || !(o[key].*pred)())
            errs.push_back(path + "." + key + ": missing or wrong type");
    };
    need(j, "schema", &Json::is_string, "$");
    need(j, "command", &Json::is_string, "$");
    need(j, "status", &Json::is_string, "$");
    need(j, "entries", &Json::is_array, "$");
    if (!errs.empty())
        return errs;
    if (j["schema"] != "mlg-report/1")
        errs.push_back("$.schema: unknown schema " + j["schema"].dump());
    for (std::size_t i = 0; i < j["entries"].size(); ++i) {
        const Json& e = j["entries"][i];
        const std::string p = "$.entries[" + std::to_string(i) + "]";
        need(e, "config", &Json::is_string, p);
        need(e, "status", &Json::is_string, p);
        if (e.contains("results")) {
            need(e, "results", &Json::is_object, p);
            if (e["results"].is_object() && e["results"].contains("verify")) {
                const Json& v = e["results"]["verify"];
                if (v.contains("comparison")) {
                    need(v["comparison"], "checks", &Json::is_array, p + ".results.verify.comparison");
                    for (const auto& c : v["comparison"].value("checks", Json::array())) {
                        need(c, "name", &Json::is_string, p + ".checks[]");
                        need(c, "passed", &Json::is_boolean, p + ".checks[]");
                        need(c, "count", &Json::is_number_unsigned, p + ".checks[]");
                    }
                }
            }
        }
    }
    return errs;
}

} // namespace mlg
