#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "mlg/cli.hpp"

namespace
{

std::filesystem::path report_path(const std::string& requested, const std::string& command)
{
    const char* dir = std::getenv("MLG_REPORT_DIR");
    if (requested.empty()) {
        if (!dir || !*dir)
            return {};
        return std::filesystem::path(dir) / ("mlg-" + command + ".json");
    }
    std::filesystem::path p(requested);
    if (p.is_relative() && dir && *dir)
        return std::filesystem::path(dir) / p;
    return p;
}

int run(const std::string& command, const std::vector<std::string>& configs, const std::string& report, bool json)
{
    mlg::Json top{{"schema", "mlg-report/1"}, {"command", command}, {"entries", mlg::Json::array()}};
    int status = mlg::exit_pass;
    for (const auto& path : configs) {
        auto t0 = std::chrono::steady_clock::now();
        mlg::Json entry;
        try {
            mlg::RunConfig cfg = mlg::parse_config(path);
            mlg::CommandResult res = mlg::run_command(cfg, command);
            status = mlg::combine_status(status, res.status);
            entry = res.report;
            if (!json)
                std::cout << res.text;
        } catch (const mlg::ConfigError& e) {
            status = mlg::combine_status(status, mlg::exit_invalid_input);
            entry = mlg::Json{{"config", path}, {"errors", e.errors()}, {"status", "invalid"}};
            std::cerr << "invalid config " << path << ":\n";
            for (const auto& err : e.errors())
                std::cerr << "  " << err << "\n";
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::cerr << "[" << command << "] " << path << ": " << entry.value("status", "?") << " in " << secs << " s\n";
        top["entries"].push_back(entry);
    }
    top["status"] = status == mlg::exit_pass ? "pass" : (status == mlg::exit_check_failure ? "fail" : "invalid");
    const std::string text = top.dump(2) + "\n";
    if (json)
        std::cout << text;
    if (auto out = report_path(report, command); !out.empty()) {
        if (out.has_parent_path())
            std::filesystem::create_directories(out.parent_path());
        std::ofstream f(out, std::ios::binary);
        if (!f) {
            std::cerr << "cannot write report " << out << "\n";
            return mlg::exit_invalid_input;
        }
        f << text;
    }
    return status;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Metaplectic dual data, extension calculus and twist comparison"};
    app.require_subcommand(1);
    std::vector<std::string> configs;
    std::string report;
    bool json = false;
    std::string chosen;

    struct Cmd {
        const char* name;
        const char* help;
    };
    for (const Cmd& c : {Cmd{"dual-datum", "print the metaplectic dual root datum"},
                         Cmd{"ext-calc", "run Baer sum / pushout / pullback operations"},
                         Cmd{"verify", "run the comparison suite"},
                         Cmd{"all", "run every command the config supports"}}) {
        CLI::App* sub = app.add_subcommand(c.name, c.help);
        sub->add_option("configs", configs, "config files (JSON, schema version 1)")->required()->check(CLI::ExistingFile);
        sub->add_option("--report", report, "write the JSON report here (relative to $MLG_REPORT_DIR if set)");
        sub->add_flag("--json", json, "print the JSON report instead of text");
        sub->callback([&chosen, name = std::string(c.name)] { chosen = name; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : mlg::exit_invalid_input;
    }
    try {
        return run(chosen, configs, report, json);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return mlg::exit_invalid_input;
    }
}
