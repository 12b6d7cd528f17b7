#pragma once

/**
 * @file cli.hpp
 * @brief Command-line front end.
 *
 * Exit codes: 0 when every check passes, 1 when any check fails or a run
 * aborts on a numerical error, 2 for usage and configuration errors.
 */

#include <bpd/harness/commands.hpp>
#include <bpd/harness/config.hpp>
#include <bpd/harness/report.hpp>
#include <bpd/harness/theorem.hpp>

#include <CLI11.hpp>

#include <chrono>
#include <cstdint>
#include <functional>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

namespace bpd::harness {

inline constexpr int kExitPass = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitUsage = 2;

struct CliOptions {
    std::string config;
    std::string out;
    int resolution = 0;
    std::uint64_t seed = 0;
    bool seed_given = false;
    bool allow_p_le_2 = false;
};

/// Configuration after applying command-line overrides.
inline ExperimentConfig resolve_config(const CliOptions& o) {
    ExperimentConfig cfg = o.config.empty() ? ExperimentConfig{} : load_config(o.config);
    if (!o.out.empty()) cfg.out = o.out;
    if (o.resolution != 0) cfg.region.resolution = o.resolution;
    if (o.seed_given) cfg.region.seed = o.seed;
    if (o.allow_p_le_2) cfg.allow_p_le_2 = true;
    return cfg;
}

inline void print_checks(std::ostream& os, const Report& r) {
    for (const auto& c : r.checks)
        os << (c.pass ? "PASS  " : "FAIL  ") << c.name << ": " << text::format_sci(c.measured) << ' ' << c.relation
           << ' ' << text::format_sci(c.threshold) << " [" << to_string(c.source) << "]\n";
    for (const auto& n : r.notes) os << "note: " << n << '\n';
    os << (r.passed() ? "passed" : "failed") << '\n';
}

using Runner = std::function<Outcome(const ExperimentConfig&)>;

inline int run_command(const std::string& name, const Runner& runner, const CliOptions& opts,
                       const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
    const auto start = std::chrono::steady_clock::now();
    ExperimentConfig cfg;
    try {
        cfg = resolve_config(opts);
        validate(cfg);
    } catch (const ConfigError& e) {
        err << "configuration error: " << e.what() << '\n';
        return kExitUsage;
    }
    if (cfg.threads > 0) parallel::set_thread_count(cfg.threads);

    Outcome result;
    int code = kExitFail;
    try {
        result = runner(cfg);
        code = result.report.passed() ? kExitPass : kExitFail;
    } catch (const ConfigError& e) {
        err << "configuration error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << name << ": " << e.what() << '\n';
        result = Outcome{};
        result.report.command = name;
        result.report.note(std::string("aborted: ") + e.what());
    }

    try {
        OutputDir dir(cfg.out);
        for (const auto& [file, body] : result.tables) dir.write(file, body, &result.report);
        const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        write_report(dir, result.report, argv, elapsed);
    } catch (const std::exception& e) {
        err << name << ": " << e.what() << '\n';
        return kExitFail;
    }
    print_checks(out, result.report);
    return code;
}

inline int cli_main(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"Bounded point derivations on rasterized planar sets", "bpd"};
    app.require_subcommand(1);
    CliOptions opts;

    auto add_common = [&](CLI::App* leaf) {
        leaf->add_option("--config", opts.config, "configuration file (key = value)")->check(CLI::ExistingFile);
        leaf->add_option("--out", opts.out, "output directory");
        leaf->add_option("--resolution", opts.resolution, "grid resolution override")->check(CLI::Range(8, 1 << 16));
        leaf->add_option("--seed", opts.seed, "region seed override")->each([&](const std::string&) {
            opts.seed_given = true;
        });
        leaf->add_flag("--allow-p-le-2", opts.allow_p_le_2, "run exploratory experiments with p <= 2");
    };

    std::vector<std::pair<CLI::App*, std::pair<std::string, Runner>>> leaves;
    auto leaf = [&](CLI::App* parent, const std::string& name, const std::string& help, Runner r) {
        CLI::App* sub = parent->add_subcommand(name, help);
        add_common(sub);
        leaves.push_back({sub, {parent->get_name() + " " + name, std::move(r)}});
    };

    CLI::App* region = app.add_subcommand("region", "region generation");
    region->require_subcommand(1);
    leaf(region, "gen", "rasterize the configured region and write region.rgn", region_gen);

    CLI::App* verify = app.add_subcommand("verify", "representing-weight checks");
    verify->require_subcommand(1);
    leaf(verify, "representing", "check the order-t weight against the test battery", verify_representing_cmd);
    leaf(verify, "wilken", "reduce the order-t weight to every lower order and check each", verify_wilken_cmd);
    leaf(verify, "bishop", "move the order-0 weight to bishop.x and check it there", verify_bishop_cmd);

    CLI::App* density = app.add_subcommand("density", "density of the threshold set");
    density->require_subcommand(1);
    leaf(density, "scan", "build E and tabulate its missing-area ratios", density_scan_cmd);

    CLI::App* diffquot = app.add_subcommand("diffquot", "difference quotients of the target");
    diffquot->require_subcommand(1);
    leaf(diffquot, "table", "convergence of the order-t quotient to the derivative", diffquot_table_cmd);

    CLI::App* experiment = app.add_subcommand("experiment", "end-to-end experiments");
    experiment->require_subcommand(1);
    leaf(experiment, "theorem1", "first-order quotients along E",
         [](const ExperimentConfig& c) { return from_theorem(run_theorem1(c)); });
    leaf(experiment, "theorem2", "order-t difference quotients along E'",
         [](const ExperimentConfig& c) { return from_theorem(run_theorem2(c)); });
    leaf(experiment, "bounds", "pointwise bounds along an L^p approximating sequence",
         [](const ExperimentConfig& c) { return from_theorem(run_bounds(c)); });

    if (argc <= 1) {
        err << app.help();
        return kExitUsage;
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitPass;
    } catch (const CLI::ParseError& e) {
        err << e.what() << "\n";
        err << "run with --help for usage\n";
        return kExitUsage;
    }

    const std::vector<std::string> args(argv, argv + argc);
    for (const auto& [sub, cmd] : leaves)
        if (sub->parsed()) return run_command(cmd.first, cmd.second, opts, args, out, err);
    err << app.help();
    return kExitUsage;
}

}  // namespace bpd::harness
