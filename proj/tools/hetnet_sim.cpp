// hetnet-sim: command-line front end for the multi-tier network simulator.
//
//   hetnet-sim fig2 [--config f.ini] [--set key=value]... [--seed N] [--jobs N] [--out dir]
//   hetnet-sim fig3 ...
//   hetnet-sim sweep --config f.ini ...
//   hetnet-sim oracle-check [--count N] [--seed N]

#include "hetnet/config.hpp"
#include "hetnet/errors.hpp"
#include "hetnet/harness.hpp"
#include "hetnet/oracle_check.hpp"
#include "hetnet/report.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

enum ExitCode : int {
    kOk = 0,
    kConfigError = 2,
    kNumericError = 3,
    kIoError = 4,
    kOracleMismatch = 5,
};

struct RunArgs
{
    std::string config;
    std::string out;
    std::vector<std::string> overrides;
    std::optional<std::uint64_t> seed;
    int jobs = 1;
};

void add_run_options(CLI::App* cmd, RunArgs& args)
{
    cmd->add_option("--config", args.config, "Config file (sectioned key = value)");
    cmd->add_option("--out", args.out, "Output directory");
    cmd->add_option("--set", args.overrides, "Override a config key (key=value), repeatable");
    cmd->add_option("--seed", args.seed, "Base seed (overrides mc.base_seed)");
    cmd->add_option("--jobs", args.jobs, "Worker threads")->check(CLI::Range(1, 1024));
}

hetnet::SimConfig load(const RunArgs& args, std::string_view preset)
{
    std::vector<std::string> overrides = args.overrides;
    if (args.seed)
        overrides.push_back("mc.base_seed=" + std::to_string(*args.seed));
    if (args.config.empty())
        return hetnet::parse_config_text(preset, overrides);
    return hetnet::parse_config(args.config, overrides);
}

void print_report(const hetnet::MetricsReport& report)
{
    std::cout << fmt::format("{:>8} {:>8} {:>10} {:>10} {:>10} {:>12} {:>10} {:>8}\n", "n_small", "alg", "scheme",
                             "hpue_out", "lpue_out", "agg_power_w", "SE", "conv");
    for (const auto& r : report.rows)
    {
        auto ratio = [](const std::optional<double>& v) { return v ? fmt::format("{:.4f}", *v) : std::string("-"); };
        std::cout << fmt::format("{:>8} {:>8} {:>10} {:>10} {:>10} {:>12.4e} {:>10.4f} {:>8.3f}\n", r.sweep_value,
                                 hetnet::to_string(r.run.algorithm), hetnet::to_string(r.run.scheme),
                                 ratio(r.hpue_outage), ratio(r.lpue_outage), r.agg_power, r.spectral_eff,
                                 r.convergence_rate);
    }
}

int run_experiment(const std::string& name, const RunArgs& args)
{
    std::string_view preset = name == "fig3" ? hetnet::fig3_default_text() : hetnet::fig2_default_text();
    const hetnet::SimConfig cfg = load(args, preset);

    hetnet::MetricsReport report;
    if (name == "fig2")
        report = hetnet::experiment_fig2(cfg, args.jobs);
    else if (name == "fig3")
        report = hetnet::experiment_fig3(cfg, args.jobs);
    else
        report = hetnet::run_monte_carlo(cfg, args.jobs);

    const std::string out = args.out.empty() ? "out/" + name : args.out;
    const auto files = hetnet::emit_report(report, out);
    print_report(report);
    std::cout << fmt::format("wrote {} files to {}\n", files.size(), out);
    return kOk;
}

int run_oracle_check(int count, std::uint64_t seed)
{
    const hetnet::OracleCheckSummary s = hetnet::oracle_check(count, seed);
    for (const auto& f : s.failures)
        std::cout << "FAIL " << f << "\n";
    std::cout << fmt::format("oracle-check: {}/{} instances passed ({:.2f}%)\n", s.passed, s.instances,
                             100.0 * s.pass_rate());
    return s.ok() ? kOk : kOracleMismatch;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Monte Carlo simulator for prioritized multi-tier cellular networks"};
    app.require_subcommand(1);

    RunArgs fig2_args;
    RunArgs fig3_args;
    RunArgs sweep_args;
    add_run_options(app.add_subcommand("fig2", "Uplink outage vs small cells per macro"), fig2_args);
    add_run_options(app.add_subcommand("fig3", "Downlink spectral efficiency of association schemes"), fig3_args);
    auto* sweep = app.add_subcommand("sweep", "Single algorithm/scheme sweep taken from the config");
    add_run_options(sweep, sweep_args);

    int count = 1000;
    std::uint64_t oracle_seed = 1;
    auto* oracle = app.add_subcommand("oracle-check", "Cross-check TPC iteration against exact oracles");
    oracle->add_option("--count", count, "Instances per check")->check(CLI::PositiveNumber);
    oracle->add_option("--seed", oracle_seed, "Instance seed");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e)
    {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfigError;
    }

    try
    {
        if (app.got_subcommand("fig2"))
            return run_experiment("fig2", fig2_args);
        if (app.got_subcommand("fig3"))
            return run_experiment("fig3", fig3_args);
        if (app.got_subcommand("sweep"))
            return run_experiment("sweep", sweep_args);
        return run_oracle_check(count, oracle_seed);
    }
    catch (const hetnet::ConfigError& e)
    {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigError;
    }
    catch (const hetnet::IoError& e)
    {
        std::cerr << "I/O error: " << e.what() << "\n";
        return kIoError;
    }
    catch (const hetnet::Error& e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return kNumericError;
    }
}
