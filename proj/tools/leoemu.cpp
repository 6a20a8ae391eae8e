#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "leoemu/run.hpp"

int main(int argc, char** argv) {
    CLI::App app{"LEO satellite constellation network emulator (trace backend)"};
    app.require_subcommand(1);

    std::string config_path;
    bool allow_overprovision = false;
    auto* validate = app.add_subcommand("validate",
                                        "Validate a configuration and check host sizing");
    validate->add_option("config", config_path, "TOML configuration file")->required();
    validate->add_flag("--allow-overprovision", allow_overprovision,
                       "Accept configurations whose estimate exceeds host capacity");

    std::string run_config;
    leoemu::RunOptions run_options;
    bool fast = false;
    auto* run = app.add_subcommand("run", "Run the emulation and write a trace");
    run->add_option("config", run_config, "TOML configuration file")->required();
    run->add_option("--trace-dir", run_options.trace_dir, "Output trace directory")
        ->required();
    run->add_option("--seed-epoch", run_options.seed_epoch_s,
                    "Constellation phase at t=0, seconds")
        ->check(CLI::NonNegativeNumber);
    auto* rt = run->add_flag("--realtime", run_options.realtime,
                             "Pace epochs to the wall clock");
    run->add_flag("--fast", fast, "Run as fast as possible (default)")->excludes(rt);

    std::string inspect_config, src, dst;
    double inspect_epoch = 0.0;
    double inspect_seed = 0.0;
    auto* inspect = app.add_subcommand("inspect", "Compute one path at one epoch");
    inspect->add_option("config", inspect_config, "TOML configuration file")->required();
    inspect->add_option("--epoch", inspect_epoch, "Epoch time in seconds (default 0)")
        ->check(CLI::NonNegativeNumber);
    inspect->add_option("--seed-epoch", inspect_seed, "Constellation phase at t=0, seconds")
        ->check(CLI::NonNegativeNumber);
    inspect->add_option("src", src, "Source node (e.g. 878.0 or accra.gst)")->required();
    inspect->add_option("dst", dst, "Target node")->required();

    std::string trace_dir, format = "jsonl", out_dir;
    auto* exp = app.add_subcommand("export", "Export a trace as node/link record series");
    exp->add_option("trace-dir", trace_dir, "Trace directory of a completed run")->required();
    exp->add_option("--format", format, "csv or jsonl (default jsonl)");
    exp->add_option("--out-dir", out_dir, "Output directory (default <trace>/export)");

    CLI11_PARSE(app, argc, argv);

    if (validate->parsed())
        return leoemu::cmd_validate(config_path, allow_overprovision, std::cout);
    if (run->parsed()) return leoemu::cmd_run(run_config, run_options, std::cout);
    if (inspect->parsed())
        return leoemu::cmd_inspect(inspect_config, inspect_epoch, src, dst, std::cout,
                                   inspect_seed);
    if (exp->parsed()) {
        const std::filesystem::path trace(trace_dir);
        const std::filesystem::path out =
            out_dir.empty() ? trace / "export" : std::filesystem::path(out_dir);
        return leoemu::cmd_export(trace, format, out, std::cout);
    }
    return 1;
}
