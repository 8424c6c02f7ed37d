// Command-line front end: `sscat sweep|bands|poles --config <file>`.
// The config file is the single source of truth for physics parameters;
// environment variables are never consulted.  --out/--format/--threads
// override the corresponding config keys.
//
// Exit codes: 0 success, 2 config error, 3 numerical failure (singularity),
// 4 I/O error.

#include <CLI11.hpp>

#include <iostream>

#include "sscat/sweep.hpp"

namespace {

struct CommonFlags {
    std::string config_path;
    std::string out;
    std::string format;
    int threads = 0;
};

void add_common(CLI::App* cmd, CommonFlags* flags) {
    cmd->add_option("--config", flags->config_path, "config file (key = value lines)")
        ->required();
    cmd->add_option("--out", flags->out, "output path (default: config 'out' or stdout)");
    cmd->add_option("--format", flags->format, "csv | json (overrides config)")
        ->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--threads", flags->threads, "worker threads (overrides config)")
        ->check(CLI::PositiveNumber);
}

int run(const CommonFlags& flags, sscat::Table (*task)(const sscat::SweepConfig&)) {
    sscat::SweepConfig cfg;
    try {
        cfg = sscat::load_config(flags.config_path);
    } catch (const sscat::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::ios_base::failure& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    }
    if (!flags.out.empty()) cfg.out = flags.out;
    if (!flags.format.empty())
        cfg.format = flags.format == "csv" ? sscat::OutputFormat::csv
                                           : sscat::OutputFormat::json;
    if (flags.threads > 0) cfg.threads = flags.threads;

    sscat::Table table;
    try {
        table = task(cfg);
    } catch (const sscat::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const sscat::SingularityError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    }
    try {
        sscat::write_table(table, cfg, std::cout);
    } catch (const std::ios_base::failure& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"serial single-mode scatterer sweeps, band maps and pole searches"};
    app.require_subcommand(1);

    CommonFlags sweep_flags, bands_flags, poles_flags;
    CLI::App* sweep = app.add_subcommand("sweep", "transmission/reflection sweep");
    add_common(sweep, &sweep_flags);
    CLI::App* bands = app.add_subcommand("bands", "band intervals / band map");
    add_common(bands, &bands_flags);
    CLI::App* poles = app.add_subcommand("poles", "resonance pole search (comb)");
    add_common(poles, &poles_flags);

    CLI11_PARSE(app, argc, argv);

    if (sweep->parsed()) return run(sweep_flags, &sscat::run_sweep);
    if (bands->parsed()) return run(bands_flags, &sscat::run_bands);
    return run(poles_flags, &sscat::run_poles);
}
