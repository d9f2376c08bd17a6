// Command-line front end for experiment campaigns.
//
// Exit codes: 0 success, 2 configuration error, 3 precondition error,
// 4 acceptance failure.

#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "rcga/experiment.hpp"

namespace {

struct CommonArgs {
    std::string config_path;
    std::string out_dir = "out";
    std::optional<uint64_t> seed;
    std::optional<int> threads;
    bool emit_plots = false;
};

void add_common(CLI::App* sub, CommonArgs& args) {
    sub->add_option("--config", args.config_path, "campaign configuration file")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--out", args.out_dir, "output directory for artifacts");
    sub->add_option("--seed", args.seed, "override the base seed");
    sub->add_option("--threads", args.threads, "worker threads (0 = hardware)");
    sub->add_flag("--emit-plots", args.emit_plots, "write SVG charts where supported");
}

int run_subcommand(const CommonArgs& args, rcga::ExperimentConfig::Kind kind) {
    rcga::ExperimentConfig cfg;
    try {
        cfg = rcga::parse_config_file(args.config_path);
    } catch (const rcga::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return static_cast<int>(rcga::CampaignStatus::config_error);
    }
    if (cfg.kind != kind) {
        std::cerr << "error: config kind does not match the subcommand\n";
        return static_cast<int>(rcga::CampaignStatus::config_error);
    }
    if (args.seed) cfg.base_seed = *args.seed;
    if (args.threads) cfg.threads = *args.threads;
    if (args.emit_plots) cfg.emit_plots = true;

    const rcga::CampaignResult result = rcga::run_campaign(cfg, args.out_dir);
    if (result.status != rcga::CampaignStatus::ok)
        std::cerr << "error: " << result.message << "\n";
    else
        std::cout << "artifacts written to " << args.out_dir << "\n";
    return static_cast<int>(result.status);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"r-valued compact genetic algorithm experiment harness"};
    app.require_subcommand(1);

    struct Subcommand {
        const char* name;
        const char* help;
        rcga::ExperimentConfig::Kind kind;
    };
    const Subcommand subcommands[] = {
        {"run", "single-cell repeated runs", rcga::ExperimentConfig::Kind::run},
        {"scaling", "runtime scaling study over an (n, r) grid",
         rcga::ExperimentConfig::Kind::scaling},
        {"drift", "genetic-drift study (step classification and mass series)",
         rcga::ExperimentConfig::Kind::drift},
        {"phases", "per-position phase study over the value hierarchy",
         rcga::ExperimentConfig::Kind::phases},
        {"verify", "Monte Carlo verification sweeps for the bound oracles",
         rcga::ExperimentConfig::Kind::verify},
    };

    CommonArgs args[std::size(subcommands)];
    for (size_t i = 0; i < std::size(subcommands); ++i) {
        CLI::App* sub = app.add_subcommand(subcommands[i].name, subcommands[i].help);
        add_common(sub, args[i]);
    }

    CLI11_PARSE(app, argc, argv);

    for (size_t i = 0; i < std::size(subcommands); ++i)
        if (app.get_subcommand(subcommands[i].name)->parsed())
            return run_subcommand(args[i], subcommands[i].kind);
    return static_cast<int>(rcga::CampaignStatus::config_error);
}
