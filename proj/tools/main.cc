#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "rnpm/commands.h"
#include "rnpm/parallel.h"

int main(int argc, char **argv) {
    CLI::App app{"Remote noisy parity measurement toolkit"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_path;
    std::string format_name = "csv";
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> trials;

    const char *descriptions[][2] = {
        {"perf", "Success probability and phase error, closed form next to the brute-force sum"},
        {"repeater", "Optimized communication time over a length grid"},
        {"distill", "One recurrence round on Werner pairs"},
        {"montecarlo", "Sampled waiting times and detector outcomes"},
        {"optics", "Outcome ensemble of the optical protocol"},
    };
    for (const auto &d : descriptions) {
        CLI::App *sub = app.add_subcommand(d[0], d[1]);
        sub->add_option("--config", config_path, "JSON run configuration")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", out_path, "Output file (default: stdout)");
        sub->add_option("--format", format_name, "Output format")->check(CLI::IsMember({"csv", "json"}));
        if (std::string(d[0]) == "montecarlo") {
            sub->add_option("--seed", seed, "Override montecarlo.seed");
            sub->add_option("--trials", trials, "Override montecarlo.trials");
        }
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    std::string command = app.get_subcommands().front()->get_name();

    rnpm::RunConfig config;
    try {
        config = rnpm::RunConfig::load(config_path);
        if (command == "montecarlo" && config.montecarlo) {
            if (seed) {
                config.montecarlo->seed = *seed;
            }
            if (trials) {
                if (*trials == 0) {
                    throw rnpm::ConfigError("--trials must be at least 1");
                }
                config.montecarlo->trials = *trials;
            }
        }
    } catch (const rnpm::ConfigError &e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }

    rnpm::OutputFormat format = rnpm::parse_format(format_name);
    std::ostringstream buffer;
    int code = rnpm::run_command(command, config, format, rnpm::worker_count(), buffer, std::cerr);
    if (out_path.empty()) {
        std::cout << buffer.str();
    } else {
        std::ofstream out(out_path);
        if (!out) {
            std::cerr << "error: cannot write '" << out_path << "'\n";
            return 1;
        }
        out << buffer.str();
    }
    return code;
}
