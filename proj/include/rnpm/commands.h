#ifndef RNPM_COMMANDS_H
#define RNPM_COMMANDS_H

#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "rnpm/config.h"

namespace rnpm {

enum class OutputFormat { Csv, Json };

OutputFormat parse_format(std::string_view name);

/// Column-ordered result table. Cells are JSON scalars; null renders as an
/// empty CSV field.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<nlohmann::ordered_json>> rows;

    void add_row(std::vector<nlohmann::ordered_json> row);
    std::string to_csv() const;
    /// Array of row objects keyed by column name.
    nlohmann::ordered_json to_json() const;
};

/// Numbers in CSV cells use the shortest round-trip representation.
std::string format_number(double value);

Table cmd_perf(const RunConfig &config);
/// Sets `all_infeasible` when no grid point reached its target fidelity.
Table cmd_repeater(const RunConfig &config, int threads, bool *all_infeasible = nullptr);
Table cmd_distill(const RunConfig &config);
Table cmd_montecarlo(const RunConfig &config, int threads);
nlohmann::ordered_json cmd_optics(const RunConfig &config);
Table optics_table(const nlohmann::ordered_json &dump);

/// Runs a subcommand and writes its output. Returns the process exit code:
/// 0 success, 2 configuration error, 3 sweep with only infeasible points,
/// 1 any other failure.
int run_command(const std::string &command, const RunConfig &config, OutputFormat format, int threads,
                std::ostream &out, std::ostream &err);

}  // namespace rnpm

#endif
