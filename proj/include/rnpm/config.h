#ifndef RNPM_CONFIG_H
#define RNPM_CONFIG_H

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "rnpm/optics.h"
#include "rnpm/repeater.h"

namespace rnpm {

/// Schema violation in a run configuration; the CLI maps it to exit code 2.
class ConfigError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

struct PerfBlock {
    std::vector<DetectorKind> detectors;  // empty: the hardware detector
    std::vector<double> beta_sq;
    std::vector<double> t_a;
    std::vector<double> t_b;
    std::optional<int> k_max;
};

struct RepeaterBlock {
    std::vector<double> lengths_km;
    std::vector<double> target_fidelities{0.9};
    std::vector<DetectorKind> detectors;  // empty: the hardware detector
    int max_nesting = 20;
};

struct DistillBlock {
    std::vector<double> beta_sq{0.04, 0.08, 0.12};
    std::vector<double> fidelities;  // empty: 0.50, 0.51, ..., 1.00
};

/// Either explicit success probabilities or a chain whose probabilities are
/// computed from the hardware and geometry sections.
struct WaitingTimeCase {
    int nesting = 0;
    std::optional<double> p_gen;
    std::optional<double> p_swap;
    std::optional<double> length_km;
    std::optional<double> beta_g_sq;
    std::optional<double> beta_s_sq;
};

struct OutcomeCase {
    double beta_sq = 0.0;
    double t_a = 1.0;
    double t_b = 1.0;
};

struct MonteCarloBlock {
    std::uint64_t seed = 1;
    std::uint64_t trials = 100000;
    std::vector<WaitingTimeCase> waiting_time;
    std::vector<OutcomeCase> outcomes;
};

struct OpticsBlock {
    InteractionParams params;
    double t_a = 1.0;
    double t_b = 1.0;
    DisplacementVariant variant = DisplacementVariant::CentralDisplacement;
    bool fock_check = false;
};

struct RunConfig {
    Hardware hardware;
    StationGeometry geometry = StationGeometry::Midpoint;
    std::optional<PerfBlock> perf;
    std::optional<RepeaterBlock> repeater;
    std::optional<DistillBlock> distill;
    std::optional<MonteCarloBlock> montecarlo;
    std::optional<OpticsBlock> optics;

    /// Validates the document; unknown keys anywhere are rejected.
    static RunConfig from_json(const nlohmann::json &doc);
    static RunConfig parse(const std::string &text);
    static RunConfig load(const std::string &path);
    nlohmann::ordered_json to_json() const;
};

std::string_view variant_name(DisplacementVariant variant);
DisplacementVariant parse_variant(std::string_view name);

}  // namespace rnpm

#endif
