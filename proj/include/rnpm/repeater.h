#ifndef RNPM_REPEATER_H
#define RNPM_REPEATER_H

#include <vector>

#include "rnpm/core_formulas.h"

namespace rnpm {

/// Station placement for elementary-link generation: the interfering station
/// halfway between neighbours (Midpoint) or co-located with one of them
/// (Endpoint, L_A = l0 and L_B = 0).
enum class StationGeometry { Midpoint, Endpoint };

std::string_view geometry_name(StationGeometry geometry);
StationGeometry parse_geometry(std::string_view name);

struct Hardware {
    double local_transmittance = 0.98;  // tau
    DetectorModel detector{DetectorKind::SinglePhoton, 0.95};
    double attenuation_length_km = 22.0;
    double light_speed_m_per_s = 2e8;
    double source_rate_hz = 1e10;  // direct-transmission baseline only

    void validate() const;
};

/// Nested repeater over total length L with 2^n elementary links. Memories do
/// not decohere while waiting.
struct ChainConfig {
    double length_km = 0.0;
    int nesting = 0;
    InteractionParams generation;
    InteractionParams swapping;
    Hardware hardware;
    StationGeometry geometry = StationGeometry::Midpoint;

    double elementary_length_km() const;
    /// One trial of elementary-link generation, l0 / c, in seconds.
    double elementary_time_s() const;
    void validate() const;
};

/// Phase error and average completion time of a pair at one nesting level.
struct LevelState {
    double epsilon = 0.0;
    double time_s = 0.0;
};

struct ChainResult {
    double total_time_s = 0.0;
    double fidelity = 1.0;
    std::vector<double> eps_levels;
    std::vector<double> t_levels;
};

/// Performance of one elementary-link generation attempt for the geometry.
PerfPoint generation_performance(const ChainConfig &config);
/// Performance of the local parity measurement used in a swap.
PerfPoint swap_performance(const InteractionParams &swapping, const Hardware &hardware);

/// Throws std::domain_error when the generation success probability is zero.
LevelState generation_step(const ChainConfig &config);
LevelState connect_step(const LevelState &level, const InteractionParams &swapping, const Hardware &hardware);

/// Iterates generation_step and connect_step n times.
ChainResult chain_recursive(const ChainConfig &config);
/// Solved form of the same recursions.
ChainResult chain_closed_form(const ChainConfig &config);

double binary_entropy(double x);
/// 1 - h(F); the secret-key fraction for a pair with a single error type.
double key_rate(double fidelity);

/// (f eta exp(-L / L_att))^-1 in seconds.
double direct_transmission_time(double length_km, double source_rate_hz, double eta, double attenuation_length_km);

}  // namespace rnpm

#endif
