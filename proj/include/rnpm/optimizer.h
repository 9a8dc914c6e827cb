#ifndef RNPM_OPTIMIZER_H
#define RNPM_OPTIMIZER_H

#include <string>
#include <vector>

#include "rnpm/repeater.h"

namespace rnpm {

struct OptimizerSettings {
    int max_nesting = 20;
    double beta_sq_min = 1e-6;
    double beta_sq_max = 2.0;
    /// Width of the final golden-section bracket in log(beta_s^2).
    double golden_tolerance = 1e-6;
    /// Stop bisecting for beta_g once F at the bracket ends differs by less.
    double bisection_tolerance = 1e-12;
    /// Coarse scan points that seed the golden-section bracket.
    int scan_points = 24;

    void validate() const;
};

/// Minimum-time chain for one (L, F_target). When `feasible` is false the
/// numeric fields are NaN/inf and `error` says why.
struct OptimumRecord {
    double length_km = 0.0;
    double target_fidelity = 0.0;
    DetectorKind detector = DetectorKind::SinglePhoton;
    StationGeometry geometry = StationGeometry::Midpoint;
    bool feasible = false;
    int nesting = -1;
    double beta_g_sq = 0.0;
    double beta_s_sq = 0.0;
    double time_s = 0.0;
    double fidelity = 0.0;
    double direct_time_s = 0.0;
    std::string error;
};

/// Largest useful beta^2: beyond 1/(2 eta) a single-photon detector loses
/// success probability while the phase error keeps growing.
double beta_sq_upper(const DetectorModel &detector, const OptimizerSettings &settings);

/// Optimum at fixed nesting level. For n = 0 only beta_g matters and
/// beta_s_sq is reported as 0.
OptimumRecord optimize_fixed_nesting(
    double length_km, int nesting, double target_fidelity, const Hardware &hardware, StationGeometry geometry,
    const OptimizerSettings &settings = {});

/// Best over n = 0..max_nesting; ties go to the smaller n.
OptimumRecord optimize_chain(
    double length_km, double target_fidelity, const Hardware &hardware, StationGeometry geometry,
    DetectorKind detector, const OptimizerSettings &settings = {});

/// Exhaustive search over n <= max_nesting and a grid x grid log-spaced beta^2
/// lattice; a reference for the optimizer.
OptimumRecord brute_force_grid(
    double length_km, double target_fidelity, const Hardware &hardware, StationGeometry geometry, int max_nesting,
    int grid, const OptimizerSettings &settings = {});

struct SweepSpec {
    std::vector<double> lengths_km;
    std::vector<double> target_fidelities;
    Hardware hardware;
    StationGeometry geometry = StationGeometry::Midpoint;
    std::vector<DetectorKind> detectors{DetectorKind::SinglePhoton};

    void validate() const;
};

/// Records ordered by detector, then target fidelity, then length.
std::vector<OptimumRecord> sweep(const SweepSpec &spec, const OptimizerSettings &settings = {}, int threads = 0);

}  // namespace rnpm

#endif
