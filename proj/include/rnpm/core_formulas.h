#ifndef RNPM_CORE_FORMULAS_H
#define RNPM_CORE_FORMULAS_H

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace rnpm {

enum class DetectorKind { NumberResolving, SinglePhoton, Threshold };

std::string_view detector_name(DetectorKind kind);
/// Parses "number_resolving", "single_photon" or "threshold".
DetectorKind parse_detector(std::string_view name);

/// Photon detector pair at the middle station. Dark counts are always zero.
struct DetectorModel {
    DetectorKind kind = DetectorKind::NumberResolving;
    double efficiency = 1.0;

    void validate() const;
};

/// Channel lengths from Alice and Bob to the interfering station.
struct LinkGeometry {
    double length_a_km = 0.0;
    double length_b_km = 0.0;
    double attenuation_length_km = 22.0;
    double local_transmittance = 1.0;  // tau

    void validate() const;
};

/// Overall transmittances T_A, T_B of the two arms.
struct Transmittances {
    double a = 1.0;
    double b = 1.0;

    void validate() const;
};

/// Interaction strength of one pulse with a memory qubit.
///
/// Only the effective amplitude beta enters the analytic formulas. The optics
/// engine also needs the raw pulse amplitude and interaction angle; when they
/// are not given, theta = pi and alpha = beta are used (no displacement needed).
struct InteractionParams {
    double beta = 0.0;
    std::optional<double> alpha;
    std::optional<double> theta;

    static InteractionParams from_beta(double beta);
    static InteractionParams from_beta_sq(double beta_sq);
    /// beta = alpha * sin(theta / 2); theta must make beta non-negative.
    static InteractionParams from_pulse(double alpha, double theta);

    double beta_sq() const { return beta * beta; }
    double pulse_alpha() const;
    double pulse_theta() const;
    void validate() const;
};

/// Success probability and conditional phase-error probability of one attempt.
struct PerfPoint {
    double p = 0.0;
    double epsilon = 0.0;
};

/// Raised when a truncated sum cannot reach the requested tail bound.
class TruncationError : public std::runtime_error {
   public:
    TruncationError(const std::string &what, int required_order)
        : std::runtime_error(what), required_order(required_order) {}
    int required_order;
};

constexpr double kTailTolerance = 1e-12;
constexpr int kMaxTruncationOrder = 200;

double poisson_pmf(double lambda, int k);
double binomial_pmf(double q, int l, int k);

/// P(X > k) for X ~ Poisson(lambda).
double poisson_upper_tail(double lambda, int k);

/// Smallest k with P(X > k) <= tol for X ~ Poisson(lambda). Throws
/// TruncationError when this exceeds `cap`.
int truncation_order(double lambda, double tol = kTailTolerance, int cap = kMaxTruncationOrder);

/// Joint probability that modes ab carry k photons in total and that l of them
/// reach the detectors, closed form. Zero for l > k.
double q_infty(int k, int l, const InteractionParams &params, Transmittances t, double eta);

/// Same quantity as q_infty, evaluated from the per-mode binomial/Poisson
/// double sum without the binomial-theorem simplification.
double q_infty_double_sum(int k, int l, const InteractionParams &params, Transmittances t, double eta);

/// chi_l^{+} (sign = +1) or chi_l^{-} (sign = -1), closed form.
double chi(int l, int sign, const InteractionParams &params, Transmittances t, double eta);

/// Closed-form (p, epsilon) for the three detector kinds.
PerfPoint performance(const DetectorModel &detector, const InteractionParams &params, Transmittances t);

/// Brute-force (p, epsilon) by finite summation of Q(k, l) over k <= k_max,
/// applying the detector's outcome mapping. Throws TruncationError when the
/// photon-number tail beyond k_max exceeds kTailTolerance.
PerfPoint performance_oracle(
    const DetectorModel &detector, const InteractionParams &params, Transmittances t, int k_max);

/// performance_oracle with k_max chosen by truncation_order.
PerfPoint performance_oracle(const DetectorModel &detector, const InteractionParams &params, Transmittances t);

/// Poisson parameter of the total photon number in modes ab.
double photon_number_mean(const InteractionParams &params, Transmittances t);

Transmittances link_transmittance(const LinkGeometry &geometry);

/// exp(-length / attenuation_length).
double fiber_transmittance(double length_km, double attenuation_length_km);

}  // namespace rnpm

#endif
