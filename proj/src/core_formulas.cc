#include "rnpm/core_formulas.h"

#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <numbers>
#include <vector>

namespace rnpm {

namespace {

// Natural log of base^exponent with 0^0 = 1; -inf for 0^(positive).
double log_power(double base, int exponent) {
    if (exponent == 0) {
        return 0.0;
    }
    if (base == 0.0) {
        return -INFINITY;
    }
    return exponent * std::log(base);
}

double log_factorial(int n) {
    return std::lgamma(static_cast<double>(n) + 1.0);
}

void require_probability(double q, const char *name) {
    if (!(q >= 0.0 && q <= 1.0)) {
        throw std::domain_error(std::string(name) + " must lie in [0, 1]");
    }
}

}  // namespace

std::string_view detector_name(DetectorKind kind) {
    switch (kind) {
        case DetectorKind::NumberResolving:
            return "number_resolving";
        case DetectorKind::SinglePhoton:
            return "single_photon";
        case DetectorKind::Threshold:
            return "threshold";
    }
    return "unknown";
}

DetectorKind parse_detector(std::string_view name) {
    if (name == "number_resolving") {
        return DetectorKind::NumberResolving;
    }
    if (name == "single_photon") {
        return DetectorKind::SinglePhoton;
    }
    if (name == "threshold") {
        return DetectorKind::Threshold;
    }
    throw std::invalid_argument("unknown detector kind '" + std::string(name) + "'");
}

void DetectorModel::validate() const {
    require_probability(efficiency, "detector efficiency");
}

void LinkGeometry::validate() const {
    if (!(length_a_km >= 0.0) || !(length_b_km >= 0.0)) {
        throw std::domain_error("channel lengths must be non-negative");
    }
    if (!(attenuation_length_km > 0.0)) {
        throw std::domain_error("attenuation length must be positive");
    }
    if (!(local_transmittance > 0.0 && local_transmittance <= 1.0)) {
        throw std::domain_error("local transmittance tau must lie in (0, 1]");
    }
}

void Transmittances::validate() const {
    if (!(a > 0.0 && a <= 1.0) || !(b > 0.0 && b <= 1.0)) {
        throw std::domain_error("transmittances must lie in (0, 1]");
    }
}

InteractionParams InteractionParams::from_beta(double beta) {
    InteractionParams r;
    r.beta = beta;
    r.validate();
    return r;
}

InteractionParams InteractionParams::from_beta_sq(double beta_sq) {
    if (!(beta_sq >= 0.0)) {
        throw std::domain_error("beta^2 must be non-negative");
    }
    return from_beta(std::sqrt(beta_sq));
}

InteractionParams InteractionParams::from_pulse(double alpha, double theta) {
    InteractionParams r;
    r.alpha = alpha;
    r.theta = theta;
    r.beta = alpha * std::sin(theta / 2.0);
    r.validate();
    return r;
}

double InteractionParams::pulse_alpha() const {
    return alpha.value_or(beta);
}

double InteractionParams::pulse_theta() const {
    return theta.value_or(std::numbers::pi);
}

void InteractionParams::validate() const {
    if (alpha.has_value() != theta.has_value()) {
        throw std::invalid_argument("alpha and theta must be given together");
    }
    if (alpha && !(*alpha >= 0.0)) {
        throw std::domain_error("alpha must be non-negative");
    }
    if (alpha && std::abs(*alpha * std::sin(*theta / 2.0) - beta) > 1e-12 * std::max(1.0, beta)) {
        throw std::invalid_argument("beta must equal alpha * sin(theta / 2)");
    }
    if (!(beta >= 0.0) || !std::isfinite(beta)) {
        throw std::domain_error("beta must be finite and non-negative");
    }
}

double poisson_pmf(double lambda, int k) {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
        throw std::domain_error("Poisson parameter must be finite and non-negative");
    }
    if (k < 0) {
        throw std::domain_error("Poisson count must be non-negative");
    }
    if (lambda == 0.0) {
        return k == 0 ? 1.0 : 0.0;
    }
    return std::exp(-lambda + k * std::log(lambda) - log_factorial(k));
}

double binomial_pmf(double q, int l, int k) {
    require_probability(q, "binomial success probability");
    if (l < 0 || k < 0) {
        throw std::domain_error("binomial counts must be non-negative");
    }
    if (l > k) {
        return 0.0;
    }
    double log_value = log_factorial(k) - log_factorial(l) - log_factorial(k - l) + log_power(q, l) +
                       log_power(1.0 - q, k - l);
    return std::exp(log_value);
}

double poisson_upper_tail(double lambda, int k) {
    if (!(lambda >= 0.0)) {
        throw std::domain_error("Poisson parameter must be non-negative");
    }
    if (k < 0) {
        return 1.0;
    }
    if (lambda == 0.0) {
        return 0.0;
    }
    // P(X > k) = P(X >= k + 1) is the lower regularized gamma P(k + 1, lambda).
    return boost::math::gamma_p(static_cast<double>(k) + 1.0, lambda);
}

int truncation_order(double lambda, double tol, int cap) {
    int k = 0;
    while (poisson_upper_tail(lambda, k) > tol) {
        ++k;
        if (k > cap) {
            int required = k;
            while (poisson_upper_tail(lambda, required) > tol) {
                ++required;
            }
            throw TruncationError(
                "photon-number tail exceeds tolerance at the truncation cap " + std::to_string(cap) +
                    "; required order " + std::to_string(required),
                required);
        }
    }
    return k;
}

double photon_number_mean(const InteractionParams &params, Transmittances t) {
    return params.beta_sq() * (1.0 / t.a + 1.0 / t.b);
}

double q_infty(int k, int l, const InteractionParams &params, Transmittances t, double eta) {
    params.validate();
    t.validate();
    require_probability(eta, "eta");
    if (k < 0 || l < 0) {
        throw std::domain_error("photon counts must be non-negative");
    }
    if (l > k) {
        return 0.0;
    }
    double b2 = params.beta_sq();
    double lost_rate = ((1.0 - eta * t.a) / t.a + (1.0 - eta * t.b) / t.b) * b2;
    double log_value = -photon_number_mean(params, t) - log_factorial(l) - log_factorial(k - l) +
                       log_power(2.0 * b2 * eta, l) + log_power(lost_rate, k - l);
    return std::exp(log_value);
}

double q_infty_double_sum(int k, int l, const InteractionParams &params, Transmittances t, double eta) {
    params.validate();
    t.validate();
    require_probability(eta, "eta");
    if (k < 0 || l < 0) {
        throw std::domain_error("photon counts must be non-negative");
    }
    if (l > k) {
        return 0.0;
    }
    double b2 = params.beta_sq();
    double total = 0.0;
    for (int la = 0; la <= l; la++) {
        for (int ka = la; ka <= la + (k - l); ka++) {
            total += binomial_pmf(eta * t.a, la, ka) * poisson_pmf(b2 / t.a, ka) *
                     binomial_pmf(eta * t.b, l - la, k - ka) * poisson_pmf(b2 / t.b, k - ka);
        }
    }
    return total;
}

double chi(int l, int sign, const InteractionParams &params, Transmittances t, double eta) {
    params.validate();
    t.validate();
    require_probability(eta, "eta");
    if (l < 0) {
        throw std::domain_error("chi index must be non-negative");
    }
    if (sign != 1 && sign != -1) {
        throw std::invalid_argument("chi sign must be +1 or -1");
    }
    double b2 = params.beta_sq();
    double x = 2.0 * b2 * eta;
    // 2 b^2 eta (1/(eta T_A) + 1/(eta T_B) - 1) written without dividing by eta.
    double decay = sign > 0 ? x : 2.0 * b2 * (1.0 / t.a + 1.0 / t.b - eta);
    return std::exp(log_power(x, l) - log_factorial(l) - decay);
}

PerfPoint performance(const DetectorModel &detector, const InteractionParams &params, Transmittances t) {
    detector.validate();
    params.validate();
    t.validate();
    double eta = detector.efficiency;
    double b2 = params.beta_sq();
    double x = 2.0 * b2 * eta;
    PerfPoint r;
    switch (detector.kind) {
        case DetectorKind::NumberResolving:
        case DetectorKind::Threshold:
            r.p = -std::expm1(-x);
            break;
        case DetectorKind::SinglePhoton:
            r.p = x * std::exp(-x);
            break;
    }
    double inv_sum = 1.0 / t.a + 1.0 / t.b;
    double dephasing = detector.kind == DetectorKind::Threshold ? 2.0 * b2 * (inv_sum - eta)
                                                                : 2.0 * b2 * (inv_sum - 2.0 * eta);
    r.epsilon = -0.5 * std::expm1(-dephasing);
    return r;
}

namespace {

// Q_inf(k, l) for all l <= k <= k_max by direct convolution of the two
// per-mode (emitted, detected) distributions.
std::vector<std::vector<double>> q_infty_table(const InteractionParams &params, Transmittances t, double eta, int k_max) {
    double b2 = params.beta_sq();
    auto mode_table = [&](double transmittance) {
        std::vector<std::vector<double>> m(k_max + 1, std::vector<double>(k_max + 1, 0.0));
        for (int ka = 0; ka <= k_max; ka++) {
            double pk = poisson_pmf(b2 / transmittance, ka);
            for (int la = 0; la <= ka; la++) {
                m[ka][la] = binomial_pmf(eta * transmittance, la, ka) * pk;
            }
        }
        return m;
    };
    auto ma = mode_table(t.a);
    auto mb = mode_table(t.b);
    std::vector<std::vector<double>> q(k_max + 1, std::vector<double>(k_max + 1, 0.0));
    for (int k = 0; k <= k_max; k++) {
        for (int l = 0; l <= k; l++) {
            double total = 0.0;
            for (int la = 0; la <= l; la++) {
                for (int ka = la; ka <= la + (k - l); ka++) {
                    total += ma[ka][la] * mb[k - ka][l - la];
                }
            }
            q[k][l] = total;
        }
    }
    return q;
}

}  // namespace

PerfPoint performance_oracle(
    const DetectorModel &detector, const InteractionParams &params, Transmittances t, int k_max) {
    detector.validate();
    params.validate();
    t.validate();
    if (k_max < 0) {
        throw std::domain_error("k_max must be non-negative");
    }
    double lambda = photon_number_mean(params, t);
    if (poisson_upper_tail(lambda, k_max) > kTailTolerance) {
        int required = truncation_order(lambda, kTailTolerance, 1 << 20);
        throw TruncationError(
            "k_max = " + std::to_string(k_max) + " leaves a photon-number tail above " +
                std::to_string(kTailTolerance) + "; required order " + std::to_string(required),
            required);
    }
    auto q_inf = q_infty_table(params, t, detector.efficiency, k_max);

    // Announced-count distribution Q(k, l) after the detector mapping.
    std::vector<std::vector<double>> q(k_max + 1, std::vector<double>(k_max + 1, 0.0));
    for (int k = 0; k <= k_max; k++) {
        for (int l = 0; l <= k; l++) {
            int announced = l;
            switch (detector.kind) {
                case DetectorKind::NumberResolving:
                    break;
                case DetectorKind::SinglePhoton:
                    announced = l == 1 ? 1 : 0;
                    break;
                case DetectorKind::Threshold:
                    announced = l >= 1 ? 1 : 0;
                    break;
            }
            q[k][announced] += q_inf[k][l];
        }
    }

    // p = sum_{l>=1} chi_l^+, and chi_l^+ - chi_l^- = 2 sum_{k-l odd} Q(k, l).
    double p = 0.0;
    double odd = 0.0;
    for (int k = 0; k <= k_max; k++) {
        for (int l = 1; l <= k; l++) {
            p += q[k][l];
            if ((k - l) % 2 != 0) {
                odd += q[k][l];
            }
        }
    }
    PerfPoint r;
    r.p = p;
    r.epsilon = p > 0.0 ? odd / p : 0.0;
    return r;
}

PerfPoint performance_oracle(const DetectorModel &detector, const InteractionParams &params, Transmittances t) {
    params.validate();
    t.validate();
    return performance_oracle(detector, params, t, truncation_order(photon_number_mean(params, t)));
}

double fiber_transmittance(double length_km, double attenuation_length_km) {
    return std::exp(-length_km / attenuation_length_km);
}

Transmittances link_transmittance(const LinkGeometry &geometry) {
    geometry.validate();
    return Transmittances{
        geometry.local_transmittance * fiber_transmittance(geometry.length_a_km, geometry.attenuation_length_km),
        geometry.local_transmittance * fiber_transmittance(geometry.length_b_km, geometry.attenuation_length_km),
    };
}

}  // namespace rnpm
