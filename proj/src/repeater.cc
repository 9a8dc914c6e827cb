#include "rnpm/repeater.h"

#include <cmath>
#include <stdexcept>
#include <string>

namespace rnpm {

namespace {

constexpr double kMetersPerKm = 1000.0;

// base^exponent for base in [0, 1] with 0^0 = 1, via log1p for accuracy.
double unit_power(double one_minus_base, double exponent) {
    if (exponent == 0.0) {
        return 1.0;
    }
    if (one_minus_base >= 1.0) {
        return 0.0;
    }
    return std::exp(exponent * std::log1p(-one_minus_base));
}

}  // namespace

std::string_view geometry_name(StationGeometry geometry) {
    return geometry == StationGeometry::Midpoint ? "midpoint" : "endpoint";
}

StationGeometry parse_geometry(std::string_view name) {
    if (name == "midpoint") {
        return StationGeometry::Midpoint;
    }
    if (name == "endpoint") {
        return StationGeometry::Endpoint;
    }
    throw std::invalid_argument("unknown geometry '" + std::string(name) + "'");
}

void Hardware::validate() const {
    detector.validate();
    if (!(local_transmittance > 0.0 && local_transmittance <= 1.0)) {
        throw std::domain_error("local transmittance tau must lie in (0, 1]");
    }
    if (!(attenuation_length_km > 0.0)) {
        throw std::domain_error("attenuation length must be positive");
    }
    if (!(light_speed_m_per_s > 0.0)) {
        throw std::domain_error("speed of light in fiber must be positive");
    }
    if (!(source_rate_hz > 0.0)) {
        throw std::domain_error("source rate must be positive");
    }
}

double ChainConfig::elementary_length_km() const {
    return length_km / std::ldexp(1.0, nesting);
}

double ChainConfig::elementary_time_s() const {
    return elementary_length_km() * kMetersPerKm / hardware.light_speed_m_per_s;
}

void ChainConfig::validate() const {
    hardware.validate();
    generation.validate();
    swapping.validate();
    if (nesting < 0 || nesting > 60) {
        throw std::domain_error("nesting level must lie in [0, 60]");
    }
    if (!(length_km > 0.0) || !std::isfinite(length_km)) {
        throw std::domain_error("total length must be positive");
    }
}

PerfPoint generation_performance(const ChainConfig &config) {
    config.validate();
    double tau = config.hardware.local_transmittance;
    double att = config.hardware.attenuation_length_km;
    double l0 = config.elementary_length_km();
    Transmittances t;
    if (config.geometry == StationGeometry::Midpoint) {
        t.a = tau * fiber_transmittance(l0 / 2.0, att);
        t.b = t.a;
    } else {
        t.a = tau * fiber_transmittance(l0, att);
        t.b = tau;
    }
    return performance(config.hardware.detector, config.generation, t);
}

PerfPoint swap_performance(const InteractionParams &swapping, const Hardware &hardware) {
    hardware.validate();
    double tau = hardware.local_transmittance;
    return performance(hardware.detector, swapping, Transmittances{tau, tau});
}

LevelState generation_step(const ChainConfig &config) {
    PerfPoint g = generation_performance(config);
    if (!(g.p > 0.0)) {
        throw std::domain_error("entanglement generation never succeeds (p = 0)");
    }
    return LevelState{g.epsilon, config.elementary_time_s() / g.p};
}

LevelState connect_step(const LevelState &level, const InteractionParams &swapping, const Hardware &hardware) {
    if (!(level.epsilon >= 0.0 && level.epsilon <= 0.5)) {
        throw std::domain_error("phase error must lie in [0, 1/2]");
    }
    PerfPoint s = swap_performance(swapping, hardware);
    double f = 1.0 - 2.0 * level.epsilon;
    LevelState next;
    next.epsilon = 0.5 * (1.0 - f * f * (1.0 - 2.0 * s.epsilon));
    next.time_s = 1.5 * level.time_s / s.p;
    return next;
}

ChainResult chain_recursive(const ChainConfig &config) {
    LevelState level = generation_step(config);
    ChainResult r;
    r.eps_levels.push_back(level.epsilon);
    r.t_levels.push_back(level.time_s);
    for (int j = 0; j < config.nesting; j++) {
        level = connect_step(level, config.swapping, config.hardware);
        r.eps_levels.push_back(level.epsilon);
        r.t_levels.push_back(level.time_s);
    }
    r.total_time_s = level.time_s;
    r.fidelity = 1.0 - level.epsilon;
    return r;
}

ChainResult chain_closed_form(const ChainConfig &config) {
    PerfPoint g = generation_performance(config);
    if (!(g.p > 0.0)) {
        throw std::domain_error("entanglement generation never succeeds (p = 0)");
    }
    PerfPoint s = swap_performance(config.swapping, config.hardware);
    double t0 = config.elementary_time_s() / g.p;
    ChainResult r;
    for (int j = 0; j <= config.nesting; j++) {
        double links = std::ldexp(1.0, j);
        double visibility = unit_power(2.0 * g.epsilon, links) * unit_power(2.0 * s.epsilon, links - 1.0);
        r.eps_levels.push_back(0.5 * (1.0 - visibility));
        r.t_levels.push_back(j == 0 ? t0 : t0 * std::pow(1.5 / s.p, j));
    }
    r.total_time_s = r.t_levels.back();
    r.fidelity = 1.0 - r.eps_levels.back();
    return r;
}

double binary_entropy(double x) {
    if (!(x >= 0.0 && x <= 1.0)) {
        throw std::domain_error("binary entropy argument must lie in [0, 1]");
    }
    auto term = [](double v) { return v > 0.0 ? -v * std::log2(v) : 0.0; };
    return term(x) + term(1.0 - x);
}

double key_rate(double fidelity) {
    return 1.0 - binary_entropy(fidelity);
}

double direct_transmission_time(double length_km, double source_rate_hz, double eta, double attenuation_length_km) {
    if (!(source_rate_hz > 0.0)) {
        throw std::domain_error("source rate must be positive");
    }
    if (!(eta > 0.0 && eta <= 1.0)) {
        throw std::domain_error("detector efficiency must lie in (0, 1]");
    }
    if (!(length_km >= 0.0) || !(attenuation_length_km > 0.0)) {
        throw std::domain_error("invalid length or attenuation length");
    }
    return std::exp(length_km / attenuation_length_km) / (source_rate_hz * eta);
}

}  // namespace rnpm
