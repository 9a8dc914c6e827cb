#include <cmath>
#include <random>

#include "doctest.h"
#include "rnpm/gadgets.h"
#include "rnpm/repeater.h"

using namespace rnpm;

namespace {

ChainConfig base_config(int nesting, double length_km = 400.0) {
    ChainConfig c;
    c.length_km = length_km;
    c.nesting = nesting;
    c.generation = InteractionParams::from_beta_sq(0.004);
    c.swapping = InteractionParams::from_beta_sq(0.12);
    c.hardware.local_transmittance = 0.98;
    c.hardware.detector = {DetectorKind::SinglePhoton, 0.95};
    return c;
}

}  // namespace

TEST_CASE("generation step arithmetic") {
    ChainConfig c = base_config(0, 20.0);
    c.hardware.light_speed_m_per_s = 2e8;
    double p = generation_performance(c).p;
    LevelState s = generation_step(c);
    CHECK(s.time_s == doctest::Approx(1e-4 / p).epsilon(1e-14));

    // Midpoint: both arms see half the elementary length.
    double t_half = 0.98 * std::exp(-10.0 / 22.0);
    PerfPoint mid = performance(c.hardware.detector, c.generation, {t_half, t_half});
    CHECK(s.epsilon == doctest::Approx(mid.epsilon).epsilon(1e-15));

    c.geometry = StationGeometry::Endpoint;
    PerfPoint end = performance(c.hardware.detector, c.generation, {0.98 * std::exp(-20.0 / 22.0), 0.98});
    CHECK(generation_step(c).epsilon == doctest::Approx(end.epsilon).epsilon(1e-15));

    c.generation = InteractionParams::from_beta(0.0);
    CHECK_THROWS_AS(generation_step(c), std::domain_error);
}

TEST_CASE("connection step edge cases") {
    Hardware hw;
    hw.local_transmittance = 1.0;
    hw.detector = {DetectorKind::NumberResolving, 1.0};
    auto swap = InteractionParams::from_beta_sq(0.1);
    LevelState clean = connect_step({0.0, 1.0}, swap, hw);
    CHECK(clean.epsilon == 0.0);
    double ps = performance(hw.detector, swap, {1.0, 1.0}).p;
    CHECK(clean.time_s == doctest::Approx(1.5 / ps).epsilon(1e-15));
    hw.detector = {DetectorKind::Threshold, 0.9};
    CHECK(connect_step({0.5, 1.0}, swap, hw).epsilon == doctest::Approx(0.5).epsilon(1e-15));
    CHECK_THROWS_AS(connect_step({0.6, 1.0}, swap, hw), std::domain_error);
}

TEST_CASE("connection step agrees with gadget-level swapping") {
    ChainConfig c = base_config(1);
    double eps_j = 0.03;
    LevelState next = connect_step({eps_j, 1.0}, c.swapping, c.hardware);
    double eps_s = swap_performance(c.swapping, c.hardware).epsilon;

    DensityMatrix pair = DensityMatrix::from_pure(states::phi_plus());
    pair.apply_phase_flip(eps_j, 1);
    DensityMatrix average = DensityMatrix(2).scaled(0.0);
    for (const auto &o : bell_measurement(pair.tensor(pair), 1, 2, eps_s, 3)) {
        average = DensityMatrix(Eigen::MatrixXcd(average.matrix() + o.probability * o.corrected().matrix()));
    }
    CHECK(1.0 - average.fidelity(states::phi_plus()) == doctest::Approx(next.epsilon).epsilon(1e-12));
}

TEST_CASE("closed form equals the iterated recursion") {
    for (auto geometry : {StationGeometry::Midpoint, StationGeometry::Endpoint}) {
        for (int n = 0; n <= 12; n++) {
            ChainConfig c = base_config(n, 1000.0);
            c.geometry = geometry;
            ChainResult closed = chain_closed_form(c);
            ChainResult rec = chain_recursive(c);
            REQUIRE(closed.eps_levels.size() == static_cast<std::size_t>(n + 1));
            for (int j = 0; j <= n; j++) {
                CHECK(std::abs(closed.eps_levels[j] - rec.eps_levels[j]) < 1e-12);
                CHECK(closed.t_levels[j] == doctest::Approx(rec.t_levels[j]).epsilon(1e-12));
            }
            CHECK(std::abs(closed.fidelity - rec.fidelity) < 1e-12);
            CHECK(closed.total_time_s == doctest::Approx(rec.total_time_s).epsilon(1e-12));
        }
    }
}

TEST_CASE("hand-derived chains") {
    ChainConfig c0 = base_config(0, 50.0);
    PerfPoint g0 = generation_performance(c0);
    ChainResult r0 = chain_closed_form(c0);
    CHECK(r0.total_time_s == doctest::Approx(50e3 / 2e8 / g0.p).epsilon(1e-15));
    CHECK(r0.fidelity == doctest::Approx(1.0 - g0.epsilon).epsilon(1e-15));

    ChainConfig c1 = base_config(1, 100.0);
    PerfPoint g1 = generation_performance(c1);
    PerfPoint s1 = swap_performance(c1.swapping, c1.hardware);
    ChainResult r1 = chain_closed_form(c1);
    double vis = (1 - 2 * g1.epsilon) * (1 - 2 * g1.epsilon) * (1 - 2 * s1.epsilon);
    CHECK(2 * r1.fidelity - 1 == doctest::Approx(vis).epsilon(1e-14));
    CHECK(r1.total_time_s == doctest::Approx(50e3 / 2e8 * 1.5 / (g1.p * s1.p)).epsilon(1e-14));
}

TEST_CASE("fidelity falls and time grows with distance") {
    for (int n : {0, 2, 4}) {
        double prev_f = 1.0;
        double prev_t = 0.0;
        for (double length = 50.0; length <= 1000.0; length += 50.0) {
            ChainResult r = chain_closed_form(base_config(n, length));
            CHECK(r.fidelity <= prev_f);
            CHECK(r.total_time_s > prev_t);
            CHECK(r.fidelity >= 0.5);
            prev_f = r.fidelity;
            prev_t = r.total_time_s;
        }
    }
}

TEST_CASE("key rate and entropy") {
    CHECK(key_rate(1.0) == 1.0);
    CHECK(key_rate(0.0) == 1.0);
    CHECK(key_rate(0.5) == doctest::Approx(0.0).scale(1.0).epsilon(1e-15));
    double h = -(0.9 * std::log2(0.9) + 0.1 * std::log2(0.1));
    CHECK(key_rate(0.9) == doctest::Approx(1.0 - h).epsilon(1e-15));
    CHECK(key_rate(0.9) > 0.0);
    CHECK(binary_entropy(0.3) == doctest::Approx(binary_entropy(0.7)).epsilon(1e-15));
    CHECK_THROWS_AS(binary_entropy(1.2), std::domain_error);
}

TEST_CASE("direct transmission baseline") {
    CHECK(direct_transmission_time(0.0, 1e10, 0.9, 22.0) == doctest::Approx(1.0 / 9e9).epsilon(1e-15));
    CHECK(direct_transmission_time(22.0, 1e10, 0.9, 22.0) == doctest::Approx(std::exp(1.0) / 9e9).epsilon(1e-15));
    double a = direct_transmission_time(100.0, 1e10, 0.95, 22.0);
    double b = direct_transmission_time(200.0, 1e10, 0.95, 22.0);
    CHECK(b / a == doctest::Approx(std::exp(100.0 / 22.0)).epsilon(1e-12));
    CHECK_THROWS_AS(direct_transmission_time(10.0, 0.0, 0.9, 22.0), std::domain_error);
}

TEST_CASE("scaling with beta proportional to the elementary length") {
    // beta_g^2 ~ beta_s^2 ~ l0 / L keeps the final fidelity away from 1/2.
    for (double length : {400.0, 800.0, 1600.0}) {
        int n = static_cast<int>(std::round(std::log2(length / 25.0)));
        ChainConfig c = base_config(n, length);
        double links = std::ldexp(1.0, n);
        c.generation = InteractionParams::from_beta_sq(0.05 / links);
        c.swapping = InteractionParams::from_beta_sq(0.05 / links);
        CHECK(chain_closed_form(c).fidelity > 0.6);
    }
}

TEST_CASE("configuration validation") {
    ChainConfig c = base_config(-1);
    CHECK_THROWS_AS(chain_closed_form(c), std::domain_error);
    c = base_config(2, 0.0);
    CHECK_THROWS_AS(chain_closed_form(c), std::domain_error);
    c = base_config(2);
    c.hardware.local_transmittance = 1.5;
    CHECK_THROWS_AS(chain_recursive(c), std::domain_error);
    CHECK(parse_geometry("endpoint") == StationGeometry::Endpoint);
    CHECK_THROWS_AS(parse_geometry("offset"), std::invalid_argument);
}
