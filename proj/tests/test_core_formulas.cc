#include <cmath>
#include <map>
#include <random>

#include "doctest.h"
#include "rnpm/core_formulas.h"

using namespace rnpm;

namespace {

double naive_poisson(double lambda, int k) {
    double v = std::exp(-lambda);
    for (int i = 1; i <= k; i++) {
        v *= lambda / i;
    }
    return v;
}

double naive_binomial(double q, int l, int k) {
    if (l > k) {
        return 0.0;
    }
    double c = 1.0;
    for (int i = 0; i < l; i++) {
        c = c * (k - i) / (i + 1);
    }
    return c * std::pow(q, l) * std::pow(1.0 - q, k - l);
}

// Joint law of (total photons k, detected photons l) by enumerating the photon
// numbers in each arm separately.
std::map<std::pair<int, int>, double> per_arm_enumeration(double beta_sq, double ta, double tb, double eta, int kmax) {
    std::map<std::pair<int, int>, double> q;
    for (int ka = 0; ka <= kmax; ka++) {
        for (int kb = 0; kb <= kmax; kb++) {
            for (int la = 0; la <= ka; la++) {
                for (int lb = 0; lb <= kb; lb++) {
                    double w = naive_poisson(beta_sq / ta, ka) * naive_binomial(eta * ta, la, ka) *
                               naive_poisson(beta_sq / tb, kb) * naive_binomial(eta * tb, lb, kb);
                    q[{ka + kb, la + lb}] += w;
                }
            }
        }
    }
    return q;
}

// Success when some photon is seen (exactly one for SinglePhoton); the
// correction assumes the detected count is l (or 1 for Threshold), and an
// error remains when the total photon number differs from it by an odd amount.
PerfPoint enumeration_oracle(DetectorKind kind, double beta_sq, double ta, double tb, double eta) {
    auto q = per_arm_enumeration(beta_sq, ta, tb, eta, 28);
    double p = 0.0;
    double odd = 0.0;
    for (const auto &[key, w] : q) {
        auto [k, l] = key;
        bool success = kind == DetectorKind::SinglePhoton ? l == 1 : l >= 1;
        if (!success) {
            continue;
        }
        int assumed = kind == DetectorKind::Threshold ? 1 : l;
        p += w;
        if ((k - assumed) % 2 != 0) {
            odd += w;
        }
    }
    return PerfPoint{p, p > 0 ? odd / p : 0.0};
}

}  // namespace

TEST_CASE("poisson and binomial pmfs") {
    for (double lambda : {0.0, 1e-3, 0.4, 3.0, 25.0}) {
        double sum = 0.0;
        for (int k = 0; k < 120; k++) {
            sum += poisson_pmf(lambda, k);
            if (k < 60) {
                CHECK(poisson_pmf(lambda, k) == doctest::Approx(naive_poisson(lambda, k)).epsilon(1e-12));
            }
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-13));
    }
    CHECK(poisson_pmf(0.0, 0) == 1.0);
    CHECK(poisson_pmf(0.0, 3) == 0.0);
    CHECK(binomial_pmf(0.3, 2, 5) == doctest::Approx(10 * 0.09 * 0.343).epsilon(1e-14));
    CHECK(binomial_pmf(0.3, 6, 5) == 0.0);
    CHECK(binomial_pmf(1.0, 5, 5) == 1.0);
    CHECK(binomial_pmf(0.0, 0, 4) == 1.0);
    CHECK_THROWS_AS(poisson_pmf(-1.0, 0), std::domain_error);
    CHECK_THROWS_AS(poisson_pmf(1.0, -1), std::domain_error);
}

TEST_CASE("poisson tail and truncation order") {
    for (double lambda : {0.01, 0.5, 2.0, 10.0}) {
        for (int k : {0, 1, 4, 12}) {
            double above = 0.0;
            for (int i = k + 1; i <= k + 150; i++) {
                above += naive_poisson(lambda, i);
            }
            CHECK(poisson_upper_tail(lambda, k) == doctest::Approx(above).epsilon(1e-10));
        }
        int k = truncation_order(lambda, 1e-12);
        CHECK(poisson_upper_tail(lambda, k) <= 1e-12);
        if (k > 0) {
            CHECK(poisson_upper_tail(lambda, k - 1) > 1e-12);
        }
    }
    CHECK(truncation_order(0.0, 1e-12) == 0);
    try {
        truncation_order(500.0, 1e-12, 200);
        FAIL("expected a truncation error");
    } catch (const TruncationError &e) {
        CHECK(e.required_order > 200);
    }
}

TEST_CASE("joint photon law: closed form against per-arm enumeration") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 6; trial++) {
        double beta_sq = 0.01 + 0.3 * u(rng);
        double ta = 0.2 + 0.8 * u(rng);
        double tb = 0.2 + 0.8 * u(rng);
        double eta = 0.5 + 0.5 * u(rng);
        auto params = InteractionParams::from_beta_sq(beta_sq);
        auto q = per_arm_enumeration(beta_sq, ta, tb, eta, 16);
        for (int k = 0; k <= 6; k++) {
            for (int l = 0; l <= k; l++) {
                double expected = q[{k, l}];
                CHECK(q_infty(k, l, params, {ta, tb}, eta) == doctest::Approx(expected).epsilon(1e-10).scale(1e-15));
                CHECK(q_infty_double_sum(k, l, params, {ta, tb}, eta) ==
                      doctest::Approx(expected).epsilon(1e-10).scale(1e-15));
            }
            CHECK(q_infty(k, k + 1, params, {ta, tb}, eta) == 0.0);
        }
    }
}

TEST_CASE("joint photon law at the lossless corner") {
    // T = eta = 1: every photon is detected, so Q(k, l) = 0 unless k = l.
    auto params = InteractionParams::from_beta_sq(0.2);
    CHECK(q_infty(3, 2, params, {1.0, 1.0}, 1.0) == 0.0);
    CHECK(q_infty(3, 3, params, {1.0, 1.0}, 1.0) == doctest::Approx(naive_poisson(0.4, 3)).epsilon(1e-14));
    CHECK(q_infty(0, 0, InteractionParams::from_beta_sq(0.0), {0.5, 0.5}, 0.9) == 1.0);
}

TEST_CASE("chi sums and the odd-sector identity") {
    auto params = InteractionParams::from_beta_sq(0.07);
    Transmittances t{0.4, 0.8};
    double eta = 0.9;
    double plus = 0.0;
    for (int l = 0; l < 40; l++) {
        plus += chi(l, +1, params, t, eta);
    }
    CHECK(plus == doctest::Approx(1.0).epsilon(1e-14));
    for (int l = 0; l < 5; l++) {
        double odd = 0.0;
        for (int k = l + 1; k < l + 60; k += 2) {
            odd += q_infty(k, l, params, t, eta);
        }
        double diff = chi(l, +1, params, t, eta) - chi(l, -1, params, t, eta);
        CHECK(diff == doctest::Approx(2.0 * odd).epsilon(1e-12).scale(1e-16));
    }
    CHECK_THROWS_AS(chi(0, 0, params, t, eta), std::invalid_argument);
}

TEST_CASE("performance hand values") {
    auto p01 = InteractionParams::from_beta_sq(0.1);
    PerfPoint nr = performance({DetectorKind::NumberResolving, 1.0}, p01, {1.0, 1.0});
    CHECK(nr.p == doctest::Approx(0.18126924692201818).epsilon(1e-15));
    CHECK(nr.epsilon == 0.0);
    PerfPoint th = performance({DetectorKind::Threshold, 1.0}, p01, {1.0, 1.0});
    CHECK(th.p == doctest::Approx(0.18126924692201818).epsilon(1e-15));
    CHECK(th.epsilon == doctest::Approx(0.09063462346100909).epsilon(1e-14));

    auto p005 = InteractionParams::from_beta_sq(0.05);
    Transmittances t{0.5, 0.9};
    PerfPoint sp = performance({DetectorKind::SinglePhoton, 0.95}, p005, t);
    CHECK(sp.p == doctest::Approx(0.08639042877448198).epsilon(1e-14));
    CHECK(sp.epsilon == doctest::Approx(0.057032241577857024).epsilon(1e-13));
    PerfPoint nr2 = performance({DetectorKind::NumberResolving, 0.95}, p005, t);
    CHECK(nr2.epsilon == doctest::Approx(sp.epsilon).epsilon(1e-14));
    PerfPoint th2 = performance({DetectorKind::Threshold, 0.95}, p005, t);
    CHECK(th2.epsilon == doctest::Approx(0.09717710964884124).epsilon(1e-13));

    PerfPoint zero = performance({DetectorKind::SinglePhoton, 0.9}, InteractionParams::from_beta(0.0), t);
    CHECK(zero.p == 0.0);
    CHECK(zero.epsilon == 0.0);
}

TEST_CASE("performance matches the per-arm enumeration") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 12; trial++) {
        auto kind = static_cast<DetectorKind>(trial % 3);
        double beta_sq = 1e-3 + 0.25 * u(rng);
        double ta = 0.3 + 0.7 * u(rng);
        double tb = 0.3 + 0.7 * u(rng);
        double eta = 0.5 + 0.5 * u(rng);
        PerfPoint expected = enumeration_oracle(kind, beta_sq, ta, tb, eta);
        PerfPoint got = performance({kind, eta}, InteractionParams::from_beta_sq(beta_sq), {ta, tb});
        PerfPoint oracle = performance_oracle({kind, eta}, InteractionParams::from_beta_sq(beta_sq), {ta, tb});
        CHECK(got.p == doctest::Approx(expected.p).epsilon(1e-10));
        CHECK(got.epsilon == doctest::Approx(expected.epsilon).epsilon(1e-9));
        CHECK(std::abs(oracle.p - got.p) < 1e-12);
        CHECK(std::abs(oracle.epsilon - got.epsilon) < 1e-10);
    }
}

TEST_CASE("performance properties") {
    Transmittances t{0.6, 0.6};
    double prev_eps = -1.0;
    for (double b2 = 0.01; b2 < 1.0; b2 += 0.05) {
        auto params = InteractionParams::from_beta_sq(b2);
        for (auto kind : {DetectorKind::NumberResolving, DetectorKind::SinglePhoton, DetectorKind::Threshold}) {
            PerfPoint pp = performance({kind, 0.9}, params, t);
            CHECK(pp.p >= 0.0);
            CHECK(pp.p <= 1.0);
            CHECK(pp.epsilon >= 0.0);
            CHECK(pp.epsilon <= 0.5);
        }
        // Threshold detectors cannot count, so they are never better than number resolving ones.
        CHECK(performance({DetectorKind::Threshold, 0.9}, params, t).epsilon >=
              performance({DetectorKind::NumberResolving, 0.9}, params, t).epsilon);
        double eps = performance({DetectorKind::NumberResolving, 0.9}, params, t).epsilon;
        CHECK(eps > prev_eps);
        prev_eps = eps;
    }
    // Single-photon success peaks at 2 beta^2 eta = 1.
    double eta = 0.8;
    double peak = performance({DetectorKind::SinglePhoton, eta}, InteractionParams::from_beta_sq(1 / (2 * eta)), t).p;
    CHECK(peak == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
    CHECK(performance({DetectorKind::SinglePhoton, eta}, InteractionParams::from_beta_sq(0.9 / (2 * eta)), t).p < peak);
    CHECK(performance({DetectorKind::SinglePhoton, eta}, InteractionParams::from_beta_sq(1.1 / (2 * eta)), t).p < peak);
}

TEST_CASE("oracle truncation guard") {
    auto params = InteractionParams::from_beta_sq(2.0);
    CHECK_THROWS_AS(performance_oracle({DetectorKind::NumberResolving, 0.9}, params, {0.1, 0.1}, 5), TruncationError);
    PerfPoint zero = performance_oracle({DetectorKind::Threshold, 0.9}, InteractionParams::from_beta(0.0), {0.5, 0.5}, 0);
    CHECK(zero.p == 0.0);
    CHECK(zero.epsilon == 0.0);
}

TEST_CASE("input validation") {
    auto params = InteractionParams::from_beta_sq(0.1);
    CHECK_THROWS_AS(performance({DetectorKind::NumberResolving, 1.2}, params, {1.0, 1.0}), std::domain_error);
    CHECK_THROWS_AS(performance({DetectorKind::NumberResolving, 0.9}, params, {0.0, 1.0}), std::domain_error);
    CHECK_THROWS_AS(performance({DetectorKind::NumberResolving, 0.9}, params, {1.0, 1.5}), std::domain_error);
    CHECK_THROWS_AS(InteractionParams::from_beta_sq(-0.1), std::domain_error);
    CHECK_THROWS_AS(parse_detector("photodiode"), std::invalid_argument);
    CHECK(parse_detector("threshold") == DetectorKind::Threshold);
    CHECK(detector_name(DetectorKind::SinglePhoton) == "single_photon");
}

TEST_CASE("interaction parameters") {
    auto p = InteractionParams::from_pulse(2.0, M_PI / 3);
    CHECK(p.beta == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(p.pulse_alpha() == 2.0);
    CHECK(p.pulse_theta() == doctest::Approx(M_PI / 3));
    auto q = InteractionParams::from_beta(0.3);
    CHECK(q.pulse_alpha() == 0.3);
    CHECK(q.pulse_theta() == doctest::Approx(M_PI));
    CHECK(q.beta_sq() == doctest::Approx(0.09).epsilon(1e-15));
}

TEST_CASE("link geometry and photon number") {
    LinkGeometry g;
    g.length_a_km = 22.0;
    g.length_b_km = 0.0;
    g.attenuation_length_km = 22.0;
    g.local_transmittance = 0.9;
    Transmittances t = link_transmittance(g);
    CHECK(t.a == doctest::Approx(0.9 * std::exp(-1.0)).epsilon(1e-15));
    CHECK(t.b == doctest::Approx(0.9).epsilon(1e-15));
    CHECK(fiber_transmittance(0.0, 22.0) == 1.0);
    CHECK(photon_number_mean(InteractionParams::from_beta_sq(0.1), {0.5, 0.25}) ==
          doctest::Approx(0.1 * 6.0).epsilon(1e-15));
    g.length_a_km = -1.0;
    CHECK_THROWS_AS(link_transmittance(g), std::domain_error);
}

TEST_CASE("the middle station minimizes the phase error") {
    // Fixed total length: eps depends on 1/T_A + 1/T_B, smallest when balanced.
    double l0 = 40.0;
    auto params = InteractionParams::from_beta_sq(0.02);
    double mid = 0.0;
    double best = 1.0;
    for (int i = 0; i <= 100; i++) {
        double la = l0 * i / 100.0;
        LinkGeometry g{la, l0 - la, 22.0, 0.95};
        double eps = performance({DetectorKind::SinglePhoton, 0.9}, params, link_transmittance(g)).epsilon;
        if (eps < best) {
            best = eps;
            mid = la;
        }
    }
    CHECK(mid == doctest::Approx(l0 / 2));
}
