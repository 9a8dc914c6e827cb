#include <fstream>
#include <sstream>

#include "doctest.h"
#include "rnpm/config.h"

using namespace rnpm;
using nlohmann::json;

namespace {

std::string data_file(const std::string &name) {
    return std::string(RNPM_GOLDEN_DIR) + "/../data/" + name;
}

void check_rejected(const std::string &text, const std::string &fragment) {
    try {
        RunConfig::parse(text);
        FAIL("config was accepted: " << text);
    } catch (const ConfigError &e) {
        CHECK_MESSAGE(std::string(e.what()).find(fragment) != std::string::npos, e.what());
    }
}

}  // namespace

TEST_CASE("defaults") {
    RunConfig c = RunConfig::parse("{}");
    CHECK(c.hardware.local_transmittance == 0.98);
    CHECK(c.hardware.detector.efficiency == 0.95);
    CHECK(c.hardware.detector.kind == DetectorKind::SinglePhoton);
    CHECK(c.hardware.attenuation_length_km == 22.0);
    CHECK(c.hardware.light_speed_m_per_s == 2e8);
    CHECK(c.hardware.source_rate_hz == 1e10);
    CHECK(c.geometry == StationGeometry::Midpoint);
    CHECK_FALSE(c.perf);
    CHECK_FALSE(c.montecarlo);

    RunConfig d = RunConfig::parse(R"({"distill": {}})");
    REQUIRE(d.distill);
    CHECK(d.distill->beta_sq == std::vector<double>{0.04, 0.08, 0.12});
}

TEST_CASE("every example configuration round-trips") {
    for (const char *name : {"perf.json", "distill.json", "repeater.json", "endpoint.json", "montecarlo.json",
                             "optics.json", "infeasible.json"}) {
        RunConfig c = RunConfig::load(data_file(name));
        nlohmann::ordered_json once = c.to_json();
        RunConfig again = RunConfig::from_json(json::parse(once.dump()));
        CHECK_MESSAGE(again.to_json() == once, name);
    }
}

TEST_CASE("round trip keeps values") {
    RunConfig c = RunConfig::load(data_file("montecarlo.json"));
    RunConfig again = RunConfig::from_json(json::parse(c.to_json().dump()));
    REQUIRE(again.montecarlo);
    CHECK(again.montecarlo->seed == 2024);
    CHECK(again.montecarlo->trials == 20000);
    REQUIRE(again.montecarlo->waiting_time.size() == 4);
    CHECK(*again.montecarlo->waiting_time[1].p_gen == 0.05);
    CHECK(*again.montecarlo->waiting_time[3].beta_s_sq == 0.1);
    CHECK(again.montecarlo->outcomes[0].t_b == 0.7);

    RunConfig o = RunConfig::load(data_file("optics.json"));
    RunConfig o2 = RunConfig::from_json(json::parse(o.to_json().dump()));
    CHECK(o2.optics->params.pulse_alpha() == 0.8);
    CHECK(o2.optics->params.pulse_theta() == 2.4);
    CHECK(o2.optics->variant == DisplacementVariant::LocalDisplacement);
    CHECK(o2.hardware.detector.kind == DetectorKind::NumberResolving);
}

TEST_CASE("unknown keys are rejected at every level") {
    check_rejected(R"({"extra": 1})", "unknown key 'extra'");
    check_rejected(R"({"hardware": {"colour": "blue"}})", "unknown key 'colour'");
    check_rejected(R"({"geometry": {"kind": "midpoint", "offset": 2}})", "unknown key 'offset'");
    check_rejected(R"({"perf": {"beta_sq": [0.1], "T_A": [1], "T_B": [1], "k": 3}})", "unknown key 'k'");
    check_rejected(R"({"montecarlo": {"waiting_time": [{"nesting": 0, "p_gen": 0.5, "p_swap": 1, "x": 0}]}})",
                   "unknown key 'x'");
}

TEST_CASE("schema violations") {
    check_rejected("not json", "not valid JSON");
    check_rejected("[]", "expected an object");
    check_rejected(R"({"hardware": {"tau": "high"}})", "expected a number");
    check_rejected(R"({"hardware": {"eta": 1.5}})", "hardware");
    check_rejected(R"({"hardware": {"detector": "photodiode"}})", "unknown detector");
    check_rejected(R"({"geometry": {"kind": "offset"}})", "unknown geometry");
    check_rejected(R"({"perf": {"beta_sq": [], "T_A": [1], "T_B": [1]}})", "must not be empty");
    check_rejected(R"({"perf": {"beta_sq": [0.1], "T_A": [0], "T_B": [1]}})", "perf.T_A");
    check_rejected(R"({"perf": {"beta_sq": [0.1], "T_B": [1]}})", "required key missing");
    check_rejected(R"({"repeater": {"lengths_km": []}})", "must not be empty");
    check_rejected(R"({"repeater": {"lengths_km": [200, 100]}})", "ascending");
    check_rejected(R"({"repeater": {"lengths_km": [100], "target_fidelities": [0.4]}})", "(0.5, 1)");
    check_rejected(R"({"repeater": {"lengths_km": [100], "max_nesting": 2.5}})", "expected an integer");
    check_rejected(R"({"distill": {"fidelities": [1.2]}})", "distill.fidelities");
    check_rejected(R"({"montecarlo": {"trials": 0, "outcomes": [{"beta_sq": 0.1, "T_A": 1, "T_B": 1}]}})",
                   "at least 1");
    check_rejected(R"({"montecarlo": {"seed": -3, "outcomes": [{"beta_sq": 0.1, "T_A": 1, "T_B": 1}]}})",
                   "non-negative integer");
    check_rejected(R"({"montecarlo": {}})", "at least one");
    check_rejected(R"({"montecarlo": {"waiting_time": [{"nesting": 1, "p_gen": 0.5}]}})", "both required");
    check_rejected(R"({"montecarlo": {"waiting_time": [{"nesting": 1, "p_gen": 0.5, "p_swap": 1, "length_km": 9}]}})",
                   "either");
    check_rejected(R"({"optics": {"beta": 0.3, "beta_sq": 0.09}})", "exactly one");
    check_rejected(R"({"optics": {"beta": 0.3, "theta": 1.0}})", "only allowed together with alpha");
    check_rejected(R"({"optics": {"beta": 0.3, "variant": "remote"}})", "unknown displacement variant");
}

TEST_CASE("missing files are configuration errors") {
    CHECK_THROWS_AS(RunConfig::load("/nonexistent/config.json"), ConfigError);
}
