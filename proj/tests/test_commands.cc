#include <cmath>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "rnpm/commands.h"
#include "rnpm/core_formulas.h"

using namespace rnpm;

namespace {

std::string read_file(const std::string &path) {
    std::ifstream in(path);
    REQUIRE_MESSAGE(in.good(), path);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

RunConfig load_data(const std::string &name) {
    return RunConfig::load(std::string(RNPM_GOLDEN_DIR) + "/../data/" + name);
}

std::vector<std::vector<std::string>> parse_csv(const std::string &text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ',')) {
            cells.push_back(cell);
        }
        if (!line.empty() && line.back() == ',') {
            cells.push_back("");
        }
        rows.push_back(cells);
    }
    return rows;
}

bool parse_double(const std::string &s, double &out) {
    if (s.empty()) {
        return false;
    }
    char *end = nullptr;
    out = std::strtod(s.c_str(), &end);
    return end == s.c_str() + s.size();
}

// Same header and text cells; numeric cells within 1e-9 relative.
void check_matches_golden(const std::string &produced, const std::string &golden_name) {
    auto got = parse_csv(produced);
    auto want = parse_csv(read_file(std::string(RNPM_GOLDEN_DIR) + "/" + golden_name));
    REQUIRE(got.size() == want.size());
    REQUIRE(!got.empty());
    CHECK(got[0] == want[0]);
    for (std::size_t r = 1; r < got.size(); r++) {
        REQUIRE(got[r].size() == want[r].size());
        for (std::size_t c = 0; c < got[r].size(); c++) {
            double a = 0.0;
            double b = 0.0;
            if (parse_double(got[r][c], a) && parse_double(want[r][c], b)) {
                CHECK_MESSAGE(std::abs(a - b) <= 1e-9 * std::max(std::abs(a), std::abs(b)) + 1e-15,
                              golden_name << " row " << r << " column " << want[0][c]);
            } else {
                CHECK_MESSAGE(got[r][c] == want[r][c], golden_name << " row " << r << " column " << want[0][c]);
            }
        }
    }
}

int column(const Table &t, const std::string &name) {
    for (std::size_t i = 0; i < t.columns.size(); i++) {
        if (t.columns[i] == name) {
            return static_cast<int>(i);
        }
    }
    FAIL("missing column " << name);
    return -1;
}

}  // namespace

TEST_CASE("number formatting") {
    CHECK(format_number(0.1) == "0.1");
    CHECK(format_number(1e10) == "1e+10");
    CHECK(format_number(std::nan("")) == "nan");
    CHECK(format_number(-INFINITY) == "-inf");
    double x = 0.1 + 0.2;
    CHECK(std::strtod(format_number(x).c_str(), nullptr) == x);
}

TEST_CASE("tables render as CSV and JSON") {
    Table t;
    t.columns = {"a", "b", "c"};
    t.add_row({1.5, "x,y", nullptr});
    t.add_row({2, true, "plain"});
    CHECK(t.to_csv() == "a,b,c\n1.5,\"x,y\",\n2,true,plain\n");
    auto j = t.to_json();
    CHECK(j[0]["b"] == "x,y");
    CHECK(j[1]["a"] == 2);
    CHECK_THROWS_AS(t.add_row({1}), std::logic_error);
}

TEST_CASE("perf table") {
    Table t = cmd_perf(load_data("perf.json"));
    CHECK(t.columns == std::vector<std::string>{"detector", "beta_sq", "T_A", "T_B", "eta", "p", "epsilon",
                                                "p_oracle", "epsilon_oracle"});
    CHECK(t.rows.size() == 3 * 4 * 2);
    int beta = column(t, "beta_sq");
    int p = column(t, "p");
    for (const auto &row : t.rows) {
        if (row[beta].get<double>() == 0.0) {
            CHECK(row[p].get<double>() == 0.0);
        }
        CHECK(std::abs(row[p].get<double>() - row[column(t, "p_oracle")].get<double>()) < 1e-9);
        CHECK(std::abs(row[column(t, "epsilon")].get<double>() - row[column(t, "epsilon_oracle")].get<double>()) <
              1e-9);
    }
    check_matches_golden(t.to_csv(), "perf.csv");
}

TEST_CASE("distill table") {
    RunConfig c = load_data("distill.json");
    Table t = cmd_distill(c);
    CHECK(t.rows.size() == 18);
    int f = column(t, "F");
    for (const auto &row : t.rows) {
        double p = row[column(t, "p")].get<double>();
        double eps = row[column(t, "epsilon")].get<double>();
        if (row[f].get<double>() == 1.0) {
            CHECK(row[column(t, "P_s")].get<double>() == doctest::Approx(p * p).epsilon(1e-12));
            CHECK(row[column(t, "F_prime")].get<double>() ==
                  doctest::Approx((1 - eps) * (1 - eps) + eps * eps).epsilon(1e-12));
        }
    }
    check_matches_golden(t.to_csv(), "distill.csv");

    RunConfig defaults = RunConfig::parse(R"({"distill": {}})");
    Table d = cmd_distill(defaults);
    CHECK(d.rows.size() == 3 * 51);
    CHECK(d.rows.front()[f].get<double>() == 0.5);
}

TEST_CASE("repeater tables") {
    bool all_infeasible = true;
    Table t = cmd_repeater(load_data("repeater.json"), 2, &all_infeasible);
    CHECK_FALSE(all_infeasible);
    CHECK(t.columns == std::vector<std::string>{"L_km", "F_target", "detector", "geometry", "n_opt", "beta_g_sq",
                                                "beta_s_sq", "T_seconds", "F", "key_rate", "direct_seconds",
                                                "error"});
    check_matches_golden(t.to_csv(), "repeater.csv");
    check_matches_golden(cmd_repeater(load_data("endpoint.json"), 1).to_csv(), "endpoint.csv");

    Table bad = cmd_repeater(load_data("infeasible.json"), 1, &all_infeasible);
    CHECK(all_infeasible);
    CHECK(bad.rows[0][column(bad, "n_opt")].is_null());
    CHECK_FALSE(bad.rows[0][column(bad, "error")].get<std::string>().empty());
}

TEST_CASE("montecarlo table") {
    RunConfig c = load_data("montecarlo.json");
    Table t = cmd_montecarlo(c, 1);
    check_matches_golden(t.to_csv(), "montecarlo.csv");
    for (const auto &row : t.rows) {
        double empirical = row[column(t, "empirical")].get<double>();
        double se = row[column(t, "standard_error")].get<double>();
        const auto &exact = row[column(t, "exact")];
        if (!exact.is_null()) {
            CHECK(std::abs(empirical - exact.get<double>()) < 5 * se);
        }
        if (row[0] != "waiting_time") {
            CHECK(std::abs(empirical - row[column(t, "predicted")].get<double>()) < 5 * se);
        }
    }
    std::string serial = t.to_csv();
    for (int threads : {2, 3, 8}) {
        CHECK(cmd_montecarlo(c, threads).to_csv() == serial);
    }
}

TEST_CASE("optics dump") {
    RunConfig c = load_data("optics.json");
    auto dump = cmd_optics(c);
    CHECK(dump["total_probability"].get<double>() == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(dump["success_probability"].get<double>() == doctest::Approx(dump["p"].get<double>()).epsilon(1e-10));
    CHECK(dump["fock_max_difference"].get<double>() < 1e-8);
    for (const auto &o : dump["outcomes"]) {
        if (o["success"].get<bool>() && o["probability"].get<double>() > 1e-12) {
            CHECK(o["epsilon"].get<double>() == doctest::Approx(dump["epsilon"].get<double>()).epsilon(1e-8));
        }
        CHECK(o["weight"]["re"].size() == 4);
    }
    check_matches_golden(optics_table(dump).to_csv(), "optics.csv");
}

TEST_CASE("exit codes") {
    std::ostringstream out;
    std::ostringstream err;
    CHECK(run_command("perf", load_data("perf.json"), OutputFormat::Csv, 1, out, err) == 0);
    CHECK(run_command("perf", load_data("distill.json"), OutputFormat::Csv, 1, out, err) == 2);
    CHECK(err.str().find("no 'perf' section") != std::string::npos);
    CHECK(run_command("repeater", load_data("infeasible.json"), OutputFormat::Csv, 1, out, err) == 3);
    CHECK(run_command("teleport", load_data("perf.json"), OutputFormat::Csv, 1, out, err) == 2);

    std::ostringstream json_out;
    CHECK(run_command("distill", load_data("distill.json"), OutputFormat::Json, 1, json_out, err) == 0);
    auto parsed = nlohmann::json::parse(json_out.str());
    CHECK(parsed.size() == 18);
    CHECK(parsed[0].contains("F_prime"));
    CHECK(parse_format("json") == OutputFormat::Json);
    CHECK_THROWS_AS(parse_format("xml"), ConfigError);
}
