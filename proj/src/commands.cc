#include "rnpm/commands.h"

#include <charconv>
#include <cmath>
#include <sstream>

#include "rnpm/distillation.h"
#include "rnpm/montecarlo.h"
#include "rnpm/optimizer.h"

namespace rnpm {

namespace {

using nlohmann::ordered_json;

std::string csv_cell(const ordered_json &v) {
    if (v.is_null()) {
        return "";
    }
    if (v.is_number_float()) {
        return format_number(v.get<double>());
    }
    if (v.is_string()) {
        std::string s = v.get<std::string>();
        if (s.find_first_of(",\"\n") == std::string::npos) {
            return s;
        }
        std::string quoted = "\"";
        for (char ch : s) {
            quoted += ch == '"' ? std::string("\"\"") : std::string(1, ch);
        }
        return quoted + "\"";
    }
    return v.dump();
}

ordered_json number_or_null(double v) {
    return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr);
}

std::vector<DetectorKind> detectors_or_default(const std::vector<DetectorKind> &kinds, const Hardware &hw) {
    return kinds.empty() ? std::vector<DetectorKind>{hw.detector.kind} : kinds;
}

template <typename T>
const T &require_block(const std::optional<T> &block, const char *name) {
    if (!block) {
        throw ConfigError(std::string("config has no '") + name + "' section");
    }
    return *block;
}

ordered_json matrix_json(const Eigen::MatrixXcd &m) {
    ordered_json re = ordered_json::array();
    ordered_json im = ordered_json::array();
    for (int r = 0; r < m.rows(); r++) {
        ordered_json rr = ordered_json::array();
        ordered_json ri = ordered_json::array();
        for (int c = 0; c < m.cols(); c++) {
            rr.push_back(m(r, c).real());
            ri.push_back(m(r, c).imag());
        }
        re.push_back(rr);
        im.push_back(ri);
    }
    return {{"re", re}, {"im", im}};
}

}  // namespace

OutputFormat parse_format(std::string_view name) {
    if (name == "csv") {
        return OutputFormat::Csv;
    }
    if (name == "json") {
        return OutputFormat::Json;
    }
    throw ConfigError("unknown output format '" + std::string(name) + "' (csv or json)");
}

std::string format_number(double value) {
    if (std::isnan(value)) {
        return "nan";
    }
    if (std::isinf(value)) {
        return value > 0 ? "inf" : "-inf";
    }
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

void Table::add_row(std::vector<ordered_json> row) {
    if (row.size() != columns.size()) {
        throw std::logic_error("row width does not match the table header");
    }
    rows.push_back(std::move(row));
}

std::string Table::to_csv() const {
    std::ostringstream out;
    for (std::size_t i = 0; i < columns.size(); i++) {
        out << (i ? "," : "") << columns[i];
    }
    out << "\n";
    for (const auto &row : rows) {
        for (std::size_t i = 0; i < row.size(); i++) {
            out << (i ? "," : "") << csv_cell(row[i]);
        }
        out << "\n";
    }
    return out.str();
}

ordered_json Table::to_json() const {
    ordered_json out = ordered_json::array();
    for (const auto &row : rows) {
        ordered_json obj = ordered_json::object();
        for (std::size_t i = 0; i < row.size(); i++) {
            obj[columns[i]] = row[i];
        }
        out.push_back(obj);
    }
    return out;
}

Table cmd_perf(const RunConfig &config) {
    const PerfBlock &block = require_block(config.perf, "perf");
    Table t;
    t.columns = {"detector", "beta_sq", "T_A", "T_B", "eta", "p", "epsilon", "p_oracle", "epsilon_oracle"};
    for (DetectorKind kind : detectors_or_default(block.detectors, config.hardware)) {
        DetectorModel detector{kind, config.hardware.detector.efficiency};
        for (double beta_sq : block.beta_sq) {
            InteractionParams params = InteractionParams::from_beta_sq(beta_sq);
            for (double ta : block.t_a) {
                for (double tb : block.t_b) {
                    Transmittances tr{ta, tb};
                    PerfPoint closed = performance(detector, params, tr);
                    PerfPoint oracle = block.k_max ? performance_oracle(detector, params, tr, *block.k_max)
                                                   : performance_oracle(detector, params, tr);
                    t.add_row({std::string(detector_name(kind)), beta_sq, ta, tb, detector.efficiency, closed.p,
                               closed.epsilon, oracle.p, oracle.epsilon});
                }
            }
        }
    }
    return t;
}

Table cmd_repeater(const RunConfig &config, int threads, bool *all_infeasible) {
    const RepeaterBlock &block = require_block(config.repeater, "repeater");
    SweepSpec spec;
    spec.lengths_km = block.lengths_km;
    spec.target_fidelities = block.target_fidelities;
    spec.hardware = config.hardware;
    spec.geometry = config.geometry;
    spec.detectors = detectors_or_default(block.detectors, config.hardware);
    OptimizerSettings settings;
    settings.max_nesting = block.max_nesting;
    std::vector<OptimumRecord> records = sweep(spec, settings, threads);

    Table t;
    t.columns = {"L_km",      "F_target",  "detector", "geometry", "n_opt",         "beta_g_sq",
                 "beta_s_sq", "T_seconds", "F",        "key_rate", "direct_seconds", "error"};
    bool any_feasible = false;
    for (const auto &r : records) {
        any_feasible = any_feasible || r.feasible;
        ordered_json n = r.feasible ? ordered_json(r.nesting) : ordered_json(nullptr);
        t.add_row({r.length_km, r.target_fidelity, std::string(detector_name(r.detector)),
                   std::string(geometry_name(r.geometry)), n, number_or_null(r.beta_g_sq),
                   number_or_null(r.beta_s_sq), number_or_null(r.time_s), number_or_null(r.fidelity),
                   r.feasible ? ordered_json(key_rate(r.fidelity)) : ordered_json(nullptr), r.direct_time_s,
                   r.error});
    }
    if (all_infeasible) {
        *all_infeasible = !any_feasible;
    }
    return t;
}

Table cmd_distill(const RunConfig &config) {
    const DistillBlock &block = require_block(config.distill, "distill");
    std::vector<double> fidelities = block.fidelities;
    if (fidelities.empty()) {
        for (int i = 0; i <= 50; i++) {
            fidelities.push_back(0.5 + 0.01 * i);
        }
    }
    Table t;
    t.columns = {"F", "beta_sq", "P_s", "F_prime", "P_rec", "epsilon", "p"};
    for (double beta_sq : block.beta_sq) {
        InteractionParams params = InteractionParams::from_beta_sq(beta_sq);
        double tau = config.hardware.local_transmittance;
        PerfPoint perf = performance(config.hardware.detector, params, Transmittances{tau, tau});
        for (double f : fidelities) {
            RecurrenceResult r = recurrence_step(f, params, tau, config.hardware.detector);
            t.add_row({f, beta_sq, r.success_probability, r.fidelity, r.agreement_probability, perf.epsilon, perf.p});
        }
    }
    return t;
}

Table cmd_montecarlo(const RunConfig &config, int threads) {
    const MonteCarloBlock &block = require_block(config.montecarlo, "montecarlo");
    Table t;
    t.columns = {"quantity", "case", "nesting", "trials", "empirical", "standard_error", "predicted", "exact"};
    for (std::size_t i = 0; i < block.waiting_time.size(); i++) {
        const WaitingTimeCase &c = block.waiting_time[i];
        double p_gen = 0.0;
        double p_swap = 0.0;
        if (c.p_gen) {
            p_gen = *c.p_gen;
            p_swap = *c.p_swap;
        } else {
            ChainConfig chain;
            chain.length_km = *c.length_km;
            chain.nesting = c.nesting;
            chain.generation = InteractionParams::from_beta_sq(*c.beta_g_sq);
            chain.swapping = InteractionParams::from_beta_sq(*c.beta_s_sq);
            chain.hardware = config.hardware;
            chain.geometry = config.geometry;
            p_gen = generation_performance(chain).p;
            p_swap = swap_performance(chain.swapping, chain.hardware).p;
        }
        WaitingTimeSamples s = simulate_waiting_time(c.nesting, p_gen, p_swap, block.seed, block.trials, threads);
        ordered_json exact = nullptr;
        if (c.nesting == 0) {
            exact = 1.0 / p_gen;
        } else if (c.nesting == 1 && p_swap == 1.0) {
            exact = expected_max_geometric(p_gen);
        }
        t.add_row({"waiting_time", static_cast<std::uint64_t>(i), c.nesting, block.trials, s.mean(),
                   s.standard_error(), predicted_waiting_time(c.nesting, p_gen, p_swap), exact});
    }
    for (std::size_t i = 0; i < block.outcomes.size(); i++) {
        const OutcomeCase &c = block.outcomes[i];
        ProtocolConfig pc;
        pc.params = InteractionParams::from_beta_sq(c.beta_sq);
        pc.transmittances = Transmittances{c.t_a, c.t_b};
        pc.detector = config.hardware.detector;
        // Each case gets its own substream family.
        std::uint64_t seed = block.seed ^ (0x9e3779b97f4a7c15ULL * (i + 1));
        OutcomeSampleSummary s = sample_rnpm_outcomes(pc, seed, block.trials, threads);
        PerfPoint perf = performance(pc.detector, pc.params, pc.transmittances);
        t.add_row({"p", static_cast<std::uint64_t>(i), nullptr, block.trials, s.p_hat(), s.p_standard_error(),
                   perf.p, nullptr});
        t.add_row({"epsilon", static_cast<std::uint64_t>(i), nullptr, s.successes, s.epsilon_hat(),
                   s.epsilon_standard_error(), perf.epsilon, nullptr});
    }
    return t;
}

ordered_json cmd_optics(const RunConfig &config) {
    const OpticsBlock &block = require_block(config.optics, "optics");
    ProtocolConfig pc;
    pc.params = block.params;
    pc.transmittances = Transmittances{block.t_a, block.t_b};
    pc.detector = config.hardware.detector;
    pc.variant = block.variant;
    OutcomeEnsemble ens = run_protocol(pc);
    PerfPoint perf = performance(pc.detector, pc.params, pc.transmittances);

    ordered_json doc;
    doc["detector"] = std::string(detector_name(pc.detector.kind));
    doc["eta"] = pc.detector.efficiency;
    doc["beta"] = pc.params.beta;
    doc["alpha"] = pc.params.pulse_alpha();
    doc["theta"] = pc.params.pulse_theta();
    doc["T_A"] = block.t_a;
    doc["T_B"] = block.t_b;
    doc["variant"] = std::string(variant_name(block.variant));
    doc["p"] = perf.p;
    doc["epsilon"] = perf.epsilon;
    doc["total_probability"] = ens.total_probability();
    doc["success_probability"] = ens.success_probability();
    ordered_json outcomes = ordered_json::array();
    for (const auto &[key, e] : ens.entries) {
        ordered_json o;
        o["m"] = e.m;
        o["n"] = e.n;
        o["probability"] = e.probability();
        o["success"] = e.success();
        o["parity"] = e.success() ? ordered_json(e.parity()) : ordered_json(nullptr);
        ordered_json eps = nullptr;
        if (e.success() && e.probability() > 0.0) {
            if (auto fit = fit_phase_error(e.conditional(), pc.initial_state, e.parity())) {
                eps = fit->epsilon;
            }
        }
        o["epsilon"] = eps;
        o["weight"] = matrix_json(e.weight.matrix());
        outcomes.push_back(o);
    }
    doc["outcomes"] = outcomes;
    if (block.fock_check) {
        doc["fock_max_difference"] = max_ensemble_difference(ens, fock_oracle(pc));
    }
    return doc;
}

Table optics_table(const ordered_json &dump) {
    Table t;
    t.columns = {"m", "n", "probability", "success", "parity", "epsilon"};
    for (const auto &o : dump.at("outcomes")) {
        t.add_row({o.at("m"), o.at("n"), o.at("probability"), o.at("success"), o.at("parity"), o.at("epsilon")});
    }
    return t;
}

int run_command(const std::string &command, const RunConfig &config, OutputFormat format, int threads,
                std::ostream &out, std::ostream &err) {
    try {
        bool all_infeasible = false;
        Table table;
        if (command == "perf") {
            table = cmd_perf(config);
        } else if (command == "repeater") {
            table = cmd_repeater(config, threads, &all_infeasible);
        } else if (command == "distill") {
            table = cmd_distill(config);
        } else if (command == "montecarlo") {
            table = cmd_montecarlo(config, threads);
        } else if (command == "optics") {
            ordered_json dump = cmd_optics(config);
            if (format == OutputFormat::Json) {
                out << dump.dump(2) << "\n";
                return 0;
            }
            table = optics_table(dump);
        } else {
            throw ConfigError("unknown command '" + command + "'");
        }
        if (format == OutputFormat::Csv) {
            out << table.to_csv();
        } else {
            out << table.to_json().dump(2) << "\n";
        }
        if (all_infeasible) {
            err << "error: no sweep point reached its target fidelity\n";
            return 3;
        }
        return 0;
    } catch (const ConfigError &e) {
        err << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception &e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace rnpm
