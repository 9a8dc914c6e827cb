#include "rnpm/config.h"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace rnpm {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

// Reads the members of one JSON object and rejects whatever is left unread.
class ObjectReader {
   public:
    ObjectReader(const json &node, std::string path) : node_(node), path_(std::move(path)) {
        if (!node_.is_object()) {
            throw ConfigError(path_ + ": expected an object");
        }
    }

    bool has(const std::string &key) {
        seen_.insert(key);
        return node_.contains(key);
    }

    const json &at(const std::string &key) {
        if (!has(key)) {
            throw ConfigError(path_ + "." + key + ": required key missing");
        }
        return node_.at(key);
    }

    double number(const std::string &key) {
        const json &v = at(key);
        if (!v.is_number()) {
            throw ConfigError(path_ + "." + key + ": expected a number");
        }
        double d = v.get<double>();
        if (!std::isfinite(d)) {
            throw ConfigError(path_ + "." + key + ": expected a finite number");
        }
        return d;
    }

    double number(const std::string &key, double fallback) { return has(key) ? number(key) : fallback; }

    std::optional<double> optional_number(const std::string &key) {
        return has(key) ? std::optional<double>(number(key)) : std::nullopt;
    }

    std::int64_t integer(const std::string &key) {
        const json &v = at(key);
        if (!v.is_number_integer()) {
            throw ConfigError(path_ + "." + key + ": expected an integer");
        }
        return v.get<std::int64_t>();
    }

    std::uint64_t unsigned_integer(const std::string &key, std::uint64_t fallback) {
        if (!has(key)) {
            return fallback;
        }
        const json &v = at(key);
        if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
            throw ConfigError(path_ + "." + key + ": expected a non-negative integer");
        }
        return v.get<std::uint64_t>();
    }

    std::string string(const std::string &key) {
        const json &v = at(key);
        if (!v.is_string()) {
            throw ConfigError(path_ + "." + key + ": expected a string");
        }
        return v.get<std::string>();
    }

    bool boolean(const std::string &key, bool fallback) {
        if (!has(key)) {
            return fallback;
        }
        const json &v = at(key);
        if (!v.is_boolean()) {
            throw ConfigError(path_ + "." + key + ": expected true or false");
        }
        return v.get<bool>();
    }

    std::vector<double> numbers(const std::string &key) {
        const json &v = at(key);
        if (!v.is_array()) {
            throw ConfigError(path_ + "." + key + ": expected an array of numbers");
        }
        std::vector<double> out;
        for (const auto &e : v) {
            if (!e.is_number() || !std::isfinite(e.get<double>())) {
                throw ConfigError(path_ + "." + key + ": expected an array of numbers");
            }
            out.push_back(e.get<double>());
        }
        return out;
    }

    std::vector<DetectorKind> detectors(const std::string &key) {
        const json &v = at(key);
        if (!v.is_array()) {
            throw ConfigError(path_ + "." + key + ": expected an array of detector names");
        }
        std::vector<DetectorKind> out;
        for (const auto &e : v) {
            if (!e.is_string()) {
                throw ConfigError(path_ + "." + key + ": expected an array of detector names");
            }
            out.push_back(detector(e.get<std::string>(), key));
        }
        return out;
    }

    DetectorKind detector(const std::string &name, const std::string &key) {
        try {
            return parse_detector(name);
        } catch (const std::invalid_argument &e) {
            throw ConfigError(path_ + "." + key + ": " + e.what());
        }
    }

    const json &array(const std::string &key) {
        const json &v = at(key);
        if (!v.is_array()) {
            throw ConfigError(path_ + "." + key + ": expected an array");
        }
        return v;
    }

    std::string child(const std::string &key) const { return path_ + "." + key; }

    void finish() const {
        for (const auto &[key, value] : node_.items()) {
            if (!seen_.count(key)) {
                throw ConfigError(path_ + ": unknown key '" + key + "'");
            }
        }
    }

   private:
    const json &node_;
    std::string path_;
    std::set<std::string> seen_;
};

template <typename F>
void checked(const std::string &path, F body) {
    try {
        body();
    } catch (const ConfigError &) {
        throw;
    } catch (const std::exception &e) {
        throw ConfigError(path + ": " + e.what());
    }
}

void require_nonempty(const std::vector<double> &v, const std::string &path) {
    if (v.empty()) {
        throw ConfigError(path + ": must not be empty");
    }
}

void require_range(const std::vector<double> &v, double lo, double hi, const std::string &path) {
    for (double x : v) {
        if (!(x >= lo && x <= hi)) {
            throw ConfigError(path + ": values must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
        }
    }
}

Hardware read_hardware(const json &node) {
    ObjectReader r(node, "hardware");
    Hardware h;
    h.local_transmittance = r.number("tau", h.local_transmittance);
    h.detector.efficiency = r.number("eta", h.detector.efficiency);
    if (r.has("detector")) {
        h.detector.kind = r.detector(r.string("detector"), "detector");
    }
    h.attenuation_length_km = r.number("L_att_km", h.attenuation_length_km);
    h.light_speed_m_per_s = r.number("c_m_per_s", h.light_speed_m_per_s);
    h.source_rate_hz = r.number("f_hz", h.source_rate_hz);
    r.finish();
    checked("hardware", [&] { h.validate(); });
    return h;
}

PerfBlock read_perf(const json &node) {
    ObjectReader r(node, "perf");
    PerfBlock b;
    if (r.has("detectors")) {
        b.detectors = r.detectors("detectors");
    }
    b.beta_sq = r.numbers("beta_sq");
    b.t_a = r.numbers("T_A");
    b.t_b = r.numbers("T_B");
    if (r.has("k_max")) {
        std::int64_t k = r.integer("k_max");
        if (k < 0 || k > kMaxTruncationOrder) {
            throw ConfigError("perf.k_max: must lie in [0, " + std::to_string(kMaxTruncationOrder) + "]");
        }
        b.k_max = static_cast<int>(k);
    }
    r.finish();
    require_nonempty(b.beta_sq, "perf.beta_sq");
    require_nonempty(b.t_a, "perf.T_A");
    require_nonempty(b.t_b, "perf.T_B");
    require_range(b.beta_sq, 0.0, 1e3, "perf.beta_sq");
    require_range(b.t_a, 1e-300, 1.0, "perf.T_A");
    require_range(b.t_b, 1e-300, 1.0, "perf.T_B");
    return b;
}

RepeaterBlock read_repeater(const json &node) {
    ObjectReader r(node, "repeater");
    RepeaterBlock b;
    b.lengths_km = r.numbers("lengths_km");
    if (r.has("target_fidelities")) {
        b.target_fidelities = r.numbers("target_fidelities");
    }
    if (r.has("detectors")) {
        b.detectors = r.detectors("detectors");
    }
    if (r.has("max_nesting")) {
        std::int64_t n = r.integer("max_nesting");
        if (n < 0 || n > 40) {
            throw ConfigError("repeater.max_nesting: must lie in [0, 40]");
        }
        b.max_nesting = static_cast<int>(n);
    }
    r.finish();
    require_nonempty(b.lengths_km, "repeater.lengths_km");
    require_nonempty(b.target_fidelities, "repeater.target_fidelities");
    for (std::size_t i = 0; i < b.lengths_km.size(); i++) {
        if (!(b.lengths_km[i] > 0.0) || (i > 0 && !(b.lengths_km[i] > b.lengths_km[i - 1]))) {
            throw ConfigError("repeater.lengths_km: must be positive and strictly ascending");
        }
    }
    for (double f : b.target_fidelities) {
        if (!(f > 0.5 && f < 1.0)) {
            throw ConfigError("repeater.target_fidelities: values must lie in (0.5, 1)");
        }
    }
    return b;
}

DistillBlock read_distill(const json &node) {
    ObjectReader r(node, "distill");
    DistillBlock b;
    if (r.has("beta_sq")) {
        b.beta_sq = r.numbers("beta_sq");
    }
    if (r.has("fidelities")) {
        b.fidelities = r.numbers("fidelities");
        require_nonempty(b.fidelities, "distill.fidelities");
    }
    r.finish();
    require_nonempty(b.beta_sq, "distill.beta_sq");
    require_range(b.beta_sq, 0.0, 1e3, "distill.beta_sq");
    require_range(b.fidelities, 0.0, 1.0, "distill.fidelities");
    return b;
}

WaitingTimeCase read_waiting_case(const json &node, const std::string &path) {
    ObjectReader r(node, path);
    WaitingTimeCase c;
    std::int64_t n = r.integer("nesting");
    if (n < 0 || n > 30) {
        throw ConfigError(path + ".nesting: must lie in [0, 30]");
    }
    c.nesting = static_cast<int>(n);
    c.p_gen = r.optional_number("p_gen");
    c.p_swap = r.optional_number("p_swap");
    c.length_km = r.optional_number("length_km");
    c.beta_g_sq = r.optional_number("beta_g_sq");
    c.beta_s_sq = r.optional_number("beta_s_sq");
    r.finish();
    bool explicit_p = c.p_gen || c.p_swap;
    bool chain = c.length_km || c.beta_g_sq || c.beta_s_sq;
    if (explicit_p == chain) {
        throw ConfigError(path + ": give either p_gen and p_swap, or length_km, beta_g_sq and beta_s_sq");
    }
    if (explicit_p) {
        if (!c.p_gen || !c.p_swap) {
            throw ConfigError(path + ": p_gen and p_swap are both required");
        }
        for (double p : {*c.p_gen, *c.p_swap}) {
            if (!(p > 0.0 && p <= 1.0)) {
                throw ConfigError(path + ": probabilities must lie in (0, 1]");
            }
        }
    } else if (!c.length_km || !c.beta_g_sq || !c.beta_s_sq) {
        throw ConfigError(path + ": length_km, beta_g_sq and beta_s_sq are all required");
    }
    return c;
}

OutcomeCase read_outcome_case(const json &node, const std::string &path) {
    ObjectReader r(node, path);
    OutcomeCase c;
    c.beta_sq = r.number("beta_sq");
    c.t_a = r.number("T_A");
    c.t_b = r.number("T_B");
    r.finish();
    checked(path, [&] {
        InteractionParams::from_beta_sq(c.beta_sq).validate();
        Transmittances{c.t_a, c.t_b}.validate();
    });
    return c;
}

MonteCarloBlock read_montecarlo(const json &node) {
    ObjectReader r(node, "montecarlo");
    MonteCarloBlock b;
    b.seed = r.unsigned_integer("seed", b.seed);
    b.trials = r.unsigned_integer("trials", b.trials);
    if (r.has("waiting_time")) {
        const json &cases = r.array("waiting_time");
        for (std::size_t i = 0; i < cases.size(); i++) {
            b.waiting_time.push_back(read_waiting_case(cases[i], "montecarlo.waiting_time[" + std::to_string(i) + "]"));
        }
    }
    if (r.has("outcomes")) {
        const json &cases = r.array("outcomes");
        for (std::size_t i = 0; i < cases.size(); i++) {
            b.outcomes.push_back(read_outcome_case(cases[i], "montecarlo.outcomes[" + std::to_string(i) + "]"));
        }
    }
    r.finish();
    if (b.trials == 0) {
        throw ConfigError("montecarlo.trials: must be at least 1");
    }
    if (b.waiting_time.empty() && b.outcomes.empty()) {
        throw ConfigError("montecarlo: needs at least one waiting_time or outcomes case");
    }
    return b;
}

OpticsBlock read_optics(const json &node) {
    ObjectReader r(node, "optics");
    OpticsBlock b;
    bool has_beta = r.has("beta");
    bool has_beta_sq = r.has("beta_sq");
    bool has_alpha = r.has("alpha");
    if (has_beta + has_beta_sq + has_alpha != 1) {
        throw ConfigError("optics: give exactly one of beta, beta_sq or alpha (with theta)");
    }
    checked("optics", [&] {
        if (has_alpha) {
            b.params = InteractionParams::from_pulse(r.number("alpha"), r.number("theta"));
        } else {
            b.params = has_beta ? InteractionParams::from_beta(r.number("beta"))
                                : InteractionParams::from_beta_sq(r.number("beta_sq"));
            if (r.has("theta")) {
                throw ConfigError("optics.theta: only allowed together with alpha");
            }
        }
        b.params.validate();
    });
    b.t_a = r.number("T_A", b.t_a);
    b.t_b = r.number("T_B", b.t_b);
    if (r.has("variant")) {
        checked("optics.variant", [&] { b.variant = parse_variant(r.string("variant")); });
    }
    b.fock_check = r.boolean("fock_check", b.fock_check);
    r.finish();
    checked("optics", [&] { Transmittances{b.t_a, b.t_b}.validate(); });
    return b;
}

ordered_json detector_list(const std::vector<DetectorKind> &kinds) {
    ordered_json a = ordered_json::array();
    for (DetectorKind k : kinds) {
        a.push_back(std::string(detector_name(k)));
    }
    return a;
}

}  // namespace

std::string_view variant_name(DisplacementVariant variant) {
    return variant == DisplacementVariant::CentralDisplacement ? "central" : "local";
}

DisplacementVariant parse_variant(std::string_view name) {
    if (name == "central") {
        return DisplacementVariant::CentralDisplacement;
    }
    if (name == "local") {
        return DisplacementVariant::LocalDisplacement;
    }
    throw std::invalid_argument("unknown displacement variant '" + std::string(name) + "' (central or local)");
}

RunConfig RunConfig::from_json(const json &doc) {
    ObjectReader r(doc, "config");
    RunConfig c;
    if (r.has("hardware")) {
        c.hardware = read_hardware(r.at("hardware"));
    }
    if (r.has("geometry")) {
        ObjectReader g(r.at("geometry"), "geometry");
        checked("geometry.kind", [&] { c.geometry = parse_geometry(g.string("kind")); });
        g.finish();
    }
    if (r.has("perf")) {
        c.perf = read_perf(r.at("perf"));
    }
    if (r.has("repeater")) {
        c.repeater = read_repeater(r.at("repeater"));
    }
    if (r.has("distill")) {
        c.distill = read_distill(r.at("distill"));
    }
    if (r.has("montecarlo")) {
        c.montecarlo = read_montecarlo(r.at("montecarlo"));
    }
    if (r.has("optics")) {
        c.optics = read_optics(r.at("optics"));
    }
    r.finish();
    return c;
}

RunConfig RunConfig::parse(const std::string &text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error &e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    return from_json(doc);
}

RunConfig RunConfig::load(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file '" + path + "'");
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse(buffer.str());
}

ordered_json RunConfig::to_json() const {
    ordered_json doc;
    doc["hardware"] = {
        {"tau", hardware.local_transmittance},
        {"eta", hardware.detector.efficiency},
        {"detector", std::string(detector_name(hardware.detector.kind))},
        {"L_att_km", hardware.attenuation_length_km},
        {"c_m_per_s", hardware.light_speed_m_per_s},
        {"f_hz", hardware.source_rate_hz},
    };
    doc["geometry"] = {{"kind", std::string(geometry_name(geometry))}};
    if (perf) {
        ordered_json p;
        if (!perf->detectors.empty()) {
            p["detectors"] = detector_list(perf->detectors);
        }
        p["beta_sq"] = perf->beta_sq;
        p["T_A"] = perf->t_a;
        p["T_B"] = perf->t_b;
        if (perf->k_max) {
            p["k_max"] = *perf->k_max;
        }
        doc["perf"] = p;
    }
    if (repeater) {
        ordered_json p;
        p["lengths_km"] = repeater->lengths_km;
        p["target_fidelities"] = repeater->target_fidelities;
        if (!repeater->detectors.empty()) {
            p["detectors"] = detector_list(repeater->detectors);
        }
        p["max_nesting"] = repeater->max_nesting;
        doc["repeater"] = p;
    }
    if (distill) {
        ordered_json p;
        p["beta_sq"] = distill->beta_sq;
        if (!distill->fidelities.empty()) {
            p["fidelities"] = distill->fidelities;
        }
        doc["distill"] = p;
    }
    if (montecarlo) {
        ordered_json p;
        p["seed"] = montecarlo->seed;
        p["trials"] = montecarlo->trials;
        if (!montecarlo->waiting_time.empty()) {
            ordered_json cases = ordered_json::array();
            for (const auto &w : montecarlo->waiting_time) {
                ordered_json c;
                c["nesting"] = w.nesting;
                if (w.p_gen) {
                    c["p_gen"] = *w.p_gen;
                    c["p_swap"] = *w.p_swap;
                } else {
                    c["length_km"] = *w.length_km;
                    c["beta_g_sq"] = *w.beta_g_sq;
                    c["beta_s_sq"] = *w.beta_s_sq;
                }
                cases.push_back(c);
            }
            p["waiting_time"] = cases;
        }
        if (!montecarlo->outcomes.empty()) {
            ordered_json cases = ordered_json::array();
            for (const auto &o : montecarlo->outcomes) {
                cases.push_back({{"beta_sq", o.beta_sq}, {"T_A", o.t_a}, {"T_B", o.t_b}});
            }
            p["outcomes"] = cases;
        }
        doc["montecarlo"] = p;
    }
    if (optics) {
        ordered_json p;
        if (optics->params.alpha) {
            p["alpha"] = *optics->params.alpha;
            p["theta"] = optics->params.pulse_theta();
        } else {
            p["beta"] = optics->params.beta;
        }
        p["T_A"] = optics->t_a;
        p["T_B"] = optics->t_b;
        p["variant"] = std::string(variant_name(optics->variant));
        p["fock_check"] = optics->fock_check;
        doc["optics"] = p;
    }
    return doc;
}

}  // namespace rnpm
