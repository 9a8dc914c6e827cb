#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "rnpm/commands.h"
#include "rnpm/distillation.h"
#include "rnpm/montecarlo.h"
#include "rnpm/optimizer.h"
#include "rnpm/parallel.h"
#include "rnpm/repeater.h"

namespace py = pybind11;
using namespace rnpm;

namespace {

Hardware make_hardware(double tau, double eta, DetectorKind detector, double attenuation_length_km) {
    Hardware hw;
    hw.local_transmittance = tau;
    hw.detector = {detector, eta};
    hw.attenuation_length_km = attenuation_length_km;
    return hw;
}

ChainConfig make_chain(double length_km, int nesting, double beta_g_sq, double beta_s_sq, double tau, double eta,
                       DetectorKind detector, const std::string &geometry) {
    ChainConfig c;
    c.length_km = length_km;
    c.nesting = nesting;
    c.generation = InteractionParams::from_beta_sq(beta_g_sq);
    c.swapping = InteractionParams::from_beta_sq(beta_s_sq);
    c.hardware = make_hardware(tau, eta, detector, 22.0);
    c.geometry = parse_geometry(geometry);
    return c;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Bindings for the rnpm C++ library";

    py::enum_<DetectorKind>(m, "DetectorKind")
        .value("NUMBER_RESOLVING", DetectorKind::NumberResolving)
        .value("SINGLE_PHOTON", DetectorKind::SinglePhoton)
        .value("THRESHOLD", DetectorKind::Threshold);

    py::class_<PerfPoint>(m, "PerfPoint")
        .def_readonly("p", &PerfPoint::p)
        .def_readonly("epsilon", &PerfPoint::epsilon)
        .def("__repr__", [](const PerfPoint &p) {
            return "PerfPoint(p=" + format_number(p.p) + ", epsilon=" + format_number(p.epsilon) + ")";
        });

    py::class_<ChainResult>(m, "ChainResult")
        .def_readonly("total_time_s", &ChainResult::total_time_s)
        .def_readonly("fidelity", &ChainResult::fidelity)
        .def_readonly("eps_levels", &ChainResult::eps_levels)
        .def_readonly("t_levels", &ChainResult::t_levels);

    py::class_<OptimumRecord>(m, "OptimumRecord")
        .def_readonly("feasible", &OptimumRecord::feasible)
        .def_readonly("nesting", &OptimumRecord::nesting)
        .def_readonly("beta_g_sq", &OptimumRecord::beta_g_sq)
        .def_readonly("beta_s_sq", &OptimumRecord::beta_s_sq)
        .def_readonly("time_s", &OptimumRecord::time_s)
        .def_readonly("fidelity", &OptimumRecord::fidelity)
        .def_readonly("direct_time_s", &OptimumRecord::direct_time_s)
        .def_readonly("error", &OptimumRecord::error);

    py::class_<RecurrenceResult>(m, "RecurrenceResult")
        .def_readonly("success_probability", &RecurrenceResult::success_probability)
        .def_readonly("fidelity", &RecurrenceResult::fidelity)
        .def_readonly("agreement_probability", &RecurrenceResult::agreement_probability);

    m.def(
        "performance",
        [](DetectorKind detector, double eta, double beta_sq, double t_a, double t_b) {
            return performance({detector, eta}, InteractionParams::from_beta_sq(beta_sq), {t_a, t_b});
        },
        py::arg("detector"), py::arg("eta"), py::arg("beta_sq"), py::arg("t_a"), py::arg("t_b"));
    m.def(
        "performance_oracle",
        [](DetectorKind detector, double eta, double beta_sq, double t_a, double t_b) {
            return performance_oracle({detector, eta}, InteractionParams::from_beta_sq(beta_sq), {t_a, t_b});
        },
        py::arg("detector"), py::arg("eta"), py::arg("beta_sq"), py::arg("t_a"), py::arg("t_b"));

    auto chain_args = [](auto fn) {
        return [fn](double length_km, int nesting, double beta_g_sq, double beta_s_sq, double tau, double eta,
                    DetectorKind detector, const std::string &geometry) {
            return fn(make_chain(length_km, nesting, beta_g_sq, beta_s_sq, tau, eta, detector, geometry));
        };
    };
    m.def("chain_closed_form", chain_args([](const ChainConfig &c) { return chain_closed_form(c); }),
          py::arg("length_km"), py::arg("nesting"), py::arg("beta_g_sq"), py::arg("beta_s_sq"), py::arg("tau") = 0.98,
          py::arg("eta") = 0.95, py::arg("detector") = DetectorKind::SinglePhoton, py::arg("geometry") = "midpoint");
    m.def("chain_recursive", chain_args([](const ChainConfig &c) { return chain_recursive(c); }),
          py::arg("length_km"), py::arg("nesting"), py::arg("beta_g_sq"), py::arg("beta_s_sq"), py::arg("tau") = 0.98,
          py::arg("eta") = 0.95, py::arg("detector") = DetectorKind::SinglePhoton, py::arg("geometry") = "midpoint");

    m.def(
        "optimize_chain",
        [](double length_km, double target_fidelity, double tau, double eta, DetectorKind detector,
           const std::string &geometry) {
            Hardware hw = make_hardware(tau, eta, detector, 22.0);
            py::gil_scoped_release release;
            return optimize_chain(length_km, target_fidelity, hw, parse_geometry(geometry), detector);
        },
        py::arg("length_km"), py::arg("target_fidelity"), py::arg("tau") = 0.98, py::arg("eta") = 0.95,
        py::arg("detector") = DetectorKind::SinglePhoton, py::arg("geometry") = "midpoint");

    m.def("recurrence_oracle", &recurrence_oracle, py::arg("fidelity"), py::arg("epsilon"));
    m.def(
        "recurrence_step",
        [](double fidelity, double beta_sq, double tau, double eta, DetectorKind detector) {
            return recurrence_step(fidelity, InteractionParams::from_beta_sq(beta_sq), tau, {detector, eta});
        },
        py::arg("fidelity"), py::arg("beta_sq"), py::arg("tau") = 0.98, py::arg("eta") = 0.95,
        py::arg("detector") = DetectorKind::SinglePhoton);

    m.def("key_rate", &key_rate, py::arg("fidelity"));
    m.def("binary_entropy", &binary_entropy, py::arg("x"));
    m.def("direct_transmission_time", &direct_transmission_time, py::arg("length_km"),
          py::arg("source_rate_hz") = 1e10, py::arg("eta") = 0.95, py::arg("attenuation_length_km") = 22.0);

    m.def(
        "simulate_waiting_time",
        [](int nesting, double p_gen, double p_swap, std::uint64_t seed, std::uint64_t trials, int threads) {
            py::gil_scoped_release release;
            return simulate_waiting_time(nesting, p_gen, p_swap, seed, trials, threads).samples;
        },
        "Waiting times in units of l0 / c, one per trial.", py::arg("nesting"), py::arg("p_gen"), py::arg("p_swap"),
        py::arg("seed"), py::arg("trials"), py::arg("threads") = 0);

    m.def(
        "run_command",
        [](const std::string &command, const std::string &config_text, const std::string &format, int threads) {
            std::ostringstream out;
            std::ostringstream err;
            int code = 0;
            {
                py::gil_scoped_release release;
                try {
                    RunConfig config = RunConfig::parse(config_text);
                    code = run_command(command, config, parse_format(format), threads > 0 ? threads : worker_count(),
                                       out, err);
                } catch (const ConfigError &e) {
                    err << "config error: " << e.what() << "\n";
                    code = 2;
                }
            }
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("command"), py::arg("config"), py::arg("format") = "csv", py::arg("threads") = 0);
}
