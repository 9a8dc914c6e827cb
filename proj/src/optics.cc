#include "rnpm/optics.h"

#include <cmath>
#include <stdexcept>

namespace rnpm {

namespace {

constexpr complex kI(0.0, 1.0);

int qubit_bit(int label, int side) {
    return side == 0 ? (label >> 1) & 1 : label & 1;
}

// exp(z) - 1 without cancellation for small |z|.
complex expm1_complex(complex z) {
    if (std::abs(z) < 1e-3) {
        complex term = z;
        complex sum = z;
        for (int k = 2; k < 12; k++) {
            term *= z / static_cast<double>(k);
            sum += term;
        }
        return sum;
    }
    return std::exp(z) - 1.0;
}

// log <gamma|gamma'>.
complex log_coherent_overlap(complex gamma, complex gamma_prime) {
    return -0.5 * (std::norm(gamma) + std::norm(gamma_prime)) + std::conj(gamma) * gamma_prime;
}

complex number_resolving_overlap(double eta, int m, complex gamma, complex gamma_prime) {
    complex z = std::conj(gamma) * gamma_prime;
    complex exponent = -0.5 * (std::norm(gamma) + std::norm(gamma_prime)) + (1.0 - eta) * z;
    if (m == 0) {
        return std::exp(exponent);
    }
    complex base = eta * z;
    if (base == 0.0) {
        return 0.0;
    }
    return std::exp(exponent + static_cast<double>(m) * std::log(base) - std::lgamma(m + 1.0));
}

}  // namespace

ProtocolConfig ProtocolConfig::from_geometry(
    const InteractionParams &params, const LinkGeometry &geometry, const DetectorModel &detector,
    DisplacementVariant variant) {
    ProtocolConfig c;
    c.params = params;
    c.transmittances = link_transmittance(geometry);
    c.detector = detector;
    c.variant = variant;
    return c;
}

void ProtocolConfig::validate() const {
    params.validate();
    transmittances.validate();
    detector.validate();
    if (initial_state.num_qubits() != 2) {
        throw std::invalid_argument("protocol input must be a two-qubit state");
    }
    if (!initial_state.is_valid_state(1e-9)) {
        throw std::invalid_argument("protocol input is not a valid density matrix");
    }
    if (variant != DisplacementVariant::CentralDisplacement && variant != DisplacementVariant::LocalDisplacement) {
        throw std::invalid_argument("unknown displacement variant");
    }
}

double OutcomeEnsemble::total_probability() const {
    double s = 0.0;
    for (const auto &[key, e] : entries) {
        s += e.probability();
    }
    return s;
}

double OutcomeEnsemble::success_probability() const {
    double s = 0.0;
    for (const auto &[key, e] : entries) {
        if (e.success()) {
            s += e.probability();
        }
    }
    return s;
}

const OutcomeEntry *OutcomeEnsemble::find(int m, int n) const {
    auto it = entries.find({m, n});
    return it == entries.end() ? nullptr : &it->second;
}

BranchState interact(const BranchState &state, int side, double theta) {
    if (side != 0 && side != 1) {
        throw std::invalid_argument("side must be 0 (A) or 1 (B)");
    }
    BranchState r = state;
    for (auto &b : r.branches) {
        double s = qubit_bit(b.label, side) ? -1.0 : 1.0;
        double phi = std::norm(b.mode[side]) * std::sin(theta);
        b.log_weight += -kI * s * phi / 2.0;
        b.mode[side] *= std::exp(kI * s * theta / 2.0);
    }
    return r;
}

BranchState displace(const BranchState &state, int which, complex gamma) {
    if (which != 0 && which != 1) {
        throw std::invalid_argument("mode index must be 0 or 1");
    }
    BranchState r = state;
    for (auto &b : r.branches) {
        complex delta = b.mode[which];
        // D(g)|d> = exp((g d* - g* d) / 2) |d + g>
        b.log_weight += (gamma * std::conj(delta) - std::conj(gamma) * delta) / 2.0;
        b.mode[which] = delta + gamma;
    }
    return r;
}

BranchState apply_loss(const BranchState &state, Transmittances t) {
    t.validate();
    BranchState r = state;
    std::array<double, 2> trans{t.a, t.b};
    for (auto &b : r.branches) {
        for (int i = 0; i < 2; i++) {
            if (b.lost[i] != 0.0) {
                throw std::logic_error("loss was already applied to this branch state");
            }
            b.lost[i] = std::sqrt(1.0 - trans[i]) * b.mode[i];
            b.mode[i] *= std::sqrt(trans[i]);
        }
    }
    return r;
}

BranchState beam_splitter(const BranchState &state) {
    BranchState r = state;
    double h = 1.0 / std::sqrt(2.0);
    for (auto &b : r.branches) {
        complex c1 = b.mode[0];
        complex c2 = b.mode[1];
        b.mode[0] = h * (c1 - c2);
        b.mode[1] = h * (c1 + c2);
    }
    return r;
}

complex coherent_overlap(complex gamma, complex gamma_prime) {
    return std::exp(log_coherent_overlap(gamma, gamma_prime));
}

complex povm_overlap(const DetectorModel &detector, int m, complex gamma, complex gamma_prime) {
    detector.validate();
    double eta = detector.efficiency;
    if (m < 0) {
        throw std::invalid_argument("detector record must be non-negative");
    }
    if (detector.kind != DetectorKind::NumberResolving && m > 1) {
        throw std::invalid_argument("click detectors only report 0 or 1");
    }
    switch (detector.kind) {
        case DetectorKind::NumberResolving:
            return number_resolving_overlap(eta, m, gamma, gamma_prime);
        case DetectorKind::Threshold: {
            if (m == 0) {
                return number_resolving_overlap(eta, 0, gamma, gamma_prime);
            }
            complex z = std::conj(gamma) * gamma_prime;
            complex exponent = -0.5 * (std::norm(gamma) + std::norm(gamma_prime)) + (1.0 - eta) * z;
            return std::exp(exponent) * expm1_complex(eta * z);
        }
        case DetectorKind::SinglePhoton:
            if (m == 1) {
                return number_resolving_overlap(eta, 1, gamma, gamma_prime);
            }
            return coherent_overlap(gamma, gamma_prime) - number_resolving_overlap(eta, 1, gamma, gamma_prime);
    }
    throw std::logic_error("unreachable detector kind");
}

BranchState propagate(const ProtocolConfig &config) {
    config.validate();
    double alpha = config.params.pulse_alpha();
    double theta = config.params.pulse_theta();
    std::array<double, 2> pulse{alpha / std::sqrt(config.transmittances.a), alpha / std::sqrt(config.transmittances.b)};

    BranchState s;
    for (int label = 0; label < 4; label++) {
        ModeBranch b;
        b.label = label;
        b.mode = {pulse[0], pulse[1]};
        s.branches.push_back(b);
    }
    s = interact(s, 0, theta);
    s = interact(s, 1, theta);
    double c = std::cos(theta / 2.0);
    if (config.variant == DisplacementVariant::LocalDisplacement) {
        s = displace(s, 0, -pulse[0] * c);
        s = displace(s, 1, -pulse[1] * c);
    }
    s = apply_loss(s, config.transmittances);
    s = beam_splitter(s);
    if (config.variant == DisplacementVariant::CentralDisplacement) {
        s = displace(s, 1, -std::sqrt(2.0) * alpha * c);
    }
    return s;
}

int outcome_cutoff(const ProtocolConfig &config) {
    if (config.detector.kind != DetectorKind::NumberResolving) {
        return 1;
    }
    BranchState s = propagate(config);
    double largest = 0.0;
    for (const auto &b : s.branches) {
        largest = std::max({largest, std::norm(b.mode[0]), std::norm(b.mode[1])});
    }
    return std::max(1, truncation_order(config.detector.efficiency * largest));
}

Eigen::Matrix4cd outcome_kernel(const ProtocolConfig &config, const BranchState &propagated, int m, int n) {
    if (propagated.branches.size() != 4) {
        throw std::invalid_argument("expected the four qubit-basis branches");
    }
    Eigen::Matrix4cd k;
    bool flip = (m + n) % 2 != 0;
    for (const auto &r : propagated.branches) {
        for (const auto &c : propagated.branches) {
            complex log_factor = r.log_weight + std::conj(c.log_weight) + log_coherent_overlap(c.lost[0], r.lost[0]) +
                                 log_coherent_overlap(c.lost[1], r.lost[1]);
            complex value = std::exp(log_factor) * povm_overlap(config.detector, m, c.mode[0], r.mode[0]) *
                            povm_overlap(config.detector, n, c.mode[1], r.mode[1]);
            if (flip && ((r.label ^ c.label) & 1)) {
                value = -value;
            }
            k(r.label, c.label) = value;
        }
    }
    return k;
}

OutcomeEnsemble run_protocol(const ProtocolConfig &config) {
    BranchState s = propagate(config);
    int cutoff = outcome_cutoff(config);
    OutcomeEnsemble ens;
    for (int m = 0; m <= cutoff; m++) {
        for (int n = 0; n <= cutoff; n++) {
            OutcomeEntry e;
            e.m = m;
            e.n = n;
            Eigen::MatrixXcd w = config.initial_state.matrix().cwiseProduct(Eigen::MatrixXcd(outcome_kernel(config, s, m, n)));
            e.weight = DensityMatrix(std::move(w));
            ens.entries.emplace(std::make_pair(m, n), std::move(e));
        }
    }
    return ens;
}

std::optional<PhaseErrorFit> fit_phase_error(const DensityMatrix &conditional, const DensityMatrix &input, int parity) {
    if (conditional.num_qubits() != 2 || input.num_qubits() != 2) {
        throw std::invalid_argument("phase-error fit expects two-qubit states");
    }
    DensityMatrix ideal = input;
    ideal.apply_operator(gates::parity_projector(0, 1, parity, 2));
    if (!(ideal.trace() > 1e-300)) {
        return std::nullopt;
    }
    ideal = ideal.normalized();
    int x = parity == 0 ? 0 : 1;
    int y = parity == 0 ? 3 : 2;
    if (std::abs(ideal(x, y)) < 1e-12) {
        return std::nullopt;
    }
    complex ratio = conditional(x, y) / ideal(x, y);
    PhaseErrorFit fit;
    fit.epsilon = (1.0 - ratio.real()) / 2.0;
    Eigen::MatrixXcd fitted = ideal.matrix();
    fitted(x, y) *= 1.0 - 2.0 * fit.epsilon;
    fitted(y, x) *= 1.0 - 2.0 * fit.epsilon;
    fit.residual = (conditional.matrix() - fitted).cwiseAbs().maxCoeff();
    return fit;
}

double max_ensemble_difference(const OutcomeEnsemble &a, const OutcomeEnsemble &b) {
    double worst = 0.0;
    auto compare = [&](const OutcomeEnsemble &x, const OutcomeEnsemble &y) {
        for (const auto &[key, e] : x.entries) {
            const OutcomeEntry *other = y.find(key.first, key.second);
            double d = other ? e.weight.max_abs_diff(other->weight) : e.weight.matrix().cwiseAbs().maxCoeff();
            worst = std::max(worst, d);
        }
    };
    compare(a, b);
    compare(b, a);
    return worst;
}

}  // namespace rnpm
