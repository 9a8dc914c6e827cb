#include "rnpm/distillation.h"

#include <stdexcept>
#include <vector>

#include "rnpm/gadgets.h"

namespace rnpm {

namespace {

// The 24 single-qubit Cliffords up to phase, generated from H and S.
const std::vector<Eigen::Matrix2cd> &clifford_group() {
    static const std::vector<Eigen::Matrix2cd> group = [] {
        auto same_up_to_phase = [](const Eigen::Matrix2cd &a, const Eigen::Matrix2cd &b) {
            complex overlap = (a.adjoint() * b).trace() / 2.0;
            return std::abs(std::abs(overlap) - 1.0) < 1e-9;
        };
        std::vector<Eigen::Matrix2cd> found{gates::identity()};
        const Eigen::Matrix2cd generators[] = {gates::hadamard(), gates::phase_s()};
        for (std::size_t i = 0; i < found.size(); i++) {
            for (const auto &g : generators) {
                Eigen::Matrix2cd next = g * found[i];
                bool known = false;
                for (const auto &f : found) {
                    known = known || same_up_to_phase(f, next);
                }
                if (!known) {
                    found.push_back(next);
                }
            }
        }
        if (found.size() != 24) {
            throw std::logic_error("Clifford group enumeration failed");
        }
        return found;
    }();
    return group;
}

void check_fidelity(double fidelity) {
    if (!(fidelity >= 0.0 && fidelity <= 1.0)) {
        throw std::domain_error("fidelity must lie in [0, 1]");
    }
}

}  // namespace

DensityMatrix WernerState::matrix() const {
    check_fidelity(fidelity);
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(4, 4);
    for (int parity = 0; parity < 2; parity++) {
        for (int phase = 0; phase < 2; phase++) {
            Eigen::Vector4cd v = states::bell(parity, phase);
            double w = (parity == 0 && phase == 0) ? fidelity : (1.0 - fidelity) / 3.0;
            m += w * v * v.adjoint();
        }
    }
    return DensityMatrix(m);
}

DensityMatrix twirl(const DensityMatrix &rho) {
    if (rho.num_qubits() != 2) {
        throw std::invalid_argument("twirl acts on two-qubit states");
    }
    Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(4, 4);
    const auto &group = clifford_group();
    for (const auto &u : group) {
        Eigen::Matrix4cd v;
        for (int r = 0; r < 4; r++) {
            for (int c = 0; c < 4; c++) {
                v(r, c) = u(r >> 1, c >> 1) * std::conj(u(r & 1, c & 1));
            }
        }
        sum += v * rho.matrix() * v.adjoint();
    }
    return DensityMatrix(Eigen::MatrixXcd(sum / static_cast<double>(group.size())));
}

WernerState twirl_to_werner(const DensityMatrix &rho) {
    if (rho.num_qubits() != 2) {
        throw std::invalid_argument("Werner twirl acts on two-qubit states");
    }
    if (!rho.is_valid_state(1e-9)) {
        throw std::invalid_argument("input is not a valid density matrix");
    }
    return WernerState{twirl(rho).fidelity(states::phi_plus())};
}

RecurrenceResult recurrence_oracle(double fidelity, double epsilon) {
    check_fidelity(fidelity);
    if (!(epsilon >= 0.0 && epsilon <= 0.5)) {
        throw std::domain_error("phase error must lie in [0, 1/2]");
    }
    DensityMatrix pair = WernerState{fidelity}.matrix();
    // Register (A1, B1, A2, B2).
    DensityMatrix joint = pair.tensor(pair);

    RecurrenceResult r;
    double kept_fidelity = 0.0;
    for (const auto &alice : parity_check(joint, 0, 2, epsilon)) {
        // Alice's A2 is gone: (A1, B1, B2).
        DensityMatrix after_alice = alice.corrected();
        for (const auto &bob : parity_check(after_alice, 1, 2, epsilon)) {
            if (bob.parity != alice.parity) {
                continue;
            }
            double weight = alice.probability * bob.probability;
            r.agreement_probability += weight;
            kept_fidelity += weight * bob.corrected().fidelity(states::phi_plus());
        }
    }
    r.success_probability = r.agreement_probability;
    r.fidelity = r.agreement_probability > 0.0 ? kept_fidelity / r.agreement_probability : 0.0;
    return r;
}

RecurrenceResult recurrence_step(
    double fidelity, const InteractionParams &params, double tau, const DetectorModel &detector) {
    PerfPoint perf = performance(detector, params, Transmittances{tau, tau});
    RecurrenceResult r = recurrence_oracle(fidelity, perf.epsilon);
    r.success_probability = r.agreement_probability * perf.p * perf.p;
    return r;
}

}  // namespace rnpm
