#include "rnpm/gadgets.h"

#include <stdexcept>

namespace rnpm {

namespace {

void check_pair(const DensityMatrix &rho, int i, int j) {
    if (i < 0 || j < 0 || i >= rho.num_qubits() || j >= rho.num_qubits() || i == j) {
        throw std::out_of_range("invalid qubit pair for the parity measurement");
    }
}

void check_epsilon(double epsilon) {
    if (!(epsilon >= 0.0 && epsilon <= 0.5)) {
        throw std::domain_error("phase error must lie in [0, 1/2]");
    }
}

// Unnormalized parity projection followed by the phase-flip penalty on j.
DensityMatrix noisy_parity_branch(const DensityMatrix &rho, int i, int j, int parity, double epsilon) {
    DensityMatrix branch = rho;
    branch.apply_operator(gates::parity_projector(i, j, parity, rho.num_qubits()));
    branch.apply_phase_flip(epsilon, j);
    return branch;
}

// Index of `qubit` after removing `removed` from the register.
int after_removal(int qubit, int removed) {
    return qubit > removed ? qubit - 1 : qubit;
}

GadgetOutcome make_outcome(std::string label, int parity, std::vector<int> bits, const DensityMatrix &unnormalized) {
    GadgetOutcome o;
    o.label = std::move(label);
    o.parity = parity;
    o.bits = std::move(bits);
    o.probability = unnormalized.trace();
    o.state = unnormalized.normalized();
    return o;
}

}  // namespace

DensityMatrix PauliFrame::apply(const DensityMatrix &rho) const {
    DensityMatrix r = rho;
    for (const auto &c : corrections) {
        switch (c.pauli) {
            case 'X':
                r.apply_unitary(gates::pauli_x(), c.qubit);
                break;
            case 'Z':
                r.apply_unitary(gates::pauli_z(), c.qubit);
                break;
            default:
                throw std::invalid_argument("frame corrections are X or Z");
        }
    }
    return r;
}

DensityMatrix GadgetOutcome::corrected() const {
    if (!state) {
        throw std::logic_error("failure branch has no post-state");
    }
    return frame.apply(*state);
}

std::vector<GadgetOutcome> rnpm_channel(const DensityMatrix &rho, int i, int j, double p, double epsilon) {
    check_pair(rho, i, j);
    check_epsilon(epsilon);
    if (!(p >= 0.0 && p <= 1.0)) {
        throw std::domain_error("success probability must lie in [0, 1]");
    }
    std::vector<GadgetOutcome> out;
    for (int parity = 0; parity < 2; parity++) {
        DensityMatrix branch = noisy_parity_branch(rho, i, j, parity, epsilon).scaled(p);
        if (branch.trace() > 0.0) {
            out.push_back(make_outcome(parity ? "odd" : "even", parity, {}, branch));
        }
    }
    if (p < 1.0) {
        GadgetOutcome fail;
        fail.label = "fail";
        fail.failed = true;
        fail.probability = 1.0 - p;
        out.push_back(std::move(fail));
    }
    return out;
}

std::vector<GadgetOutcome> bell_measurement(
    const DensityMatrix &rho, int i, int j, double epsilon, std::optional<int> correction_qubit) {
    check_pair(rho, i, j);
    check_epsilon(epsilon);
    if (rho.num_qubits() < 3) {
        throw std::invalid_argument("Bell measurement needs at least one spectator qubit");
    }
    if (correction_qubit && (*correction_qubit == i || *correction_qubit == j || *correction_qubit < 0 ||
                             *correction_qubit >= rho.num_qubits())) {
        throw std::out_of_range("correction qubit must be a spectator");
    }
    std::vector<GadgetOutcome> out;
    for (int parity = 0; parity < 2; parity++) {
        DensityMatrix branch = noisy_parity_branch(rho, i, j, parity, epsilon);
        branch.apply_unitary(gates::hadamard(), i);
        branch.apply_unitary(gates::hadamard(), j);
        for (int a = 0; a < 2; a++) {
            DensityMatrix after_i = branch.project_out(i, a);
            int j_now = after_removal(j, i);
            for (int b = 0; b < 2; b++) {
                DensityMatrix after_j = after_i.project_out(j_now, b);
                if (!(after_j.trace() > 0.0)) {
                    continue;
                }
                std::string label = "s" + std::to_string(parity) + "a" + std::to_string(a) + "b" + std::to_string(b);
                GadgetOutcome o = make_outcome(std::move(label), parity, {a, b}, after_j);
                if (correction_qubit) {
                    int target = after_removal(after_removal(*correction_qubit, i), j_now);
                    if (parity) {
                        o.frame.push(target, 'X');
                    }
                    if (a ^ b) {
                        o.frame.push(target, 'Z');
                    }
                }
                out.push_back(std::move(o));
            }
        }
    }
    return out;
}

std::vector<GadgetOutcome> parity_check(const DensityMatrix &rho, int a1, int a2, double epsilon) {
    check_pair(rho, a1, a2);
    check_epsilon(epsilon);
    if (rho.num_qubits() < 2) {
        throw std::invalid_argument("parity check needs two qubits");
    }
    std::vector<GadgetOutcome> out;
    for (int parity = 0; parity < 2; parity++) {
        DensityMatrix branch = noisy_parity_branch(rho, a1, a2, parity, epsilon);
        for (int x = 0; x < 2; x++) {
            DensityMatrix kept = branch.project_out_x(a2, x);
            if (!(kept.trace() > 0.0)) {
                continue;
            }
            std::string label = "s" + std::to_string(parity) + "x" + std::to_string(x);
            GadgetOutcome o = make_outcome(std::move(label), parity, {x}, kept);
            if (x) {
                o.frame.push(after_removal(a1, a2), 'Z');
            }
            out.push_back(std::move(o));
        }
    }
    return out;
}

std::vector<GadgetOutcome> cluster_extend(const DensityMatrix &chain, double epsilon) {
    check_epsilon(epsilon);
    int n = chain.num_qubits();
    if (n + 1 > DensityMatrix::kMaxQubits) {
        throw std::invalid_argument("cluster chains are limited to 5 qubits after extension");
    }
    DensityMatrix extended = chain.tensor(DensityMatrix::from_pure(states::plus(1)));
    int end = n - 1;
    int fresh = n;
    std::vector<GadgetOutcome> out;
    for (int parity = 0; parity < 2; parity++) {
        DensityMatrix branch = noisy_parity_branch(extended, end, fresh, parity, epsilon);
        if (!(branch.trace() > 0.0)) {
            continue;
        }
        branch.apply_unitary(gates::hadamard(), fresh);
        GadgetOutcome o = make_outcome(parity ? "odd" : "even", parity, {}, branch);
        if (parity) {
            o.frame.push(fresh, 'Z');
        }
        out.push_back(std::move(o));
    }
    return out;
}

std::vector<std::string> linear_cluster_stabilizers(int num_qubits) {
    std::vector<std::string> out;
    for (int i = 0; i < num_qubits; i++) {
        std::string s(num_qubits, 'I');
        s[i] = 'X';
        if (i > 0) {
            s[i - 1] = 'Z';
        }
        if (i + 1 < num_qubits) {
            s[i + 1] = 'Z';
        }
        out.push_back(std::move(s));
    }
    return out;
}

}  // namespace rnpm
