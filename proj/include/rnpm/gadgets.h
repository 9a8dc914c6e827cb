#ifndef RNPM_GADGETS_H
#define RNPM_GADGETS_H

#include <optional>
#include <string>
#include <vector>

#include "rnpm/density_matrix.h"

namespace rnpm {

/// Pending Pauli corrections, applied in order.
struct PauliFrame {
    struct Correction {
        int qubit;
        char pauli;  // 'X' or 'Z'
    };
    std::vector<Correction> corrections;

    void push(int qubit, char pauli) { corrections.push_back({qubit, pauli}); }
    DensityMatrix apply(const DensityMatrix &rho) const;
};

/// One branch of a gadget. `state` is the normalized post-state with the
/// frame not yet applied; it is empty for failure branches.
struct GadgetOutcome {
    std::string label;
    bool failed = false;
    int parity = 0;
    std::vector<int> bits;
    double probability = 0.0;
    std::optional<DensityMatrix> state;
    PauliFrame frame;

    /// The post-state with the Pauli frame applied.
    DensityMatrix corrected() const;
};

/// Noisy parity measurement on qubits (i, j): with probability p a parity
/// projection (Born weights) followed by a phase flip with probability
/// epsilon on qubit j; with probability 1 - p a failure flag.
std::vector<GadgetOutcome> rnpm_channel(const DensityMatrix &rho, int i, int j, double p, double epsilon);

/// Bell measurement of (i, j) built from a successful noisy parity
/// measurement, Hadamards on both qubits and Z measurements. Both qubits are
/// removed from the register. If `correction_qubit` is given (index in the
/// input register), X^parity Z^(a xor b) is recorded on it so that an
/// entanglement-swapped pair is mapped to |Phi+>.
std::vector<GadgetOutcome> bell_measurement(
    const DensityMatrix &rho, int i, int j, double epsilon, std::optional<int> correction_qubit = std::nullopt);

/// Parity check of (a1, a2) from a successful noisy parity measurement, an X
/// measurement of a2 with outcome x and Z^x on a1. a2 is removed; bits = {x}.
std::vector<GadgetOutcome> parity_check(const DensityMatrix &rho, int a1, int a2, double epsilon);

/// Appends a fresh |+> to the chain whose last qubit is its end, measures the
/// parity of (end, fresh) and applies a Hadamard to the fresh qubit. The frame
/// holds Z^parity on the fresh qubit.
std::vector<GadgetOutcome> cluster_extend(const DensityMatrix &chain, double epsilon);

/// Stabilizer generators Z_{i-1} X_i Z_{i+1} of an n-qubit linear cluster.
std::vector<std::string> linear_cluster_stabilizers(int num_qubits);

}  // namespace rnpm

#endif
