#ifndef RNPM_DISTILLATION_H
#define RNPM_DISTILLATION_H

#include "rnpm/core_formulas.h"
#include "rnpm/density_matrix.h"

namespace rnpm {

/// F |Phi+><Phi+| + (1 - F)/3 (|Phi-><Phi-| + |Psi+><Psi+| + |Psi-><Psi-|).
struct WernerState {
    double fidelity = 1.0;

    DensityMatrix matrix() const;
};

/// Exact average of (U x U*) rho (U x U*)^dag over the 24 single-qubit
/// Clifford operations.
DensityMatrix twirl(const DensityMatrix &rho);
WernerState twirl_to_werner(const DensityMatrix &rho);

struct RecurrenceResult {
    /// Probability that the round keeps a pair: for recurrence_oracle the
    /// probability that the parities agree, for recurrence_step also times
    /// the success probability of both parity measurements.
    double success_probability = 0.0;
    double fidelity = 0.0;
    /// Probability that the announced parities agree.
    double agreement_probability = 0.0;
};

/// One recurrence round on two Werner(F) pairs: each party runs parity_check
/// on its two halves with phase error epsilon on the kept qubit, the pair is
/// kept when the announced parities agree.
RecurrenceResult recurrence_oracle(double fidelity, double epsilon);

/// recurrence_oracle with epsilon = epsilon(beta, tau, tau) and the success
/// probability scaled by p(beta)^2.
RecurrenceResult recurrence_step(
    double fidelity, const InteractionParams &params, double tau, const DetectorModel &detector);

}  // namespace rnpm

#endif
