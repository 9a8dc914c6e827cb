#ifndef RNPM_OPTICS_H
#define RNPM_OPTICS_H

#include <array>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "rnpm/core_formulas.h"
#include "rnpm/density_matrix.h"

namespace rnpm {

/// Where the local-oscillator displacement happens.
///
/// CentralDisplacement displaces the constructive output port at the middle
/// station after the beam splitter. LocalDisplacement displaces each pulse
/// right after its interaction with the memory, before the channel.
enum class DisplacementVariant { CentralDisplacement, LocalDisplacement };

/// One qubit-basis branch |jk>_AB with the coherent states it carries.
///
/// `log_weight` accumulates the branch's complex log-amplitude factor
/// (interaction and displacement phases). `mode[0]`, `mode[1]` are the
/// travelling pulses: a, b before the beam splitter and d1, d2 after it.
/// `lost[0]`, `lost[1]` are the components that leaked into the channel
/// environments of arms A and B.
struct ModeBranch {
    int label = 0;  // 2 * j + k
    complex log_weight = 0.0;
    std::array<complex, 2> mode{};
    std::array<complex, 2> lost{};
};

struct BranchState {
    std::vector<ModeBranch> branches;
};

struct ProtocolConfig {
    InteractionParams params;
    Transmittances transmittances;
    DetectorModel detector;
    DisplacementVariant variant = DisplacementVariant::CentralDisplacement;
    DensityMatrix initial_state = DensityMatrix::from_pure(states::plus(2));

    static ProtocolConfig from_geometry(
        const InteractionParams &params, const LinkGeometry &geometry, const DetectorModel &detector,
        DisplacementVariant variant);

    void validate() const;
};

/// One detector record (m, n) and the unnormalized post-measurement state of
/// AB after the parity-conditioned phase correction. The trace of `weight` is
/// the outcome probability.
struct OutcomeEntry {
    int m = 0;
    int n = 0;
    DensityMatrix weight{2};

    double probability() const { return weight.trace(); }
    /// m > 0 xor n > 0.
    bool success() const { return (m > 0) != (n > 0); }
    /// 1 for a click in d1 only (odd), 0 for a click in d2 only (even).
    int parity() const { return m > 0 ? 1 : 0; }
    DensityMatrix conditional() const { return weight.normalized(); }
};

struct OutcomeEnsemble {
    std::map<std::pair<int, int>, OutcomeEntry> entries;

    double total_probability() const;
    double success_probability() const;
    const OutcomeEntry *find(int m, int n) const;
};

/// Qubit-conditional interaction of one pulse with its memory. `side` 0 acts
/// with qubit A on mode[0], side 1 with qubit B on mode[1].
BranchState interact(const BranchState &state, int side, double theta);

/// Coherent displacement of mode[`which`] in every branch by `gamma`.
BranchState displace(const BranchState &state, int which, complex gamma);

/// Channel loss: each travelling amplitude is scaled by sqrt(T) and the rest
/// is recorded as the lost environment amplitude.
BranchState apply_loss(const BranchState &state, Transmittances t);

/// 50:50 beam splitter d1 = (c1 - c2)/sqrt(2), d2 = (c1 + c2)/sqrt(2).
BranchState beam_splitter(const BranchState &state);

/// <gamma|gamma'> between coherent states.
complex coherent_overlap(complex gamma, complex gamma_prime);

/// <gamma| Pi_m |gamma'> for the detector POVM. For Threshold and
/// SinglePhoton `m` is the click record in {0, 1}.
complex povm_overlap(const DetectorModel &detector, int m, complex gamma, complex gamma_prime);

/// Branch state right before detection: interaction, loss, beam splitter and
/// displacement according to the variant.
BranchState propagate(const ProtocolConfig &config);

/// Largest detector record enumerated for number-resolving detectors.
int outcome_cutoff(const ProtocolConfig &config);

/// Elementwise multiplier K with rho_out = rho_in o K for detector record
/// (m, n), including Bob's conditional phase flip.
Eigen::Matrix4cd outcome_kernel(const ProtocolConfig &config, const BranchState &propagated, int m, int n);

OutcomeEnsemble run_protocol(const ProtocolConfig &config);

/// Truncated number-state simulation of the same protocol: explicit
/// displacement and beam-splitter matrices, loss through a traced-out ancilla.
/// `n_max` is the largest photon number kept per input mode. Throws
/// TruncationError when the coherent tail above n_max exceeds 1e-10.
OutcomeEnsemble fock_oracle(const ProtocolConfig &config, int n_max);
OutcomeEnsemble fock_oracle(const ProtocolConfig &config);

/// Smallest n_max satisfying the fock_oracle tail requirement.
int fock_cutoff(const ProtocolConfig &config);

/// Decomposition of a conditional state as (1 - eps) P rho P + eps Z P rho P Z
/// (normalized) on the given parity subspace, with Z acting on qubit B.
struct PhaseErrorFit {
    double epsilon = 0.0;
    double residual = 0.0;  // max entry deviation from the fitted form
};

std::optional<PhaseErrorFit> fit_phase_error(const DensityMatrix &conditional, const DensityMatrix &input, int parity);

/// Largest entry difference between two ensembles over the union of records.
double max_ensemble_difference(const OutcomeEnsemble &a, const OutcomeEnsemble &b);

}  // namespace rnpm

#endif
