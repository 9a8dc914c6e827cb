#ifndef RNPM_MONTECARLO_H
#define RNPM_MONTECARLO_H

#include <cstdint>
#include <random>
#include <vector>

#include "rnpm/optics.h"
#include "rnpm/repeater.h"

namespace rnpm {

/// Per-trial generator: mt19937_64 seeded from (seed, trial) so that each
/// trial draws the same numbers whichever worker runs it.
class TrialRng {
  public:
    TrialRng(std::uint64_t seed, std::uint64_t trial);

    /// Uniform on [0, 1) with 53 random bits.
    double uniform01();
    /// Number of Bernoulli(p) attempts up to and including the first success.
    std::uint64_t geometric(double p);
    bool bernoulli(double p);

  private:
    std::mt19937_64 engine_;
};

/// Completion times of the top-level pair in units of one elementary trial
/// (l0 / c). Swaps take no time; a failed swap discards both children, which
/// are then regenerated from scratch.
struct WaitingTimeSamples {
    std::vector<double> samples;

    double mean() const;
    double standard_error() const;
};

WaitingTimeSamples simulate_waiting_time(
    int nesting, double p_gen, double p_swap, std::uint64_t seed, std::uint64_t trials, int threads = 0);
WaitingTimeSamples simulate_waiting_time(
    const ChainConfig &config, std::uint64_t seed, std::uint64_t trials, int threads = 0);

/// E[max(X, Y)] for independent geometric X, Y with success probability p.
double expected_max_geometric(double p);
/// (3/2)^n / (p_gen p_swap^n), the closed-form time in units of l0 / c.
double predicted_waiting_time(int nesting, double p_gen, double p_swap);

/// Sampled detector records of the optical protocol on |++>: success rate and
/// phase-error rate among successes, with binomial standard errors.
struct OutcomeSampleSummary {
    std::uint64_t trials = 0;
    std::uint64_t successes = 0;
    std::uint64_t phase_errors = 0;

    double p_hat() const;
    double p_standard_error() const;
    double epsilon_hat() const;
    double epsilon_standard_error() const;
};

OutcomeSampleSummary sample_rnpm_outcomes(
    const ProtocolConfig &config, std::uint64_t seed, std::uint64_t trials, int threads = 0);

}  // namespace rnpm

#endif
