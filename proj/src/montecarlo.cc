#include "rnpm/montecarlo.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rnpm/parallel.h"

namespace rnpm {

namespace {

void check_probability(double p, const char *what) {
    if (!(p > 0.0 && p <= 1.0)) {
        throw std::domain_error(std::string(what) + " must lie in (0, 1]");
    }
}

double level_time(int level, double p_gen, double p_swap, TrialRng &rng) {
    if (level == 0) {
        return static_cast<double>(rng.geometric(p_gen));
    }
    double total = 0.0;
    while (true) {
        double left = level_time(level - 1, p_gen, p_swap, rng);
        double right = level_time(level - 1, p_gen, p_swap, rng);
        total += std::max(left, right);
        if (rng.bernoulli(p_swap)) {
            return total;
        }
    }
}

// Success outcomes carry their own phase-error probability; failures carry 0.
struct OutcomeTable {
    std::vector<double> cumulative;
    std::vector<bool> success;
    std::vector<double> epsilon;
};

OutcomeTable tabulate(const OutcomeEnsemble &ens, const DensityMatrix &input) {
    OutcomeTable t;
    double total = ens.total_probability();
    double running = 0.0;
    for (const auto &[key, entry] : ens.entries) {
        double prob = entry.probability();
        if (!(prob > 0.0)) {
            continue;
        }
        running += prob / total;
        t.cumulative.push_back(running);
        t.success.push_back(entry.success());
        double eps = 0.0;
        if (entry.success()) {
            auto fit = fit_phase_error(entry.conditional(), input, entry.parity());
            if (!fit) {
                throw std::logic_error("success outcome without parity coherence");
            }
            eps = std::clamp(fit->epsilon, 0.0, 1.0);
        }
        t.epsilon.push_back(eps);
    }
    if (!t.cumulative.empty()) {
        t.cumulative.back() = 1.0;
    }
    return t;
}

}  // namespace

TrialRng::TrialRng(std::uint64_t seed, std::uint64_t trial) : engine_(substream_seed(seed, trial)) {
}

double TrialRng::uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::uint64_t TrialRng::geometric(double p) {
    if (p >= 1.0) {
        return 1;
    }
    // Inverse transform on u in (0, 1].
    double u = 1.0 - uniform01();
    return 1 + static_cast<std::uint64_t>(std::floor(std::log(u) / std::log1p(-p)));
}

bool TrialRng::bernoulli(double p) {
    return uniform01() < p;
}

double WaitingTimeSamples::mean() const {
    if (samples.empty()) {
        return 0.0;
    }
    double s = 0.0;
    for (double v : samples) {
        s += v;
    }
    return s / static_cast<double>(samples.size());
}

double WaitingTimeSamples::standard_error() const {
    std::size_t n = samples.size();
    if (n < 2) {
        return 0.0;
    }
    double m = mean();
    double ss = 0.0;
    for (double v : samples) {
        ss += (v - m) * (v - m);
    }
    return std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n));
}

WaitingTimeSamples simulate_waiting_time(
    int nesting, double p_gen, double p_swap, std::uint64_t seed, std::uint64_t trials, int threads) {
    if (nesting < 0 || nesting > 30) {
        throw std::domain_error("nesting level must lie in [0, 30]");
    }
    if (trials == 0) {
        throw std::invalid_argument("trials must be at least 1");
    }
    check_probability(p_gen, "generation success probability");
    check_probability(p_swap, "swap success probability");
    WaitingTimeSamples out;
    out.samples.assign(trials, 0.0);
    parallel_for(trials, threads, [&](std::size_t i) {
        TrialRng rng(seed, i);
        out.samples[i] = level_time(nesting, p_gen, p_swap, rng);
    });
    return out;
}

WaitingTimeSamples simulate_waiting_time(
    const ChainConfig &config, std::uint64_t seed, std::uint64_t trials, int threads) {
    double p_gen = generation_performance(config).p;
    double p_swap = swap_performance(config.swapping, config.hardware).p;
    return simulate_waiting_time(config.nesting, p_gen, p_swap, seed, trials, threads);
}

double expected_max_geometric(double p) {
    check_probability(p, "success probability");
    return 2.0 / p - 1.0 / (2.0 * p - p * p);
}

double predicted_waiting_time(int nesting, double p_gen, double p_swap) {
    check_probability(p_gen, "generation success probability");
    check_probability(p_swap, "swap success probability");
    return std::pow(1.5 / p_swap, nesting) / p_gen;
}

double OutcomeSampleSummary::p_hat() const {
    return trials ? static_cast<double>(successes) / static_cast<double>(trials) : 0.0;
}

double OutcomeSampleSummary::p_standard_error() const {
    if (trials == 0) {
        return 0.0;
    }
    double p = p_hat();
    return std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
}

double OutcomeSampleSummary::epsilon_hat() const {
    return successes ? static_cast<double>(phase_errors) / static_cast<double>(successes) : 0.0;
}

double OutcomeSampleSummary::epsilon_standard_error() const {
    if (successes == 0) {
        return 0.0;
    }
    double e = epsilon_hat();
    return std::sqrt(e * (1.0 - e) / static_cast<double>(successes));
}

OutcomeSampleSummary sample_rnpm_outcomes(
    const ProtocolConfig &config, std::uint64_t seed, std::uint64_t trials, int threads) {
    if (trials == 0) {
        throw std::invalid_argument("trials must be at least 1");
    }
    ProtocolConfig on_plus = config;
    on_plus.initial_state = DensityMatrix::from_pure(states::plus(2));
    OutcomeTable table = tabulate(run_protocol(on_plus), on_plus.initial_state);
    if (table.cumulative.empty()) {
        throw std::domain_error("protocol has no outcome with positive probability");
    }

    // 0: failure, 1: success, 2: success with a phase error.
    std::vector<unsigned char> kind(trials, 0);
    parallel_for(trials, threads, [&](std::size_t i) {
        TrialRng rng(seed, i);
        double u = rng.uniform01();
        std::size_t k = static_cast<std::size_t>(
            std::upper_bound(table.cumulative.begin(), table.cumulative.end(), u) - table.cumulative.begin());
        k = std::min(k, table.cumulative.size() - 1);
        if (table.success[k]) {
            kind[i] = rng.bernoulli(table.epsilon[k]) ? 2 : 1;
        }
    });

    OutcomeSampleSummary s;
    s.trials = trials;
    for (unsigned char v : kind) {
        s.successes += v > 0;
        s.phase_errors += v == 2;
    }
    return s;
}

}  // namespace rnpm
