#include <cmath>
#include <stdexcept>
#include <vector>

#include "rnpm/optics.h"

namespace rnpm {

namespace {

constexpr double kFockTailTolerance = 1e-10;
constexpr complex kI(0.0, 1.0);

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

double log_fact(int n) {
    return std::lgamma(n + 1.0);
}

double binomial_coefficient(int n, int k) {
    return std::exp(log_fact(n) - log_fact(k) - log_fact(n - k));
}

Vector coherent_vector(complex amplitude, int n_max) {
    Vector v(n_max + 1);
    complex term = std::exp(-0.5 * std::norm(amplitude));
    for (int n = 0; n <= n_max; n++) {
        v(n) = term;
        term *= amplitude / std::sqrt(n + 1.0);
    }
    return v;
}

// <row|D(gamma)|col> on a truncated number basis, from the normally ordered
// form D = exp(-|g|^2/2) exp(g a^dag) exp(-g* a); each entry is exact.
Matrix displacement_matrix(complex gamma, int dim) {
    Matrix d = Matrix::Zero(dim, dim);
    double prefactor = std::exp(-0.5 * std::norm(gamma));
    for (int row = 0; row < dim; row++) {
        for (int col = 0; col < dim; col++) {
            complex s = 0.0;
            for (int k = 0; k <= std::min(row, col); k++) {
                double mag = std::exp(0.5 * (log_fact(row) + log_fact(col)) - log_fact(k) - log_fact(row - k) -
                                      log_fact(col - k));
                complex up = row - k == 0 ? complex(1.0) : std::pow(gamma, row - k);
                complex down = col - k == 0 ? complex(1.0) : std::pow(-std::conj(gamma), col - k);
                s += mag * up * down;
            }
            d(row, col) = prefactor * s;
        }
    }
    return d;
}

// Beam-splitter blocks: for total photon number N, block[N](x, p) is the
// amplitude of |x, N-x>_{d1 d2} from |p, N-p>_{c1 c2}, with
// c1^dag = (d1^dag + d2^dag)/sqrt2 and c2^dag = (d2^dag - d1^dag)/sqrt2.
std::vector<Eigen::MatrixXd> beam_splitter_blocks(int max_total) {
    std::vector<Eigen::MatrixXd> blocks;
    for (int total = 0; total <= max_total; total++) {
        Eigen::MatrixXd u = Eigen::MatrixXd::Zero(total + 1, total + 1);
        for (int p = 0; p <= total; p++) {
            int q = total - p;
            for (int i = 0; i <= p; i++) {
                for (int j = 0; j <= q; j++) {
                    int x = i + j;
                    double sign = j % 2 ? -1.0 : 1.0;
                    double log_mag = -0.5 * total * std::log(2.0) - 0.5 * (log_fact(p) + log_fact(q)) +
                                     0.5 * (log_fact(x) + log_fact(total - x));
                    u(x, p) += sign * binomial_coefficient(p, i) * binomial_coefficient(q, j) * std::exp(log_mag);
                }
            }
        }
        blocks.push_back(std::move(u));
    }
    return blocks;
}

// Detector weight for record `m` given x photons arriving.
double povm_weight(const DetectorModel &detector, int m, int x) {
    double eta = detector.efficiency;
    switch (detector.kind) {
        case DetectorKind::NumberResolving:
            return binomial_pmf(eta, m, x);
        case DetectorKind::Threshold: {
            double none = std::pow(1.0 - eta, x);
            return m == 0 ? none : 1.0 - none;
        }
        case DetectorKind::SinglePhoton: {
            double one = binomial_pmf(eta, 1, x);
            return m == 1 ? one : 1.0 - one;
        }
    }
    return 0.0;
}

// Two-mode amplitude (travelling mode p, environment q) of one arm for qubit
// value `bit`, after interaction, optional local displacement and loss.
Matrix arm_state(const ProtocolConfig &config, double transmittance, int bit, int n_max) {
    double alpha = config.params.pulse_alpha();
    double theta = config.params.pulse_theta();
    double pulse = alpha / std::sqrt(transmittance);
    double s = bit ? -1.0 : 1.0;

    Vector psi = coherent_vector(pulse, n_max);
    complex global = std::exp(-kI * s * pulse * pulse * std::sin(theta) / 2.0);
    for (int n = 0; n <= n_max; n++) {
        psi(n) *= global * std::exp(kI * s * static_cast<double>(n) * theta / 2.0);
    }
    if (config.variant == DisplacementVariant::LocalDisplacement) {
        psi = displacement_matrix(-pulse * std::cos(theta / 2.0), n_max + 1) * psi;
    }

    Matrix out = Matrix::Zero(n_max + 1, n_max + 1);
    for (int p = 0; p <= n_max; p++) {
        for (int q = 0; p + q <= n_max; q++) {
            double amp = std::sqrt(binomial_coefficient(p + q, p) * std::pow(transmittance, p) *
                                   std::pow(1.0 - transmittance, q));
            out(p, q) = amp * psi(p + q);
        }
    }
    return out;
}

}  // namespace

int fock_cutoff(const ProtocolConfig &config) {
    config.validate();
    double alpha = config.params.pulse_alpha();
    double largest = alpha * alpha / std::min(config.transmittances.a, config.transmittances.b);
    return truncation_order(largest, kFockTailTolerance);
}

OutcomeEnsemble fock_oracle(const ProtocolConfig &config, int n_max) {
    int required = fock_cutoff(config);
    if (n_max < required) {
        throw TruncationError(
            "n_max = " + std::to_string(n_max) + " leaves a coherent-state tail above 1e-10; required n_max " +
                std::to_string(required),
            required);
    }
    int out_dim = 2 * n_max + 1;
    auto blocks = beam_splitter_blocks(2 * n_max);
    double alpha = config.params.pulse_alpha();
    Matrix central_shift;
    if (config.variant == DisplacementVariant::CentralDisplacement) {
        central_shift = displacement_matrix(-std::sqrt(2.0) * alpha * std::cos(config.params.pulse_theta() / 2.0), out_dim);
    }

    std::array<std::array<Matrix, 2>, 2> arms;
    for (int bit = 0; bit < 2; bit++) {
        arms[0][bit] = arm_state(config, config.transmittances.a, bit, n_max);
        arms[1][bit] = arm_state(config, config.transmittances.b, bit, n_max);
    }

    // gram[r][c](x, y) = sum over environment states of Phi_r(x, y) Phi_c(x, y)*.
    std::array<std::array<Matrix, 4>, 4> gram;
    for (auto &row : gram) {
        for (auto &g : row) {
            g = Matrix::Zero(out_dim, out_dim);
        }
    }
    std::array<Matrix, 4> phi;
    for (int qa = 0; qa <= n_max; qa++) {
        for (int qb = 0; qb <= n_max; qb++) {
            for (int label = 0; label < 4; label++) {
                const Matrix &arm_a = arms[0][(label >> 1) & 1];
                const Matrix &arm_b = arms[1][label & 1];
                Matrix out = Matrix::Zero(out_dim, out_dim);
                for (int total = 0; total <= 2 * n_max; total++) {
                    for (int p = std::max(0, total - n_max); p <= std::min(total, n_max); p++) {
                        complex amp = arm_a(p, qa) * arm_b(total - p, qb);
                        if (amp == 0.0) {
                            continue;
                        }
                        for (int x = 0; x <= total; x++) {
                            out(x, total - x) += blocks[total](x, p) * amp;
                        }
                    }
                }
                if (config.variant == DisplacementVariant::CentralDisplacement) {
                    out = (central_shift * out.transpose()).transpose();
                }
                phi[label] = std::move(out);
            }
            for (int r = 0; r < 4; r++) {
                for (int c = 0; c < 4; c++) {
                    gram[r][c] += phi[r].cwiseProduct(phi[c].conjugate());
                }
            }
        }
    }

    int cutoff = outcome_cutoff(config);
    OutcomeEnsemble ens;
    for (int m = 0; m <= cutoff; m++) {
        Eigen::VectorXd wm(out_dim);
        for (int x = 0; x < out_dim; x++) {
            wm(x) = povm_weight(config.detector, m, x);
        }
        for (int n = 0; n <= cutoff; n++) {
            Eigen::VectorXd wn(out_dim);
            for (int y = 0; y < out_dim; y++) {
                wn(y) = povm_weight(config.detector, n, y);
            }
            Eigen::Matrix4cd kernel;
            for (int r = 0; r < 4; r++) {
                for (int c = 0; c < 4; c++) {
                    complex v = (wm.transpose().cast<complex>() * gram[r][c] * wn.cast<complex>())(0, 0);
                    if ((m + n) % 2 != 0 && ((r ^ c) & 1)) {
                        v = -v;
                    }
                    kernel(r, c) = v;
                }
            }
            OutcomeEntry e;
            e.m = m;
            e.n = n;
            e.weight = DensityMatrix(Eigen::MatrixXcd(config.initial_state.matrix().cwiseProduct(Eigen::MatrixXcd(kernel))));
            ens.entries.emplace(std::make_pair(m, n), std::move(e));
        }
    }
    return ens;
}

OutcomeEnsemble fock_oracle(const ProtocolConfig &config) {
    return fock_oracle(config, fock_cutoff(config));
}

}  // namespace rnpm
