#include "rnpm/density_matrix.h"

#include <cmath>
#include <stdexcept>
#include <string>

namespace rnpm {

namespace {

int qubits_for_dim(Eigen::Index dim) {
    int n = 0;
    while ((Eigen::Index{1} << n) < dim) {
        n++;
    }
    if ((Eigen::Index{1} << n) != dim || n < 1 || n > DensityMatrix::kMaxQubits) {
        throw std::invalid_argument("density matrix dimension must be 2^n with 1 <= n <= 5");
    }
    return n;
}

// Bit of `qubit` in basis index `index` of an n-qubit register.
int bit_of(int index, int qubit, int n) {
    return (index >> (n - 1 - qubit)) & 1;
}

// Inserts `value` as the bit of `qubit` into an (n-1)-qubit index.
int insert_bit(int reduced_index, int qubit, int value, int n) {
    int low_bits = n - 1 - qubit;
    int high = reduced_index >> low_bits;
    int low = reduced_index & ((1 << low_bits) - 1);
    return (((high << 1) | value) << low_bits) | low;
}

}  // namespace

DensityMatrix::DensityMatrix(int num_qubits) : num_qubits_(num_qubits) {
    if (num_qubits < 1 || num_qubits > kMaxQubits) {
        throw std::invalid_argument("density matrix supports 1 to 5 qubits");
    }
    int d = 1 << num_qubits;
    matrix_ = Eigen::MatrixXcd::Zero(d, d);
    matrix_(0, 0) = 1.0;
}

DensityMatrix::DensityMatrix(Eigen::MatrixXcd matrix) : num_qubits_(0), matrix_(std::move(matrix)) {
    if (matrix_.rows() != matrix_.cols()) {
        throw std::invalid_argument("density matrix must be square");
    }
    num_qubits_ = qubits_for_dim(matrix_.rows());
}

DensityMatrix DensityMatrix::from_pure(const Eigen::VectorXcd &state) {
    return DensityMatrix(Eigen::MatrixXcd(state * state.adjoint()));
}

DensityMatrix DensityMatrix::maximally_mixed(int num_qubits) {
    DensityMatrix r(num_qubits);
    r.matrix_ = Eigen::MatrixXcd::Identity(r.dim(), r.dim()) / static_cast<double>(r.dim());
    return r;
}

double DensityMatrix::trace() const {
    return matrix_.trace().real();
}

DensityMatrix DensityMatrix::normalized() const {
    double t = trace();
    if (!(t > 0.0)) {
        throw std::domain_error("cannot normalize a density matrix with zero trace");
    }
    return scaled(1.0 / t);
}

DensityMatrix DensityMatrix::scaled(double factor) const {
    return DensityMatrix(Eigen::MatrixXcd(matrix_ * factor));
}

DensityMatrix DensityMatrix::tensor(const DensityMatrix &other) const {
    int da = dim();
    int db = other.dim();
    Eigen::MatrixXcd m(da * db, da * db);
    for (int i = 0; i < da; i++) {
        for (int j = 0; j < da; j++) {
            m.block(i * db, j * db, db, db) = matrix_(i, j) * other.matrix_;
        }
    }
    return DensityMatrix(std::move(m));
}

void DensityMatrix::check_qubit(int qubit) const {
    if (qubit < 0 || qubit >= num_qubits_) {
        throw std::out_of_range("qubit index " + std::to_string(qubit) + " out of range");
    }
}

void DensityMatrix::apply_unitary(const Eigen::Matrix2cd &u, int qubit) {
    check_qubit(qubit);
    apply_operator(gates::embed(u, qubit, num_qubits_));
}

void DensityMatrix::apply_operator(const Eigen::MatrixXcd &full) {
    if (full.rows() != dim() || full.cols() != dim()) {
        throw std::invalid_argument("operator dimension mismatch");
    }
    matrix_ = full * matrix_ * full.adjoint();
}

void DensityMatrix::apply_phase_flip(double epsilon, int qubit) {
    check_qubit(qubit);
    if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
        throw std::domain_error("phase-flip probability must lie in [0, 1]");
    }
    // Z rho Z flips the sign of entries whose row and column differ on `qubit`.
    for (int r = 0; r < dim(); r++) {
        for (int c = 0; c < dim(); c++) {
            if (bit_of(r, qubit, num_qubits_) != bit_of(c, qubit, num_qubits_)) {
                matrix_(r, c) *= 1.0 - 2.0 * epsilon;
            }
        }
    }
}

void DensityMatrix::apply_pair_kernel(const Eigen::Matrix4cd &kernel, int q0, int q1) {
    check_qubit(q0);
    check_qubit(q1);
    if (q0 == q1) {
        throw std::invalid_argument("kernel qubits must differ");
    }
    for (int r = 0; r < dim(); r++) {
        int kr = 2 * bit_of(r, q0, num_qubits_) + bit_of(r, q1, num_qubits_);
        for (int c = 0; c < dim(); c++) {
            int kc = 2 * bit_of(c, q0, num_qubits_) + bit_of(c, q1, num_qubits_);
            matrix_(r, c) *= kernel(kr, kc);
        }
    }
}

DensityMatrix DensityMatrix::project_out(int qubit, int value) const {
    check_qubit(qubit);
    if (num_qubits_ == 1) {
        throw std::invalid_argument("cannot remove the last qubit");
    }
    int n = num_qubits_;
    int rd = dim() / 2;
    Eigen::MatrixXcd m(rd, rd);
    for (int r = 0; r < rd; r++) {
        for (int c = 0; c < rd; c++) {
            m(r, c) = matrix_(insert_bit(r, qubit, value, n), insert_bit(c, qubit, value, n));
        }
    }
    return DensityMatrix(std::move(m));
}

DensityMatrix DensityMatrix::project_out_x(int qubit, int value) const {
    DensityMatrix rotated = *this;
    rotated.apply_unitary(gates::hadamard(), qubit);
    return rotated.project_out(qubit, value);
}

DensityMatrix DensityMatrix::trace_out(int qubit) const {
    DensityMatrix a = project_out(qubit, 0);
    DensityMatrix b = project_out(qubit, 1);
    return DensityMatrix(Eigen::MatrixXcd(a.matrix_ + b.matrix_));
}

DensityMatrix DensityMatrix::reduced(const std::vector<int> &qubits) const {
    int n = num_qubits_;
    int k = static_cast<int>(qubits.size());
    if (k < 1 || k > n) {
        throw std::invalid_argument("invalid qubit subset");
    }
    std::vector<int> rest;
    for (int q = 0; q < n; q++) {
        bool kept = false;
        for (int s : qubits) {
            check_qubit(s);
            kept |= s == q;
        }
        if (!kept) {
            rest.push_back(q);
        }
    }
    if (static_cast<int>(rest.size()) + k != n) {
        throw std::invalid_argument("qubit subset contains duplicates");
    }
    int dk = 1 << k;
    int dr = 1 << static_cast<int>(rest.size());
    auto full_index = [&](int kept_index, int rest_index) {
        int idx = 0;
        for (int i = 0; i < k; i++) {
            idx |= ((kept_index >> (k - 1 - i)) & 1) << (n - 1 - qubits[i]);
        }
        for (int i = 0; i < static_cast<int>(rest.size()); i++) {
            idx |= ((rest_index >> (static_cast<int>(rest.size()) - 1 - i)) & 1) << (n - 1 - rest[i]);
        }
        return idx;
    };
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dk, dk);
    for (int r = 0; r < dk; r++) {
        for (int c = 0; c < dk; c++) {
            complex s = 0.0;
            for (int e = 0; e < dr; e++) {
                s += matrix_(full_index(r, e), full_index(c, e));
            }
            m(r, c) = s;
        }
    }
    return DensityMatrix(std::move(m));
}

double DensityMatrix::expectation(const Eigen::MatrixXcd &observable) const {
    return (observable * matrix_).trace().real();
}

double DensityMatrix::pauli_expectation(std::string_view paulis) const {
    if (static_cast<int>(paulis.size()) != num_qubits_) {
        throw std::invalid_argument("Pauli string length must equal the qubit count");
    }
    return expectation(gates::pauli_string(paulis));
}

double DensityMatrix::fidelity(const Eigen::VectorXcd &pure) const {
    if (pure.size() != dim()) {
        throw std::invalid_argument("state dimension mismatch");
    }
    return (pure.adjoint() * matrix_ * pure)(0, 0).real();
}

double DensityMatrix::hermiticity_error() const {
    return (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff();
}

double DensityMatrix::min_eigenvalue() const {
    Eigen::MatrixXcd h = (matrix_ + matrix_.adjoint()) * 0.5;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

bool DensityMatrix::is_valid_state(double tol) const {
    return hermiticity_error() <= tol && min_eigenvalue() >= -tol && std::abs(trace() - 1.0) <= tol;
}

double DensityMatrix::max_abs_diff(const DensityMatrix &other) const {
    if (other.dim() != dim()) {
        throw std::invalid_argument("dimension mismatch");
    }
    return (matrix_ - other.matrix_).cwiseAbs().maxCoeff();
}

namespace gates {

Eigen::Matrix2cd identity() {
    return Eigen::Matrix2cd::Identity();
}

Eigen::Matrix2cd pauli_x() {
    Eigen::Matrix2cd m;
    m << 0, 1, 1, 0;
    return m;
}

Eigen::Matrix2cd pauli_y() {
    Eigen::Matrix2cd m;
    m << 0, complex(0, -1), complex(0, 1), 0;
    return m;
}

Eigen::Matrix2cd pauli_z() {
    Eigen::Matrix2cd m;
    m << 1, 0, 0, -1;
    return m;
}

Eigen::Matrix2cd hadamard() {
    Eigen::Matrix2cd m;
    m << 1, 1, 1, -1;
    return m / std::sqrt(2.0);
}

Eigen::Matrix2cd phase_s() {
    Eigen::Matrix2cd m;
    m << 1, 0, 0, complex(0, 1);
    return m;
}

Eigen::MatrixXcd embed(const Eigen::Matrix2cd &u, int qubit, int num_qubits) {
    int d = 1 << num_qubits;
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(d, d);
    for (int r = 0; r < d; r++) {
        for (int c = 0; c < d; c++) {
            if ((r ^ c) & ~(1 << (num_qubits - 1 - qubit))) {
                continue;
            }
            m(r, c) = u(bit_of(r, qubit, num_qubits), bit_of(c, qubit, num_qubits));
        }
    }
    return m;
}

Eigen::MatrixXcd cnot(int control, int target, int num_qubits) {
    int d = 1 << num_qubits;
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(d, d);
    for (int c = 0; c < d; c++) {
        int r = bit_of(c, control, num_qubits) ? c ^ (1 << (num_qubits - 1 - target)) : c;
        m(r, c) = 1.0;
    }
    return m;
}

Eigen::MatrixXcd cz(int a, int b, int num_qubits) {
    int d = 1 << num_qubits;
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(d, d);
    for (int i = 0; i < d; i++) {
        if (bit_of(i, a, num_qubits) && bit_of(i, b, num_qubits)) {
            m(i, i) = -1.0;
        }
    }
    return m;
}

Eigen::MatrixXcd pauli_string(std::string_view paulis) {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(1, 1);
    for (char p : paulis) {
        Eigen::Matrix2cd u;
        switch (p) {
            case 'I':
                u = identity();
                break;
            case 'X':
                u = pauli_x();
                break;
            case 'Y':
                u = pauli_y();
                break;
            case 'Z':
                u = pauli_z();
                break;
            default:
                throw std::invalid_argument(std::string("unknown Pauli '") + p + "'");
        }
        Eigen::MatrixXcd next(m.rows() * 2, m.cols() * 2);
        for (int i = 0; i < m.rows(); i++) {
            for (int j = 0; j < m.cols(); j++) {
                next.block(2 * i, 2 * j, 2, 2) = m(i, j) * u;
            }
        }
        m = std::move(next);
    }
    return m;
}

Eigen::MatrixXcd parity_projector(int q0, int q1, int parity, int num_qubits) {
    int d = 1 << num_qubits;
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(d, d);
    for (int i = 0; i < d; i++) {
        if ((bit_of(i, q0, num_qubits) ^ bit_of(i, q1, num_qubits)) == parity) {
            m(i, i) = 1.0;
        }
    }
    return m;
}

}  // namespace gates

namespace states {

Eigen::VectorXcd basis(int num_qubits, int index) {
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(1 << num_qubits);
    v(index) = 1.0;
    return v;
}

Eigen::VectorXcd plus(int num_qubits) {
    int d = 1 << num_qubits;
    return Eigen::VectorXcd::Constant(d, 1.0 / std::sqrt(static_cast<double>(d)));
}

Eigen::Vector4cd bell(int parity, int phase) {
    Eigen::Vector4cd v = Eigen::Vector4cd::Zero();
    double s = 1.0 / std::sqrt(2.0);
    if (parity == 0) {
        v(0) = s;
        v(3) = phase ? -s : s;
    } else {
        v(1) = s;
        v(2) = phase ? -s : s;
    }
    return v;
}

Eigen::Vector4cd phi_plus() {
    return bell(0, 0);
}

Eigen::Vector4cd phi_minus() {
    return bell(0, 1);
}

Eigen::Vector4cd psi_plus() {
    return bell(1, 0);
}

Eigen::Vector4cd psi_minus() {
    return bell(1, 1);
}

Eigen::VectorXcd kron(const Eigen::VectorXcd &a, const Eigen::VectorXcd &b) {
    Eigen::VectorXcd r(a.size() * b.size());
    for (Eigen::Index i = 0; i < a.size(); i++) {
        r.segment(i * b.size(), b.size()) = a(i) * b;
    }
    return r;
}

}  // namespace states

}  // namespace rnpm
