#ifndef RNPM_DENSITY_MATRIX_H
#define RNPM_DENSITY_MATRIX_H

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <string_view>
#include <vector>

namespace rnpm {

using complex = std::complex<double>;

/// Dense density operator on 1 to 5 qubits.
///
/// Qubit 0 is the most significant bit of the basis index, so for two qubits
/// the basis order is |00>, |01>, |10>, |11> with the first label on qubit 0.
/// The matrix may be subnormalized; its trace is then the branch probability.
class DensityMatrix {
   public:
    static constexpr int kMaxQubits = 5;

    /// |0...0><0...0| on `num_qubits` qubits.
    explicit DensityMatrix(int num_qubits = 1);
    explicit DensityMatrix(Eigen::MatrixXcd matrix);

    static DensityMatrix from_pure(const Eigen::VectorXcd &state);
    static DensityMatrix maximally_mixed(int num_qubits);

    int num_qubits() const { return num_qubits_; }
    int dim() const { return static_cast<int>(matrix_.rows()); }
    const Eigen::MatrixXcd &matrix() const { return matrix_; }
    complex operator()(int row, int col) const { return matrix_(row, col); }

    double trace() const;
    DensityMatrix normalized() const;
    DensityMatrix scaled(double factor) const;

    /// Tensor product with `other` placed after this register's qubits.
    DensityMatrix tensor(const DensityMatrix &other) const;

    void apply_unitary(const Eigen::Matrix2cd &u, int qubit);
    void apply_operator(const Eigen::MatrixXcd &full);
    /// rho -> (1 - eps) rho + eps Z rho Z on `qubit`.
    void apply_phase_flip(double epsilon, int qubit);
    /// Elementwise product with `kernel` on the two-qubit sub-register (q0, q1);
    /// the kernel is indexed by the 2-bit labels of (q0, q1) for row and column.
    void apply_pair_kernel(const Eigen::Matrix4cd &kernel, int q0, int q1);

    /// Unnormalized projection of `qubit` onto Z-value `value`, with the qubit
    /// removed from the register.
    DensityMatrix project_out(int qubit, int value) const;
    /// Unnormalized projection of `qubit` onto the X eigenstate (-1)^value.
    DensityMatrix project_out_x(int qubit, int value) const;
    DensityMatrix trace_out(int qubit) const;
    /// Keeps only `qubits` (in the given order) and traces out the rest.
    DensityMatrix reduced(const std::vector<int> &qubits) const;

    double expectation(const Eigen::MatrixXcd &observable) const;
    /// Expectation of a Pauli string such as "ZXI".
    double pauli_expectation(std::string_view paulis) const;
    double fidelity(const Eigen::VectorXcd &pure) const;

    double hermiticity_error() const;
    double min_eigenvalue() const;
    /// Hermitian, eigenvalues >= -tol and |trace - 1| <= tol.
    bool is_valid_state(double tol = 1e-12) const;

    double max_abs_diff(const DensityMatrix &other) const;

   private:
    void check_qubit(int qubit) const;

    int num_qubits_;
    Eigen::MatrixXcd matrix_;
};

namespace gates {
Eigen::Matrix2cd identity();
Eigen::Matrix2cd pauli_x();
Eigen::Matrix2cd pauli_y();
Eigen::Matrix2cd pauli_z();
Eigen::Matrix2cd hadamard();
Eigen::Matrix2cd phase_s();
/// Operator `u` acting on `qubit` of an n-qubit register.
Eigen::MatrixXcd embed(const Eigen::Matrix2cd &u, int qubit, int num_qubits);
Eigen::MatrixXcd cnot(int control, int target, int num_qubits);
Eigen::MatrixXcd cz(int a, int b, int num_qubits);
Eigen::MatrixXcd pauli_string(std::string_view paulis);
/// Projector onto even (parity = 0) or odd (parity = 1) Z-parity of (q0, q1).
Eigen::MatrixXcd parity_projector(int q0, int q1, int parity, int num_qubits);
}  // namespace gates

namespace states {
Eigen::VectorXcd basis(int num_qubits, int index);
Eigen::VectorXcd plus(int num_qubits);
Eigen::Vector4cd phi_plus();
Eigen::Vector4cd phi_minus();
Eigen::Vector4cd psi_plus();
Eigen::Vector4cd psi_minus();
/// Bell state labelled by its Z-parity and phase bit: (0,0)=Phi+, (0,1)=Phi-,
/// (1,0)=Psi+, (1,1)=Psi-.
Eigen::Vector4cd bell(int parity, int phase);
Eigen::VectorXcd kron(const Eigen::VectorXcd &a, const Eigen::VectorXcd &b);
}  // namespace states

}  // namespace rnpm

#endif
