#pragma once

// Dense state vectors, sparse operators and gate application on qubit
// subsets.
//
// Qubit ordering: qubit 0 is the most significant bit of a basis index.
// For an n-qubit register the basis state |b_0 b_1 ... b_{n-1}> has index
// sum_q b_q * 2^(n-1-q). Every module in this library follows this rule.

#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace spinfan {

using Complex = std::complex<double>;

/// Shared numerical tolerances.
namespace tol {
inline constexpr double kState = 1e-12;     // inner products, norms
inline constexpr double kOperator = 1e-10;  // unitarity / eigen residuals
inline constexpr double kHermitian = 1e-12; // hermiticity
inline constexpr double kGate = 1e-9;       // end-to-end gate equivalence
} // namespace tol

class DimensionError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

} // namespace spinfan

namespace spinfan::qcore {

/// Bit mask of qubit `q` inside an `n`-qubit basis index.
constexpr std::uint64_t qubit_mask(int q, int n) {
    return std::uint64_t{1} << (n - 1 - q);
}

int hamming_weight(std::uint64_t x);

class StateVector {
  public:
    /// |0...0> on `num_qubits` qubits.
    explicit StateVector(int num_qubits);
    StateVector(int num_qubits, std::vector<Complex> amplitudes);

    static StateVector basis(int num_qubits, std::uint64_t index);

    int num_qubits() const { return num_qubits_; }
    std::size_t dim() const { return amps_.size(); }

    std::span<const Complex> amplitudes() const { return amps_; }
    std::span<Complex> amplitudes() { return amps_; }

    Complex &operator[](std::size_t i) { return amps_[i]; }
    const Complex &operator[](std::size_t i) const { return amps_[i]; }

    double norm() const;
    void normalize();
    bool is_normalized(double tolerance = tol::kState) const;

    StateVector &operator+=(const StateVector &other);
    StateVector &operator-=(const StateVector &other);
    StateVector &operator*=(Complex scale);

    /// Largest |a_i - b_i|.
    double max_abs_diff(const StateVector &other) const;

  private:
    int num_qubits_;
    std::vector<Complex> amps_;
};

StateVector operator+(StateVector a, const StateVector &b);
StateVector operator-(StateVector a, const StateVector &b);
StateVector operator*(Complex scale, StateVector a);

/// Tensor product, `a` on the leading (more significant) qubits.
StateVector tensor(const StateVector &a, const StateVector &b);

/// <a|b>.
Complex inner(const StateVector &a, const StateVector &b);

class BitString {
  public:
    BitString() = default;
    explicit BitString(std::vector<std::uint8_t> bits);

    /// `value` read with bit 0 of the string as the most significant bit.
    static BitString from_index(std::uint64_t value, int width);
    /// Parses strings such as "0110".
    static BitString parse(const std::string &text);

    int size() const { return static_cast<int>(bits_.size()); }
    int weight() const { return weight_; }
    std::uint8_t operator[](int i) const { return bits_[static_cast<std::size_t>(i)]; }
    const std::vector<std::uint8_t> &bits() const { return bits_; }
    std::uint64_t to_index() const;
    std::string to_string() const;

  private:
    std::vector<std::uint8_t> bits_;
    int weight_ = 0;
};

struct OpEntry {
    std::uint64_t row;
    std::uint64_t col;
    Complex value;
};

/// Square sparse operator in coordinate form. Entries are kept sorted by
/// (row, col) with duplicates summed and exact zeros removed.
class LinearOp {
  public:
    LinearOp() = default;
    LinearOp(std::size_t dim, std::vector<OpEntry> entries);

    static LinearOp identity(std::size_t dim);
    static LinearOp diagonal(std::span<const Complex> diag);
    /// Maps basis |i> to |image[i]>.
    static LinearOp permutation(std::span<const std::uint64_t> image);
    /// Entries with modulus <= drop_tolerance are discarded.
    static LinearOp from_dense(const Eigen::MatrixXcd &m, double drop_tolerance = 0.0);

    std::size_t dim() const { return dim_; }
    /// log2(dim); throws if dim is not a power of two.
    int num_qubits() const;
    std::span<const OpEntry> entries() const { return entries_; }
    std::size_t nonzeros() const { return entries_.size(); }

    Complex at(std::uint64_t row, std::uint64_t col) const;

    LinearOp adjoint() const;
    Eigen::MatrixXcd to_dense() const;

    std::vector<Complex> apply(std::span<const Complex> x) const;
    StateVector apply(const StateVector &state) const;
    /// Y = this * X, column by column.
    Eigen::MatrixXcd apply(const Eigen::MatrixXcd &x) const;

    LinearOp &operator*=(Complex scale);
    friend LinearOp operator*(const LinearOp &a, const LinearOp &b);
    friend LinearOp operator+(const LinearOp &a, const LinearOp &b);
    friend LinearOp operator-(const LinearOp &a, const LinearOp &b);
    friend LinearOp operator*(Complex scale, LinearOp a);

    /// max |A_ij - B_ij| over the union of both supports.
    double max_abs_diff(const LinearOp &other) const;

    /// ||A^dagger A - I||_max
    double unitarity_residual() const;
    /// ||A - A^dagger||_max
    double hermiticity_residual() const;
    bool certify_unitary(double tolerance = tol::kOperator) const;
    bool certify_hermitian(double tolerance = tol::kHermitian) const;
    bool is_diagonal() const;
    /// True when every column holds a single entry equal to exactly 1.
    bool is_permutation() const;

  private:
    std::size_t dim_ = 0;
    std::vector<OpEntry> entries_;
};

LinearOp kron(const LinearOp &a, const LinearOp &b);

/// Standard gates.
LinearOp hadamard();
LinearOp pauli_x();
LinearOp pauli_y();
LinearOp pauli_z();
/// Control on the first (most significant) qubit.
LinearOp cnot();
/// H applied to each of `n` qubits.
LinearOp hadamard_all(int n);

/// `op` acting on `targets` of an `n`-qubit register, as a full operator.
LinearOp embed(const LinearOp &op, std::span<const int> targets, int n);

using BatchMap = std::function<void(Eigen::MatrixXcd &)>;

/// Gathers the amplitudes of `state` into a 2^k x 2^(n-k) matrix whose
/// columns are the states of the `targets` subsystem (targets[0] most
/// significant) for each configuration of the remaining qubits, applies
/// `map`, and scatters the result back.
void apply_on_subsystem(StateVector &state, std::span<const int> targets, const BatchMap &map);

/// Applies `op` to the `targets` qubits, identity elsewhere.
StateVector apply_op(const StateVector &state, const LinearOp &op, std::span<const int> targets);
StateVector apply_op(const StateVector &state, const LinearOp &op,
                     std::initializer_list<int> targets);

/// |x_1..x_r, t> -> |x_1..x_r, t xor x_1 xor .. xor x_r>.
LinearOp ideal_parity_unitary(int r);
/// Control on the last wire (index r); its value is XORed onto wires 0..r-1.
/// This is the orientation obtained by conjugating the parity gate with
/// Hadamards on every wire.
LinearOp ideal_fanout_unitary(int r);
/// r controls followed by q-1 targets; with i = wt(controls) mod q the
/// targets t_1..t_i are flipped.
LinearOp ideal_generalized_modq_unitary(int r, int q);
/// r controls followed by one target, flipped iff wt(controls) mod q != 0.
LinearOp ideal_modq_unitary(int r, int q);

/// Returns a unitary U of size `dim` with U.col(positions[i]) ==
/// columns.col(i). The free columns are filled, in increasing position
/// order, by Gram-Schmidt over the computational basis vectors taken in
/// increasing index order. `columns` must be orthonormal.
Eigen::MatrixXcd complete_unitary(const Eigen::MatrixXcd &columns,
                                  std::span<const std::uint64_t> positions, std::size_t dim);

} // namespace spinfan::qcore
