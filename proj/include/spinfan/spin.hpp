#pragma once

// Collective spin operators of n qubits, the decomposition of the n-qubit
// space into irreducible spin representations, and exact time evolution
// under H = -J^2 + alpha J_z + beta J_z^2.
//
// Qubits are spin-1/2 particles with |0> spin-up, so a basis state of
// Hamming weight w has J_z eigenvalue m = n/2 - w.

#include <compare>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "spinfan/qcore.hpp"
#include "spinfan/rational.hpp"

namespace spinfan::spin {

using qcore::LinearOp;
using qcore::StateVector;

/// Half-integer stored as twice its value.
class HalfInt {
  public:
    constexpr HalfInt() = default;
    static constexpr HalfInt from_twice(int twice) {
        HalfInt h;
        h.twice_ = twice;
        return h;
    }
    static constexpr HalfInt from_int(int v) { return from_twice(2 * v); }

    constexpr int twice() const { return twice_; }
    constexpr bool is_integer() const { return twice_ % 2 == 0; }
    constexpr double value() const { return twice_ / 2.0; }
    /// Integer value; throws for odd `twice`.
    int as_int() const;
    std::string to_string() const;

    constexpr HalfInt operator-() const { return from_twice(-twice_); }
    constexpr HalfInt operator+(HalfInt o) const { return from_twice(twice_ + o.twice_); }
    constexpr HalfInt operator-(HalfInt o) const { return from_twice(twice_ - o.twice_); }
    constexpr auto operator<=>(const HalfInt &) const = default;

  private:
    int twice_ = 0;
};

/// Largest n for which decompositions are built by default.
inline constexpr int kDefaultCap = 14;

struct CollectiveOps {
    LinearOp jx, jy, jz, jsq, jplus, jminus;
};

CollectiveOps collective_ops(int n, int cap = kDefaultCap);

/// Exact binomial coefficient; zero when k < 0 or k > n.
std::int64_t binomial(int n, int k);

/// Number of spin-j representations in n qubits:
/// C(n, n/2 - j) - C(n, n/2 - j - 1), or 0 when n/2 - j is not a
/// nonnegative integer.
std::int64_t rep_count(int n, HalfInt j);

/// Computational basis indices of n qubits grouped by Hamming weight.
class WeightSectors {
  public:
    explicit WeightSectors(int n);
    int n() const { return n_; }
    const std::vector<std::uint64_t> &indices(int w) const { return indices_.at(static_cast<std::size_t>(w)); }
    std::size_t size(int w) const { return indices(w).size(); }
    /// Position of a basis index inside its weight sector.
    std::size_t position(std::uint64_t index) const { return position_[index]; }

  private:
    int n_;
    std::vector<std::vector<std::uint64_t>> indices_;
    std::vector<std::size_t> position_;
};

/// One spin-j representation. Vectors are real and stored sector-locally:
/// the vector for m lives in weight sector n/2 - m.
struct SpinLevel {
    HalfInt j;
    int ell = 0;
    /// ladder[k] is |j, j - k, ell> restricted to sector top_weight + k.
    std::vector<Eigen::VectorXd> ladder;
    int top_weight = 0;

    int size() const { return static_cast<int>(ladder.size()); }
    const Eigen::VectorXd &sector_vector(HalfInt m) const;
    int weight_of(HalfInt m) const;
};

class SpinDecomposition {
  public:
    struct Column {
        int level; // index into levels()
        HalfInt m;
    };

    SpinDecomposition(int n, std::vector<SpinLevel> levels, std::shared_ptr<const WeightSectors> sectors);

    int n() const { return n_; }
    const std::vector<SpinLevel> &levels() const { return levels_; }
    const WeightSectors &sectors() const { return *sectors_; }

    /// Full 2^n amplitude vector of |j, m, ell>, for levels()[level].
    StateVector vector(int level, HalfInt m) const;

    /// Orthonormal basis of weight sector w (real, rows = sector positions).
    const Eigen::MatrixXd &block(int w) const { return blocks_.at(static_cast<std::size_t>(w)); }
    const std::vector<Column> &block_columns(int w) const { return columns_.at(static_cast<std::size_t>(w)); }

    /// Number of levels with spin j.
    int multiplicity(HalfInt j) const;

    /// Change of basis from the (j, m, ell) basis to the computational one,
    /// columns ordered by ell then descending m.
    LinearOp basis_op() const;
    /// max over sectors of ||B^T B - I||_max.
    double orthonormality_residual() const;

  private:
    int n_;
    std::vector<SpinLevel> levels_;
    std::shared_ptr<const WeightSectors> sectors_;
    std::vector<Eigen::MatrixXd> blocks_;
    std::vector<std::vector<Column>> columns_;
};

class RankMismatch : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Builds the simultaneous eigenbasis of J^2 and J_z. Highest-weight
/// vectors come from an orthonormal kernel basis of J_+ on each weight
/// sector (column-pivoted Householder QR of the transposed restriction);
/// the rest of each ladder is generated with J_-. Each highest-weight
/// vector is signed so that its lowest-index nonzero amplitude is positive.
SpinDecomposition decompose(int n, int cap = kDefaultCap);

/// Process-wide cache of decompositions; thread safe.
std::shared_ptr<const SpinDecomposition> shared_decomposition(int n, int cap = kDefaultCap);

/// The (alpha, beta) Heisenberg family H = -J^2 + alpha J_z + beta J_z^2,
/// beta != 1.
class HamiltonianSpec {
  public:
    static HamiltonianSpec exact(Rational alpha, Rational beta);
    /// Real-valued parameters; gamma is then not known to be rational.
    static HamiltonianSpec real(double alpha, double beta);

    double alpha() const { return alpha_; }
    double beta() const { return beta_; }
    const std::optional<Rational> &alpha_exact() const { return alpha_q_; }
    const std::optional<Rational> &beta_exact() const { return beta_q_; }
    bool is_exact() const { return alpha_q_.has_value(); }

    /// sign(beta - 1)
    int s() const { return beta_ > 1.0 ? 1 : -1; }
    /// (alpha - 1) / (beta - 1)
    double gamma() const;
    std::optional<Rational> gamma_exact() const;
    /// pi / (2 |beta - 1|)
    double t_star() const;

    std::string describe() const;

  private:
    HamiltonianSpec(double a, double b, std::optional<Rational> aq, std::optional<Rational> bq);
    double alpha_;
    double beta_;
    std::optional<Rational> alpha_q_;
    std::optional<Rational> beta_q_;
};

/// -j(j+1) + alpha m + beta m^2
double hamiltonian_eigenvalue(const HamiltonianSpec &spec, HalfInt j, HalfInt m);

/// Sparse H_{alpha,beta} on n qubits.
LinearOp heisenberg_hamiltonian(int n, const HamiltonianSpec &spec, int cap = kDefaultCap);

/// exp(-i t H) acting on batches of states (columns).
class Propagator {
  public:
    virtual ~Propagator() = default;
    virtual int num_qubits() const = 0;
    virtual void apply(Eigen::MatrixXcd &states) const = 0;
    StateVector apply(const StateVector &state) const;
};

/// exp(-i t H_{alpha,beta}) through the spin basis, block by weight sector.
class SpinPropagator final : public Propagator {
  public:
    SpinPropagator(std::shared_ptr<const SpinDecomposition> decomposition, const HamiltonianSpec &spec,
                   double t);
    int num_qubits() const override { return decomposition_->n(); }
    void apply(Eigen::MatrixXcd &states) const override;
    using Propagator::apply;
    /// Same as apply for states supported on weight sector `w`, given in
    /// sector coordinates (rows ordered as sectors().indices(w)).
    void apply_sector(int w, Eigen::MatrixXcd &sector_states) const;

  private:
    std::shared_ptr<const SpinDecomposition> decomposition_;
    std::vector<Eigen::VectorXcd> phases_; // per sector, per block column
};

/// exp(-i t D) for a diagonal Hamiltonian D.
class DiagonalPropagator final : public Propagator {
  public:
    DiagonalPropagator(const LinearOp &diagonal_hamiltonian, double t);
    int num_qubits() const override { return n_; }
    void apply(Eigen::MatrixXcd &states) const override;
    using Propagator::apply;

  private:
    int n_;
    Eigen::VectorXcd phases_;
};

class NotBlockPreserving : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// Reference propagator: dense Hermitian eigendecomposition of H restricted
/// to each Hamming-weight block. H must be Hermitian and must not couple
/// different weights.
class BlockOraclePropagator final : public Propagator {
  public:
    BlockOraclePropagator(const LinearOp &hamiltonian, double t);
    int num_qubits() const override { return sectors_->n(); }
    void apply(Eigen::MatrixXcd &states) const override;
    using Propagator::apply;

  private:
    std::shared_ptr<const WeightSectors> sectors_;
    std::vector<Eigen::MatrixXcd> unitaries_;
};

/// exp(-i t H_{alpha,beta}) |state> through the spin decomposition.
StateVector evolve(const StateVector &state, const HamiltonianSpec &spec, double t, int cap = kDefaultCap);

/// exp(-i t H) |state> by per-block dense diagonalization of H.
StateVector evolve_oracle(const StateVector &state, const LinearOp &hamiltonian, double t);

/// JSON document {n, levels: [{two_j, ell, vectors: [{two_m, amplitudes}]}]}
/// where amplitudes maps the decimal basis index to [re, im].
std::string decomposition_json(const SpinDecomposition &d);

} // namespace spinfan::spin
