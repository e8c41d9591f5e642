#pragma once

// Parity, fanout and Mod_q circuits driven by Hamiltonian evolution, and
// the evolution schedules they need.

#include <complex>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "spinfan/circuit.hpp"
#include "spinfan/encode.hpp"
#include "spinfan/qcore.hpp"
#include "spinfan/rational.hpp"
#include "spinfan/spin.hpp"

namespace spinfan::gates {

using encode::BlockEncoding;
using qcore::Circuit;
using qcore::LinearOp;
using qcore::StateVector;
using spin::HamiltonianSpec;

class GateLeakage : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class NoPositiveInverse : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

class CertificationError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// diag(1, exp(-i s pi (2 r + gamma - 1) / 2)), where 2r is the number of
/// physical qubits carrying the encoded register.
LinearOp v_gate(int r, const HamiltonianSpec &spec);

// ---- positive-time inverses for the Heisenberg family ----

/// Evolve the same Hamiltonian for `time` = k u - t_forward, where
/// exp(-i u H) fixes every highest-weight state.
struct PeriodicInverse {
    double u = 0.0;
    std::int64_t k = 0;
    double time = 0.0;
};

/// Evolve H_{alpha', beta'} for t'.
struct InverseSchedule {
    double alpha_p = 0.0;
    double beta_p = 2.0;
    double t_p = 0.0;
    int ell = 0;

    HamiltonianSpec hamiltonian() const { return HamiltonianSpec::real(alpha_p, beta_p); }
};

struct ScheduleCheck {
    bool ok = false;
    std::string reason; // empty when ok
};

/// Conditions (i)-(iii) relating `sched` to the forward Hamiltonian `spec`.
ScheduleCheck check_inverse_schedule(const HamiltonianSpec &spec, const InverseSchedule &sched);

/// The schedule with |beta' - 1| = 1 for the given ell.
InverseSchedule make_inverse_schedule(const HamiltonianSpec &spec, int ell = 0);

/// Smallest period u of the highest-weight phases when gamma is an exact
/// rational, otherwise the ell = 0 schedule.
std::variant<PeriodicInverse, InverseSchedule> positive_inverse_heisenberg(const HamiltonianSpec &spec);

/// Largest |U' U v - v| over the highest-weight vectors v of n qubits,
/// U = exp(-i t H_forward) and U' = exp(-i t_inverse H_inverse).
double restoration_residual(int n, const HamiltonianSpec &forward, double t, const HamiltonianSpec &inverse,
                            double t_inverse);

/// Period and wait time for phases u * scale * (j^2 + ratio j) with ratio
/// exact; `forward` is the time already evolved.
PeriodicInverse periodic_inverse(double scale, const Rational &ratio, double forward);

// ---- parity and fanout ----

enum class Uncompute {
    kExactReverse, // apply the inverse evolution exactly
    kPositiveTime, // evolve forward in time with a positive-time inverse
};

struct ParityOptions {
    Uncompute uncompute = Uncompute::kExactReverse;
    /// Multiplies the forward evolution time (1 is the correct schedule).
    double forward_time_scale = 1.0;
    /// With kPositiveTime, overrides the inverse chosen automatically.
    std::optional<InverseSchedule> schedule;
};

/// Wire layout: r / c blocks of d wires each, the first c wires of a block
/// holding logical bits, then the target at wire r/c * d. The io wires are
/// the logical wires followed by the target.
Circuit parity_circuit(int r, const HamiltonianSpec &spec, const BlockEncoding &encoding,
                       const ParityOptions &options = {});
Circuit parity_circuit(int r, const HamiltonianSpec &spec, const ParityOptions &options = {});

/// Hadamards on every io wire around the parity circuit.
Circuit fanout_circuit(int r, const HamiltonianSpec &spec, const BlockEncoding &encoding,
                       const ParityOptions &options = {});
Circuit fanout_circuit(int r, const HamiltonianSpec &spec, const ParityOptions &options = {});

/// Induced unitary on the io wires; throws GateLeakage above tol::kGate.
LinearOp induced_unitary(const Circuit &circuit);

struct ParityPhaseCheck {
    double max_deviation = 0.0;   // against the closed form, amplitude-wise
    double max_product_error = 0.0; // distance from a product state
};

/// After decoding the last block, the last logical qubit must be
/// (|0> + (-1)^{n/2 + wt(x)} e^{i s pi (gamma - 1)/2} |1>)/sqrt2 for every
/// logical input x, n the encoded register width.
ParityPhaseCheck parity_phase_check(int r, const HamiltonianSpec &spec, const BlockEncoding &encoding);

// ---- quadratic Hamiltonians and Mod_q ----

struct EncoderGate {
    LinearOp op;
    std::vector<int> wires;
};

using PropagatorFactory = std::function<std::shared_ptr<const spin::Propagator>(double t)>;

/// G on n qubits whose encoded states E|y 0^{n-m}> have eigenvalue
/// a w^2 + b w + c, w = wt(y).
struct QuadraticHamiltonian {
    std::string name;
    int m = 0;
    int n = 0;
    double a = 1.0;
    double b = 0.0;
    double c = 0.0;
    std::optional<Rational> a_exact;
    std::optional<Rational> b_exact;
    std::optional<Rational> c_exact;
    LinearOp hamiltonian;
    /// Gates applied in order; wires index the n-qubit register.
    std::vector<EncoderGate> encoder;
    PropagatorFactory propagator;

    double eigenvalue(int w) const { return a * w * w + b * w + c; }
    /// b / a when both are exact.
    std::optional<Rational> b_ratio_exact() const;
    /// Largest |G v - lambda v| over encoded basis states; throws
    /// CertificationError above tol::kGate.
    double certify() const;
    StateVector encode(std::uint64_t y) const;
};

QuadraticHamiltonian quadratic_from_heisenberg(int m, const HamiltonianSpec &spec);
QuadraticHamiltonian quadratic_jz2(int m);

struct PhiSpec {
    int q = 2;
    std::vector<Complex> coeffs;

    static PhiSpec uniform(int q);
    void validate() const;
    StateVector state() const;
};

struct ModSchedule {
    int q = 2;
    std::int64_t k = 1;
    double t = 0.0;
    bool conjugate_phases = false;
};

/// t = pi k / (q |a|); requires gcd(k, q) = 1.
ModSchedule mod_schedule(int q, std::int64_t k, double a);
/// Same without the gcd requirement.
ModSchedule mod_schedule_unchecked(int q, std::int64_t k, double a);

/// Index of |1^j 0^{q-1-j}> on q-1 qubits.
std::uint64_t staircase_index(int q, int j);

/// Sum_j c_j exp(-/+ i pi k [(w+j)^2 + b (w+j) + c] / q) |1^j 0^{q-1-j}>.
StateVector psi_w(const ModSchedule &sched, double b, double c, int w, const PhiSpec &phi);

/// Maps alpha_j (Psi_j with its first nonzero amplitude made real positive)
/// to the j-th staircase vector, identity off the staircase subspace.
/// With `strict`, throws CertificationError when the alpha_j are not
/// orthonormal to 1e-9; otherwise they are orthonormalized first.
LinearOp r_operator(const ModSchedule &sched, double b, double c, const PhiSpec &phi, bool strict = true);

PeriodicInverse positive_inverse_quadratic(const QuadraticHamiltonian &g, const ModSchedule &sched);

struct ModqOptions {
    Uncompute uncompute = Uncompute::kExactReverse;
    double forward_time_scale = 1.0;
    bool strict_r = true;
};

/// Wires: [controls r][phi q-1][encoder ancillas n-m][targets q-1]; io are
/// the controls then the targets. Requires g.m = r + q - 1.
Circuit generalized_modq_circuit(int r, int q, const QuadraticHamiltonian &g, const ModSchedule &sched,
                                 const PhiSpec &phi, const ModqOptions &options = {});

/// Wires: [controls r][target] followed by the generalized circuit's
/// remaining wires; io are the controls then the target.
Circuit standard_modq_circuit(int r, int q, const QuadraticHamiltonian &g, const ModSchedule &sched,
                              const PhiSpec &phi, const ModqOptions &options = {});

} // namespace spinfan::gates
