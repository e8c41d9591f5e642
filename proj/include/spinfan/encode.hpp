#pragma once

// Encoders that map logical computational basis states onto highest-weight
// spin states |j, j, ell>.

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "spinfan/qcore.hpp"
#include "spinfan/spin.hpp"

namespace spinfan::encode {

using qcore::BitString;
using qcore::LinearOp;
using qcore::StateVector;
using spin::HalfInt;

/// An encoder acting on one block of `physical_width` wires whose first
/// `logical_width` wires carry the logical bits and whose remaining wires
/// are ancillas in |0>.
struct BlockEncoding {
    int logical_width = 1;
    int physical_width = 2;
    LinearOp unitary;
    std::string name;
};

/// The 4x4 Hermitian unitary E with
///   E|00> = |00>,  E|10> = (|10> - |01>)/sqrt2,
///   E|01> = -(|01> + |10>)/sqrt2,  E|11> = |11>.
LinearOp pair_encoder();
BlockEncoding pair_block();

/// Disjoint qubit pairs placed in the singlet (|10> - |01>)/sqrt2, with
/// every unpaired qubit in |0>.
struct PairingSpec {
    int n = 0;
    std::vector<std::pair<int, int>> pairs;

    void validate() const;
    std::vector<int> unpaired() const;
};

StateVector pairing_state(const PairingSpec &spec);

/// 2r-qubit tensor product of |0_L> = |00> and |1_L> = singlet, bit i on
/// qubits (2i, 2i+1).
StateVector logical_encode(const BitString &x);

/// Smallest even d with C(d, d/2) >= 2^c.
int min_even_d(int c);
double compression_ratio(int c);

/// How encoded inputs are matched with spin representations.
enum class AssignmentRule {
    /// j_x = d/2 - wt(x) when every weight class fits, else kGreedyParity.
    kAuto,
    /// j_x = d/2 - wt(x); ell taken in lexicographic order of x.
    kWeightLinear,
    /// Largest available j with the parity of d/2 - wt(x), x in
    /// lexicographic order.
    kGreedyParity,
};

struct Assignment {
    std::uint64_t x = 0; // c-bit input, first bit most significant
    int weight = 0;
    HalfInt j;
    int ell = 0;
};

class InfeasibleEncoding : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// Largest d accepted by group_encoder (the matrix is built densely).
inline constexpr int kGroupEncoderCap = 10;

class GroupEncoder {
  public:
    int c() const { return c_; }
    int d() const { return d_; }
    const std::vector<Assignment> &assignment() const { return assignment_; }
    const LinearOp &matrix() const { return matrix_; }
    const spin::SpinDecomposition &decomposition() const { return *decomposition_; }
    BlockEncoding block() const;
    /// True when j_x = d/2 - wt(x) for every x.
    bool is_weight_linear() const;

    friend GroupEncoder group_encoder(int c, int d, AssignmentRule rule);
    friend GroupEncoder group_encoder_from_levels(int c, int d, const std::vector<int> &level_for_x,
                                                  bool enforce_parity);

  private:
    GroupEncoder(int c, int d, std::vector<Assignment> assignment,
                 std::shared_ptr<const spin::SpinDecomposition> decomposition);
    int c_;
    int d_;
    std::vector<Assignment> assignment_;
    std::shared_ptr<const spin::SpinDecomposition> decomposition_;
    LinearOp matrix_;
};

/// Maps |x 0^{d-c}> to |j_x, j_x, ell_x> with j_x of the parity of
/// d/2 - wt(x) and distinct ell_x, completed to a unitary.
GroupEncoder group_encoder(int c, int d, AssignmentRule rule = AssignmentRule::kAuto);

/// Builds an encoder from an explicit choice of spin level (index into
/// decompose(d).levels()) per input x. With `enforce_parity` false the
/// parity rule is not checked.
GroupEncoder group_encoder_from_levels(int c, int d, const std::vector<int> &level_for_x,
                                       bool enforce_parity = true);

/// CSV rows "x,wt,j,ell" with a header line.
std::string assignment_csv(const GroupEncoder &encoder);

} // namespace spinfan::encode
