#pragma once

// A register-level circuit: an ordered list of steps, each acting on a
// subset of wires. Some wires are inputs/outputs ("io"), the rest are
// ancillas that start in |0> and must be returned to |0>.

#include <string>
#include <vector>

#include "spinfan/qcore.hpp"

namespace spinfan::qcore {

class Circuit {
  public:
    struct Step {
        std::string label;
        std::vector<int> wires;
        BatchMap map;
    };

    Circuit(int num_wires, std::vector<int> io_wires);

    int num_wires() const { return num_wires_; }
    const std::vector<int> &io_wires() const { return io_wires_; }
    const std::vector<int> &ancilla_wires() const { return ancilla_wires_; }
    const std::vector<Step> &steps() const { return steps_; }

    void add_gate(std::string label, const LinearOp &op, std::vector<int> wires);
    void add_map(std::string label, std::vector<int> wires, BatchMap map);
    /// Appends every step of `other`, whose wire i is mapped to wire_map[i].
    void append(const Circuit &other, const std::vector<int> &wire_map);

    /// Runs steps [first, last) on `state`.
    void run(StateVector &state, std::size_t first = 0, std::size_t last = static_cast<std::size_t>(-1)) const;
    /// Index of the first step with the given label, or steps().size().
    std::size_t find_step(const std::string &label) const;

    /// Full-register state with the io wires set to `io_input` (io_wires[0]
    /// most significant) and every ancilla in |0>.
    StateVector input_state(std::uint64_t io_input) const;

  private:
    int num_wires_;
    std::vector<int> io_wires_;
    std::vector<int> ancilla_wires_;
    std::vector<Step> steps_;
};

struct InducedGate {
    LinearOp unitary;               // on the io wires
    double ancilla_leakage = 0.0;   // worst norm left outside ancilla |0...0>
    double column_norm_error = 0.0; // worst | ||output|| - 1 |
};

/// Runs the circuit on every computational basis input of the io wires and
/// collects the output amplitudes with all ancillas in |0>.
InducedGate induce(const Circuit &circuit);

} // namespace spinfan::qcore
