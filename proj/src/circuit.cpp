#include "spinfan/circuit.hpp"

#include <algorithm>
#include <cmath>

namespace spinfan::qcore {

Circuit::Circuit(int num_wires, std::vector<int> io_wires)
    : num_wires_(num_wires), io_wires_(std::move(io_wires)) {
    if (num_wires < 1 || num_wires > 26) {
        throw DimensionError("circuit width " + std::to_string(num_wires) + " outside [1, 26]");
    }
    for (int w = 0; w < num_wires; ++w) {
        if (std::find(io_wires_.begin(), io_wires_.end(), w) == io_wires_.end()) {
            ancilla_wires_.push_back(w);
        }
    }
    for (int w : io_wires_) {
        if (w < 0 || w >= num_wires) {
            throw DimensionError("io wire out of range");
        }
    }
    if (io_wires_.size() + ancilla_wires_.size() != static_cast<std::size_t>(num_wires)) {
        throw DimensionError("duplicate io wire");
    }
}

void Circuit::add_gate(std::string label, const LinearOp &op, std::vector<int> wires) {
    if (op.dim() != (std::size_t{1} << wires.size())) {
        throw DimensionError("gate '" + label + "' has dimension " + std::to_string(op.dim()) +
                             " but acts on " + std::to_string(wires.size()) + " wires");
    }
    add_map(std::move(label), std::move(wires), [op](Eigen::MatrixXcd &block) { block = op.apply(block); });
}

void Circuit::add_map(std::string label, std::vector<int> wires, BatchMap map) {
    for (int w : wires) {
        if (w < 0 || w >= num_wires_) {
            throw DimensionError("step '" + label + "' touches wire " + std::to_string(w) +
                                 " outside the register");
        }
    }
    steps_.push_back({std::move(label), std::move(wires), std::move(map)});
}

void Circuit::append(const Circuit &other, const std::vector<int> &wire_map) {
    if (wire_map.size() != static_cast<std::size_t>(other.num_wires())) {
        throw DimensionError("wire map size does not match the appended circuit");
    }
    for (const auto &step : other.steps()) {
        std::vector<int> wires;
        wires.reserve(step.wires.size());
        for (int w : step.wires) {
            wires.push_back(wire_map[static_cast<std::size_t>(w)]);
        }
        add_map(step.label, std::move(wires), step.map);
    }
}

void Circuit::run(StateVector &state, std::size_t first, std::size_t last) const {
    if (state.num_qubits() != num_wires_) {
        throw DimensionError("state width does not match circuit width");
    }
    last = std::min(last, steps_.size());
    for (std::size_t i = first; i < last; ++i) {
        apply_on_subsystem(state, steps_[i].wires, steps_[i].map);
    }
}

std::size_t Circuit::find_step(const std::string &label) const {
    for (std::size_t i = 0; i < steps_.size(); ++i) {
        if (steps_[i].label == label) {
            return i;
        }
    }
    return steps_.size();
}

StateVector Circuit::input_state(std::uint64_t io_input) const {
    const int k = static_cast<int>(io_wires_.size());
    std::uint64_t index = 0;
    for (int i = 0; i < k; ++i) {
        if ((io_input >> (k - 1 - i)) & 1U) {
            index |= qubit_mask(io_wires_[static_cast<std::size_t>(i)], num_wires_);
        }
    }
    return StateVector::basis(num_wires_, index);
}

InducedGate induce(const Circuit &circuit) {
    const int n = circuit.num_wires();
    const auto &io = circuit.io_wires();
    const int k = static_cast<int>(io.size());
    const std::size_t io_dim = std::size_t{1} << k;

    std::uint64_t ancilla_mask = 0;
    for (int w : circuit.ancilla_wires()) {
        ancilla_mask |= qubit_mask(w, n);
    }
    // Global index of each io configuration with ancillas at zero.
    std::vector<std::uint64_t> io_index(io_dim, 0);
    for (std::size_t l = 0; l < io_dim; ++l) {
        for (int i = 0; i < k; ++i) {
            if ((l >> (k - 1 - i)) & 1U) {
                io_index[l] |= qubit_mask(io[static_cast<std::size_t>(i)], n);
            }
        }
    }

    InducedGate out;
    std::vector<OpEntry> entries;
    for (std::size_t col = 0; col < io_dim; ++col) {
        StateVector state = circuit.input_state(col);
        circuit.run(state);
        double leak = 0.0;
        double total = 0.0;
        const auto amps = state.amplitudes();
        for (std::size_t i = 0; i < amps.size(); ++i) {
            const double p = std::norm(amps[i]);
            total += p;
            if (i & ancilla_mask) {
                leak += p;
            }
        }
        out.ancilla_leakage = std::max(out.ancilla_leakage, std::sqrt(leak));
        out.column_norm_error = std::max(out.column_norm_error, std::abs(std::sqrt(total) - 1.0));
        for (std::size_t row = 0; row < io_dim; ++row) {
            const Complex a = amps[io_index[row]];
            if (a != Complex{}) {
                entries.push_back({row, col, a});
            }
        }
    }
    out.unitary = LinearOp(io_dim, std::move(entries));
    return out;
}

} // namespace spinfan::qcore
