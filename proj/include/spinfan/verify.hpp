#pragma once

// Oracles and audits: unitary equivalence up to a global phase, exhaustive
// truth-table sweeps, decomposition audits and Psi orthogonality matrices.

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"
#include "spinfan/circuit.hpp"
#include "spinfan/gates.hpp"
#include "spinfan/qcore.hpp"

namespace spinfan::verify {

using qcore::LinearOp;

struct GateReport {
    std::string gate;
    int r = 0; // 0 when not applicable
    int q = 0;
    /// Hamiltonian and schedule parameters.
    nlohmann::json params = nlohmann::json::object();
    double max_deviation = 0.0;
    Complex global_phase{1.0, 0.0};
    double ancilla_leakage = 0.0;
    double column_norm_error = 0.0;
    /// Basis input (column) where the deviation is largest.
    std::uint64_t worst_input = 0;
    double tolerance = tol::kGate;
    bool pass = false;
    double runtime_ms = 0.0;

    /// pass = max_deviation < tolerance and ancilla_leakage < tolerance.
    void update_pass();
    nlohmann::json to_json() const;
};

/// Phase taken from the entry maximizing |A_ij| |B_ij| (lowest index on
/// ties); deviation is max |A - e^{i phi} B|.
GateReport equiv_up_to_phase(const LinearOp &a, const LinearOp &b, double tolerance = tol::kGate);

/// Runs the circuit on every io basis input and compares with `ideal`.
GateReport truth_table_sweep(const qcore::Circuit &circuit, const LinearOp &ideal, double tolerance = tol::kGate);

struct DecompositionAudit {
    int n = 0;
    bool multiplicities_ok = false;
    bool dimension_ok = false;
    bool total_ok = false;
    bool parity_split_ok = true; // only checked for even n
    std::int64_t total_reps = 0;
    std::int64_t even_reps = 0;
    std::int64_t odd_reps = 0;
    double max_casimir_residual = 0.0; // J^2 v - j(j+1) v
    double max_jz_residual = 0.0;
    double max_ladder_residual = 0.0;
    double max_raising_residual = 0.0; // J_+ on highest weights
    double orthonormality_residual = 0.0;
    double tolerance = tol::kOperator;
    std::vector<std::string> failures;

    bool pass() const { return failures.empty(); }
    nlohmann::json to_json() const;
};

DecompositionAudit decomposition_audit(int n, int cap = spin::kDefaultCap);

/// Moduli |<Psi_v|Psi_w>| for v, w = 0..w_max.
Eigen::MatrixXd orthogonality_matrix(const gates::ModSchedule &sched, double b, double c, const gates::PhiSpec &phi,
                                     int w_max);

/// Largest deviation of `m` from 1 where v = w (mod q) and 0 elsewhere.
double kronecker_deviation(const Eigen::MatrixXd &m, int q);

std::string matrix_csv(const Eigen::MatrixXd &m);

} // namespace spinfan::verify
