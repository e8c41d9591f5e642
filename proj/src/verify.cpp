#include "spinfan/verify.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <map>
#include <sstream>

#include <Eigen/Sparse>

namespace spinfan::verify {

namespace {

using SparseC = Eigen::SparseMatrix<Complex>;

// Restriction of `op` to rows of weight `row_w` and columns of weight
// `col_w`, in sector coordinates.
SparseC restrict(const LinearOp &op, const spin::WeightSectors &sec, int row_w, int col_w) {
    std::vector<Eigen::Triplet<Complex>> trips;
    for (const auto &e : op.entries()) {
        if (std::popcount(e.row) == row_w && std::popcount(e.col) == col_w) {
            trips.emplace_back(static_cast<int>(sec.position(e.row)), static_cast<int>(sec.position(e.col)), e.value);
        }
    }
    SparseC m(static_cast<Eigen::Index>(sec.size(row_w)), static_cast<Eigen::Index>(sec.size(col_w)));
    m.setFromTriplets(trips.begin(), trips.end());
    return m;
}

} // namespace

void GateReport::update_pass() { pass = max_deviation < tolerance && ancilla_leakage < tolerance; }

nlohmann::json GateReport::to_json() const {
    nlohmann::json j;
    j["gate"] = gate;
    if (r > 0) {
        j["r"] = r;
    }
    if (q > 0) {
        j["q"] = q;
    }
    j["params"] = params;
    j["max_deviation"] = max_deviation;
    j["global_phase"] = {global_phase.real(), global_phase.imag()};
    j["ancilla_leakage"] = ancilla_leakage;
    j["column_norm_error"] = column_norm_error;
    j["worst_input"] = worst_input;
    j["tolerance"] = tolerance;
    j["pass"] = pass;
    j["runtime_ms"] = runtime_ms;
    return j;
}

GateReport equiv_up_to_phase(const LinearOp &a, const LinearOp &b, double tolerance) {
    if (a.dim() != b.dim()) {
        throw DimensionError("equiv_up_to_phase: dimensions " + std::to_string(a.dim()) + " and " +
                             std::to_string(b.dim()) + " differ");
    }
    GateReport rep;
    rep.tolerance = tolerance;

    // Both entry lists are sorted by (row, col).
    double best = 0.0;
    auto ia = a.entries().begin();
    auto ib = b.entries().begin();
    while (ia != a.entries().end() && ib != b.entries().end()) {
        if (ia->row < ib->row || (ia->row == ib->row && ia->col < ib->col)) {
            ++ia;
        } else if (ib->row < ia->row || (ib->row == ia->row && ib->col < ia->col)) {
            ++ib;
        } else {
            const double weight = std::abs(ia->value) * std::abs(ib->value);
            if (weight > best) {
                best = weight;
                const Complex ratio = ia->value / ib->value;
                rep.global_phase = ratio / std::abs(ratio);
            }
            ++ia;
            ++ib;
        }
    }

    const LinearOp diff = a - rep.global_phase * b;
    for (const auto &e : diff.entries()) {
        const double v = std::abs(e.value);
        if (v > rep.max_deviation) {
            rep.max_deviation = v;
            rep.worst_input = e.col;
        }
    }
    rep.update_pass();
    return rep;
}

GateReport truth_table_sweep(const qcore::Circuit &circuit, const LinearOp &ideal, double tolerance) {
    const auto start = std::chrono::steady_clock::now();
    const auto induced = qcore::induce(circuit);
    GateReport rep = equiv_up_to_phase(induced.unitary, ideal, tolerance);
    rep.ancilla_leakage = induced.ancilla_leakage;
    rep.column_norm_error = induced.column_norm_error;
    rep.update_pass();
    rep.runtime_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return rep;
}

nlohmann::json DecompositionAudit::to_json() const {
    nlohmann::json j;
    j["n"] = n;
    j["multiplicities_ok"] = multiplicities_ok;
    j["dimension_ok"] = dimension_ok;
    j["total_ok"] = total_ok;
    j["parity_split_ok"] = parity_split_ok;
    j["total_reps"] = total_reps;
    j["even_reps"] = even_reps;
    j["odd_reps"] = odd_reps;
    j["max_casimir_residual"] = max_casimir_residual;
    j["max_jz_residual"] = max_jz_residual;
    j["max_ladder_residual"] = max_ladder_residual;
    j["max_raising_residual"] = max_raising_residual;
    j["orthonormality_residual"] = orthonormality_residual;
    j["tolerance"] = tolerance;
    j["failures"] = failures;
    j["pass"] = pass();
    return j;
}

DecompositionAudit decomposition_audit(int n, int cap) {
    DecompositionAudit out;
    out.n = n;
    const auto dec = spin::shared_decomposition(n, cap);
    const auto ops = spin::collective_ops(n, cap);
    const auto &sec = dec->sectors();

    // Counting identities, exact.
    out.multiplicities_ok = true;
    std::int64_t dim_sum = 0;
    for (int twice_j = n % 2; twice_j <= n; twice_j += 2) {
        const auto j = spin::HalfInt::from_twice(twice_j);
        const std::int64_t k = spin::rep_count(n, j);
        if (dec->multiplicity(j) != k) {
            out.multiplicities_ok = false;
            out.failures.push_back("multiplicity of j = " + j.to_string() + " is " +
                                   std::to_string(dec->multiplicity(j)) + ", expected " + std::to_string(k));
        }
        dim_sum += (twice_j + 1) * k;
        out.total_reps += k;
        if (n % 2 == 0) {
            ((twice_j / 2) % 2 == 0 ? out.even_reps : out.odd_reps) += k;
        }
    }
    std::int64_t level_dim = 0;
    for (const auto &lvl : dec->levels()) {
        level_dim += lvl.size();
    }
    out.dimension_ok = dim_sum == (std::int64_t{1} << n) && level_dim == dim_sum;
    if (!out.dimension_ok) {
        out.failures.push_back("dimension identity fails: " + std::to_string(dim_sum) + " vs 2^n");
    }
    out.total_ok = out.total_reps == spin::binomial(n, n / 2) &&
                   static_cast<std::int64_t>(dec->levels().size()) == out.total_reps;
    if (!out.total_ok) {
        out.failures.push_back("total representation count " + std::to_string(out.total_reps) +
                               " differs from C(n, n/2)");
    }
    if (n % 2 == 0) {
        out.parity_split_ok = out.even_reps == out.odd_reps;
        if (!out.parity_split_ok) {
            out.failures.push_back("even/odd split is " + std::to_string(out.even_reps) + "/" +
                                   std::to_string(out.odd_reps));
        }
    }

    // Residuals, one weight sector at a time.
    for (int w = 0; w <= n; ++w) {
        const auto &b = dec->block(w);
        const auto &cols = dec->block_columns(w);
        if (cols.empty()) {
            continue;
        }
        const Eigen::MatrixXcd bc = b.cast<Complex>();
        Eigen::VectorXd casimir(static_cast<Eigen::Index>(cols.size()));
        Eigen::VectorXd mz(static_cast<Eigen::Index>(cols.size()));
        for (std::size_t c = 0; c < cols.size(); ++c) {
            const double j = dec->levels()[static_cast<std::size_t>(cols[c].level)].j.value();
            casimir(static_cast<Eigen::Index>(c)) = j * (j + 1.0);
            mz(static_cast<Eigen::Index>(c)) = cols[c].m.value();
        }
        const Eigen::MatrixXcd jsq_res = restrict(ops.jsq, sec, w, w) * bc - bc * casimir.asDiagonal();
        out.max_casimir_residual = std::max(out.max_casimir_residual, jsq_res.cwiseAbs().maxCoeff());
        const Eigen::MatrixXcd jz_res = restrict(ops.jz, sec, w, w) * bc - bc * mz.asDiagonal();
        out.max_jz_residual = std::max(out.max_jz_residual, jz_res.cwiseAbs().maxCoeff());

        // J_- v(l, m) = sqrt(j(j+1) - m(m-1)) v(l, m-1), zero at m = -j.
        if (w < n) {
            const Eigen::MatrixXcd lowered = restrict(ops.jminus, sec, w + 1, w) * bc;
            std::map<std::pair<int, int>, Eigen::Index> next;
            const auto &ncols = dec->block_columns(w + 1);
            for (std::size_t c = 0; c < ncols.size(); ++c) {
                next[{ncols[c].level, ncols[c].m.twice()}] = static_cast<Eigen::Index>(c);
            }
            const auto &nb = dec->block(w + 1);
            for (std::size_t c = 0; c < cols.size(); ++c) {
                const auto jj = dec->levels()[static_cast<std::size_t>(cols[c].level)].j;
                const double j = jj.value();
                const double m = cols[c].m.value();
                Eigen::VectorXcd expected = Eigen::VectorXcd::Zero(lowered.rows());
                if (cols[c].m.twice() > -jj.twice()) {
                    const auto it = next.find({cols[c].level, cols[c].m.twice() - 2});
                    if (it == next.end()) {
                        out.failures.push_back("ladder is missing a vector");
                        continue;
                    }
                    expected = std::sqrt(j * (j + 1.0) - m * (m - 1.0)) * nb.col(it->second).cast<Complex>();
                }
                out.max_ladder_residual = std::max(
                    out.max_ladder_residual,
                    (lowered.col(static_cast<Eigen::Index>(c)) - expected).cwiseAbs().maxCoeff());
            }
        }
        // J_+ annihilates highest weights.
        if (w > 0) {
            const Eigen::MatrixXcd raised = restrict(ops.jplus, sec, w - 1, w) * bc;
            for (std::size_t c = 0; c < cols.size(); ++c) {
                const auto jj = dec->levels()[static_cast<std::size_t>(cols[c].level)].j;
                if (cols[c].m == jj) {
                    out.max_raising_residual = std::max(
                        out.max_raising_residual, raised.col(static_cast<Eigen::Index>(c)).cwiseAbs().maxCoeff());
                }
            }
        }
    }
    out.orthonormality_residual = dec->orthonormality_residual();

    const std::pair<const char *, double> residuals[] = {
        {"casimir", out.max_casimir_residual},  {"jz", out.max_jz_residual},
        {"ladder", out.max_ladder_residual},    {"raising", out.max_raising_residual},
        {"orthonormality", out.orthonormality_residual},
    };
    for (const auto &[name, value] : residuals) {
        if (!(value < out.tolerance)) {
            out.failures.push_back(std::string(name) + " residual " + std::to_string(value) + " too large");
        }
    }
    return out;
}

Eigen::MatrixXd orthogonality_matrix(const gates::ModSchedule &sched, double b, double c, const gates::PhiSpec &phi,
                                     int w_max) {
    if (w_max < 0) {
        throw std::invalid_argument("w_max must be nonnegative");
    }
    std::vector<qcore::StateVector> psi;
    for (int w = 0; w <= w_max; ++w) {
        psi.push_back(gates::psi_w(sched, b, c, w, phi));
    }
    Eigen::MatrixXd m(w_max + 1, w_max + 1);
    for (int v = 0; v <= w_max; ++v) {
        for (int w = 0; w <= w_max; ++w) {
            m(v, w) = std::abs(qcore::inner(psi[static_cast<std::size_t>(v)], psi[static_cast<std::size_t>(w)]));
        }
    }
    return m;
}

double kronecker_deviation(const Eigen::MatrixXd &m, int q) {
    double worst = 0.0;
    for (Eigen::Index v = 0; v < m.rows(); ++v) {
        for (Eigen::Index w = 0; w < m.cols(); ++w) {
            const double expected = ((v - w) % q == 0) ? 1.0 : 0.0;
            worst = std::max(worst, std::abs(m(v, w) - expected));
        }
    }
    return worst;
}

std::string matrix_csv(const Eigen::MatrixXd &m) {
    std::ostringstream os;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j > 0) {
                os << ',';
            }
            os << nlohmann::json(m(i, j)).dump();
        }
        os << '\n';
    }
    return os.str();
}

} // namespace spinfan::verify
