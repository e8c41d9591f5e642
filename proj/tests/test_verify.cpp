#include <gtest/gtest.h>

#include <numeric>
#include <random>

#include "spinfan/verify.hpp"
#include "test_util.hpp"

using namespace spinfan;
using namespace spinfan::verify;
using qcore::LinearOp;

namespace {

LinearOp random_unitary(int n, std::mt19937_64 &rng) {
    const Eigen::Index dim = Eigen::Index{1} << n;
    std::normal_distribution<double> g;
    Eigen::MatrixXcd m(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        for (Eigen::Index j = 0; j < dim; ++j) {
            m(i, j) = Complex(g(rng), g(rng));
        }
    }
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(m);
    return LinearOp::from_dense(qr.householderQ() * Eigen::MatrixXcd::Identity(dim, dim));
}

} // namespace

TEST(EquivUpToPhase, Equal) {
    const auto a = qcore::ideal_parity_unitary(2);
    const auto rep = equiv_up_to_phase(a, a);
    EXPECT_EQ(rep.max_deviation, 0.0);
    EXPECT_EQ(rep.global_phase, Complex(1.0));
    EXPECT_TRUE(rep.pass);
}

TEST(EquivUpToPhase, Negated) {
    const auto a = qcore::ideal_fanout_unitary(2);
    const auto rep = equiv_up_to_phase(a, Complex(-1.0) * a);
    EXPECT_EQ(rep.max_deviation, 0.0);
    EXPECT_NEAR(std::abs(rep.global_phase + 1.0), 0.0, 1e-15);
}

TEST(EquivUpToPhase, SmallPerturbationFails) {
    const auto a = qcore::hadamard_all(3);
    const LinearOp bump(8, {{5, 2, Complex(1e-6)}});
    const auto rep = equiv_up_to_phase(a + bump, a, 1e-9);
    EXPECT_FALSE(rep.pass);
    EXPECT_NEAR(rep.max_deviation, 1e-6, 1e-9);
    EXPECT_EQ(rep.worst_input, 2U);
}

TEST(EquivUpToPhase, DimensionMismatch) {
    EXPECT_THROW(equiv_up_to_phase(LinearOp::identity(4), LinearOp::identity(8)), DimensionError);
}

TEST(EquivUpToPhase, SymmetricAndPhaseInvariant) {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> angle(0.0, 6.283185307179586);
    for (int trial = 0; trial < 20; ++trial) {
        const auto a = random_unitary(3, rng);
        const auto b = trial % 2 == 0 ? a : random_unitary(3, rng);
        const Complex z = std::polar(1.0, angle(rng));
        const bool ab = equiv_up_to_phase(a, b).pass;
        EXPECT_EQ(ab, equiv_up_to_phase(b, a).pass);
        EXPECT_EQ(ab, equiv_up_to_phase(z * a, b).pass);
        EXPECT_EQ(ab, equiv_up_to_phase(a, z * b).pass);
        EXPECT_EQ(ab, trial % 2 == 0);
        const auto rep = equiv_up_to_phase(z * a, a);
        EXPECT_NEAR(std::abs(rep.global_phase - z), 0.0, 1e-12);
        EXPECT_LT(rep.max_deviation, 1e-12);
    }
}

TEST(GateReport, PassRuleAndJson) {
    GateReport r;
    r.gate = "parity";
    r.r = 2;
    r.max_deviation = 1e-12;
    r.ancilla_leakage = 2e-9;
    r.update_pass();
    EXPECT_FALSE(r.pass);
    r.ancilla_leakage = 0.0;
    r.update_pass();
    EXPECT_TRUE(r.pass);
    const auto j = r.to_json();
    EXPECT_EQ(j["gate"], "parity");
    EXPECT_EQ(j["r"], 2);
    EXPECT_FALSE(j.contains("q"));
    EXPECT_EQ(j["global_phase"].size(), 2U);
    for (const char *key : {"params", "max_deviation", "ancilla_leakage", "column_norm_error", "worst_input",
                            "tolerance", "pass", "runtime_ms"}) {
        EXPECT_TRUE(j.contains(key)) << key;
    }
}

TEST(TruthTableSweep, IdealAgainstIdeal) {
    qcore::Circuit c(3, {0, 1, 2});
    c.add_gate("parity", qcore::ideal_parity_unitary(2), {0, 1, 2});
    const auto rep = truth_table_sweep(c, qcore::ideal_parity_unitary(2));
    EXPECT_TRUE(rep.pass);
    EXPECT_EQ(rep.max_deviation, 0.0);
}

TEST(TruthTableSweep, ParityPassesAndHalfTimeFails) {
    const auto spec = spin::HamiltonianSpec::exact(Rational(1), Rational(3));
    const auto good = truth_table_sweep(gates::parity_circuit(2, spec), qcore::ideal_parity_unitary(2));
    EXPECT_TRUE(good.pass);
    EXPECT_LT(good.column_norm_error, 1e-10);
    gates::ParityOptions opts;
    opts.forward_time_scale = 0.5;
    const auto bad = truth_table_sweep(gates::parity_circuit(2, spec, opts), qcore::ideal_parity_unitary(2));
    EXPECT_FALSE(bad.pass);
    EXPECT_GT(bad.max_deviation, 1e-3);
    EXPECT_LT(bad.column_norm_error, 1e-10);
}

TEST(TruthTableSweep, UnitaryCircuitsKeepColumnNorms) {
    std::mt19937_64 rng(32);
    for (int trial = 0; trial < 5; ++trial) {
        qcore::Circuit c(4, {0, 1, 2, 3});
        c.add_gate("u", random_unitary(2, rng), {3, 1});
        c.add_gate("v", random_unitary(3, rng), {0, 2, 3});
        const auto rep = truth_table_sweep(c, LinearOp::identity(16));
        EXPECT_LT(rep.column_norm_error, 1e-10);
    }
}

TEST(DecompositionAudit, Examples) {
    const auto two = decomposition_audit(2);
    EXPECT_TRUE(two.pass());
    EXPECT_EQ(two.total_reps, 2);
    const auto six = decomposition_audit(6);
    EXPECT_TRUE(six.pass());
    EXPECT_EQ(six.total_reps, 20);
    EXPECT_EQ(six.even_reps, 10);
    EXPECT_EQ(six.odd_reps, 10);
}

TEST(DecompositionAudit, TwelveQubits) {
    const auto a = decomposition_audit(12);
    EXPECT_TRUE(a.pass()) << a.to_json().dump();
    EXPECT_EQ(a.total_reps, 924);
    for (double r : {a.max_casimir_residual, a.max_jz_residual, a.max_ladder_residual, a.max_raising_residual,
                     a.orthonormality_residual}) {
        EXPECT_LT(r, 1e-10);
    }
}

TEST(OrthogonalityMatrix, QTwoCheckerboard) {
    const auto m = orthogonality_matrix(gates::mod_schedule(2, 1, 1.0), 0.0, 0.0, gates::PhiSpec::uniform(2), 6);
    for (int v = 0; v <= 6; ++v) {
        for (int w = 0; w <= 6; ++w) {
            EXPECT_NEAR(m(v, w), (v + w) % 2 == 0 ? 1.0 : 0.0, 1e-12);
        }
    }
}

TEST(OrthogonalityMatrix, DeltaPatternAndShiftInvariance) {
    for (int q = 2; q <= 8; ++q) {
        for (std::int64_t k : {1, 2, 3}) {
            if (std::gcd(k, std::int64_t{q}) != 1) {
                continue;
            }
            for (double b : {0.0, -2.0, 0.5}) {
                const auto m =
                    orthogonality_matrix(gates::mod_schedule(q, k, 1.0), b, 0.25, gates::PhiSpec::uniform(q), 3 * q);
                EXPECT_LT(kronecker_deviation(m, q), 1e-12) << "q " << q << " k " << k << " b " << b;
                for (int v = 0; v < m.rows(); ++v) {
                    EXPECT_NEAR(m(v, v), 1.0, 1e-12);
                    for (int w = 0; w < m.cols(); ++w) {
                        const int d = ((v - w) % q + q) % q;
                        EXPECT_NEAR(m(v, w), m(d, 0), 1e-12);
                    }
                }
            }
        }
    }
}

TEST(OrthogonalityMatrix, FiveWithKTwo) {
    const auto m = orthogonality_matrix(gates::mod_schedule(5, 2, 1.0), 0.0, 0.0, gates::PhiSpec::uniform(5), 15);
    EXPECT_LT(kronecker_deviation(m, 5), 1e-12);
}

TEST(OrthogonalityMatrix, SharedFactorBreaksPattern) {
    const auto m =
        orthogonality_matrix(gates::mod_schedule_unchecked(4, 2, 1.0), 0.0, 0.0, gates::PhiSpec::uniform(4), 12);
    EXPECT_GT(kronecker_deviation(m, 4), 1e-3);
}

TEST(OrthogonalityMatrix, Csv) {
    Eigen::MatrixXd m(2, 2);
    m << 1.0, 0.0, 0.5, 1.0;
    EXPECT_EQ(matrix_csv(m), "1.0,0.0\n0.5,1.0\n");
}
