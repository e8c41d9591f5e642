#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "json.hpp"
#include "spinfan/spin.hpp"
#include "test_util.hpp"

using namespace spinfan;
using namespace spinfan::spin;
using qcore::StateVector;

namespace {

HalfInt half(int twice) { return HalfInt::from_twice(twice); }

double op_norm_on(const LinearOp &op, const StateVector &v) { return op.apply(v).norm(); }

// dim ker(J_+) restricted to weight-w inputs, by dense rank computation.
int kernel_dim(int n, int w) {
    const auto ops = collective_ops(n);
    const WeightSectors sec(n);
    const auto &cols = sec.indices(w);
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(Eigen::Index{1} << n, static_cast<Eigen::Index>(cols.size()));
    for (std::size_t c = 0; c < cols.size(); ++c) {
        m.col(static_cast<Eigen::Index>(c)) = testutil::to_eigen(ops.jplus.apply(StateVector::basis(n, cols[c])));
    }
    Eigen::FullPivLU<Eigen::MatrixXcd> lu(m);
    lu.setThreshold(1e-10);
    return static_cast<int>(cols.size()) - static_cast<int>(lu.rank());
}

} // namespace

TEST(HalfInt, ExactArithmetic) {
    EXPECT_EQ(half(3) + half(1), HalfInt::from_int(2));
    EXPECT_EQ((half(3) - half(5)).twice(), -2);
    EXPECT_LT(half(1), half(2));
    EXPECT_EQ(half(3).to_string(), "3/2");
    EXPECT_EQ(HalfInt::from_int(2).as_int(), 2);
    EXPECT_THROW((void)half(3).as_int(), std::logic_error);
}

TEST(CollectiveOps, Examples) {
    const auto ops2 = collective_ops(2);
    EXPECT_LT(op_norm_on(ops2.jz, StateVector::basis(2, 0b01)), 1e-15);
    const auto ops1 = collective_ops(1);
    const auto v = ops1.jsq.apply(StateVector::basis(1, 0));
    EXPECT_NEAR(v[0].real(), 0.75, 1e-15);
    StateVector singlet(2);
    singlet[0] = 0.0;
    singlet[0b10] = 1.0 / std::sqrt(2.0);
    singlet[0b01] = -1.0 / std::sqrt(2.0);
    EXPECT_LT(op_norm_on(ops2.jsq, singlet), 1e-15);
}

TEST(CollectiveOps, RejectsBadWidth) {
    EXPECT_THROW(collective_ops(0), std::invalid_argument);
    EXPECT_THROW(collective_ops(15), std::invalid_argument);
}

TEST(CollectiveOps, CommutationRelations) {
    const Complex i(0.0, 1.0);
    for (int n = 1; n <= 6; ++n) {
        const auto o = collective_ops(n);
        EXPECT_LT((o.jx * o.jy - o.jy * o.jx).max_abs_diff(i * o.jz), 1e-12);
        EXPECT_LT((o.jy * o.jz - o.jz * o.jy).max_abs_diff(i * o.jx), 1e-12);
        EXPECT_LT((o.jz * o.jx - o.jx * o.jz).max_abs_diff(i * o.jy), 1e-12);
        EXPECT_LT((o.jx + i * o.jy).max_abs_diff(o.jplus), 1e-15);
        EXPECT_LT((o.jx * o.jx + o.jy * o.jy + o.jz * o.jz).max_abs_diff(o.jsq), 1e-12);
    }
}

TEST(CollectiveOps, CasimirCommutesWithJz) {
    for (int n = 1; n <= 8; ++n) {
        const auto o = collective_ops(n);
        const LinearOp zero(o.jz.dim(), {});
        EXPECT_LT((o.jsq * o.jz - o.jz * o.jsq).max_abs_diff(zero), 1e-12) << "n = " << n;
    }
}

TEST(CollectiveOps, RaisingLowersWeight) {
    const auto o = collective_ops(4);
    for (const auto &e : o.jplus.entries()) {
        EXPECT_EQ(qcore::hamming_weight(e.row) + 1, qcore::hamming_weight(e.col));
    }
}

TEST(RepCount, Examples) {
    EXPECT_EQ(rep_count(2, HalfInt::from_int(1)), 1);
    EXPECT_EQ(rep_count(2, HalfInt::from_int(0)), 1);
    EXPECT_EQ(rep_count(4, HalfInt::from_int(2)), 1);
    EXPECT_EQ(rep_count(4, HalfInt::from_int(1)), 3);
    EXPECT_EQ(rep_count(4, HalfInt::from_int(0)), 2);
    EXPECT_EQ(rep_count(4, half(1)), 0);
    EXPECT_EQ(rep_count(4, HalfInt::from_int(3)), 0);
}

TEST(RepCount, MatchesKernelDimension) {
    for (int n = 1; n <= 8; ++n) {
        for (int w = 0; 2 * w <= n; ++w) {
            EXPECT_EQ(rep_count(n, half(n - 2 * w)), kernel_dim(n, w)) << "n = " << n << " w = " << w;
        }
    }
}

TEST(RepCount, EvenOddSplitForSixQubits) {
    std::int64_t even = 0;
    std::int64_t odd = 0;
    for (int j = 0; j <= 3; ++j) {
        ((3 - j) % 2 == 0 ? even : odd) += rep_count(6, HalfInt::from_int(j));
    }
    EXPECT_EQ(even, 10);
    EXPECT_EQ(odd, 10);
    EXPECT_EQ(even + odd, binomial(6, 3));
}

TEST(RepCount, DimensionIdentity) {
    for (int n = 1; n <= 20; ++n) {
        std::int64_t sum = 0;
        for (int twice = n % 2; twice <= n; twice += 2) {
            sum += (twice + 1) * rep_count(n, half(twice));
        }
        EXPECT_EQ(sum, std::int64_t{1} << n);
    }
}

TEST(Decompose, SingleQubit) {
    const auto d = decompose(1);
    ASSERT_EQ(d.levels().size(), 1U);
    EXPECT_EQ(d.levels()[0].j, half(1));
    EXPECT_LT(d.vector(0, half(1)).max_abs_diff(StateVector::basis(1, 0)), 1e-15);
    EXPECT_LT(d.vector(0, half(-1)).max_abs_diff(StateVector::basis(1, 1)), 1e-15);
}

TEST(Decompose, TwoQubitTripletAndSinglet) {
    const auto d = decompose(2);
    ASSERT_EQ(d.levels().size(), 2U);
    EXPECT_EQ(d.levels()[0].j, HalfInt::from_int(1));
    EXPECT_EQ(d.levels()[1].j, HalfInt::from_int(0));
    const double h = 1.0 / std::sqrt(2.0);
    StateVector t0(2);
    t0[0] = 0.0;
    t0[0b01] = h;
    t0[0b10] = h;
    EXPECT_LT(d.vector(0, HalfInt::from_int(1)).max_abs_diff(StateVector::basis(2, 0)), 1e-14);
    EXPECT_LT(d.vector(0, HalfInt::from_int(0)).max_abs_diff(t0), 1e-14);
    EXPECT_LT(d.vector(0, HalfInt::from_int(-1)).max_abs_diff(StateVector::basis(2, 3)), 1e-14);
    // The singlet, with its lowest-index amplitude (|01>) positive.
    StateVector s(2);
    s[0] = 0.0;
    s[0b01] = h;
    s[0b10] = -h;
    EXPECT_LT(d.vector(1, HalfInt::from_int(0)).max_abs_diff(s), 1e-14);
}

TEST(Decompose, FourQubitMultiplicities) {
    const auto d = decompose(4);
    EXPECT_EQ(d.multiplicity(HalfInt::from_int(2)), 1);
    EXPECT_EQ(d.multiplicity(HalfInt::from_int(1)), 3);
    EXPECT_EQ(d.multiplicity(HalfInt::from_int(0)), 2);
}

TEST(Decompose, LabelsAreDenseInDescendingJ) {
    const auto d = decompose(6);
    for (std::size_t i = 0; i < d.levels().size(); ++i) {
        EXPECT_EQ(d.levels()[i].ell, static_cast<int>(i));
        if (i > 0) {
            EXPECT_GE(d.levels()[i - 1].j, d.levels()[i].j);
        }
    }
}

TEST(Decompose, LevelInvariants) {
    for (int n = 1; n <= 8; ++n) {
        const auto d = decompose(n);
        const auto o = collective_ops(n);
        for (std::size_t l = 0; l < d.levels().size(); ++l) {
            const auto &lvl = d.levels()[l];
            const double j = lvl.j.value();
            for (int twice_m = lvl.j.twice(); twice_m >= -lvl.j.twice(); twice_m -= 2) {
                const double m = twice_m / 2.0;
                const auto v = d.vector(static_cast<int>(l), half(twice_m));
                EXPECT_LT((o.jsq.apply(v) - Complex(j * (j + 1.0)) * v).norm(), 1e-10);
                EXPECT_LT((o.jz.apply(v) - Complex(m) * v).norm(), 1e-10);
                if (twice_m > -lvl.j.twice()) {
                    const auto lower = d.vector(static_cast<int>(l), half(twice_m - 2));
                    const Complex coef(std::sqrt(j * (j + 1.0) - m * (m - 1.0)));
                    EXPECT_LT((o.jminus.apply(v) - coef * lower).norm(), 1e-10);
                }
            }
        }
    }
}

TEST(Decompose, HighestWeightVectors) {
    for (int n = 2; n <= 9; ++n) {
        const auto d = decompose(n);
        const auto o = collective_ops(n);
        const auto check = o.jsq - o.jz * o.jz - o.jz;
        for (std::size_t l = 0; l < d.levels().size(); ++l) {
            const auto v = d.vector(static_cast<int>(l), d.levels()[l].j);
            EXPECT_LT(o.jplus.apply(v).norm(), 1e-10);
            EXPECT_LT(check.apply(v).norm(), 1e-10);
            // Lowest-index nonzero amplitude is real positive.
            for (std::size_t i = 0; i < v.dim(); ++i) {
                if (std::abs(v[i]) > 1e-12) {
                    EXPECT_GT(v[i].real(), 0.0);
                    EXPECT_NEAR(v[i].imag(), 0.0, 1e-15);
                    break;
                }
            }
        }
    }
}

TEST(Decompose, CompletenessAndMultiplicities) {
    for (int n = 1; n <= 10; ++n) {
        const auto d = decompose(n);
        EXPECT_TRUE(d.basis_op().certify_unitary()) << "n = " << n;
        EXPECT_LT(d.orthonormality_residual(), 1e-10);
        std::int64_t size = 0;
        for (const auto &lvl : d.levels()) {
            size += lvl.j.twice() + 1;
        }
        EXPECT_EQ(size, std::int64_t{1} << n);
        for (int twice = n % 2; twice <= n; twice += 2) {
            EXPECT_EQ(d.multiplicity(half(twice)), rep_count(n, half(twice)));
        }
    }
}

TEST(Decompose, IsDeterministic) {
    const auto a = decompose(8);
    const auto b = decompose(8);
    EXPECT_EQ(decomposition_json(a), decomposition_json(b));
}

TEST(Decompose, CapIsEnforced) {
    EXPECT_THROW(decompose(5, 4), std::invalid_argument);
    EXPECT_NO_THROW(decompose(5, 5));
}

TEST(Decompose, JsonExport) {
    const auto d = decompose(2);
    const auto j = nlohmann::json::parse(decomposition_json(d));
    EXPECT_EQ(j["n"], 2);
    ASSERT_EQ(j["levels"].size(), 2U);
    EXPECT_EQ(j["levels"][0]["two_j"], 2);
    EXPECT_EQ(j["levels"][1]["ell"], 1);
}

TEST(HamiltonianSpec, DerivedQuantities) {
    const auto spec = HamiltonianSpec::exact(Rational(0), Rational(3));
    EXPECT_EQ(spec.s(), 1);
    EXPECT_EQ(*spec.gamma_exact(), Rational(-1, 2));
    EXPECT_NEAR(spec.t_star(), std::numbers::pi / 4.0, 1e-15);
    const auto neg = HamiltonianSpec::exact(Rational(2), Rational(0));
    EXPECT_EQ(neg.s(), -1);
    EXPECT_DOUBLE_EQ(neg.s() * std::abs(neg.beta() - 1.0), neg.beta() - 1.0);
    EXPECT_EQ(*neg.gamma_exact(), Rational(-1));
    EXPECT_THROW(HamiltonianSpec::exact(Rational(0), Rational(1)), std::invalid_argument);
    EXPECT_THROW(HamiltonianSpec::real(0.0, 1.0), std::invalid_argument);
    EXPECT_FALSE(HamiltonianSpec::real(0.5, 2.0).gamma_exact().has_value());
}

TEST(HamiltonianEigenvalue, Examples) {
    const auto zero = HamiltonianSpec::real(0.0, 0.0);
    EXPECT_DOUBLE_EQ(hamiltonian_eigenvalue(zero, HalfInt::from_int(1), HalfInt::from_int(0)), -2.0);
    for (int twice = 0; twice <= 12; ++twice) {
        const auto j = half(twice);
        const double jv = j.value();
        const double a = 0.7;
        const double b = -1.3;
        const auto spec = HamiltonianSpec::real(a, b);
        EXPECT_NEAR(hamiltonian_eigenvalue(spec, j, j), (b - 1.0) * jv * jv + (a - 1.0) * jv, 1e-12);
    }
}

TEST(HamiltonianEigenvalue, AlphaBetaOneCancels) {
    // beta = 1 is not a valid spec, so evaluate the formula directly.
    for (int twice = 0; twice <= 12; ++twice) {
        const double j = twice / 2.0;
        EXPECT_DOUBLE_EQ(-j * (j + 1.0) + j + j * j, 0.0);
    }
}

TEST(HamiltonianEigenvalue, MatchesSparseOperator) {
    const auto spec = HamiltonianSpec::exact(Rational(2, 3), Rational(-5, 2));
    const int n = 6;
    const auto h = heisenberg_hamiltonian(n, spec);
    EXPECT_TRUE(h.certify_hermitian());
    const auto d = shared_decomposition(n);
    for (std::size_t l = 0; l < d->levels().size(); ++l) {
        const auto &lvl = d->levels()[l];
        for (int twice_m = lvl.j.twice(); twice_m >= -lvl.j.twice(); twice_m -= 2) {
            const auto v = d->vector(static_cast<int>(l), half(twice_m));
            const double e = hamiltonian_eigenvalue(spec, lvl.j, half(twice_m));
            EXPECT_LT((h.apply(v) - Complex(e) * v).norm(), 1e-10);
        }
    }
}

TEST(Evolve, ZeroTimeIsIdentity) {
    std::mt19937_64 rng(21);
    const auto s = testutil::random_state(6, rng);
    const auto spec = HamiltonianSpec::exact(Rational(1), Rational(3));
    EXPECT_LT(evolve(s, spec, 0.0).max_abs_diff(s), 1e-14);
    EXPECT_LT(evolve_oracle(s, heisenberg_hamiltonian(6, spec), 0.0).max_abs_diff(s), 1e-14);
}

TEST(Evolve, HighestWeightPhaseAtTStar) {
    for (const auto &[alpha, beta] : {std::pair{0, 3}, std::pair{1, 2}, std::pair{2, 0}, std::pair{0, -1}}) {
        const auto spec = HamiltonianSpec::exact(Rational(alpha), Rational(beta));
        const double s = spec.s();
        const double gamma = spec.gamma();
        for (int n = 1; n <= 8; ++n) {
            const auto d = shared_decomposition(n);
            for (std::size_t l = 0; l < d->levels().size(); ++l) {
                const double j = d->levels()[l].j.value();
                const auto v = d->vector(static_cast<int>(l), d->levels()[l].j);
                const Complex phase = std::exp(Complex(0.0, -s * std::numbers::pi * (j * j + gamma * j) / 2.0));
                EXPECT_LT(evolve(v, spec, spec.t_star()).max_abs_diff(phase * v), 1e-12);
            }
        }
    }
}

TEST(Evolve, MatchesOracleOnRandomStates) {
    std::mt19937_64 rng(22);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int n = 2; n <= 10; n += 2) {
        for (int trial = 0; trial < 5; ++trial) {
            double beta = u(rng);
            if (std::abs(beta - 1.0) < 1e-3) {
                beta += 0.5;
            }
            const auto spec = HamiltonianSpec::real(u(rng), beta);
            const double t = std::abs(u(rng));
            const auto s = testutil::random_state(n, rng);
            const auto a = evolve(s, spec, t);
            const auto b = evolve_oracle(s, heisenberg_hamiltonian(n, spec), t);
            EXPECT_LT(a.max_abs_diff(b), 1e-10) << "n = " << n;
            EXPECT_NEAR(a.norm(), 1.0, 1e-12);
        }
    }
}

TEST(SpinPropagator, SectorMatchesOracle) {
    std::mt19937_64 rng(23);
    const int n = 7;
    const auto spec = HamiltonianSpec::real(0.4, -1.3);
    const SpinPropagator p(shared_decomposition(n), spec, 0.9);
    const BlockOraclePropagator oracle(heisenberg_hamiltonian(n, spec), 0.9);
    const auto &sectors = shared_decomposition(n)->sectors();
    for (int w = 0; w <= n; ++w) {
        StateVector s(n);
        std::normal_distribution<double> g;
        for (auto idx : sectors.indices(w)) {
            s[idx] = Complex(g(rng), g(rng));
        }
        s.normalize();
        const auto expected = oracle.apply(s);
        Eigen::MatrixXcd local(static_cast<Eigen::Index>(sectors.size(w)), 1);
        for (std::size_t i = 0; i < sectors.size(w); ++i) {
            local(static_cast<Eigen::Index>(i), 0) = s[sectors.indices(w)[i]];
        }
        p.apply_sector(w, local);
        for (std::size_t i = 0; i < sectors.size(w); ++i) {
            EXPECT_LT(std::abs(local(static_cast<Eigen::Index>(i), 0) - expected[sectors.indices(w)[i]]), 1e-12);
        }
    }
    Eigen::MatrixXcd wrong(3, 1);
    EXPECT_THROW(p.apply_sector(1, wrong), DimensionError);
}

TEST(Evolve, CommutesWithWeightProjection) {
    std::mt19937_64 rng(23);
    const int n = 7;
    const auto spec = HamiltonianSpec::exact(Rational(3, 2), Rational(-1, 3));
    const auto s = testutil::random_state(n, rng);
    for (int w = 0; w <= n; ++w) {
        auto project = [&](StateVector v) {
            for (std::size_t i = 0; i < v.dim(); ++i) {
                if (qcore::hamming_weight(i) != w) {
                    v[i] = 0.0;
                }
            }
            return v;
        };
        EXPECT_LT(project(evolve(s, spec, 0.9)).max_abs_diff(evolve(project(s), spec, 0.9)), 1e-12);
    }
}

TEST(EvolveOracle, IntegerDiagonalFullPeriod) {
    std::vector<Complex> diag;
    for (int i = 0; i < 16; ++i) {
        diag.emplace_back(static_cast<double>((i * 7) % 5 - 2));
    }
    const auto h = LinearOp::diagonal(diag);
    std::mt19937_64 rng(24);
    const auto s = testutil::random_state(4, rng);
    EXPECT_LT(evolve_oracle(s, h, 2.0 * std::numbers::pi).max_abs_diff(s), 1e-12);
}

TEST(EvolveOracle, RejectsWeightMixing) {
    const auto x0 = qcore::embed(qcore::pauli_x(), std::vector<int>{0}, 2);
    EXPECT_THROW(evolve_oracle(StateVector(2), x0, 1.0), NotBlockPreserving);
}

TEST(EvolveOracle, RejectsNonHermitian) {
    const auto h = LinearOp::diagonal(std::vector<Complex>{1.0, Complex(0.0, 1.0)});
    EXPECT_THROW(evolve_oracle(StateVector(1), h, 1.0), std::invalid_argument);
}

TEST(DiagonalPropagator, MatchesOracle) {
    const auto o = collective_ops(5);
    const auto h = o.jz * o.jz;
    std::mt19937_64 rng(25);
    const auto s = testutil::random_state(5, rng);
    const DiagonalPropagator p(h, 1.3);
    EXPECT_LT(p.apply(s).max_abs_diff(evolve_oracle(s, h, 1.3)), 1e-12);
}
