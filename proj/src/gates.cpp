#include "spinfan/gates.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace spinfan::gates {

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<int> range_wires(int first, int count) {
    std::vector<int> w(static_cast<std::size_t>(count));
    std::iota(w.begin(), w.end(), first);
    return w;
}

qcore::BatchMap propagator_map(std::shared_ptr<const spin::Propagator> p) {
    return [p = std::move(p)](Eigen::MatrixXcd &m) { p->apply(m); };
}

bool is_multiple_of_four(double x) { return std::abs(x - 4.0 * std::round(x / 4.0)) < 1e-9; }

int sign_of(double x) { return x > 0 ? 1 : (x < 0 ? -1 : 0); }

} // namespace

LinearOp v_gate(int r, const HamiltonianSpec &spec) {
    if (r < 1) {
        throw std::invalid_argument("v_gate needs r >= 1");
    }
    const double angle = -spec.s() * kPi * (2.0 * r + spec.gamma() - 1.0) / 2.0;
    const std::vector<Complex> diag{1.0, std::polar(1.0, angle)};
    return LinearOp::diagonal(diag);
}

ScheduleCheck check_inverse_schedule(const HamiltonianSpec &spec, const InverseSchedule &sched) {
    if (sched.beta_p == 1.0) {
        return {false, "beta' must differ from 1"};
    }
    const int odd = 2 * sched.ell + 1;
    const double gamma_p = (sched.alpha_p - 1.0) / (sched.beta_p - 1.0);
    const double lhs = odd * (gamma_p + 1.0) + spec.s() * (spec.gamma() + 1.0);
    if (!is_multiple_of_four(lhs)) {
        return {false, "(i) fails: (2l+1)(gamma'+1) + s(gamma+1) = " + std::to_string(lhs) +
                           " is not a multiple of 4"};
    }
    if (sign_of(odd) != sign_of(sched.beta_p - 1.0)) {
        return {false, "(ii) fails: 2l+1 and beta'-1 have different signs"};
    }
    const double expected = kPi * odd / (2.0 * (sched.beta_p - 1.0));
    if (std::abs(sched.t_p - expected) > 1e-12 * std::max(1.0, std::abs(expected))) {
        return {false, "(iii) fails: t' must be " + std::to_string(expected)};
    }
    return {true, ""};
}

InverseSchedule make_inverse_schedule(const HamiltonianSpec &spec, int ell) {
    const int odd = 2 * ell + 1;
    const double beta_p = 1.0 + sign_of(odd);
    const double gamma_p = (4.0 - spec.s() * (spec.gamma() + 1.0)) / odd - 1.0;
    InverseSchedule out;
    out.ell = ell;
    out.beta_p = beta_p;
    out.alpha_p = 1.0 + gamma_p * (beta_p - 1.0);
    out.t_p = kPi * odd / (2.0 * (beta_p - 1.0));
    return out;
}

PeriodicInverse periodic_inverse(double scale, const Rational &ratio, double forward) {
    if (!(scale > 0.0)) {
        throw std::invalid_argument("periodic_inverse needs a positive scale");
    }
    const auto p = ratio.numerator();
    const auto q = ratio.denominator();
    // Smallest lambda > 0 with lambda * w (w + p/q) integral for all w.
    const double lambda = ((p + q) % 2 == 0) ? q / 2.0 : static_cast<double>(q);
    PeriodicInverse out;
    out.u = 2.0 * kPi * lambda / scale;
    out.k = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(forward / out.u - 1e-12)));
    out.time = std::max(0.0, static_cast<double>(out.k) * out.u - forward);
    return out;
}

std::variant<PeriodicInverse, InverseSchedule> positive_inverse_heisenberg(const HamiltonianSpec &spec) {
    if (auto g = spec.gamma_exact()) {
        return periodic_inverse(std::abs(spec.beta() - 1.0), *g, spec.t_star());
    }
    return make_inverse_schedule(spec, 0);
}

double restoration_residual(int n, const HamiltonianSpec &forward, double t, const HamiltonianSpec &inverse,
                            double t_inverse) {
    auto dec = spin::shared_decomposition(n);
    const spin::SpinPropagator fwd(dec, forward, t);
    const spin::SpinPropagator inv(dec, inverse, t_inverse);
    double worst = 0.0;
    // each |j, j, ell> lives in the single sector w = n/2 - j
    for (int w = 0; 2 * w <= n; ++w) {
        const auto &cols = dec->block_columns(w);
        std::vector<Eigen::Index> picked;
        for (std::size_t c = 0; c < cols.size(); ++c) {
            if (cols[c].m == dec->levels()[static_cast<std::size_t>(cols[c].level)].j) {
                picked.push_back(static_cast<Eigen::Index>(c));
            }
        }
        if (picked.empty()) {
            continue;
        }
        Eigen::MatrixXcd tops(dec->block(w).rows(), static_cast<Eigen::Index>(picked.size()));
        for (std::size_t i = 0; i < picked.size(); ++i) {
            tops.col(static_cast<Eigen::Index>(i)) = dec->block(w).col(picked[i]).cast<Complex>();
        }
        Eigen::MatrixXcd out = tops;
        fwd.apply_sector(w, out);
        inv.apply_sector(w, out);
        worst = std::max(worst, (out - tops).cwiseAbs().maxCoeff());
    }
    return worst;
}

Circuit parity_circuit(int r, const HamiltonianSpec &spec, const BlockEncoding &enc, const ParityOptions &options) {
    const int c = enc.logical_width;
    const int d = enc.physical_width;
    if (r < 1) {
        throw std::invalid_argument("parity needs r >= 1");
    }
    if (c < 1 || d < c || enc.unitary.dim() != (std::size_t{1} << d)) {
        throw std::invalid_argument("malformed block encoding");
    }
    if (r % c != 0) {
        throw std::invalid_argument("r = " + std::to_string(r) + " is not a multiple of the block width " +
                                    std::to_string(c));
    }
    if (d % 2 != 0) {
        throw std::invalid_argument("block encodings must use an even number of wires");
    }
    const int blocks = r / c;
    const int n = blocks * d;
    const int target = n;
    const int last = (blocks - 1) * d + c - 1;

    std::vector<int> io;
    for (int b = 0; b < blocks; ++b) {
        for (int i = 0; i < c; ++i) {
            io.push_back(b * d + i);
        }
    }
    io.push_back(target);
    Circuit circ(n + 1, io);

    auto dec = spin::shared_decomposition(n);
    const double t_forward = spec.t_star() * options.forward_time_scale;
    auto forward = std::make_shared<spin::SpinPropagator>(dec, spec, t_forward);

    std::shared_ptr<const spin::Propagator> inverse;
    if (options.uncompute == Uncompute::kExactReverse) {
        inverse = std::make_shared<spin::SpinPropagator>(dec, spec, -t_forward);
    } else if (options.schedule) {
        inverse = std::make_shared<spin::SpinPropagator>(dec, options.schedule->hamiltonian(), options.schedule->t_p);
    } else if (auto g = spec.gamma_exact()) {
        const auto per = periodic_inverse(std::abs(spec.beta() - 1.0), *g, t_forward);
        inverse = std::make_shared<spin::SpinPropagator>(dec, spec, per.time);
    } else {
        const auto sched = make_inverse_schedule(spec, 0);
        inverse = std::make_shared<spin::SpinPropagator>(dec, sched.hamiltonian(), sched.t_p);
    }

    const LinearOp h = qcore::hadamard();
    const LinearOp v = v_gate(n / 2, spec);
    const LinearOp decode = enc.unitary.adjoint();
    const auto all = range_wires(0, n);
    const auto last_block = range_wires((blocks - 1) * d, d);

    circ.add_gate("hadamard-in", h, {last});
    for (int b = 0; b < blocks; ++b) {
        circ.add_gate("encode", enc.unitary, range_wires(b * d, d));
    }
    circ.add_map("evolve", all, propagator_map(forward));
    circ.add_gate("decode-last", decode, last_block);
    circ.add_gate("v", v, {last});
    circ.add_gate("hadamard", h, {last});
    circ.add_gate("copy", qcore::cnot(), {last, target});
    circ.add_gate("hadamard", h, {last});
    circ.add_gate("v-dagger", v.adjoint(), {last});
    circ.add_gate("encode-last", enc.unitary, last_block);
    circ.add_map("inverse", all, propagator_map(inverse));
    for (int b = 0; b < blocks; ++b) {
        circ.add_gate("decode", decode, range_wires(b * d, d));
    }
    circ.add_gate("hadamard-out", h, {last});
    return circ;
}

Circuit parity_circuit(int r, const HamiltonianSpec &spec, const ParityOptions &options) {
    return parity_circuit(r, spec, encode::pair_block(), options);
}

Circuit fanout_circuit(int r, const HamiltonianSpec &spec, const BlockEncoding &enc, const ParityOptions &options) {
    const Circuit inner = parity_circuit(r, spec, enc, options);
    Circuit circ(inner.num_wires(), inner.io_wires());
    const LinearOp h = qcore::hadamard();
    for (int w : inner.io_wires()) {
        circ.add_gate("hadamard-io", h, {w});
    }
    circ.append(inner, range_wires(0, inner.num_wires()));
    for (int w : inner.io_wires()) {
        circ.add_gate("hadamard-io", h, {w});
    }
    return circ;
}

Circuit fanout_circuit(int r, const HamiltonianSpec &spec, const ParityOptions &options) {
    return fanout_circuit(r, spec, encode::pair_block(), options);
}

LinearOp induced_unitary(const Circuit &circuit) {
    auto g = qcore::induce(circuit);
    if (g.ancilla_leakage > tol::kGate) {
        throw GateLeakage("ancilla leakage " + std::to_string(g.ancilla_leakage) + " exceeds tolerance");
    }
    return std::move(g.unitary);
}

ParityPhaseCheck parity_phase_check(int r, const HamiltonianSpec &spec, const BlockEncoding &enc) {
    const Circuit circ = parity_circuit(r, spec, enc);
    const std::size_t stop = circ.find_step("decode-last") + 1;
    const int c = enc.logical_width;
    const int d = enc.physical_width;
    const int blocks = r / c;
    const int n = blocks * d;
    const int last = (blocks - 1) * d + c - 1;
    const Complex twist = std::polar(1.0, spec.s() * kPi * (spec.gamma() - 1.0) / 2.0);

    ParityPhaseCheck out;
    for (std::uint64_t x = 0; x < (std::uint64_t{1} << r); ++x) {
        StateVector state = circ.input_state(x << 1);
        circ.run(state, 0, stop);
        Eigen::MatrixXcd m;
        const std::vector<int> wire{last};
        qcore::apply_on_subsystem(state, wire, [&m](Eigen::MatrixXcd &block) { m = block; });
        Eigen::Index col = 0;
        m.colwise().norm().maxCoeff(&col);
        Eigen::Vector2cd v = m.col(col).normalized();
        const Complex lead = std::abs(v(0)) > 1e-12 ? v(0) : v(1);
        v *= std::conj(lead) / std::abs(lead);
        const double sign = ((n / 2 + qcore::hamming_weight(x)) % 2 == 0) ? 1.0 : -1.0;
        const Eigen::Vector2cd expected =
            Eigen::Vector2cd(Complex{1.0}, sign * twist) / std::numbers::sqrt2;
        out.max_deviation = std::max(out.max_deviation, (v - expected).cwiseAbs().maxCoeff());
        const Eigen::MatrixXcd rest = m - v * (v.adjoint() * m);
        out.max_product_error = std::max(out.max_product_error, rest.cwiseAbs().maxCoeff());
    }
    return out;
}

// ---- quadratic Hamiltonians ----

std::optional<Rational> QuadraticHamiltonian::b_ratio_exact() const {
    if (!a_exact || !b_exact) {
        return std::nullopt;
    }
    return *b_exact / *a_exact;
}

StateVector QuadraticHamiltonian::encode(std::uint64_t y) const {
    StateVector v = StateVector::basis(n, y << (n - m));
    for (const auto &g : encoder) {
        v = qcore::apply_op(v, g.op, g.wires);
    }
    return v;
}

double QuadraticHamiltonian::certify() const {
    double worst = 0.0;
    for (std::uint64_t y = 0; y < (std::uint64_t{1} << m); ++y) {
        const StateVector v = encode(y);
        const StateVector hv = hamiltonian.apply(v);
        const double lambda = eigenvalue(qcore::hamming_weight(y));
        worst = std::max(worst, hv.max_abs_diff(Complex{lambda} * v));
    }
    if (worst > tol::kGate) {
        throw CertificationError(name + ": encoded states are not eigenstates (residual " + std::to_string(worst) +
                                 ")");
    }
    return worst;
}

QuadraticHamiltonian quadratic_from_heisenberg(int m, const HamiltonianSpec &spec) {
    if (m < 1) {
        throw std::invalid_argument("quadratic_from_heisenberg needs m >= 1");
    }
    QuadraticHamiltonian g;
    g.name = "heisenberg(" + spec.describe() + ")";
    g.m = m;
    g.n = 2 * m;
    const double bm1 = spec.beta() - 1.0;
    const double am1 = spec.alpha() - 1.0;
    g.a = bm1;
    g.b = -2.0 * m * bm1 - am1;
    g.c = double(m) * m * bm1 + m * am1;
    if (spec.is_exact()) {
        const Rational eb = *spec.beta_exact() - 1;
        const Rational ea = *spec.alpha_exact() - 1;
        g.a_exact = eb;
        g.b_exact = Rational(-2 * m) * eb - ea;
        g.c_exact = Rational(std::int64_t{m} * m) * eb + Rational(m) * ea;
        g.a = to_double(*g.a_exact);
        g.b = to_double(*g.b_exact);
        g.c = to_double(*g.c_exact);
    }
    g.hamiltonian = spin::heisenberg_hamiltonian(g.n, spec);
    const LinearOp e = encode::pair_encoder();
    for (int i = 0; i < m; ++i) {
        g.encoder.push_back({e, {i, m + i}});
    }
    auto dec = spin::shared_decomposition(g.n);
    g.propagator = [dec, spec](double t) { return std::make_shared<const spin::SpinPropagator>(dec, spec, t); };
    g.certify();
    return g;
}

QuadraticHamiltonian quadratic_jz2(int m) {
    if (m < 1) {
        throw std::invalid_argument("quadratic_jz2 needs m >= 1");
    }
    QuadraticHamiltonian g;
    g.name = "jz2";
    g.m = m;
    g.n = m;
    g.a_exact = Rational(1);
    g.b_exact = Rational(-m);
    g.c_exact = Rational(std::int64_t{m} * m, 4);
    g.a = 1.0;
    g.b = -m;
    g.c = to_double(*g.c_exact);
    const auto ops = spin::collective_ops(m);
    g.hamiltonian = ops.jz * ops.jz;
    auto ham = g.hamiltonian;
    g.propagator = [ham](double t) { return std::make_shared<const spin::DiagonalPropagator>(ham, t); };
    g.certify();
    return g;
}

PhiSpec PhiSpec::uniform(int q) {
    if (q < 2) {
        throw std::invalid_argument("phi needs q >= 2");
    }
    return {q, std::vector<Complex>(static_cast<std::size_t>(q), Complex{1.0 / std::sqrt(double(q))})};
}

void PhiSpec::validate() const {
    if (q < 2 || coeffs.size() != static_cast<std::size_t>(q)) {
        throw std::invalid_argument("phi needs q >= 2 and exactly q coefficients");
    }
    const double target = 1.0 / std::sqrt(double(q));
    for (const auto &cj : coeffs) {
        if (std::abs(std::abs(cj) - target) > tol::kState) {
            throw std::invalid_argument("phi coefficients must have modulus 1/sqrt(q)");
        }
    }
}

StateVector PhiSpec::state() const {
    validate();
    StateVector v(q - 1);
    v[0] = 0.0;
    for (int j = 0; j < q; ++j) {
        v[staircase_index(q, j)] = coeffs[static_cast<std::size_t>(j)];
    }
    return v;
}

ModSchedule mod_schedule_unchecked(int q, std::int64_t k, double a) {
    if (q < 2 || k < 1) {
        throw std::invalid_argument("mod schedule needs q >= 2 and k >= 1");
    }
    if (a == 0.0 || !std::isfinite(a)) {
        throw std::invalid_argument("mod schedule needs a finite nonzero a");
    }
    return {q, k, kPi * static_cast<double>(k) / (q * std::abs(a)), a < 0.0};
}

ModSchedule mod_schedule(int q, std::int64_t k, double a) {
    if (k >= 1 && q >= 2 && std::gcd(k, std::int64_t{q}) != 1) {
        throw std::invalid_argument("k = " + std::to_string(k) + " is not prime to q = " + std::to_string(q));
    }
    return mod_schedule_unchecked(q, k, a);
}

std::uint64_t staircase_index(int q, int j) {
    if (j < 0 || j >= q) {
        throw std::out_of_range("staircase index out of range");
    }
    return ((std::uint64_t{1} << j) - 1) << (q - 1 - j);
}

StateVector psi_w(const ModSchedule &sched, double b, double c, int w, const PhiSpec &phi) {
    phi.validate();
    if (phi.q != sched.q) {
        throw std::invalid_argument("phi and schedule disagree on q");
    }
    if (w < 0) {
        throw std::invalid_argument("psi_w needs w >= 0");
    }
    const int q = sched.q;
    const double sign = sched.conjugate_phases ? 1.0 : -1.0;
    StateVector v(q - 1);
    v[0] = 0.0;
    for (int j = 0; j < q; ++j) {
        const std::int64_t u = w + j;
        // k u^2 reduced mod 2q keeps the angle small
        const std::int64_t sq = (sched.k % (2 * q)) * ((u * u) % (2 * q)) % (2 * q);
        const double angle = sign * kPi * (static_cast<double>(sq) + static_cast<double>(sched.k) * (b * u + c)) / q;
        v[staircase_index(q, j)] = phi.coeffs[static_cast<std::size_t>(j)] * std::polar(1.0, angle);
    }
    return v;
}

LinearOp r_operator(const ModSchedule &sched, double b, double c, const PhiSpec &phi, bool strict) {
    const int q = sched.q;
    const auto dim = static_cast<Eigen::Index>(std::size_t{1} << (q - 1));
    Eigen::MatrixXcd alpha(dim, q);
    for (int w = 0; w < q; ++w) {
        const StateVector p = psi_w(sched, b, c, w, phi);
        Eigen::VectorXcd col = Eigen::Map<const Eigen::VectorXcd>(p.amplitudes().data(), dim);
        for (Eigen::Index i = 0; i < dim; ++i) {
            if (std::abs(col(i)) > 1e-12) {
                col *= std::conj(col(i)) / std::abs(col(i));
                break;
            }
        }
        alpha.col(w) = col;
    }
    Eigen::MatrixXcd stair = Eigen::MatrixXcd::Zero(dim, q);
    for (int j = 0; j < q; ++j) {
        stair(static_cast<Eigen::Index>(staircase_index(q, j)), j) = 1.0;
    }

    const double gram = (alpha.adjoint() * alpha - Eigen::MatrixXcd::Identity(q, q)).cwiseAbs().maxCoeff();
    if (gram > 1e-9) {
        if (strict) {
            throw CertificationError("the alpha states are not orthonormal (Gram deviation " + std::to_string(gram) +
                                     "); check that k is prime to q");
        }
        // Orthonormalize inside the staircase subspace, filling any gaps
        // with staircase vectors.
        Eigen::MatrixXcd basis(dim, q);
        int filled = 0;
        auto try_add = [&](Eigen::VectorXcd v) {
            for (int pass = 0; pass < 2; ++pass) {
                for (int i = 0; i < filled; ++i) {
                    v -= basis.col(i) * basis.col(i).dot(v);
                }
            }
            const double nv = v.norm();
            if (nv > 1e-9 && filled < q) {
                basis.col(filled++) = v / nv;
            }
        };
        for (int w = 0; w < q; ++w) {
            try_add(alpha.col(w));
        }
        for (int j = 0; j < q && filled < q; ++j) {
            try_add(stair.col(j));
        }
        alpha = basis;
    }
    Eigen::MatrixXcd r = stair * alpha.adjoint() + Eigen::MatrixXcd::Identity(dim, dim) - stair * stair.adjoint();
    return LinearOp::from_dense(r, 1e-15);
}

PeriodicInverse positive_inverse_quadratic(const QuadraticHamiltonian &g, const ModSchedule &sched) {
    const auto ratio = g.b_ratio_exact();
    if (!ratio) {
        throw NoPositiveInverse("b/a is not an exact rational; no positive-time inverse is known");
    }
    return periodic_inverse(std::abs(g.a), *ratio, sched.t);
}

Circuit generalized_modq_circuit(int r, int q, const QuadraticHamiltonian &g, const ModSchedule &sched,
                                 const PhiSpec &phi, const ModqOptions &options) {
    if (r < 1 || q < 2) {
        throw std::invalid_argument("Mod_q needs r >= 1 and q >= 2");
    }
    if (g.m != r + q - 1) {
        throw std::invalid_argument("quadratic Hamiltonian has logical width " + std::to_string(g.m) + ", need r+q-1 = " +
                                    std::to_string(r + q - 1));
    }
    if (sched.q != q || phi.q != q) {
        throw std::invalid_argument("schedule and phi must use the same q");
    }
    if (sched.conjugate_phases != (g.a < 0.0)) {
        throw std::invalid_argument("schedule phase convention does not match the sign of a");
    }
    phi.validate();

    const int n = g.n;
    std::vector<int> io = range_wires(0, r);
    for (int j = 0; j < q - 1; ++j) {
        io.push_back(n + j);
    }
    Circuit circ(n + q - 1, io);
    const auto phi_wires = range_wires(r, q - 1);

    const StateVector phi_state = phi.state();
    const auto pdim = phi_state.dim();
    const Eigen::MatrixXcd phi_col =
        Eigen::Map<const Eigen::VectorXcd>(phi_state.amplitudes().data(), static_cast<Eigen::Index>(pdim));
    const std::vector<std::uint64_t> pos{0};
    const LinearOp prep = LinearOp::from_dense(qcore::complete_unitary(phi_col, pos, pdim), 1e-15);

    const double b = g.b / g.a;
    const double c = g.c / g.a;
    const LinearOp rop = r_operator(sched, b, c, phi, options.strict_r);

    const double t_forward = sched.t * options.forward_time_scale;
    auto forward = g.propagator(t_forward);
    std::shared_ptr<const spin::Propagator> inverse;
    if (options.uncompute == Uncompute::kExactReverse) {
        inverse = g.propagator(-t_forward);
    } else {
        const auto ratio = g.b_ratio_exact();
        if (!ratio) {
            throw NoPositiveInverse("b/a is not an exact rational; no positive-time inverse is known");
        }
        inverse = g.propagator(periodic_inverse(std::abs(g.a), *ratio, t_forward).time);
    }

    const auto reg = range_wires(0, n);
    auto add_encode = [&](const std::string &label) {
        for (const auto &e : g.encoder) {
            circ.add_gate(label, e.op, e.wires);
        }
    };
    auto add_decode = [&](const std::string &label) {
        for (auto it = g.encoder.rbegin(); it != g.encoder.rend(); ++it) {
            circ.add_gate(label, it->op.adjoint(), it->wires);
        }
    };

    circ.add_gate("prepare", prep, phi_wires);
    add_encode("encode");
    circ.add_map("evolve", reg, propagator_map(forward));
    add_decode("decode");
    circ.add_gate("r", rop, phi_wires);
    for (int j = 0; j < q - 1; ++j) {
        circ.add_gate("copy", qcore::cnot(), {r + j, n + j});
    }
    circ.add_gate("r-dagger", rop.adjoint(), phi_wires);
    add_encode("encode-2");
    circ.add_map("inverse", reg, propagator_map(inverse));
    add_decode("decode-2");
    circ.add_gate("unprepare", prep.adjoint(), phi_wires);
    return circ;
}

Circuit standard_modq_circuit(int r, int q, const QuadraticHamiltonian &g, const ModSchedule &sched,
                              const PhiSpec &phi, const ModqOptions &options) {
    const Circuit gen = generalized_modq_circuit(r, q, g, sched, phi, options);
    std::vector<int> map(static_cast<std::size_t>(gen.num_wires()));
    for (int i = 0; i < gen.num_wires(); ++i) {
        map[static_cast<std::size_t>(i)] = i < r ? i : i + 1;
    }
    std::vector<int> io = range_wires(0, r + 1);
    Circuit circ(gen.num_wires() + 1, io);
    const int t1 = g.n + 1;
    circ.append(gen, map);
    circ.add_gate("copy-target", qcore::cnot(), {t1, r});
    circ.append(gen, map);
    return circ;
}

} // namespace spinfan::gates
