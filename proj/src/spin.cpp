#include "spinfan/spin.hpp"

#include <bit>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>

#include "json.hpp"

namespace spinfan::spin {

namespace {

void check_width(int n, int cap) {
    if (n < 1 || n > cap) {
        throw DimensionError("qubit count " + std::to_string(n) + " outside [1, " + std::to_string(cap) +
                             "]");
    }
}

// j(j+1) - m(m-1), from doubled values.
double lowering_coefficient_sq(HalfInt j, HalfInt m) {
    const double tj = j.twice();
    const double tm = m.twice();
    return (tj * (tj + 2.0) - tm * (tm - 2.0)) / 4.0;
}

// Gathers the rows of `states` belonging to one weight sector.
Eigen::MatrixXcd gather_rows(const Eigen::MatrixXcd &states, const std::vector<std::uint64_t> &rows) {
    Eigen::MatrixXcd out(static_cast<Eigen::Index>(rows.size()), states.cols());
    for (std::size_t p = 0; p < rows.size(); ++p) {
        out.row(static_cast<Eigen::Index>(p)) = states.row(static_cast<Eigen::Index>(rows[p]));
    }
    return out;
}

void scatter_rows(Eigen::MatrixXcd &states, const std::vector<std::uint64_t> &rows, const Eigen::MatrixXcd &block) {
    for (std::size_t p = 0; p < rows.size(); ++p) {
        states.row(static_cast<Eigen::Index>(rows[p])) = block.row(static_cast<Eigen::Index>(p));
    }
}

void check_rows(const Eigen::MatrixXcd &states, int n) {
    if (states.rows() != (Eigen::Index{1} << n)) {
        throw DimensionError("propagator on " + std::to_string(n) + " qubits got " +
                             std::to_string(states.rows()) + "-dimensional states");
    }
}

} // namespace

int HalfInt::as_int() const {
    if (!is_integer()) {
        throw std::domain_error(to_string() + " is not an integer");
    }
    return twice_ / 2;
}

std::string HalfInt::to_string() const {
    if (is_integer()) {
        return std::to_string(twice_ / 2);
    }
    return std::to_string(twice_) + "/2";
}

// ---------------------------------------------------------------------------

CollectiveOps collective_ops(int n, int cap) {
    check_width(n, cap);
    const std::uint64_t dim = std::uint64_t{1} << n;
    std::vector<qcore::OpEntry> x, y, z, plus, minus;
    for (std::uint64_t s = 0; s < dim; ++s) {
        z.push_back({s, s, (n - 2.0 * std::popcount(s)) / 2.0});
        for (int q = 0; q < n; ++q) {
            const std::uint64_t mask = qcore::qubit_mask(q, n);
            const std::uint64_t t = s ^ mask;
            const bool one = (s & mask) != 0;
            x.push_back({t, s, 0.5});
            y.push_back({t, s, one ? Complex{0, -0.5} : Complex{0, 0.5}});
            if (one) {
                plus.push_back({t, s, 1.0});
            } else {
                minus.push_back({t, s, 1.0});
            }
        }
    }
    CollectiveOps ops;
    ops.jx = LinearOp(dim, std::move(x));
    ops.jy = LinearOp(dim, std::move(y));
    ops.jz = LinearOp(dim, std::move(z));
    ops.jplus = LinearOp(dim, std::move(plus));
    ops.jminus = LinearOp(dim, std::move(minus));
    ops.jsq = ops.jx * ops.jx + ops.jy * ops.jy + ops.jz * ops.jz;
    return ops;
}

std::int64_t binomial(int n, int k) {
    if (k < 0 || n < 0 || k > n) {
        return 0;
    }
    k = std::min(k, n - k);
    std::int64_t r = 1;
    for (int i = 1; i <= k; ++i) {
        r = r * (n - k + i) / i;
    }
    return r;
}

std::int64_t rep_count(int n, HalfInt j) {
    const int diff_twice = n - j.twice(); // 2 (n/2 - j)
    if (n < 1 || j.twice() < 0 || diff_twice < 0 || diff_twice % 2 != 0) {
        return 0;
    }
    const int w = diff_twice / 2;
    return binomial(n, w) - binomial(n, w - 1);
}

WeightSectors::WeightSectors(int n) : n_(n) {
    const std::uint64_t dim = std::uint64_t{1} << n;
    indices_.resize(static_cast<std::size_t>(n) + 1);
    position_.resize(dim);
    for (std::uint64_t s = 0; s < dim; ++s) {
        auto &bucket = indices_[static_cast<std::size_t>(std::popcount(s))];
        position_[s] = bucket.size();
        bucket.push_back(s);
    }
}

// ---------------------------------------------------------------------------

const Eigen::VectorXd &SpinLevel::sector_vector(HalfInt m) const {
    const int k2 = j.twice() - m.twice();
    if (k2 < 0 || k2 % 2 != 0 || k2 / 2 >= size()) {
        throw std::out_of_range("m = " + m.to_string() + " not in spin-" + j.to_string() + " ladder");
    }
    return ladder[static_cast<std::size_t>(k2 / 2)];
}

int SpinLevel::weight_of(HalfInt m) const { return top_weight + (j.twice() - m.twice()) / 2; }

SpinDecomposition::SpinDecomposition(int n, std::vector<SpinLevel> levels,
                                     std::shared_ptr<const WeightSectors> sectors)
    : n_(n), levels_(std::move(levels)), sectors_(std::move(sectors)) {
    blocks_.resize(static_cast<std::size_t>(n) + 1);
    columns_.resize(static_cast<std::size_t>(n) + 1);
    for (int w = 0; w <= n; ++w) {
        const HalfInt m = HalfInt::from_twice(n - 2 * w);
        auto &cols = columns_[static_cast<std::size_t>(w)];
        for (std::size_t l = 0; l < levels_.size(); ++l) {
            const auto &lev = levels_[l];
            if (lev.j.twice() >= std::abs(m.twice())) {
                cols.push_back({static_cast<int>(l), m});
            }
        }
        const auto rows = static_cast<Eigen::Index>(sectors_->size(w));
        Eigen::MatrixXd b(rows, static_cast<Eigen::Index>(cols.size()));
        for (std::size_t c = 0; c < cols.size(); ++c) {
            b.col(static_cast<Eigen::Index>(c)) = levels_[static_cast<std::size_t>(cols[c].level)].sector_vector(m);
        }
        blocks_[static_cast<std::size_t>(w)] = std::move(b);
    }
}

StateVector SpinDecomposition::vector(int level, HalfInt m) const {
    const auto &lev = levels_.at(static_cast<std::size_t>(level));
    const auto &v = lev.sector_vector(m);
    const auto &idx = sectors_->indices(lev.weight_of(m));
    std::vector<Complex> amps(std::size_t{1} << n_);
    for (std::size_t p = 0; p < idx.size(); ++p) {
        amps[idx[p]] = v(static_cast<Eigen::Index>(p));
    }
    return StateVector(n_, std::move(amps));
}

int SpinDecomposition::multiplicity(HalfInt j) const {
    int count = 0;
    for (const auto &l : levels_) {
        count += (l.j == j) ? 1 : 0;
    }
    return count;
}

LinearOp SpinDecomposition::basis_op() const {
    std::vector<qcore::OpEntry> e;
    std::uint64_t col = 0;
    for (const auto &lev : levels_) {
        for (int k = 0; k < lev.size(); ++k) {
            const auto &idx = sectors_->indices(lev.top_weight + k);
            const auto &v = lev.ladder[static_cast<std::size_t>(k)];
            for (std::size_t p = 0; p < idx.size(); ++p) {
                if (v(static_cast<Eigen::Index>(p)) != 0.0) {
                    e.push_back({idx[p], col, v(static_cast<Eigen::Index>(p))});
                }
            }
            ++col;
        }
    }
    return LinearOp(std::size_t{1} << n_, std::move(e));
}

double SpinDecomposition::orthonormality_residual() const {
    double worst = 0.0;
    for (const auto &b : blocks_) {
        if (b.rows() != b.cols()) {
            return std::numeric_limits<double>::infinity();
        }
        const Eigen::MatrixXd g = b.transpose() * b - Eigen::MatrixXd::Identity(b.cols(), b.cols());
        worst = std::max(worst, g.cwiseAbs().maxCoeff());
    }
    return worst;
}

SpinDecomposition decompose(int n, int cap) {
    check_width(n, cap);
    auto sectors = std::make_shared<const WeightSectors>(n);
    std::vector<SpinLevel> levels;

    for (int w = 0; 2 * w <= n; ++w) {
        const HalfInt j = HalfInt::from_twice(n - 2 * w);
        const auto &idx = sectors->indices(w);
        const auto rows = static_cast<Eigen::Index>(idx.size());
        const auto expected = rep_count(n, j);

        Eigen::MatrixXd kernel;
        if (w == 0) {
            kernel = Eigen::MatrixXd::Identity(rows, rows);
        } else {
            // Transpose of J_+ restricted to sector w -> sector w - 1.
            const auto cols = static_cast<Eigen::Index>(sectors->size(w - 1));
            Eigen::MatrixXd jplus_t = Eigen::MatrixXd::Zero(rows, cols);
            for (std::size_t p = 0; p < idx.size(); ++p) {
                const std::uint64_t s = idx[p];
                for (int q = 0; q < n; ++q) {
                    const std::uint64_t mask = qcore::qubit_mask(q, n);
                    if (s & mask) {
                        jplus_t(static_cast<Eigen::Index>(p),
                                static_cast<Eigen::Index>(sectors->position(s ^ mask))) = 1.0;
                    }
                }
            }
            Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(jplus_t);
            const auto rank = qr.rank();
            if (rows - rank != expected) {
                throw RankMismatch("J+ kernel on weight " + std::to_string(w) + " of " + std::to_string(n) +
                                   " qubits has dimension " + std::to_string(rows - rank) + ", expected " +
                                   std::to_string(expected));
            }
            const Eigen::MatrixXd q_full = qr.householderQ();
            kernel = q_full.rightCols(rows - rank);
        }
        if (kernel.cols() != expected) {
            throw RankMismatch("kernel size disagrees with the representation count");
        }

        for (Eigen::Index c = 0; c < kernel.cols(); ++c) {
            Eigen::VectorXd top = kernel.col(c);
            for (Eigen::Index p = 0; p < top.size(); ++p) {
                if (std::abs(top(p)) > 1e-10) {
                    if (top(p) < 0) {
                        top = -top;
                    }
                    break;
                }
            }
            SpinLevel level;
            level.j = j;
            level.ell = static_cast<int>(levels.size());
            level.top_weight = w;
            level.ladder.push_back(std::move(top));
            // Lower m = j .. -j + 1.
            for (HalfInt m = j; m > -j; m = m - HalfInt::from_int(1)) {
                const int sw = level.weight_of(m);
                const auto &from_idx = sectors->indices(sw);
                const auto &v = level.ladder.back();
                Eigen::VectorXd next = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(sectors->size(sw + 1)));
                for (std::size_t p = 0; p < from_idx.size(); ++p) {
                    const double a = v(static_cast<Eigen::Index>(p));
                    if (a == 0.0) {
                        continue;
                    }
                    const std::uint64_t s = from_idx[p];
                    for (int q = 0; q < n; ++q) {
                        const std::uint64_t mask = qcore::qubit_mask(q, n);
                        if (!(s & mask)) {
                            next(static_cast<Eigen::Index>(sectors->position(s | mask))) += a;
                        }
                    }
                }
                next /= std::sqrt(lowering_coefficient_sq(j, m));
                level.ladder.push_back(std::move(next));
            }
            levels.push_back(std::move(level));
        }
    }
    return SpinDecomposition(n, std::move(levels), std::move(sectors));
}

std::shared_ptr<const SpinDecomposition> shared_decomposition(int n, int cap) {
    check_width(n, cap);
    static std::mutex mutex;
    static std::map<int, std::shared_ptr<const SpinDecomposition>> cache;
    std::lock_guard lock(mutex);
    auto &slot = cache[n];
    if (!slot) {
        slot = std::make_shared<const SpinDecomposition>(decompose(n, cap));
    }
    return slot;
}

// ---------------------------------------------------------------------------

HamiltonianSpec::HamiltonianSpec(double a, double b, std::optional<Rational> aq, std::optional<Rational> bq)
    : alpha_(a), beta_(b), alpha_q_(aq), beta_q_(bq) {}

HamiltonianSpec HamiltonianSpec::exact(Rational alpha, Rational beta) {
    if (beta == Rational(1)) {
        throw std::invalid_argument("beta must differ from 1");
    }
    return HamiltonianSpec(to_double(alpha), to_double(beta), alpha, beta);
}

HamiltonianSpec HamiltonianSpec::real(double alpha, double beta) {
    if (beta == 1.0 || !std::isfinite(alpha) || !std::isfinite(beta)) {
        throw std::invalid_argument("beta must be finite and differ from 1");
    }
    return HamiltonianSpec(alpha, beta, std::nullopt, std::nullopt);
}

double HamiltonianSpec::gamma() const {
    if (auto g = gamma_exact()) {
        return to_double(*g);
    }
    return (alpha_ - 1.0) / (beta_ - 1.0);
}

std::optional<Rational> HamiltonianSpec::gamma_exact() const {
    if (!alpha_q_ || !beta_q_) {
        return std::nullopt;
    }
    return (*alpha_q_ - 1) / (*beta_q_ - 1);
}

double HamiltonianSpec::t_star() const { return std::numbers::pi / (2.0 * std::abs(beta_ - 1.0)); }

std::string HamiltonianSpec::describe() const {
    std::ostringstream os;
    if (is_exact()) {
        os << "alpha=" << to_string(*alpha_q_) << " beta=" << to_string(*beta_q_);
    } else {
        os.precision(17);
        os << "alpha=" << alpha_ << " beta=" << beta_;
    }
    return os.str();
}

double hamiltonian_eigenvalue(const HamiltonianSpec &spec, HalfInt j, HalfInt m) {
    if (std::abs(m.twice()) > j.twice()) {
        throw std::domain_error("|m| exceeds j");
    }
    const double jv = j.value();
    const double mv = m.value();
    return -jv * (jv + 1.0) + spec.alpha() * mv + spec.beta() * mv * mv;
}

LinearOp heisenberg_hamiltonian(int n, const HamiltonianSpec &spec, int cap) {
    const auto ops = collective_ops(n, cap);
    return Complex{-1.0} * ops.jsq + Complex{spec.alpha()} * ops.jz + Complex{spec.beta()} * (ops.jz * ops.jz);
}

// ---------------------------------------------------------------------------

StateVector Propagator::apply(const StateVector &state) const {
    Eigen::MatrixXcd m = Eigen::Map<const Eigen::VectorXcd>(state.amplitudes().data(),
                                                             static_cast<Eigen::Index>(state.dim()));
    apply(m);
    return StateVector(state.num_qubits(), std::vector<Complex>(m.data(), m.data() + m.size()));
}

SpinPropagator::SpinPropagator(std::shared_ptr<const SpinDecomposition> decomposition,
                               const HamiltonianSpec &spec, double t)
    : decomposition_(std::move(decomposition)) {
    const int n = decomposition_->n();
    phases_.resize(static_cast<std::size_t>(n) + 1);
    for (int w = 0; w <= n; ++w) {
        const auto &cols = decomposition_->block_columns(w);
        Eigen::VectorXcd ph(static_cast<Eigen::Index>(cols.size()));
        for (std::size_t c = 0; c < cols.size(); ++c) {
            const auto j = decomposition_->levels()[static_cast<std::size_t>(cols[c].level)].j;
            ph(static_cast<Eigen::Index>(c)) = std::polar(1.0, -t * hamiltonian_eigenvalue(spec, j, cols[c].m));
        }
        phases_[static_cast<std::size_t>(w)] = std::move(ph);
    }
}

void SpinPropagator::apply(Eigen::MatrixXcd &states) const {
    const int n = decomposition_->n();
    check_rows(states, n);
    for (int w = 0; w <= n; ++w) {
        const auto &rows = decomposition_->sectors().indices(w);
        Eigen::MatrixXcd x = gather_rows(states, rows);
        apply_sector(w, x);
        scatter_rows(states, rows, x);
    }
}

void SpinPropagator::apply_sector(int w, Eigen::MatrixXcd &sector_states) const {
    const auto &b = decomposition_->block(w);
    if (sector_states.rows() != b.rows()) {
        throw DimensionError("sector state has " + std::to_string(sector_states.rows()) + " rows, expected " +
                             std::to_string(b.rows()));
    }
    const Eigen::MatrixXd cr = b.transpose() * sector_states.real();
    const Eigen::MatrixXd ci = b.transpose() * sector_states.imag();
    Eigen::MatrixXcd coords(cr.rows(), cr.cols());
    coords.real() = cr;
    coords.imag() = ci;
    coords = phases_[static_cast<std::size_t>(w)].asDiagonal() * coords;
    sector_states.real() = b * coords.real();
    sector_states.imag() = b * coords.imag();
}

DiagonalPropagator::DiagonalPropagator(const LinearOp &diagonal_hamiltonian, double t)
    : n_(diagonal_hamiltonian.num_qubits()) {
    if (!diagonal_hamiltonian.is_diagonal()) {
        throw std::invalid_argument("DiagonalPropagator needs a diagonal Hamiltonian");
    }
    phases_ = Eigen::VectorXcd::Ones(static_cast<Eigen::Index>(diagonal_hamiltonian.dim()));
    for (const auto &e : diagonal_hamiltonian.entries()) {
        if (std::abs(e.value.imag()) > tol::kHermitian) {
            throw std::invalid_argument("diagonal Hamiltonian has a non-real entry");
        }
        phases_(static_cast<Eigen::Index>(e.row)) = std::polar(1.0, -t * e.value.real());
    }
}

void DiagonalPropagator::apply(Eigen::MatrixXcd &states) const {
    check_rows(states, n_);
    states = phases_.asDiagonal() * states;
}

BlockOraclePropagator::BlockOraclePropagator(const LinearOp &hamiltonian, double t) {
    const int n = hamiltonian.num_qubits();
    if (!hamiltonian.certify_hermitian()) {
        throw std::invalid_argument("oracle evolution needs a Hermitian operator");
    }
    for (const auto &e : hamiltonian.entries()) {
        if (std::popcount(e.row) != std::popcount(e.col)) {
            throw NotBlockPreserving("Hamiltonian couples Hamming weights " + std::to_string(std::popcount(e.col)) +
                                     " and " + std::to_string(std::popcount(e.row)));
        }
    }
    sectors_ = std::make_shared<const WeightSectors>(n);
    std::vector<Eigen::MatrixXcd> dense(static_cast<std::size_t>(n) + 1);
    for (int w = 0; w <= n; ++w) {
        const auto s = static_cast<Eigen::Index>(sectors_->size(w));
        dense[static_cast<std::size_t>(w)] = Eigen::MatrixXcd::Zero(s, s);
    }
    for (const auto &e : hamiltonian.entries()) {
        const auto w = static_cast<std::size_t>(std::popcount(e.row));
        dense[w](static_cast<Eigen::Index>(sectors_->position(e.row)),
                 static_cast<Eigen::Index>(sectors_->position(e.col))) = e.value;
    }
    unitaries_.resize(dense.size());
    for (std::size_t w = 0; w < dense.size(); ++w) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(dense[w]);
        if (eig.info() != Eigen::Success) {
            throw std::runtime_error("Hermitian eigensolver failed");
        }
        Eigen::VectorXcd ph(eig.eigenvalues().size());
        for (Eigen::Index i = 0; i < ph.size(); ++i) {
            ph(i) = std::polar(1.0, -t * eig.eigenvalues()(i));
        }
        unitaries_[w] = eig.eigenvectors() * ph.asDiagonal() * eig.eigenvectors().adjoint();
    }
}

void BlockOraclePropagator::apply(Eigen::MatrixXcd &states) const {
    const int n = sectors_->n();
    check_rows(states, n);
    for (int w = 0; w <= n; ++w) {
        const auto &rows = sectors_->indices(w);
        const Eigen::MatrixXcd x = gather_rows(states, rows);
        scatter_rows(states, rows, unitaries_[static_cast<std::size_t>(w)] * x);
    }
}

StateVector evolve(const StateVector &state, const HamiltonianSpec &spec, double t, int cap) {
    const SpinPropagator prop(shared_decomposition(state.num_qubits(), cap), spec, t);
    return prop.apply(state);
}

StateVector evolve_oracle(const StateVector &state, const LinearOp &hamiltonian, double t) {
    if (hamiltonian.dim() != state.dim()) {
        throw DimensionError("Hamiltonian and state dimensions differ");
    }
    const BlockOraclePropagator prop(hamiltonian, t);
    return prop.apply(state);
}

std::string decomposition_json(const SpinDecomposition &d) {
    nlohmann::json doc;
    doc["n"] = d.n();
    nlohmann::json levels = nlohmann::json::array();
    for (const auto &lev : d.levels()) {
        nlohmann::json jl;
        jl["two_j"] = lev.j.twice();
        jl["ell"] = lev.ell;
        nlohmann::json vectors = nlohmann::json::array();
        for (int k = 0; k < lev.size(); ++k) {
            const auto m = lev.j - HalfInt::from_int(k);
            const auto &idx = d.sectors().indices(lev.weight_of(m));
            const auto &v = lev.ladder[static_cast<std::size_t>(k)];
            nlohmann::json amps = nlohmann::json::object();
            for (std::size_t p = 0; p < idx.size(); ++p) {
                const double a = v(static_cast<Eigen::Index>(p));
                if (std::abs(a) > 1e-15) {
                    amps[std::to_string(idx[p])] = {a, 0.0};
                }
            }
            vectors.push_back({{"two_m", m.twice()}, {"amplitudes", std::move(amps)}});
        }
        jl["vectors"] = std::move(vectors);
        levels.push_back(std::move(jl));
    }
    doc["levels"] = std::move(levels);
    return doc.dump(2);
}

} // namespace spinfan::spin
