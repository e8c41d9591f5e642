#include "spinfan/qcore.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

namespace spinfan::qcore {

namespace {

void check_qubits(int n) {
    if (n < 1 || n > 30) {
        throw DimensionError("qubit count " + std::to_string(n) + " outside [1, 30]");
    }
}

std::size_t checked_dim(std::size_t a, std::size_t b, const char *what) {
    if (a != b) {
        throw DimensionError(std::string(what) + ": dimension mismatch (" + std::to_string(a) +
                             " vs " + std::to_string(b) + ")");
    }
    return a;
}

void validate_targets(std::span<const int> targets, int n) {
    std::vector<int> seen;
    for (int t : targets) {
        if (t < 0 || t >= n) {
            throw DimensionError("target qubit " + std::to_string(t) + " out of range for " +
                                 std::to_string(n) + " qubits");
        }
        if (std::find(seen.begin(), seen.end(), t) != seen.end()) {
            throw DimensionError("duplicate target qubit " + std::to_string(t));
        }
        seen.push_back(t);
    }
}

} // namespace

int hamming_weight(std::uint64_t x) { return std::popcount(x); }

// ---------------------------------------------------------------------------
// StateVector

StateVector::StateVector(int num_qubits) : num_qubits_(num_qubits) {
    check_qubits(num_qubits);
    amps_.assign(std::size_t{1} << num_qubits, Complex{});
    amps_[0] = 1.0;
}

StateVector::StateVector(int num_qubits, std::vector<Complex> amplitudes)
    : num_qubits_(num_qubits), amps_(std::move(amplitudes)) {
    check_qubits(num_qubits);
    if (amps_.size() != (std::size_t{1} << num_qubits)) {
        throw DimensionError("amplitude array length " + std::to_string(amps_.size()) +
                             " is not 2^" + std::to_string(num_qubits));
    }
}

StateVector StateVector::basis(int num_qubits, std::uint64_t index) {
    check_qubits(num_qubits);
    std::vector<Complex> amps(std::size_t{1} << num_qubits);
    if (index >= amps.size()) {
        throw DimensionError("basis index out of range");
    }
    amps[index] = 1.0;
    return StateVector(num_qubits, std::move(amps));
}

double StateVector::norm() const {
    double s = 0.0;
    for (const auto &a : amps_) {
        s += std::norm(a);
    }
    return std::sqrt(s);
}

void StateVector::normalize() {
    const double nrm = norm();
    if (nrm == 0.0) {
        throw std::domain_error("cannot normalize the zero vector");
    }
    for (auto &a : amps_) {
        a /= nrm;
    }
}

bool StateVector::is_normalized(double tolerance) const {
    double s = 0.0;
    for (const auto &a : amps_) {
        s += std::norm(a);
    }
    return std::abs(s - 1.0) < tolerance;
}

StateVector &StateVector::operator+=(const StateVector &other) {
    checked_dim(dim(), other.dim(), "state addition");
    for (std::size_t i = 0; i < amps_.size(); ++i) {
        amps_[i] += other.amps_[i];
    }
    return *this;
}

StateVector &StateVector::operator-=(const StateVector &other) {
    checked_dim(dim(), other.dim(), "state subtraction");
    for (std::size_t i = 0; i < amps_.size(); ++i) {
        amps_[i] -= other.amps_[i];
    }
    return *this;
}

StateVector &StateVector::operator*=(Complex scale) {
    for (auto &a : amps_) {
        a *= scale;
    }
    return *this;
}

double StateVector::max_abs_diff(const StateVector &other) const {
    checked_dim(dim(), other.dim(), "state comparison");
    double m = 0.0;
    for (std::size_t i = 0; i < amps_.size(); ++i) {
        m = std::max(m, std::abs(amps_[i] - other.amps_[i]));
    }
    return m;
}

StateVector operator+(StateVector a, const StateVector &b) { return a += b; }
StateVector operator-(StateVector a, const StateVector &b) { return a -= b; }
StateVector operator*(Complex scale, StateVector a) { return a *= scale; }

StateVector tensor(const StateVector &a, const StateVector &b) {
    std::vector<Complex> out(a.dim() * b.dim());
    for (std::size_t i = 0; i < a.dim(); ++i) {
        for (std::size_t j = 0; j < b.dim(); ++j) {
            out[i * b.dim() + j] = a[i] * b[j];
        }
    }
    return StateVector(a.num_qubits() + b.num_qubits(), std::move(out));
}

Complex inner(const StateVector &a, const StateVector &b) {
    checked_dim(a.dim(), b.dim(), "inner product");
    Complex s{};
    for (std::size_t i = 0; i < a.dim(); ++i) {
        s += std::conj(a[i]) * b[i];
    }
    return s;
}

// ---------------------------------------------------------------------------
// BitString

BitString::BitString(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
    for (auto b : bits_) {
        if (b > 1) {
            throw std::invalid_argument("bit values must be 0 or 1");
        }
        weight_ += b;
    }
}

BitString BitString::from_index(std::uint64_t value, int width) {
    if (width < 0 || width > 63 || (width < 63 && (value >> width) != 0)) {
        throw std::invalid_argument("value does not fit in the requested width");
    }
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(width));
    for (int i = 0; i < width; ++i) {
        bits[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>((value >> (width - 1 - i)) & 1U);
    }
    return BitString(std::move(bits));
}

BitString BitString::parse(const std::string &text) {
    std::vector<std::uint8_t> bits;
    for (char ch : text) {
        if (ch != '0' && ch != '1') {
            throw std::invalid_argument("bit string may only contain 0 and 1: " + text);
        }
        bits.push_back(static_cast<std::uint8_t>(ch - '0'));
    }
    return BitString(std::move(bits));
}

std::uint64_t BitString::to_index() const {
    std::uint64_t v = 0;
    for (auto b : bits_) {
        v = (v << 1) | b;
    }
    return v;
}

std::string BitString::to_string() const {
    std::string s;
    for (auto b : bits_) {
        s.push_back(static_cast<char>('0' + b));
    }
    return s;
}

// ---------------------------------------------------------------------------
// LinearOp

LinearOp::LinearOp(std::size_t dim, std::vector<OpEntry> entries) : dim_(dim) {
    for (const auto &e : entries) {
        if (e.row >= dim || e.col >= dim) {
            throw DimensionError("operator entry outside " + std::to_string(dim) + "x" +
                                 std::to_string(dim));
        }
    }
    std::sort(entries.begin(), entries.end(), [](const OpEntry &a, const OpEntry &b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    entries_.reserve(entries.size());
    for (const auto &e : entries) {
        if (!entries_.empty() && entries_.back().row == e.row && entries_.back().col == e.col) {
            entries_.back().value += e.value;
        } else {
            entries_.push_back(e);
        }
    }
    std::erase_if(entries_, [](const OpEntry &e) { return e.value == Complex{}; });
}

LinearOp LinearOp::identity(std::size_t dim) {
    std::vector<OpEntry> e(dim);
    for (std::size_t i = 0; i < dim; ++i) {
        e[i] = {i, i, 1.0};
    }
    return LinearOp(dim, std::move(e));
}

LinearOp LinearOp::diagonal(std::span<const Complex> diag) {
    std::vector<OpEntry> e;
    e.reserve(diag.size());
    for (std::size_t i = 0; i < diag.size(); ++i) {
        e.push_back({i, i, diag[i]});
    }
    return LinearOp(diag.size(), std::move(e));
}

LinearOp LinearOp::permutation(std::span<const std::uint64_t> image) {
    std::vector<bool> hit(image.size(), false);
    std::vector<OpEntry> e;
    e.reserve(image.size());
    for (std::size_t i = 0; i < image.size(); ++i) {
        if (image[i] >= image.size() || hit[image[i]]) {
            throw std::invalid_argument("image is not a permutation");
        }
        hit[image[i]] = true;
        e.push_back({image[i], i, 1.0});
    }
    return LinearOp(image.size(), std::move(e));
}

LinearOp LinearOp::from_dense(const Eigen::MatrixXcd &m, double drop_tolerance) {
    if (m.rows() != m.cols()) {
        throw DimensionError("dense matrix is not square");
    }
    std::vector<OpEntry> e;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (std::abs(m(i, j)) > drop_tolerance) {
                e.push_back({static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(j), m(i, j)});
            }
        }
    }
    return LinearOp(static_cast<std::size_t>(m.rows()), std::move(e));
}

int LinearOp::num_qubits() const {
    if (dim_ == 0 || !std::has_single_bit(dim_)) {
        throw DimensionError("operator dimension is not a power of two");
    }
    return std::countr_zero(dim_);
}

Complex LinearOp::at(std::uint64_t row, std::uint64_t col) const {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), std::pair{row, col},
                               [](const OpEntry &e, const std::pair<std::uint64_t, std::uint64_t> &k) {
                                   return e.row != k.first ? e.row < k.first : e.col < k.second;
                               });
    if (it != entries_.end() && it->row == row && it->col == col) {
        return it->value;
    }
    return {};
}

LinearOp LinearOp::adjoint() const {
    std::vector<OpEntry> e;
    e.reserve(entries_.size());
    for (const auto &x : entries_) {
        e.push_back({x.col, x.row, std::conj(x.value)});
    }
    return LinearOp(dim_, std::move(e));
}

Eigen::MatrixXcd LinearOp::to_dense() const {
    if (dim_ > (std::size_t{1} << 14)) {
        throw DimensionError("refusing to densify an operator of dimension " + std::to_string(dim_));
    }
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(dim_),
                                                static_cast<Eigen::Index>(dim_));
    for (const auto &e : entries_) {
        m(static_cast<Eigen::Index>(e.row), static_cast<Eigen::Index>(e.col)) = e.value;
    }
    return m;
}

std::vector<Complex> LinearOp::apply(std::span<const Complex> x) const {
    checked_dim(dim_, x.size(), "operator application");
    std::vector<Complex> y(dim_);
    for (const auto &e : entries_) {
        y[e.row] += e.value * x[e.col];
    }
    return y;
}

StateVector LinearOp::apply(const StateVector &state) const {
    return StateVector(state.num_qubits(), apply(state.amplitudes()));
}

Eigen::MatrixXcd LinearOp::apply(const Eigen::MatrixXcd &x) const {
    checked_dim(dim_, static_cast<std::size_t>(x.rows()), "operator application");
    Eigen::MatrixXcd y = Eigen::MatrixXcd::Zero(x.rows(), x.cols());
    for (const auto &e : entries_) {
        y.row(static_cast<Eigen::Index>(e.row)) += e.value * x.row(static_cast<Eigen::Index>(e.col));
    }
    return y;
}

LinearOp &LinearOp::operator*=(Complex scale) {
    for (auto &e : entries_) {
        e.value *= scale;
    }
    std::erase_if(entries_, [](const OpEntry &e) { return e.value == Complex{}; });
    return *this;
}

LinearOp operator*(Complex scale, LinearOp a) { return a *= scale; }

LinearOp operator*(const LinearOp &a, const LinearOp &b) {
    checked_dim(a.dim_, b.dim_, "operator product");
    // Row offsets of b (entries are row-major sorted).
    std::vector<std::size_t> start(b.dim_ + 1, 0);
    for (const auto &e : b.entries_) {
        ++start[e.row + 1];
    }
    std::partial_sum(start.begin(), start.end(), start.begin());

    std::vector<OpEntry> out;
    std::vector<Complex> acc(a.dim_);
    std::vector<std::uint64_t> touched;
    std::vector<bool> mark(a.dim_, false);
    std::size_t i = 0;
    while (i < a.entries_.size()) {
        const auto row = a.entries_[i].row;
        for (; i < a.entries_.size() && a.entries_[i].row == row; ++i) {
            const auto &ea = a.entries_[i];
            for (auto p = start[ea.col]; p < start[ea.col + 1]; ++p) {
                const auto &eb = b.entries_[p];
                if (!mark[eb.col]) {
                    mark[eb.col] = true;
                    touched.push_back(eb.col);
                }
                acc[eb.col] += ea.value * eb.value;
            }
        }
        for (auto c : touched) {
            out.push_back({row, c, acc[c]});
            acc[c] = {};
            mark[c] = false;
        }
        touched.clear();
    }
    return LinearOp(a.dim_, std::move(out));
}

LinearOp operator+(const LinearOp &a, const LinearOp &b) {
    checked_dim(a.dim_, b.dim_, "operator sum");
    std::vector<OpEntry> e(a.entries_.begin(), a.entries_.end());
    e.insert(e.end(), b.entries_.begin(), b.entries_.end());
    return LinearOp(a.dim_, std::move(e));
}

LinearOp operator-(const LinearOp &a, const LinearOp &b) { return a + Complex{-1.0} * b; }

double LinearOp::max_abs_diff(const LinearOp &other) const {
    const LinearOp d = *this - other;
    double m = 0.0;
    for (const auto &e : d.entries_) {
        m = std::max(m, std::abs(e.value));
    }
    return m;
}

double LinearOp::unitarity_residual() const {
    return (adjoint() * *this).max_abs_diff(identity(dim_));
}

double LinearOp::hermiticity_residual() const { return max_abs_diff(adjoint()); }

bool LinearOp::certify_unitary(double tolerance) const { return unitarity_residual() < tolerance; }

bool LinearOp::certify_hermitian(double tolerance) const {
    return hermiticity_residual() < tolerance;
}

bool LinearOp::is_diagonal() const {
    return std::all_of(entries_.begin(), entries_.end(),
                       [](const OpEntry &e) { return e.row == e.col; });
}

bool LinearOp::is_permutation() const {
    if (entries_.size() != dim_) {
        return false;
    }
    std::vector<bool> col_hit(dim_, false);
    std::vector<bool> row_hit(dim_, false);
    for (const auto &e : entries_) {
        if (e.value != Complex{1.0} || col_hit[e.col] || row_hit[e.row]) {
            return false;
        }
        col_hit[e.col] = row_hit[e.row] = true;
    }
    return true;
}

LinearOp kron(const LinearOp &a, const LinearOp &b) {
    std::vector<OpEntry> e;
    e.reserve(a.nonzeros() * b.nonzeros());
    for (const auto &x : a.entries()) {
        for (const auto &y : b.entries()) {
            e.push_back({x.row * b.dim() + y.row, x.col * b.dim() + y.col, x.value * y.value});
        }
    }
    return LinearOp(a.dim() * b.dim(), std::move(e));
}

// ---------------------------------------------------------------------------
// Gates

LinearOp hadamard() {
    const double h = 1.0 / std::sqrt(2.0);
    return LinearOp(2, {{0, 0, h}, {0, 1, h}, {1, 0, h}, {1, 1, -h}});
}

LinearOp pauli_x() { return LinearOp(2, {{0, 1, 1.0}, {1, 0, 1.0}}); }

LinearOp pauli_y() { return LinearOp(2, {{0, 1, Complex{0, -1}}, {1, 0, Complex{0, 1}}}); }

LinearOp pauli_z() { return LinearOp(2, {{0, 0, 1.0}, {1, 1, -1.0}}); }

LinearOp cnot() {
    const std::uint64_t image[] = {0, 1, 3, 2};
    return LinearOp::permutation(image);
}

LinearOp hadamard_all(int n) {
    LinearOp h = hadamard();
    LinearOp out = h;
    for (int i = 1; i < n; ++i) {
        out = kron(out, h);
    }
    return out;
}

LinearOp embed(const LinearOp &op, std::span<const int> targets, int n) {
    validate_targets(targets, n);
    const int k = static_cast<int>(targets.size());
    checked_dim(op.dim(), std::size_t{1} << k, "embed");
    std::uint64_t target_mask = 0;
    for (int t : targets) {
        target_mask |= qubit_mask(t, n);
    }
    auto scatter_local = [&](std::uint64_t local) {
        std::uint64_t g = 0;
        for (int i = 0; i < k; ++i) {
            if ((local >> (k - 1 - i)) & 1U) {
                g |= qubit_mask(targets[static_cast<std::size_t>(i)], n);
            }
        }
        return g;
    };
    std::vector<OpEntry> e;
    const std::uint64_t dim = std::uint64_t{1} << n;
    for (std::uint64_t rest = 0; rest < dim; ++rest) {
        if (rest & target_mask) {
            continue;
        }
        for (const auto &x : op.entries()) {
            e.push_back({rest | scatter_local(x.row), rest | scatter_local(x.col), x.value});
        }
    }
    return LinearOp(dim, std::move(e));
}

void apply_on_subsystem(StateVector &state, std::span<const int> targets, const BatchMap &map) {
    const int n = state.num_qubits();
    validate_targets(targets, n);
    const int k = static_cast<int>(targets.size());
    const std::size_t local_dim = std::size_t{1} << k;
    const std::size_t rest_dim = std::size_t{1} << (n - k);

    std::vector<std::uint64_t> local_offset(local_dim, 0);
    for (std::size_t l = 0; l < local_dim; ++l) {
        for (int i = 0; i < k; ++i) {
            if ((l >> (k - 1 - i)) & 1U) {
                local_offset[l] |= qubit_mask(targets[static_cast<std::size_t>(i)], n);
            }
        }
    }
    std::vector<int> others;
    for (int q = 0; q < n; ++q) {
        if (std::find(targets.begin(), targets.end(), q) == targets.end()) {
            others.push_back(q);
        }
    }
    std::vector<std::uint64_t> rest_offset(rest_dim, 0);
    const int nr = n - k;
    for (std::size_t c = 0; c < rest_dim; ++c) {
        for (int i = 0; i < nr; ++i) {
            if ((c >> (nr - 1 - i)) & 1U) {
                rest_offset[c] |= qubit_mask(others[static_cast<std::size_t>(i)], n);
            }
        }
    }

    Eigen::MatrixXcd block(static_cast<Eigen::Index>(local_dim), static_cast<Eigen::Index>(rest_dim));
    auto amps = state.amplitudes();
    for (std::size_t c = 0; c < rest_dim; ++c) {
        for (std::size_t l = 0; l < local_dim; ++l) {
            block(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(c)) =
                amps[rest_offset[c] | local_offset[l]];
        }
    }
    map(block);
    if (block.rows() != static_cast<Eigen::Index>(local_dim) ||
        block.cols() != static_cast<Eigen::Index>(rest_dim)) {
        throw DimensionError("subsystem map changed the block shape");
    }
    for (std::size_t c = 0; c < rest_dim; ++c) {
        for (std::size_t l = 0; l < local_dim; ++l) {
            amps[rest_offset[c] | local_offset[l]] =
                block(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(c));
        }
    }
}

StateVector apply_op(const StateVector &state, const LinearOp &op, std::span<const int> targets) {
    if (op.dim() != (std::size_t{1} << targets.size())) {
        throw DimensionError("operator of dimension " + std::to_string(op.dim()) +
                             " cannot act on " + std::to_string(targets.size()) + " qubits");
    }
    StateVector out = state;
    apply_on_subsystem(out, targets, [&op](Eigen::MatrixXcd &block) { block = op.apply(block); });
    return out;
}

StateVector apply_op(const StateVector &state, const LinearOp &op,
                     std::initializer_list<int> targets) {
    return apply_op(state, op, std::span<const int>(targets.begin(), targets.size()));
}

// ---------------------------------------------------------------------------
// Ideal reference gates

LinearOp ideal_parity_unitary(int r) {
    if (r < 1) {
        throw std::invalid_argument("parity gate needs r >= 1");
    }
    const int n = r + 1;
    std::vector<std::uint64_t> image(std::size_t{1} << n);
    for (std::uint64_t x = 0; x < image.size(); ++x) {
        const auto controls = x >> 1;
        image[x] = x ^ static_cast<std::uint64_t>(hamming_weight(controls) & 1);
    }
    return LinearOp::permutation(image);
}

LinearOp ideal_fanout_unitary(int r) {
    if (r < 1) {
        throw std::invalid_argument("fanout gate needs r >= 1");
    }
    const int n = r + 1;
    std::vector<std::uint64_t> image(std::size_t{1} << n);
    const std::uint64_t target_mask = ((std::uint64_t{1} << r) - 1) << 1;
    for (std::uint64_t x = 0; x < image.size(); ++x) {
        image[x] = (x & 1U) ? (x ^ target_mask) : x;
    }
    return LinearOp::permutation(image);
}

LinearOp ideal_generalized_modq_unitary(int r, int q) {
    if (r < 1 || q < 2) {
        throw std::invalid_argument("generalized Mod_q gate needs r >= 1 and q >= 2");
    }
    const int targets = q - 1;
    const int n = r + targets;
    std::vector<std::uint64_t> image(std::size_t{1} << n);
    for (std::uint64_t x = 0; x < image.size(); ++x) {
        const int i = hamming_weight(x >> targets) % q;
        // t_1 is the most significant target bit.
        std::uint64_t flip = 0;
        for (int j = 0; j < i; ++j) {
            flip |= std::uint64_t{1} << (targets - 1 - j);
        }
        image[x] = x ^ flip;
    }
    return LinearOp::permutation(image);
}

LinearOp ideal_modq_unitary(int r, int q) {
    if (r < 1 || q < 2) {
        throw std::invalid_argument("Mod_q gate needs r >= 1 and q >= 2");
    }
    std::vector<std::uint64_t> image(std::size_t{1} << (r + 1));
    for (std::uint64_t x = 0; x < image.size(); ++x) {
        image[x] = (hamming_weight(x >> 1) % q != 0) ? (x ^ 1U) : x;
    }
    return LinearOp::permutation(image);
}

Eigen::MatrixXcd complete_unitary(const Eigen::MatrixXcd &columns,
                                  std::span<const std::uint64_t> positions, std::size_t dim) {
    const auto d = static_cast<Eigen::Index>(dim);
    if (columns.rows() != d || static_cast<std::size_t>(columns.cols()) != positions.size()) {
        throw DimensionError("complete_unitary: shape mismatch");
    }
    const Eigen::MatrixXcd gram = columns.adjoint() * columns;
    const double ortho_err =
        (gram - Eigen::MatrixXcd::Identity(columns.cols(), columns.cols())).cwiseAbs().maxCoeff();
    if (columns.cols() > 0 && ortho_err > tol::kOperator) {
        throw std::invalid_argument("complete_unitary: columns are not orthonormal");
    }
    std::vector<bool> taken(dim, false);
    for (auto p : positions) {
        if (p >= dim || taken[p]) {
            throw std::invalid_argument("complete_unitary: invalid column position");
        }
        taken[p] = true;
    }

    Eigen::MatrixXcd basis(d, d);
    Eigen::Index filled = columns.cols();
    basis.leftCols(filled) = columns;
    for (Eigen::Index e = 0; e < d && filled < d; ++e) {
        Eigen::VectorXcd v = Eigen::VectorXcd::Unit(d, e);
        // Two passes of modified Gram-Schmidt.
        for (int pass = 0; pass < 2; ++pass) {
            for (Eigen::Index c = 0; c < filled; ++c) {
                v -= basis.col(c) * basis.col(c).dot(v);
            }
        }
        const double nrm = v.norm();
        if (nrm > 1e-8) {
            basis.col(filled++) = v / nrm;
        }
    }
    if (filled != d) {
        throw std::runtime_error("complete_unitary: failed to span the space");
    }

    Eigen::MatrixXcd u(d, d);
    for (std::size_t i = 0; i < positions.size(); ++i) {
        u.col(static_cast<Eigen::Index>(positions[i])) = columns.col(static_cast<Eigen::Index>(i));
    }
    Eigen::Index next = columns.cols();
    for (std::size_t p = 0; p < dim; ++p) {
        if (!taken[p]) {
            u.col(static_cast<Eigen::Index>(p)) = basis.col(next++);
        }
    }
    return u;
}

} // namespace spinfan::qcore
