#include "spinfan/encode.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace spinfan::encode {

namespace {

int parity_of(int v) { return ((v % 2) + 2) % 2; }

// Parity of d/2 - wt(x) for even d.
int required_parity(int d, int weight) { return parity_of(d / 2 - weight); }

void check_group_shape(int c, int d) {
    if (c < 1) {
        throw std::invalid_argument("group encoder needs c >= 1");
    }
    if (d % 2 != 0) {
        throw InfeasibleEncoding("odd physical width d = " + std::to_string(d) + " is not supported");
    }
    if (d < c) {
        throw InfeasibleEncoding("physical width d must be at least c");
    }
    if (d > kGroupEncoderCap) {
        throw InfeasibleEncoding("physical width d = " + std::to_string(d) + " exceeds the cap of " +
                                 std::to_string(kGroupEncoderCap) + " (dense " + std::to_string(1 << d) +
                                 "x" + std::to_string(1 << d) + " matrix)");
    }
}

// Levels grouped by integer j, each list in ell order.
std::vector<std::vector<int>> levels_by_j(const spin::SpinDecomposition &dec) {
    std::vector<std::vector<int>> out(static_cast<std::size_t>(dec.n() / 2) + 1);
    for (std::size_t l = 0; l < dec.levels().size(); ++l) {
        out[static_cast<std::size_t>(dec.levels()[l].j.as_int())].push_back(static_cast<int>(l));
    }
    return out;
}

} // namespace

LinearOp pair_encoder() {
    const double h = 1.0 / std::sqrt(2.0);
    return LinearOp(4, {{0, 0, 1.0}, {1, 1, -h}, {2, 1, -h}, {1, 2, -h}, {2, 2, h}, {3, 3, 1.0}});
}

BlockEncoding pair_block() { return {1, 2, pair_encoder(), "pair"}; }

void PairingSpec::validate() const {
    if (n < 1) {
        throw std::invalid_argument("pairing needs n >= 1");
    }
    std::vector<bool> used(static_cast<std::size_t>(n), false);
    for (auto [a, b] : pairs) {
        for (int q : {a, b}) {
            if (q < 0 || q >= n) {
                throw std::invalid_argument("pair index " + std::to_string(q) + " out of range");
            }
            if (used[static_cast<std::size_t>(q)]) {
                throw std::invalid_argument("overlapping pairs at qubit " + std::to_string(q));
            }
            used[static_cast<std::size_t>(q)] = true;
        }
    }
}

std::vector<int> PairingSpec::unpaired() const {
    std::vector<int> out;
    for (int q = 0; q < n; ++q) {
        const bool paired = std::any_of(pairs.begin(), pairs.end(),
                                        [q](const auto &p) { return p.first == q || p.second == q; });
        if (!paired) {
            out.push_back(q);
        }
    }
    return out;
}

StateVector pairing_state(const PairingSpec &spec) {
    spec.validate();
    const std::size_t p = spec.pairs.size();
    std::vector<Complex> amps(std::size_t{1} << spec.n);
    const double scale = std::pow(2.0, -0.5 * static_cast<double>(p));
    // Choice bit k set: pair k is |01> (coefficient -1), else |10> (+1).
    for (std::uint64_t choice = 0; choice < (std::uint64_t{1} << p); ++choice) {
        std::uint64_t index = 0;
        double sign = 1.0;
        for (std::size_t k = 0; k < p; ++k) {
            const auto [a, b] = spec.pairs[k];
            if ((choice >> k) & 1U) {
                index |= qcore::qubit_mask(b, spec.n);
                sign = -sign;
            } else {
                index |= qcore::qubit_mask(a, spec.n);
            }
        }
        amps[index] = sign * scale;
    }
    return StateVector(spec.n, std::move(amps));
}

StateVector logical_encode(const BitString &x) {
    if (x.size() < 1) {
        throw std::invalid_argument("logical_encode needs at least one bit");
    }
    PairingSpec spec;
    spec.n = 2 * x.size();
    for (int i = 0; i < x.size(); ++i) {
        if (x[i]) {
            spec.pairs.emplace_back(2 * i, 2 * i + 1);
        }
    }
    return pairing_state(spec);
}

int min_even_d(int c) {
    if (c < 1 || c > 60) {
        throw std::invalid_argument("min_even_d needs 1 <= c <= 60");
    }
    const std::int64_t target = std::int64_t{1} << c;
    for (int d = 2;; d += 2) {
        if (spin::binomial(d, d / 2) >= target) {
            return d;
        }
    }
}

double compression_ratio(int c) { return static_cast<double>(min_even_d(c)) / c; }

GroupEncoder::GroupEncoder(int c, int d, std::vector<Assignment> assignment,
                           std::shared_ptr<const spin::SpinDecomposition> decomposition)
    : c_(c), d_(d), assignment_(std::move(assignment)), decomposition_(std::move(decomposition)) {
    const std::size_t dim = std::size_t{1} << d;
    Eigen::MatrixXcd cols(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(assignment_.size()));
    std::vector<std::uint64_t> positions;
    for (std::size_t i = 0; i < assignment_.size(); ++i) {
        const auto &a = assignment_[i];
        const auto v = decomposition_->vector(a.ell, a.j);
        cols.col(static_cast<Eigen::Index>(i)) =
            Eigen::Map<const Eigen::VectorXcd>(v.amplitudes().data(), static_cast<Eigen::Index>(dim));
        positions.push_back(a.x << (d - c));
    }
    matrix_ = LinearOp::from_dense(qcore::complete_unitary(cols, positions, dim), 1e-15);
}

BlockEncoding GroupEncoder::block() const {
    return {c_, d_, matrix_, "group(" + std::to_string(c_) + "," + std::to_string(d_) + ")"};
}

bool GroupEncoder::is_weight_linear() const {
    return std::all_of(assignment_.begin(), assignment_.end(),
                       [this](const Assignment &a) { return a.j.twice() == d_ - 2 * a.weight; });
}

GroupEncoder group_encoder(int c, int d, AssignmentRule rule) {
    check_group_shape(c, d);
    auto dec = spin::shared_decomposition(d);
    const auto by_j = levels_by_j(*dec);
    const std::uint64_t inputs = std::uint64_t{1} << c;

    bool linear_ok = true;
    for (int w = 0; w <= c; ++w) {
        const int j = d / 2 - w;
        if (j < 0 || spin::binomial(c, w) > static_cast<std::int64_t>(by_j[static_cast<std::size_t>(j)].size())) {
            linear_ok = false;
        }
    }
    if (rule == AssignmentRule::kAuto) {
        rule = linear_ok ? AssignmentRule::kWeightLinear : AssignmentRule::kGreedyParity;
    }
    if (rule == AssignmentRule::kWeightLinear && !linear_ok) {
        throw InfeasibleEncoding("no weight-linear assignment for c = " + std::to_string(c) +
                                 ", d = " + std::to_string(d));
    }

    if (rule == AssignmentRule::kGreedyParity) {
        std::int64_t need[2] = {0, 0};
        std::int64_t have[2] = {0, 0};
        for (int w = 0; w <= c; ++w) {
            need[required_parity(d, w)] += spin::binomial(c, w);
        }
        for (std::size_t j = 0; j < by_j.size(); ++j) {
            have[j % 2] += static_cast<std::int64_t>(by_j[j].size());
        }
        for (int p = 0; p < 2; ++p) {
            if (need[p] > have[p]) {
                throw InfeasibleEncoding(std::string("not enough ") + (p == 0 ? "even" : "odd") +
                                         "-j representations on " + std::to_string(d) + " qubits: need " +
                                         std::to_string(need[p]) + ", have " + std::to_string(have[p]));
            }
        }
    }

    std::vector<std::size_t> used(by_j.size(), 0);
    std::vector<Assignment> assignment;
    for (std::uint64_t x = 0; x < inputs; ++x) {
        const int w = qcore::hamming_weight(x);
        int j = -1;
        if (rule == AssignmentRule::kWeightLinear) {
            j = d / 2 - w;
        } else {
            for (int cand = d / 2; cand >= 0; --cand) {
                if (parity_of(cand) == required_parity(d, w) &&
                    used[static_cast<std::size_t>(cand)] < by_j[static_cast<std::size_t>(cand)].size()) {
                    j = cand;
                    break;
                }
            }
        }
        const auto jj = static_cast<std::size_t>(j);
        const int level = by_j[jj][used[jj]++];
        assignment.push_back({x, w, HalfInt::from_int(j), level});
    }
    return GroupEncoder(c, d, std::move(assignment), std::move(dec));
}

GroupEncoder group_encoder_from_levels(int c, int d, const std::vector<int> &level_for_x, bool enforce_parity) {
    check_group_shape(c, d);
    auto dec = spin::shared_decomposition(d);
    const std::uint64_t inputs = std::uint64_t{1} << c;
    if (level_for_x.size() != inputs) {
        throw std::invalid_argument("need one level per input");
    }
    std::vector<bool> taken(dec->levels().size(), false);
    std::vector<Assignment> assignment;
    for (std::uint64_t x = 0; x < inputs; ++x) {
        const int level = level_for_x[x];
        if (level < 0 || static_cast<std::size_t>(level) >= dec->levels().size()) {
            throw std::invalid_argument("level index out of range");
        }
        if (taken[static_cast<std::size_t>(level)]) {
            throw std::invalid_argument("level " + std::to_string(level) + " assigned twice");
        }
        taken[static_cast<std::size_t>(level)] = true;
        const int w = qcore::hamming_weight(x);
        const HalfInt j = dec->levels()[static_cast<std::size_t>(level)].j;
        if (enforce_parity && parity_of(j.as_int()) != required_parity(d, w)) {
            throw InfeasibleEncoding("level " + std::to_string(level) + " has j = " + j.to_string() +
                                     " of the wrong parity for weight " + std::to_string(w));
        }
        assignment.push_back({x, w, j, level});
    }
    return GroupEncoder(c, d, std::move(assignment), std::move(dec));
}

std::string assignment_csv(const GroupEncoder &encoder) {
    std::ostringstream os;
    os << "x,wt,j,ell\n";
    for (const auto &a : encoder.assignment()) {
        os << qcore::BitString::from_index(a.x, encoder.c()).to_string() << ',' << a.weight << ','
           << a.j.to_string() << ',' << a.ell << '\n';
    }
    return os.str();
}

} // namespace spinfan::encode
