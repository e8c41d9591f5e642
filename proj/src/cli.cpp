#include "spinfan/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "spinfan/encode.hpp"
#include "spinfan/gates.hpp"
#include "spinfan/rational.hpp"
#include "spinfan/spin.hpp"

namespace spinfan::cli {

namespace {

using nlohmann::json;
using verify::GateReport;

constexpr int kMaxWires = 26;

class ConfigError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

struct Env {
    double tolerance = tol::kGate;
    int cap = spin::kDefaultCap;
};

Env read_env() {
    Env env;
    if (const char *t = std::getenv("SPINFAN_TOLERANCE")) {
        char *end = nullptr;
        const double v = std::strtod(t, &end);
        if (end == t || *end != '\0' || !(v > 0.0)) {
            throw ConfigError(std::string("SPINFAN_TOLERANCE must be a positive number, got '") + t + "'");
        }
        env.tolerance = v;
    }
    if (const char *c = std::getenv("SPINFAN_CAP")) {
        char *end = nullptr;
        const long v = std::strtol(c, &end, 10);
        if (end == c || *end != '\0' || v < 1 || v > 16) {
            throw ConfigError(std::string("SPINFAN_CAP must be an integer in [1, 16], got '") + c + "'");
        }
        env.cap = static_cast<int>(v);
    }
    return env;
}

std::string bytes_text(int wires) {
    const double bytes = static_cast<double>(std::uint64_t{1} << std::min(wires, 62)) * 16.0;
    std::ostringstream os;
    os.precision(3);
    if (bytes >= 1024.0 * 1024.0 * 1024.0) {
        os << bytes / (1024.0 * 1024.0 * 1024.0) << " GiB";
    } else if (bytes >= 1024.0 * 1024.0) {
        os << bytes / (1024.0 * 1024.0) << " MiB";
    } else {
        os << bytes / 1024.0 << " KiB";
    }
    return os.str();
}

// `encoded` qubits evolve under the Hamiltonian; `wires` is the full register.
void require_width(const std::string &what, int encoded, int wires, int cap) {
    const int effective = std::min(cap, spin::kDefaultCap);
    if (encoded > effective || wires > kMaxWires) {
        throw ConfigError(what + " needs " + std::to_string(encoded) + " evolving qubits and " +
                          std::to_string(wires) + " wires (" + bytes_text(wires) +
                          " per state vector); limits are " + std::to_string(effective) + " evolving qubits and " +
                          std::to_string(kMaxWires) + " wires");
    }
}

Rational parse_exact(const std::string &name, const std::string &text) {
    try {
        return parse_rational(text);
    } catch (const std::invalid_argument &e) {
        throw ConfigError("--" + name + ": " + e.what());
    }
}

spin::HamiltonianSpec make_spec(const std::string &alpha, const std::string &beta) {
    const Rational a = parse_exact("alpha", alpha);
    const Rational b = parse_exact("beta", beta);
    if (b == Rational(1)) {
        throw ConfigError("--beta must differ from 1");
    }
    return spin::HamiltonianSpec::exact(a, b);
}

json spec_params(const spin::HamiltonianSpec &spec) {
    json p;
    p["alpha"] = to_string(*spec.alpha_exact());
    p["beta"] = to_string(*spec.beta_exact());
    p["gamma"] = to_string(*spec.gamma_exact());
    p["s"] = spec.s();
    p["t_star"] = spec.t_star();
    return p;
}

gates::Uncompute parse_uncompute(const std::string &text) {
    if (text == "reverse") {
        return gates::Uncompute::kExactReverse;
    }
    if (text == "positive") {
        return gates::Uncompute::kPositiveTime;
    }
    throw ConfigError("--uncompute must be 'reverse' or 'positive'");
}

encode::AssignmentRule parse_rule(const std::string &text) {
    if (text == "auto") {
        return encode::AssignmentRule::kAuto;
    }
    if (text == "weight-linear") {
        return encode::AssignmentRule::kWeightLinear;
    }
    if (text == "greedy") {
        return encode::AssignmentRule::kGreedyParity;
    }
    throw ConfigError("--rule must be 'auto', 'weight-linear' or 'greedy'");
}

std::string csv_escape(const std::string &s) {
    if (s.find_first_of(",\"\n") == std::string::npos) {
        return s;
    }
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') {
            out += '"';
        }
        out += ch;
    }
    return out + "\"";
}

std::string dump_sorted(const json &j) { return j.dump(2) + "\n"; }

// Flattens an object to "key,value" lines (nested values as JSON).
std::string object_csv(const json &j) {
    std::ostringstream os;
    os << "key,value\n";
    for (const auto &[key, value] : j.items()) {
        os << csv_escape(key) << ',' << csv_escape(value.is_string() ? value.get<std::string>() : value.dump())
           << '\n';
    }
    return os.str();
}

bool all_pass(const std::vector<GateReport> &reports) {
    return std::all_of(reports.begin(), reports.end(), [](const GateReport &r) { return r.pass; });
}

// ---- shared option groups ----

struct Common {
    std::string format = "json";
    std::string output;
    bool timing = false;
};

void add_common(CLI::App *sub, Common &c) {
    sub->add_option("--format", c.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("-o,--output", c.output, "write to this file instead of stdout");
    sub->add_flag("--timing", c.timing, "record wall-clock runtime_ms (otherwise 0)");
}

struct ParityArgs {
    int r = 0;
    std::string alpha = "0";
    std::string beta = "3";
    std::string encoding = "pair";
    int c = 0;
    int d = 0;
    std::string rule = "auto";
    std::string uncompute = "reverse";
    double time_scale = 1.0;
};

void add_parity_options(CLI::App *sub, ParityArgs &a) {
    sub->add_option("--r", a.r, "number of logical control bits")->required()->check(CLI::PositiveNumber);
    sub->add_option("--alpha", a.alpha, "alpha as p/q, integer or decimal");
    sub->add_option("--beta", a.beta, "beta as p/q, integer or decimal (not 1)");
    sub->add_option("--encoding", a.encoding, "pair or group")->check(CLI::IsMember({"pair", "group"}));
    sub->add_option("--c", a.c, "logical bits per group block");
    sub->add_option("--d", a.d, "physical qubits per group block (default: smallest even d)");
    sub->add_option("--rule", a.rule, "group assignment rule: auto, weight-linear, greedy");
    sub->add_option("--uncompute", a.uncompute, "reverse or positive");
    sub->add_option("--time-scale", a.time_scale, "multiplies the forward evolution time");
}

struct Runner {
    Env env;
    Common common;
    std::ostream &out;

    void stamp(GateReport &rep) const {
        rep.tolerance = env.tolerance;
        rep.update_pass();
        if (!common.timing) {
            rep.runtime_ms = 0.0;
        }
    }

    int finish(const std::vector<GateReport> &reports) const {
        emit_report(reports, parse_format(common.format), common.output, out);
        return all_pass(reports) ? kExitPass : kExitFail;
    }

    int finish_document(const json &doc, const std::string &csv, bool pass) const {
        emit(parse_format(common.format) == Format::kJson ? dump_sorted(doc) : csv, common.output, out);
        return pass ? kExitPass : kExitFail;
    }
};

GateReport parity_like(const std::string &gate, const ParityArgs &a, const Env &env) {
    const auto spec = make_spec(a.alpha, a.beta);
    gates::ParityOptions opts;
    opts.uncompute = parse_uncompute(a.uncompute);
    if (!(a.time_scale > 0.0)) {
        throw ConfigError("--time-scale must be positive");
    }
    opts.forward_time_scale = a.time_scale;

    encode::BlockEncoding block = encode::pair_block();
    json params = spec_params(spec);
    params["encoding"] = a.encoding;
    if (a.encoding == "group") {
        if (a.c < 1) {
            throw ConfigError("--encoding group needs --c >= 1");
        }
        const int d = a.d > 0 ? a.d : encode::min_even_d(a.c);
        if (a.r % a.c != 0) {
            throw ConfigError("--r must be a multiple of --c");
        }
        require_width(gate, a.r / a.c * d, a.r / a.c * d + 1, env.cap);
        const auto enc = encode::group_encoder(a.c, d, parse_rule(a.rule));
        block = enc.block();
        params["c"] = a.c;
        params["d"] = d;
        params["rule"] = a.rule;
        params["weight_linear"] = enc.is_weight_linear();
    } else {
        require_width(gate, 2 * a.r, 2 * a.r + 1, env.cap);
    }
    params["uncompute"] = a.uncompute;
    params["time_scale"] = a.time_scale;

    const auto circ = gate == "parity" ? gates::parity_circuit(a.r, spec, block, opts)
                                       : gates::fanout_circuit(a.r, spec, block, opts);
    const auto ideal = gate == "parity" ? qcore::ideal_parity_unitary(a.r) : qcore::ideal_fanout_unitary(a.r);
    GateReport rep = verify::truth_table_sweep(circ, ideal, env.tolerance);
    rep.gate = gate;
    rep.r = a.r;
    rep.params = params;
    return rep;
}

struct ModqArgs {
    int r = 0;
    int q = 0;
    std::string hamiltonian = "jz2";
    std::string alpha = "1";
    std::string beta = "2";
    std::int64_t k = 1;
    bool standard = false;
    bool allow_shared_factor = false;
    std::string uncompute = "reverse";
    double time_scale = 1.0;
};

GateReport modq_report(const ModqArgs &a, const Env &env) {
    if (a.q < 2) {
        throw ConfigError("--q must be at least 2");
    }
    if (a.k < 1) {
        throw ConfigError("--k must be positive");
    }
    if (!a.allow_shared_factor && std::gcd(a.k, std::int64_t{a.q}) != 1) {
        throw ConfigError("--k " + std::to_string(a.k) + " is not prime to --q " + std::to_string(a.q) +
                          " (pass --allow-shared-factor to run it anyway)");
    }
    if (!(a.time_scale > 0.0)) {
        throw ConfigError("--time-scale must be positive");
    }
    const int m = a.r + a.q - 1;
    json params;
    params["hamiltonian"] = a.hamiltonian;
    params["k"] = a.k;
    params["uncompute"] = a.uncompute;
    params["time_scale"] = a.time_scale;

    gates::QuadraticHamiltonian g;
    if (a.hamiltonian == "jz2") {
        require_width("modq", m, m + a.q - 1 + (a.standard ? 1 : 0), env.cap);
        g = gates::quadratic_jz2(m);
    } else if (a.hamiltonian == "heisenberg") {
        require_width("modq", 2 * m, 2 * m + a.q - 1 + (a.standard ? 1 : 0), env.cap);
        const auto spec = make_spec(a.alpha, a.beta);
        params["alpha"] = to_string(*spec.alpha_exact());
        params["beta"] = to_string(*spec.beta_exact());
        g = gates::quadratic_from_heisenberg(m, spec);
    } else {
        throw ConfigError("--hamiltonian must be 'jz2' or 'heisenberg'");
    }
    params["a"] = to_string(*g.a_exact);
    params["b"] = to_string(*g.b_exact);
    params["c"] = to_string(*g.c_exact);

    const auto sched = gates::mod_schedule_unchecked(a.q, a.k, g.a);
    params["t"] = sched.t;
    gates::ModqOptions opts;
    opts.uncompute = parse_uncompute(a.uncompute);
    opts.forward_time_scale = a.time_scale;
    opts.strict_r = !a.allow_shared_factor;
    const auto phi = gates::PhiSpec::uniform(a.q);

    GateReport rep;
    if (a.standard) {
        rep = verify::truth_table_sweep(gates::standard_modq_circuit(a.r, a.q, g, sched, phi, opts),
                                        qcore::ideal_modq_unitary(a.r, a.q), env.tolerance);
        rep.gate = "modq";
    } else {
        rep = verify::truth_table_sweep(gates::generalized_modq_circuit(a.r, a.q, g, sched, phi, opts),
                                        qcore::ideal_generalized_modq_unitary(a.r, a.q), env.tolerance);
        rep.gate = "generalized-modq";
    }
    rep.r = a.r;
    rep.q = a.q;
    rep.params = params;
    return rep;
}

GateReport audit_report(int n, const Env &env) {
    const auto audit = verify::decomposition_audit(n, std::max(env.cap, n));
    GateReport rep;
    rep.gate = "decomposition-audit";
    rep.tolerance = audit.tolerance;
    rep.params = {{"n", n}, {"failures", audit.failures}};
    rep.max_deviation = std::max({audit.max_casimir_residual, audit.max_jz_residual, audit.max_ladder_residual,
                                  audit.max_raising_residual, audit.orthonormality_residual});
    if (!audit.pass()) {
        rep.max_deviation = std::max(rep.max_deviation, 1.0);
    }
    rep.update_pass();
    return rep;
}

GateReport orthogonality_report(int q, std::int64_t k, const Env &) {
    const auto sched = gates::mod_schedule(q, k, 1.0);
    const auto m = verify::orthogonality_matrix(sched, 0.0, 0.0, gates::PhiSpec::uniform(q), 3 * q);
    GateReport rep;
    rep.gate = "psi-orthogonality";
    rep.q = q;
    rep.params = {{"k", k}, {"w_max", 3 * q}};
    rep.tolerance = tol::kState;
    rep.max_deviation = verify::kronecker_deviation(m, q);
    rep.update_pass();
    return rep;
}

} // namespace

Format parse_format(const std::string &text) {
    if (text == "json") {
        return Format::kJson;
    }
    if (text == "csv") {
        return Format::kCsv;
    }
    throw std::invalid_argument("format must be json or csv");
}

std::string render_reports(const std::vector<GateReport> &reports, Format format) {
    if (format == Format::kJson) {
        json arr = json::array();
        for (const auto &r : reports) {
            arr.push_back(r.to_json());
        }
        return dump_sorted(arr);
    }
    std::ostringstream os;
    os << "gate,r,q,params,max_deviation,global_phase_re,global_phase_im,ancilla_leakage,column_norm_error,"
          "worst_input,tolerance,pass,runtime_ms\n";
    for (const auto &r : reports) {
        const json j = r.to_json();
        os << csv_escape(r.gate) << ',' << (r.r > 0 ? std::to_string(r.r) : "") << ','
           << (r.q > 0 ? std::to_string(r.q) : "") << ',' << csv_escape(j["params"].dump()) << ','
           << j["max_deviation"].dump() << ',' << j["global_phase"][0].dump() << ',' << j["global_phase"][1].dump()
           << ',' << j["ancilla_leakage"].dump() << ',' << j["column_norm_error"].dump() << ','
           << j["worst_input"].dump() << ',' << j["tolerance"].dump() << ',' << j["pass"].dump() << ','
           << j["runtime_ms"].dump() << '\n';
    }
    return os.str();
}

void emit(const std::string &text, const std::string &path, std::ostream &out) {
    if (path.empty() || path == "-") {
        out << text;
        out.flush();
        return;
    }
    std::ofstream file(path, std::ios::binary);
    if (!file) {
        throw std::runtime_error("cannot open '" + path + "' for writing");
    }
    file << text;
    if (!file) {
        throw std::runtime_error("failed writing '" + path + "'");
    }
}

void emit_report(const std::vector<GateReport> &reports, Format format, const std::string &path, std::ostream &out) {
    emit(render_reports(reports, format), path, out);
}

int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
    CLI::App app{"Exact simulation of Hamiltonian-driven parity, fanout and Mod_q gates", "spinfan"};
    app.require_subcommand(1);

    Common common;

    int dec_n = 0;
    bool dec_vectors = false;
    auto *dec = app.add_subcommand("decompose", "spin decomposition of n qubits with its audit");
    dec->add_option("--n", dec_n, "number of qubits")->required()->check(CLI::PositiveNumber);
    dec->add_flag("--vectors", dec_vectors, "include every basis vector in the JSON output");
    add_common(dec, common);

    int et_c = 0;
    int et_d = 0;
    std::string et_rule = "auto";
    auto *et = app.add_subcommand("encode-table", "group encoder assignment table");
    et->add_option("--c", et_c, "logical bits")->required()->check(CLI::PositiveNumber);
    et->add_option("--d", et_d, "physical qubits (default: smallest even d)");
    et->add_option("--rule", et_rule, "auto, weight-linear or greedy");
    add_common(et, common);

    ParityArgs par_args;
    auto *par = app.add_subcommand("parity", "verify the parity circuit");
    add_parity_options(par, par_args);
    add_common(par, common);

    ParityArgs fan_args;
    auto *fan = app.add_subcommand("fanout", "verify the fanout circuit");
    add_parity_options(fan, fan_args);
    add_common(fan, common);

    ModqArgs mq;
    auto *mod = app.add_subcommand("modq", "verify a generalized or standard Mod_q circuit");
    mod->add_option("--q", mq.q, "modulus")->required();
    mod->add_option("--r", mq.r, "control bits")->required()->check(CLI::PositiveNumber);
    mod->add_option("--hamiltonian", mq.hamiltonian, "jz2 or heisenberg");
    mod->add_option("--alpha", mq.alpha, "alpha for the heisenberg instance");
    mod->add_option("--beta", mq.beta, "beta for the heisenberg instance");
    mod->add_option("--k", mq.k, "evolution multiple, prime to q");
    mod->add_flag("--standard", mq.standard, "verify the standard gate built from two generalized gates");
    mod->add_flag("--allow-shared-factor", mq.allow_shared_factor, "accept k not prime to q");
    mod->add_option("--uncompute", mq.uncompute, "reverse or positive");
    mod->add_option("--time-scale", mq.time_scale, "multiplies the forward evolution time");
    add_common(mod, common);

    std::string inv_alpha = "2";
    std::string inv_beta = "2";
    int inv_ell = 0;
    int inv_max_j = 6;
    std::optional<double> inv_alpha_p;
    std::optional<double> inv_beta_p;
    std::optional<double> inv_t_p;
    auto *inv = app.add_subcommand("inverse-schedule", "positive-time inverse of the forward evolution");
    inv->add_option("--alpha", inv_alpha, "alpha of the forward Hamiltonian");
    inv->add_option("--beta", inv_beta, "beta of the forward Hamiltonian");
    inv->add_option("--ell", inv_ell, "odd multiplier index for the altered Hamiltonian");
    inv->add_option("--max-j", inv_max_j, "check highest weights up to this j")->check(CLI::Range(1, 7));
    auto *ap = inv->add_option("--alpha-prime", inv_alpha_p, "check this alpha' instead of constructing one");
    auto *bp = inv->add_option("--beta-prime", inv_beta_p, "beta' of the schedule to check");
    auto *tp = inv->add_option("--t-prime", inv_t_p, "t' of the schedule to check");
    ap->needs(bp)->needs(tp);
    add_common(inv, common);

    int orth_q = 0;
    std::int64_t orth_k = 1;
    std::string orth_b = "0";
    std::string orth_c = "0";
    std::string orth_a = "1";
    int orth_w_max = -1;
    bool orth_allow = false;
    auto *orth = app.add_subcommand("orthogonality", "moduli |<Psi_v|Psi_w>|");
    orth->add_option("--q", orth_q, "modulus")->required();
    orth->add_option("--k", orth_k, "evolution multiple");
    orth->add_option("--a", orth_a, "leading coefficient (its sign selects the phase convention)");
    orth->add_option("--b", orth_b, "normalized linear coefficient b_n/a_n");
    orth->add_option("--c", orth_c, "normalized constant c_n/a_n");
    orth->add_option("--w-max", orth_w_max, "largest weight (default 3q)");
    orth->add_flag("--allow-shared-factor", orth_allow, "accept k not prime to q");
    add_common(orth, common);

    auto *all = app.add_subcommand("audit-all", "run the standard verification suite");
    add_common(all, common);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp &) {
        out << app.help();
        return kExitPass;
    } catch (const CLI::CallForAllHelp &) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitPass;
    } catch (const CLI::ParseError &e) {
        err << "error: " << e.what() << "\n";
        return kExitConfig;
    }

    try {
        const Env env = read_env();
        Runner run{env, common, out};

        if (*dec) {
            if (dec_n > std::max(env.cap, spin::kDefaultCap) || dec_n > env.cap) {
                throw ConfigError("--n " + std::to_string(dec_n) + " exceeds the cap of " + std::to_string(env.cap) +
                                  " qubits (" + bytes_text(dec_n) + " per vector)");
            }
            const auto d = spin::shared_decomposition(dec_n, env.cap);
            const auto audit = verify::decomposition_audit(dec_n, env.cap);
            json doc;
            doc["n"] = dec_n;
            json levels = json::array();
            std::ostringstream csv;
            csv << "two_j,multiplicity,rep_count\n";
            for (int twice_j = dec_n; twice_j >= dec_n % 2; twice_j -= 2) {
                const auto j = spin::HalfInt::from_twice(twice_j);
                levels.push_back({{"two_j", twice_j},
                                  {"multiplicity", d->multiplicity(j)},
                                  {"rep_count", spin::rep_count(dec_n, j)}});
                csv << twice_j << ',' << d->multiplicity(j) << ',' << spin::rep_count(dec_n, j) << '\n';
            }
            doc["levels"] = levels;
            doc["audit"] = audit.to_json();
            if (dec_vectors) {
                doc["decomposition"] = json::parse(spin::decomposition_json(*d));
            }
            return run.finish_document(doc, csv.str(), audit.pass());
        }

        if (*et) {
            const int d = et_d > 0 ? et_d : encode::min_even_d(et_c);
            const auto enc = encode::group_encoder(et_c, d, parse_rule(et_rule));
            json rows = json::array();
            bool parity_ok = true;
            for (const auto &a : enc.assignment()) {
                rows.push_back({{"x", qcore::BitString::from_index(a.x, et_c).to_string()},
                                {"wt", a.weight},
                                {"two_j", a.j.twice()},
                                {"ell", a.ell}});
                parity_ok = parity_ok && ((a.j.as_int() - (d / 2 - a.weight)) % 2 == 0);
            }
            const double unitarity = enc.matrix().unitarity_residual();
            json doc{{"c", et_c},
                     {"d", d},
                     {"rule", et_rule},
                     {"weight_linear", enc.is_weight_linear()},
                     {"unitarity_residual", unitarity},
                     {"rows", rows}};
            return run.finish_document(doc, encode::assignment_csv(enc), parity_ok && unitarity < tol::kOperator);
        }

        if (*par || *fan) {
            GateReport rep = *par ? parity_like("parity", par_args, env) : parity_like("fanout", fan_args, env);
            run.stamp(rep);
            return run.finish({rep});
        }

        if (*mod) {
            GateReport rep = modq_report(mq, env);
            run.stamp(rep);
            return run.finish({rep});
        }

        if (*inv) {
            const auto spec = make_spec(inv_alpha, inv_beta);
            if (2 * inv_max_j > std::min(env.cap, spin::kDefaultCap)) {
                throw ConfigError("--max-j " + std::to_string(inv_max_j) + " needs " + std::to_string(2 * inv_max_j) +
                                  " qubits, above the cap");
            }
            const int n = 2 * inv_max_j;
            json doc = spec_params(spec);
            doc["max_j"] = inv_max_j;
            double residual = 0.0;
            bool ok = true;
            if (inv_alpha_p) {
                gates::InverseSchedule s{*inv_alpha_p, *inv_beta_p, *inv_t_p, inv_ell};
                if (s.beta_p == 1.0) {
                    throw ConfigError("--beta-prime must differ from 1");
                }
                const auto check = gates::check_inverse_schedule(spec, s);
                doc["kind"] = "schedule";
                doc["schedule"] = {{"alpha_prime", s.alpha_p},
                                   {"beta_prime", s.beta_p},
                                   {"t_prime", s.t_p},
                                   {"ell", s.ell},
                                   {"accepted", check.ok},
                                   {"reason", check.reason}};
                residual = gates::restoration_residual(n, spec, spec.t_star(), s.hamiltonian(), std::max(0.0, s.t_p));
                ok = check.ok;
            } else {
                const auto per = gates::periodic_inverse(std::abs(spec.beta() - 1.0), *spec.gamma_exact(), spec.t_star());
                doc["kind"] = "periodic";
                doc["periodic"] = {{"u", per.u}, {"k", per.k}, {"time", per.time}};
                residual = gates::restoration_residual(n, spec, spec.t_star(), spec, per.time);
                const auto s = gates::make_inverse_schedule(spec, inv_ell);
                const auto check = gates::check_inverse_schedule(spec, s);
                const double alt = gates::restoration_residual(n, spec, spec.t_star(), s.hamiltonian(), s.t_p);
                doc["schedule"] = {{"alpha_prime", s.alpha_p},
                                   {"beta_prime", s.beta_p},
                                   {"t_prime", s.t_p},
                                   {"ell", s.ell},
                                   {"accepted", check.ok},
                                   {"reason", check.reason},
                                   {"restoration_residual", alt}};
                residual = std::max(residual, alt);
                ok = check.ok;
            }
            doc["restoration_residual"] = residual;
            ok = ok && residual < tol::kOperator;
            doc["pass"] = ok;
            return run.finish_document(doc, object_csv(doc), ok);
        }

        if (*orth) {
            if (orth_q < 2 || orth_q > 20) {
                throw ConfigError("--q must be in [2, 20]");
            }
            const double a = to_double(parse_exact("a", orth_a));
            if (a == 0.0) {
                throw ConfigError("--a must be nonzero");
            }
            const auto sched = orth_allow ? gates::mod_schedule_unchecked(orth_q, orth_k, a)
                                          : gates::mod_schedule(orth_q, orth_k, a);
            const int w_max = orth_w_max >= 0 ? orth_w_max : 3 * orth_q;
            const auto m = verify::orthogonality_matrix(sched, to_double(parse_exact("b", orth_b)),
                                                        to_double(parse_exact("c", orth_c)),
                                                        gates::PhiSpec::uniform(orth_q), w_max);
            const double dev = verify::kronecker_deviation(m, orth_q);
            json rows = json::array();
            for (Eigen::Index i = 0; i < m.rows(); ++i) {
                json row = json::array();
                for (Eigen::Index j = 0; j < m.cols(); ++j) {
                    row.push_back(m(i, j));
                }
                rows.push_back(row);
            }
            const bool ok = dev < tol::kState;
            json doc{{"q", orth_q}, {"k", orth_k}, {"a", orth_a}, {"b", orth_b}, {"c", orth_c},
                     {"w_max", w_max}, {"kronecker_deviation", dev}, {"pass", ok}, {"matrix", rows}};
            return run.finish_document(doc, verify::matrix_csv(m), ok);
        }

        if (*all) {
            std::vector<GateReport> reports;
            for (int n = 1; n <= std::min(10, env.cap); ++n) {
                reports.push_back(audit_report(n, env));
            }
            const std::pair<const char *, const char *> grid[] = {
                {"0", "3"}, {"1", "2"}, {"2", "0"}, {"0", "-1"}, {"2", "2"}};
            for (const char *gate : {"parity", "fanout"}) {
                for (int r = 1; r <= 3; ++r) {
                    for (const auto &[alpha, beta] : grid) {
                        for (const char *mode : {"reverse", "positive"}) {
                            ParityArgs a;
                            a.r = r;
                            a.alpha = alpha;
                            a.beta = beta;
                            a.uncompute = mode;
                            reports.push_back(parity_like(gate, a, env));
                        }
                    }
                }
            }
            for (int c : {2, 3}) {
                ParityArgs a;
                a.r = c;
                a.encoding = "group";
                a.c = c;
                reports.push_back(parity_like("parity", a, env));
            }
            for (int q = 2; q <= 3; ++q) {
                for (int r = 1; r <= 2; ++r) {
                    for (const char *ham : {"jz2", "heisenberg"}) {
                        for (bool standard : {false, true}) {
                            ModqArgs a;
                            a.q = q;
                            a.r = r;
                            a.hamiltonian = ham;
                            a.standard = standard;
                            reports.push_back(modq_report(a, env));
                        }
                    }
                }
            }
            for (int q = 2; q <= 5; ++q) {
                reports.push_back(orthogonality_report(q, 1, env));
            }
            for (auto &rep : reports) {
                if (rep.gate != "decomposition-audit" && rep.gate != "psi-orthogonality") {
                    rep.tolerance = env.tolerance;
                }
                rep.update_pass();
                if (!common.timing) {
                    rep.runtime_ms = 0.0;
                }
            }
            return run.finish(reports);
        }
    } catch (const std::invalid_argument &e) {
        err << "invalid configuration: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception &e) {
        err << "verification failed: " << e.what() << "\n";
        return kExitFail;
    }
    return kExitConfig;
}

int run(int argc, char **argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return run(args, std::cout, std::cerr);
}

} // namespace spinfan::cli
