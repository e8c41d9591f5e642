#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "spinfan/cli.hpp"

using namespace spinfan;
using nlohmann::json;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run_cli(const std::vector<std::string> &args) {
    std::ostringstream out;
    std::ostringstream err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

class ScopedEnv {
  public:
    ScopedEnv(const char *name, const char *value) : name_(name) { ::setenv(name, value, 1); }
    ~ScopedEnv() { ::unsetenv(name_); }

  private:
    const char *name_;
};

std::vector<std::string> split_csv_line(const std::string &line) {
    std::vector<std::string> cells;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char ch = line[i];
        if (quoted) {
            if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (ch == '"') {
                quoted = false;
            } else {
                cur += ch;
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            cells.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    cells.push_back(cur);
    return cells;
}

} // namespace

TEST(Cli, ParityExample) {
    const auto r = run_cli({"parity", "--r", "3", "--alpha", "0", "--beta", "3"});
    ASSERT_EQ(r.code, cli::kExitPass) << r.err;
    const auto j = json::parse(r.out);
    ASSERT_EQ(j.size(), 1U);
    EXPECT_EQ(j[0]["gate"], "parity");
    EXPECT_EQ(j[0]["r"], 3);
    EXPECT_TRUE(j[0]["pass"].get<bool>());
    EXPECT_EQ(j[0]["params"]["gamma"], "-1/2");
    EXPECT_EQ(j[0]["runtime_ms"], 0.0);
}

TEST(Cli, DecomposeExample) {
    const auto r = run_cli({"decompose", "--n", "4"});
    ASSERT_EQ(r.code, cli::kExitPass) << r.err;
    const auto j = json::parse(r.out);
    std::vector<int> mult;
    for (const auto &lvl : j["levels"]) {
        mult.push_back(lvl["multiplicity"]);
        EXPECT_EQ(lvl["multiplicity"], lvl["rep_count"]);
    }
    EXPECT_EQ(mult, (std::vector<int>{1, 3, 2}));
    EXPECT_TRUE(j["audit"]["pass"].get<bool>());
}

TEST(Cli, ModqExample) {
    const auto r = run_cli({"modq", "--q", "3", "--r", "2", "--hamiltonian", "jz2"});
    ASSERT_EQ(r.code, cli::kExitPass) << r.err;
    const auto j = json::parse(r.out);
    EXPECT_EQ(j[0]["gate"], "generalized-modq");
    EXPECT_EQ(j[0]["q"], 3);
    EXPECT_TRUE(j[0]["pass"].get<bool>());
}

TEST(Cli, StandardModqHeisenberg) {
    const auto r = run_cli({"modq", "--q", "2", "--r", "2", "--hamiltonian", "heisenberg", "--beta", "3",
                            "--standard", "--uncompute", "positive"});
    ASSERT_EQ(r.code, cli::kExitPass) << r.err;
    EXPECT_EQ(json::parse(r.out)[0]["gate"], "modq");
}

TEST(Cli, Deterministic) {
    const std::vector<std::string> args{"fanout", "--r", "2", "--alpha", "1/2", "--beta", "-3/4"};
    const auto a = run_cli(args);
    const auto b = run_cli(args);
    EXPECT_EQ(a.code, cli::kExitPass) << a.err;
    EXPECT_EQ(a.out, b.out);
}

TEST(Cli, CsvCarriesSameNumbers) {
    const std::vector<std::string> base{"parity", "--r", "2", "--alpha", "2", "--beta", "0"};
    auto csv_args = base;
    csv_args.insert(csv_args.end(), {"--format", "csv"});
    const auto j = json::parse(run_cli(base).out)[0];
    const auto csv = run_cli(csv_args).out;
    std::istringstream lines(csv);
    std::string header;
    std::string row;
    std::getline(lines, header);
    std::getline(lines, row);
    const auto h = split_csv_line(header);
    const auto c = split_csv_line(row);
    ASSERT_EQ(h.size(), c.size());
    auto cell = [&](const std::string &name) {
        for (std::size_t i = 0; i < h.size(); ++i) {
            if (h[i] == name) {
                return c[i];
            }
        }
        return std::string("<missing>");
    };
    EXPECT_EQ(cell("gate"), "parity");
    EXPECT_EQ(json::parse(cell("max_deviation")), j["max_deviation"]);
    EXPECT_EQ(json::parse(cell("ancilla_leakage")), j["ancilla_leakage"]);
    EXPECT_EQ(json::parse(cell("global_phase_re")), j["global_phase"][0]);
    EXPECT_EQ(json::parse(cell("global_phase_im")), j["global_phase"][1]);
    EXPECT_EQ(json::parse(cell("worst_input")), j["worst_input"]);
    EXPECT_EQ(json::parse(cell("params")), j["params"]);
    EXPECT_EQ(cell("pass"), "true");
    EXPECT_EQ(cell("q"), "");
}

TEST(Cli, EmptyReportList) {
    EXPECT_EQ(cli::render_reports({}, cli::Format::kJson), "[]\n");
    const auto csv = cli::render_reports({}, cli::Format::kCsv);
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1);
    std::ostringstream out;
    cli::emit_report({}, cli::Format::kJson, "", out);
    EXPECT_EQ(json::parse(out.str()), json::array());
}

TEST(Cli, WritesOutputFile) {
    const auto path = std::filesystem::temp_directory_path() / "spinfan_cli_test.json";
    std::filesystem::remove(path);
    const auto r = run_cli({"parity", "--r", "1", "--output", path.string()});
    EXPECT_EQ(r.code, cli::kExitPass) << r.err;
    EXPECT_TRUE(r.out.empty());
    std::ifstream in(path);
    const auto j = json::parse(in);
    EXPECT_TRUE(j[0]["pass"].get<bool>());
    std::filesystem::remove(path);
}

TEST(Cli, UnwritableOutputIsAFailure) {
    const auto r = run_cli({"parity", "--r", "1", "--output", "/nonexistent-dir/x.json"});
    EXPECT_NE(r.code, cli::kExitPass);
}

TEST(Cli, InvalidConfigurations) {
    const std::vector<std::vector<std::string>> cases{
        {},
        {"bogus"},
        {"parity"},
        {"parity", "--r", "2", "--beta", "1"},
        {"parity", "--r", "2", "--alpha", "x/y"},
        {"parity", "--r", "2", "--uncompute", "sideways"},
        {"parity", "--r", "2", "--format", "xml"},
        {"parity", "--r", "20"},
        {"parity", "--r", "3", "--encoding", "group", "--c", "2"},
        {"modq", "--q", "4", "--r", "2", "--k", "2"},
        {"modq", "--q", "1", "--r", "2"},
        {"modq", "--q", "3", "--r", "2", "--hamiltonian", "ising"},
        {"encode-table", "--c", "3", "--d", "4"},
        {"decompose", "--n", "30"},
    };
    for (const auto &args : cases) {
        const auto r = run_cli(args);
        std::string joined;
        for (const auto &a : args) {
            joined += a + " ";
        }
        EXPECT_EQ(r.code, cli::kExitConfig) << joined << "\n" << r.err << r.out;
    }
}

TEST(Cli, WidthErrorShowsMemory) {
    const auto r = run_cli({"parity", "--r", "20"});
    EXPECT_NE(r.err.find("GiB"), std::string::npos) << r.err;
}

TEST(Cli, VerificationFailures) {
    // A schedule violating the sign condition.
    const auto bad_schedule = run_cli({"inverse-schedule", "--alpha", "2", "--beta", "2", "--ell", "-1",
                                       "--alpha-prime", "2", "--beta-prime", "2", "--t-prime", "1.5707963267948966"});
    EXPECT_EQ(bad_schedule.code, cli::kExitFail) << bad_schedule.err;
    EXPECT_FALSE(json::parse(bad_schedule.out)["pass"].get<bool>());

    EXPECT_EQ(run_cli({"parity", "--r", "2", "--time-scale", "0.5"}).code, cli::kExitFail);
    EXPECT_EQ(run_cli({"orthogonality", "--q", "4", "--k", "2", "--allow-shared-factor"}).code, cli::kExitFail);
    EXPECT_EQ(run_cli({"modq", "--q", "4", "--r", "2", "--k", "2", "--allow-shared-factor"}).code, cli::kExitFail);
}

TEST(Cli, InverseSchedulePasses) {
    for (const auto &[a, b] : {std::pair{"2", "2"}, std::pair{"0", "3"}, std::pair{"2", "0"}}) {
        const auto r = run_cli({"inverse-schedule", "--alpha", a, "--beta", b});
        ASSERT_EQ(r.code, cli::kExitPass) << r.err;
        const auto j = json::parse(r.out);
        EXPECT_EQ(j["kind"], "periodic");
        EXPECT_TRUE(j["schedule"]["accepted"].get<bool>());
        EXPECT_LT(j["restoration_residual"].get<double>(), 1e-10);
    }
}

TEST(Cli, OrthogonalityCsv) {
    const auto r = run_cli({"orthogonality", "--q", "3", "--w-max", "5", "--format", "csv"});
    ASSERT_EQ(r.code, cli::kExitPass) << r.err;
    EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 6);
}

TEST(Cli, EncodeTable) {
    const auto r = run_cli({"encode-table", "--c", "2", "--format", "csv"});
    ASSERT_EQ(r.code, cli::kExitPass) << r.err;
    EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "x,wt,j,ell");
    const auto j = json::parse(run_cli({"encode-table", "--c", "3"}).out);
    EXPECT_EQ(j["d"], 6);
    EXPECT_EQ(j["rows"].size(), 8U);
}

TEST(Cli, ToleranceOverride) {
    {
        ScopedEnv env("SPINFAN_TOLERANCE", "1e-30");
        const auto r = run_cli({"parity", "--r", "2"});
        EXPECT_EQ(r.code, cli::kExitFail);
        EXPECT_EQ(json::parse(r.out)[0]["tolerance"], 1e-30);
    }
    {
        ScopedEnv env("SPINFAN_TOLERANCE", "nope");
        EXPECT_EQ(run_cli({"parity", "--r", "2"}).code, cli::kExitConfig);
    }
}

TEST(Cli, CapOverride) {
    ScopedEnv env("SPINFAN_CAP", "4");
    EXPECT_EQ(run_cli({"parity", "--r", "2"}).code, cli::kExitPass);
    EXPECT_EQ(run_cli({"parity", "--r", "3"}).code, cli::kExitConfig);
    EXPECT_EQ(run_cli({"decompose", "--n", "5"}).code, cli::kExitConfig);
}

TEST(Cli, Timing) {
    const auto j = json::parse(run_cli({"parity", "--r", "3", "--timing"}).out);
    EXPECT_GT(j[0]["runtime_ms"].get<double>(), 0.0);
}

TEST(Cli, AuditAll) {
    const auto r = run_cli({"audit-all"});
    ASSERT_EQ(r.code, cli::kExitPass) << r.err;
    const auto j = json::parse(r.out);
    EXPECT_GT(j.size(), 50U);
    for (const auto &rep : j) {
        EXPECT_TRUE(rep["pass"].get<bool>()) << rep.dump();
    }
}

TEST(Cli, Help) {
    const auto r = run_cli({"--help"});
    EXPECT_EQ(r.code, cli::kExitPass);
    EXPECT_NE(r.out.find("audit-all"), std::string::npos);
}
