#pragma once

// Command-line driver. Exit codes: 0 when every check passes, 1 on a
// verification failure, 2 on an invalid configuration.

#include <iosfwd>
#include <string>
#include <vector>

#include "spinfan/verify.hpp"

namespace spinfan::cli {

inline constexpr int kExitPass = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitConfig = 2;

enum class Format { kJson, kCsv };

Format parse_format(const std::string &text);

/// JSON array of reports, or CSV with one row per report. Numbers are
/// written with shortest round-trip precision in both formats.
std::string render_reports(const std::vector<verify::GateReport> &reports, Format format);

/// Writes `text` to `path`, or to `out` when `path` is empty or "-".
void emit(const std::string &text, const std::string &path, std::ostream &out);

void emit_report(const std::vector<verify::GateReport> &reports, Format format, const std::string &path,
                 std::ostream &out);

/// Runs the CLI on argv, writing results to `out` and diagnostics to `err`.
int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);
int run(int argc, char **argv);

} // namespace spinfan::cli
