#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mostowkit/types.hpp"

namespace mostowkit::cli {

using json = nlohmann::json;

inline constexpr const char* kToolVersion = "0.1.0";

enum ExitCode { kOk = 0, kUsage = 2, kMath = 3, kViolation = 4 };

// {"rows": r, "cols": c, "data": [[[re, im], ...], ...]}, row-major.
json matrix_to_json(const Mat& m);
json matrix_to_json(const RMat& m);
Mat matrix_from_json(const json& j);  // throws Error(Parse)
Mat read_matrix_file(const std::string& path);
void write_matrix_file(const std::string& path, const Mat& m);

struct ErrorInfo {
  std::string code;
  std::string message;
};

struct Report {
  std::string kind;  // decomposition, bounds, trial, sweep
  json meta;
  json payload;
  std::optional<ErrorInfo> error;
};

json report_to_json(const Report& r);
Report report_from_json(const json& j);

json make_meta(std::optional<std::uint64_t> seed, std::optional<NormKind> norm_kind,
               const json& branch_alpha);

// Formats a sweep as CSV with header n,t,f_n,g_n and 17 significant digits.
std::string sweep_csv(int n, const std::vector<double>& t_grid);

// Entry point of the command-line tool; returns the process exit code.
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace mostowkit::cli
