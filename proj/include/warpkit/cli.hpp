#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace warpkit {

enum class ScalarMode { rational, float64 };

struct RunConfig {
  std::string suite = "all";
  std::uint64_t seed = 42;
  int trials = 1000;
  int maxDim = 3;
  std::optional<ScalarMode> scalarMode;  // unset: per-suite default
  double tolerance = 1e-8;
  std::optional<std::string> inputPath;
  std::string format = "text";
  std::optional<std::string> outPath;
  bool timing = false;
};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// unreadable input or unwritable output
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

const std::vector<std::string>& suite_names();  // without "all"
bool is_suite(const std::string& s);
ScalarMode default_mode(const std::string& suite);
const char* mode_name(ScalarMode m);

// argv excludes the program name and the "run" word; --config FILE supplies a
// JSON object of defaults that flags override.
RunConfig parse_config(const std::vector<std::string>& args);
void validate(const RunConfig& cfg);

struct Failure {
  std::string caseId, step, detail;
  bool operator==(const Failure&) const = default;
};

struct SuiteReport {
  std::string suite;
  std::uint64_t seed = 0;
  int trials = 0;
  int passed = 0;
  std::vector<Failure> failures;
  bool exactZero = false;  // maxResidual reported as "exact-zero"
  double maxResidual = 0;
  long long elapsedMs = 0;
  bool operator==(const SuiteReport&) const = default;
};

SuiteReport run_suite(const RunConfig& cfg, const std::string& suite);
std::vector<SuiteReport> run(const RunConfig& cfg);

std::string report_json(const std::vector<SuiteReport>& reports, bool asArray);
std::string report_text(const std::vector<SuiteReport>& reports);
std::vector<SuiteReport> parse_report_json(const std::string& text);
// writes through a temporary file and a rename
void write_atomic(const std::string& path, const std::string& content);

}  // namespace warpkit
