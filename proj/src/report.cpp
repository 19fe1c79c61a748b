#include "warpkit/cli.hpp"

#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace warpkit {

using ojson = nlohmann::ordered_json;

namespace {

ojson to_json(const SuiteReport& r) {
  ojson j;
  j["suite"] = r.suite;
  j["seed"] = r.seed;
  j["trials"] = r.trials;
  j["passed"] = r.passed;
  ojson fails = ojson::array();
  for (const auto& f : r.failures) fails.push_back({{"case", f.caseId}, {"step", f.step}, {"detail", f.detail}});
  j["failures"] = fails;
  if (r.exactZero)
    j["maxResidual"] = "exact-zero";
  else
    j["maxResidual"] = r.maxResidual;
  j["elapsedMs"] = r.elapsedMs;
  return j;
}

SuiteReport from_json(const ojson& j) {
  SuiteReport r;
  r.suite = j.at("suite").get<std::string>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.trials = j.at("trials").get<int>();
  r.passed = j.at("passed").get<int>();
  for (const auto& f : j.at("failures"))
    r.failures.push_back({f.at("case").get<std::string>(), f.at("step").get<std::string>(),
                          f.at("detail").get<std::string>()});
  const auto& mr = j.at("maxResidual");
  if (mr.is_string()) {
    if (mr.get<std::string>() != "exact-zero") throw std::runtime_error("report: bad maxResidual string");
    r.exactZero = true;
    r.maxResidual = 0;
  } else {
    r.maxResidual = mr.get<double>();
  }
  r.elapsedMs = j.at("elapsedMs").get<long long>();
  return r;
}

}  // namespace

std::string report_json(const std::vector<SuiteReport>& reports, bool asArray) {
  if (!asArray) {
    if (reports.size() != 1) throw std::logic_error("report_json: a single report needs exactly one suite");
    return to_json(reports[0]).dump(2) + "\n";
  }
  ojson arr = ojson::array();
  for (const auto& r : reports) arr.push_back(to_json(r));
  return arr.dump(2) + "\n";
}

std::string report_text(const std::vector<SuiteReport>& reports) {
  std::ostringstream os;
  char line[160];
  std::snprintf(line, sizeof line, "%-11s %20s %8s %8s %8s %14s %10s\n", "suite", "seed", "trials", "passed",
                "failed", "maxResidual", "elapsedMs");
  os << line;
  for (const auto& r : reports) {
    char res[32];
    if (r.exactZero)
      std::snprintf(res, sizeof res, "exact-zero");
    else
      std::snprintf(res, sizeof res, "%.3e", r.maxResidual);
    std::snprintf(line, sizeof line, "%-11s %20llu %8d %8d %8d %14s %10lld\n", r.suite.c_str(),
                  static_cast<unsigned long long>(r.seed), r.trials, r.passed, r.trials - r.passed, res, r.elapsedMs);
    os << line;
  }
  for (const auto& r : reports)
    for (const auto& f : r.failures) os << "FAIL " << r.suite << " " << f.caseId << " [" << f.step << "] " << f.detail << "\n";
  return os.str();
}

std::vector<SuiteReport> parse_report_json(const std::string& text) {
  ojson j = ojson::parse(text);
  std::vector<SuiteReport> out;
  if (j.is_array())
    for (const auto& e : j) out.push_back(from_json(e));
  else
    out.push_back(from_json(j));
  return out;
}

void write_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + tmp.string() + "'");
    out << content;
    out.flush();
    if (!out) throw IoError("write to '" + tmp.string() + "' failed");
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw IoError("cannot rename to '" + path + "': " + ec.message());
  }
}

}  // namespace warpkit
