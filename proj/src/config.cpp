#include "warpkit/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <fstream>

namespace warpkit {

namespace {

ScalarMode parse_mode(const std::string& s) {
  if (s == "rational") return ScalarMode::rational;
  if (s == "float64") return ScalarMode::float64;
  throw UsageError("--scalar must be rational or float64, got '" + s + "'");
}

// values from a --config JSON object; flags given on the command line win
void apply_config_file(const std::string& path, RunConfig& cfg, const CLI::App& app) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw UsageError("config file '" + path + "' is not valid JSON: " + e.what());
  }
  if (!j.is_object()) throw UsageError("config file must hold a JSON object");
  auto unset = [&](const char* flag) { return app.get_option(flag)->count() == 0; };
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "suite") {
        if (unset("--suite")) cfg.suite = v.get<std::string>();
      } else if (key == "seed") {
        if (unset("--seed")) cfg.seed = v.get<std::uint64_t>();
      } else if (key == "trials") {
        if (unset("--trials")) cfg.trials = v.get<int>();
      } else if (key == "maxDim") {
        if (unset("--max-dim")) cfg.maxDim = v.get<int>();
      } else if (key == "scalar") {
        if (unset("--scalar")) cfg.scalarMode = parse_mode(v.get<std::string>());
      } else if (key == "tolerance") {
        if (unset("--tolerance")) cfg.tolerance = v.get<double>();
      } else if (key == "input") {
        if (unset("--input")) cfg.inputPath = v.get<std::string>();
      } else if (key == "format") {
        if (unset("--format")) cfg.format = v.get<std::string>();
      } else if (key == "out") {
        if (unset("--out")) cfg.outPath = v.get<std::string>();
      } else if (key == "timing") {
        if (unset("--timing")) cfg.timing = v.get<bool>();
      } else {
        throw UsageError("config file: unknown key '" + key + "'");
      }
    }
  } catch (const nlohmann::json::type_error& e) {
    throw UsageError(std::string("config file: wrong value type: ") + e.what());
  }
}

}  // namespace

RunConfig parse_config(const std::vector<std::string>& args) {
  RunConfig cfg;
  CLI::App app{"warpkit run"};
  std::string scalar, input, out, config;
  app.add_option("--suite", cfg.suite);
  app.add_option("--seed", cfg.seed);
  app.add_option("--trials", cfg.trials);
  app.add_option("--max-dim", cfg.maxDim);
  app.add_option("--scalar", scalar);
  app.add_option("--tolerance", cfg.tolerance);
  app.add_option("--input", input);
  app.add_option("--format", cfg.format);
  app.add_option("--out", out);
  app.add_option("--config", config);
  app.add_flag("--timing", cfg.timing);
  app.allow_extras(false);

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }
  if (!scalar.empty()) cfg.scalarMode = parse_mode(scalar);
  if (app.get_option("--input")->count()) cfg.inputPath = input;
  if (app.get_option("--out")->count()) cfg.outPath = out;
  if (!config.empty()) apply_config_file(config, cfg, app);
  validate(cfg);
  return cfg;
}

void validate(const RunConfig& cfg) {
  if (!is_suite(cfg.suite)) throw UsageError("unknown suite '" + cfg.suite + "'");
  if (!(cfg.tolerance > 0)) throw UsageError("tolerance must be > 0");
  if (cfg.trials < 1) throw UsageError("trials must be >= 1");
  if (cfg.maxDim < 1) throw UsageError("max-dim must be >= 1");
  if (cfg.format != "text" && cfg.format != "json") throw UsageError("format must be text or json");
}

}  // namespace warpkit
