// warpkit: run verification suites or evaluate a bundled fixture.
//
//   warpkit run [--suite S] [--seed N] [--trials N] [--max-dim N] [--scalar rational|float64]
//               [--tolerance T] [--input FILE] [--format text|json] [--out FILE]
//               [--config FILE] [--timing]
//   warpkit eval --kind grid|jacobi|curvature --input FILE [--at x1,x2,...]
//
// Exit codes: 0 all checks pass, 1 some check failed, 2 usage error, 3 I/O error.

#include "warpkit/cli.hpp"
#include "warpkit/connection.hpp"
#include "warpkit/io.hpp"
#include "warpkit/jet.hpp"
#include "warpkit/tvb.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <sstream>

using namespace warpkit;

namespace {

std::string vec_str(const Vec<Rational>& v) {
  std::string s = "(";
  for (Eigen::Index i = 0; i < v.size(); ++i) s += (i ? ", " : "") + ScalarTraits<Rational>::str(v[i]);
  return s + ")";
}

std::string vec_str(const Vec<double>& v) {
  std::ostringstream os;
  os.precision(12);
  os << "(";
  for (Eigen::Index i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v[i];
  os << ")";
  return os.str();
}

template <class S>
Vec<S> parse_point(const std::string& s, int dim) {
  Vec<S> v(dim);
  std::vector<std::string> parts;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');) parts.push_back(item);
  if (static_cast<int>(parts.size()) != dim)
    throw UsageError("--at needs " + std::to_string(dim) + " comma-separated coordinates");
  for (int i = 0; i < dim; ++i) {
    try {
      v[i] = parse_scalar<S>(parts[i]);
    } catch (const std::exception& e) {
      throw UsageError(std::string("--at: ") + e.what());
    }
  }
  return v;
}

int cmd_eval(const std::string& kind, const std::string& input, const std::string& at) {
  json j = load_json_file(input);
  try {
    if (kind == "grid") {
      Grid3<Rational> g = grid_from_json<Rational>(j);
      WarpTheoremResult<Rational> w = warp_theorem(g);
      std::cout << "u1 = " << vec_str(w.u.u1) << "\nu2 = " << vec_str(w.u.u2) << "\nu3 = " << vec_str(w.u.u3)
                << "\nsum = " << vec_str(w.residual) << "\n";
      return all_ok(w.checks) && all_zero(w.residual) ? 0 : 1;
    }
    if (kind == "jacobi") {
      FieldTriple<double> F = field_triple_from_json<double>(j);
      Vec<double> m = at.empty() ? Vec<double>(zeros<double>(F.X.dim)) : parse_point<double>(at, F.X.dim);
      JacobiResult<double> r =
          jacobi_via_ultrawarps(F.X.as_smooth_map(), F.Y.as_smooth_map(), F.Z.as_smooth_map(), m);
      std::cout << "u1 = " << vec_str(r.u1) << "\nu2 = " << vec_str(r.u2) << "\nu3 = " << vec_str(r.u3)
                << "\nsum = " << vec_str(r.residual) << "\n";
      return all_ok(r.checks) && max_abs<double>(r.residual) <= 1e-8 ? 0 : 1;
    }
    if (kind == "curvature") {
      PolyConnectionData<Rational> d = connection_from_json<Rational>(j);
      Vec<Rational> m = at.empty() ? zeros<Rational>(d.p) : parse_point<Rational>(at, d.p);
      Connection<Rational> c = d.connection();
      Mat<Rational> R = curvature_tensor(c, d.Z.as_smooth_map(), d.X.as_smooth_map(), m);
      std::cout << "R(Z,X) =\n";
      for (Eigen::Index i = 0; i < R.rows(); ++i) std::cout << "  " << vec_str(Vec<Rational>(R.row(i).transpose())) << "\n";
      T2aGrid<Rational> g(c, d.X.as_smooth_map(), d.Z.as_smooth_map(), d.mu.as_smooth_map());
      T2aTheoremResult<Rational> th = t2a_warp_theorem(g, m);
      std::cout << "u1 = " << vec_str(th.u.u1) << "\nu2 = " << vec_str(th.u.u2) << "\nu3 = " << vec_str(th.u.u3)
                << "\nsum = " << vec_str(th.residual) << "\n";
      return all_ok(th.checks) && all_zero(th.residual) ? 0 : 1;
    }
  } catch (const InputError& e) {
    throw UsageError(e.what());
  }
  throw UsageError("--kind must be grid, jacobi or curvature");
}

int cmd_run(const std::vector<std::string>& args) {
  RunConfig cfg = parse_config(args);
  std::vector<SuiteReport> reps = run(cfg);
  std::string out = cfg.format == "json" ? report_json(reps, cfg.suite == "all") : report_text(reps);
  if (cfg.outPath)
    write_atomic(*cfg.outPath, out);
  else
    std::cout << out;
  for (const auto& r : reps)
    if (!r.failures.empty()) return 1;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    if (argc < 2) throw UsageError("expected a subcommand: run or eval (see --help)");
    std::string sub = argv[1];
    if (sub == "--help" || sub == "-h") {
      std::cout << "usage: warpkit run [options] | warpkit eval --kind K --input FILE [--at POINT]\n"
                   "suites: dvb tvb proof jet jacobi connection curvature duality all\n";
      return 0;
    }
    if (sub == "run") return cmd_run(std::vector<std::string>(argv + 2, argv + argc));
    if (sub == "eval") {
      CLI::App app{"warpkit eval"};
      std::string kind, input, at;
      app.add_option("--kind", kind)->required();
      app.add_option("--input", input)->required();
      app.add_option("--at", at);
      std::vector<std::string> rev;
      for (int i = argc - 1; i >= 2; --i) rev.push_back(argv[i]);
      try {
        app.parse(rev);
      } catch (const CLI::ParseError& e) {
        throw UsageError(e.what());
      }
      return cmd_eval(kind, input, at);
    }
    throw UsageError("unknown subcommand '" + sub + "'");
  } catch (const UsageError& e) {
    std::cerr << "warpkit: usage error: " << e.what() << "\n";
    return 2;
  } catch (const IoError& e) {
    std::cerr << "warpkit: I/O error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "warpkit: error: " << e.what() << "\n";
    return 3;
  }
}
