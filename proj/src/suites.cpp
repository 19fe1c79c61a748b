#include "warpkit/cli.hpp"
#include "warpkit/connection.hpp"
#include "warpkit/duality.hpp"
#include "warpkit/io.hpp"
#include "warpkit/jet.hpp"
#include "warpkit/polynomial.hpp"
#include "warpkit/tvb.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>

namespace warpkit {

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {"dvb",        "tvb",       "proof",   "jet",
                                                 "jacobi",     "connection", "curvature", "duality"};
  return names;
}

bool is_suite(const std::string& s) {
  const auto& n = suite_names();
  return s == "all" || std::find(n.begin(), n.end(), s) != n.end();
}

ScalarMode default_mode(const std::string& suite) {
  if (suite == "jet" || suite == "jacobi" || suite == "connection" || suite == "curvature")
    return ScalarMode::float64;
  return ScalarMode::rational;
}

const char* mode_name(ScalarMode m) { return m == ScalarMode::rational ? "rational" : "float64"; }

namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::uint64_t trial_seed(std::uint64_t seed, const std::string& suite, int trial) {
  std::uint64_t h = 1469598103934665603ull;
  for (char c : suite) h = (h ^ static_cast<unsigned char>(c)) * 1099511628211ull;
  return splitmix(splitmix(seed) ^ h ^ splitmix(static_cast<std::uint64_t>(trial) + 1));
}

std::string fmt_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

// Records the first failing step of a trial and the largest residual.
template <class S>
struct Trial {
  explicit Trial(double t) : tol(t) {}
  double tol;
  bool ok = true;
  std::string step, detail;
  double residual = 0;

  void fail(const std::string& st, const std::string& det) {
    if (ok) {
      ok = false;
      step = st;
      detail = det;
    }
  }
  void check(bool cond, const std::string& st, const std::string& det = "identity does not hold") {
    if (!cond) fail(st, det);
  }
  void checks(const std::vector<IdentityCheck>& v, const std::string& prefix) {
    for (const auto& c : v)
      if (!c.ok) {
        fail(prefix + ": " + c.name, c.detail);
        return;
      }
  }
  // exact mode needs an exact zero, float mode the tolerance
  void close(const Vec<S>& diff, const std::string& st) {
    double r = max_abs<S>(diff);
    residual = std::max(residual, r);
    bool good = ScalarTraits<S>::exact ? all_zero(diff) : r <= tol;
    if (!good) fail(st, "residual " + fmt_double(r) + (ScalarTraits<S>::exact ? " (expected exact zero)" : " exceeds tolerance " + fmt_double(tol)));
  }
  void close(const S& diff, const std::string& st) {
    Vec<S> v(1);
    v[0] = diff;
    close(v, st);
  }
  void close_jet(const JetPoint<S>& a, const JetPoint<S>& b, const std::string& st) {
    for (unsigned m = 0; m < (1u << a.order()); ++m) close(Vec<S>(a.coeff(m) - b.coeff(m)), st);
  }
  void close_core(const CoreDvbElement<S>& a, const CoreDvbElement<S>& b, const std::string& st) {
    close(Vec<S>(a.base - b.base), st + " (base)");
    close(Vec<S>(a.w - b.w), st + " (w)");
    close(Vec<S>(a.u - b.u), st + " (u)");
  }
};

template <class S>
using TrialFn = std::function<void(Trial<S>&, Rng&)>;

template <class S>
SuiteReport sweep(const RunConfig& cfg, const std::string& suite, int trials, const TrialFn<S>& fn,
                  const std::string& casePrefix = "trial-") {
  auto t0 = std::chrono::steady_clock::now();
  SuiteReport rep;
  rep.suite = suite;
  rep.seed = cfg.seed;
  rep.trials = trials;
  double maxRes = 0;
  for (int i = 0; i < trials; ++i) {
    Trial<S> t(cfg.tolerance);
    Rng rng(trial_seed(cfg.seed, suite, i));
    try {
      fn(t, rng);
    } catch (const std::exception& e) {
      t.fail("exception", e.what());
    }
    maxRes = std::max(maxRes, t.residual);
    if (t.ok) {
      ++rep.passed;
    } else {
      char id[32];
      std::snprintf(id, sizeof id, "%06d", i);
      rep.failures.push_back({casePrefix + id, t.step, t.detail});
    }
  }
  std::sort(rep.failures.begin(), rep.failures.end(),
            [](const Failure& a, const Failure& b) { return a.caseId < b.caseId; });
  rep.maxResidual = maxRes;
  rep.exactZero = ScalarTraits<S>::exact && maxRes == 0;
  auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0).count();
  rep.elapsedMs = cfg.timing ? static_cast<long long>(ms) : 0;
  return rep;
}

int rand_dim(const RunConfig& cfg, Rng& rng, int cap = 3) { return rng.uniform_int(1, std::min(cfg.maxDim, cap)); }

void no_input(const RunConfig& cfg, const std::string& suite) {
  if (cfg.inputPath) throw UsageError("suite '" + suite + "' takes no --input");
}

// ---------------------------------------------------------------------------

template <class S>
SuiteReport suite_dvb(const RunConfig& cfg) {
  no_input(cfg, "dvb");
  return sweep<S>(cfg, "dvb", cfg.trials, [&](Trial<S>& t, Rng& rng) {
    DvbShape sh{rand_dim(cfg, rng, cfg.maxDim), rand_dim(cfg, rng, cfg.maxDim), rand_dim(cfg, rng, cfg.maxDim)};
    Grid2<S> g = rand_grid2<S>(sh, rng);
    Vec<S> w = warp2(g);
    t.close(Vec<S>(w - warp2_closed(g)), "warp = phi Y - psi X");
    t.close(Vec<S>(warp2_reversed(g) + w), "reversed grid negates the warp");
    BoltSection<S> bolt{rand_lin<S>(sh.dimA, sh.dimC, rng)};
    Grid2<S> g2 = g;
    g2.eta = add_bolt(g.eta, bolt);
    t.close(Vec<S>(warp2(g2) - w - warp2_bolt(sh, g.xi, bolt)), "warp is additive over a bolt");
    // interchange law
    Vec<S> a = rand_vec<S>(sh.dimA, rng), a2 = rand_vec<S>(sh.dimA, rng);
    Vec<S> b = rand_vec<S>(sh.dimB, rng), b2 = rand_vec<S>(sh.dimB, rng);
    DvbElement<S> d1{a, b, rand_vec<S>(sh.dimC, rng)}, d2{a, b2, rand_vec<S>(sh.dimC, rng)},
        d3{a2, b, rand_vec<S>(sh.dimC, rng)}, d4{a2, b2, rand_vec<S>(sh.dimC, rng)};
    DvbElement<S> l = dvb_add(DvbAxis::overB, dvb_add(DvbAxis::overA, d1, d2), dvb_add(DvbAxis::overA, d3, d4));
    DvbElement<S> r = dvb_add(DvbAxis::overA, dvb_add(DvbAxis::overB, d1, d3), dvb_add(DvbAxis::overB, d2, d4));
    t.check(dvb_equal(l, r), "interchange law");
  });
}

template <class S>
SuiteReport suite_tvb(const RunConfig& cfg, bool proof) {
  const std::string name = proof ? "proof" : "tvb";
  std::optional<Grid3<S>> fixture;
  if (cfg.inputPath) fixture = grid_from_json<S>(load_json_file(*cfg.inputPath));
  auto body = [&](Trial<S>& t, Rng& rng) {
    Grid3<S> g = fixture ? *fixture : rand_grid<S>(rand_shape(std::min(cfg.maxDim, 3), rng), rng);
    Routes<S> r = routes(g);
    WarpTheoremResult<S> w = warp_theorem(r);
    t.checks(w.checks, "ultrawarp");
    if (!proof) {
      t.close(w.residual, "u1 + u2 + u3 = 0");
      t.close(Vec<S>(w.u.u1 - ultrawarp_closed(g, CorePair::BF)), "u1 intrinsic = closed form");
      t.close(Vec<S>(w.u.u2 - ultrawarp_closed(g, CorePair::LR)), "u2 intrinsic = closed form");
      t.close(Vec<S>(w.u.u3 - ultrawarp_closed(g, CorePair::UD)), "u3 intrinsic = closed form");
      if (fixture) return;
      // difference calculus on random pairs with prescribed common faces
      const TvbShape& sh = g.shape;
      TvbElement<S> e = rand_tvb_element<S>(sh, rng);
      TvbElement<S> f = e;
      f[E123] = rand_vec<S>(sh[E123], rng);
      SameOutlineResult<S> so = same_outline_checks(e, f);
      t.checks(so.checks, "same outline");
      t.close(Vec<S>(so.u - (e[E123] - f[E123])), "same outline: common ultracore element");
      struct Case {
        TwoFace c;
        int differs;
      };
      for (Case c : {Case{TwoFace::FR, E12}, Case{TwoFace::FD, E13}, Case{TwoFace::RD, E23}}) {
        TvbElement<S> f2 = e;
        f2[c.differs] = rand_vec<S>(sh[c.differs], rng);
        f2[E123] = rand_vec<S>(sh[E123], rng);
        TwoFaceResult<S> tf = two_face_checks(c.c, e, f2);
        t.checks(tf.checks, std::string("two faces ") + two_face_name(c.c));
      }
    } else {
      ProofReport<S> pr = proof_replay(r);
      t.checks(pr.steps, "proof step");
      t.close(Vec<S>(pr.finalU - w.u.u1), "chain ends in u1");
      t.close(Vec<S>(pr.finalU + w.u.u2 + w.u.u3), "chain ends in -(u2 + u3)");
    }
  };
  if (fixture) return sweep<S>(cfg, name, 1, body, "fixture-");
  return sweep<S>(cfg, name, cfg.trials, body);
}

template <class S>
JetPoint<S> rand_jet(int dim, int order, Rng& rng) {
  JetPoint<S> v = JetPoint<S>::constant(order, rand_grid_point<S>(dim, rng));
  for (unsigned m = 1; m < (1u << order); ++m) v.set_coeff(m, rand_grid_point<S>(dim, rng));
  return v;
}

template <class S>
SuiteReport suite_jet(const RunConfig& cfg) {
  std::optional<FieldTriple<S>> fields;
  if (cfg.inputPath) fields = field_triple_from_json<S>(load_json_file(*cfg.inputPath));
  return sweep<S>(cfg, "jet", cfg.trials, [&](Trial<S>& t, Rng& rng) {
    int p = fields ? fields->X.dim : rand_dim(cfg, rng);
    PolyField<S> X = fields ? fields->X : rand_poly_field<S>(p, 3, 3, rng);
    PolyField<S> Y = fields ? fields->Y : rand_poly_field<S>(p, 3, 3, rng);
    Vec<S> m = rand_grid_point<S>(p, rng);
    auto Xs = X.as_smooth_map(), Ys = Y.as_smooth_map();
    t.close(Vec<S>(bracket_via_warp(Xs, Ys, m) - poly_bracket(X, Y).at(m)), "bracket via warp");
    // complete lift against (X, DX v)
    Vec<S> v = rand_grid_point<S>(p, rng);
    JetPoint<S> xv = concat(JetPoint<S>::constant(0, m), JetPoint<S>::constant(0, v));
    JetPoint<S> cl = complete_lift(Xs)(xv);
    Vec<S> expect(2 * p);
    expect << X.at(m), lin_apply(X.jacobian(m), v);
    Vec<S> got(2 * p);
    got << cl.coeff(0);
    t.close(Vec<S>(got - expect), "complete lift = (X, DX v)");
    // canonical involution
    JetPoint<S> j2 = rand_jet<S>(p, 2, rng);
    PolyMap<S> f = rand_poly_map<S>(p, p, 2, 3, rng);
    auto fs = f.as_smooth_map();
    t.close_jet(fs(involution(1, 2, j2)), involution(1, 2, fs(j2)), "naturality of J");
    t.close_jet(involution(1, 2, involution(1, 2, j2)), j2, "J o J = id");
    // tangent of the warp on a chart grid
    int dA = rand_dim(cfg, rng), dB = rand_dim(cfg, rng), dC = rand_dim(cfg, rng);
    PolyMap<S> gx = rand_poly_map<S>(p, dA, 2, 2, rng), gy = rand_poly_map<S>(p, dB, 2, 2, rng),
               gphi = rand_poly_map<S>(p, dC * dB, 2, 2, rng), gpsi = rand_poly_map<S>(p, dC * dA, 2, 2, rng);
    ChartGrid2<S> cg{p, dA, dB, dC, gx.as_smooth_map(), gy.as_smooth_map(), gphi.as_smooth_map(), gpsi.as_smooth_map()};
    TangentWarpResult<S> tw = tangent_warp_check(cg, m, v);
    t.close(Vec<S>(tw.viaTangentGrid - tw.viaTw), "tangent grid warp = T(warp)");
  });
}

template <class S>
SuiteReport suite_jacobi(const RunConfig& cfg) {
  std::optional<FieldTriple<S>> fields;
  if (cfg.inputPath) fields = field_triple_from_json<S>(load_json_file(*cfg.inputPath));
  return sweep<S>(cfg, "jacobi", cfg.trials, [&](Trial<S>& t, Rng& rng) {
    int p = fields ? fields->X.dim : std::min(cfg.maxDim, 3);
    FieldTriple<S> F = fields ? *fields
                              : FieldTriple<S>{rand_poly_field<S>(p, 3, 3, rng), rand_poly_field<S>(p, 3, 3, rng),
                                               rand_poly_field<S>(p, 3, 3, rng)};
    Vec<S> m = rand_grid_point<S>(p, rng);
    JacobiResult<S> J = jacobi_via_ultrawarps(F.X.as_smooth_map(), F.Y.as_smooth_map(), F.Z.as_smooth_map(), m);
    t.checks(J.checks, "ultrawarp");
    t.close(J.residual, "Jacobi sum");
    t.close(Vec<S>(J.u1 - poly_bracket(F.X, poly_bracket(F.Y, F.Z)).at(m)), "u1 = [X,[Y,Z]]");
    t.close(Vec<S>(J.u2 - poly_bracket(F.Y, poly_bracket(F.Z, F.X)).at(m)), "u2 = [Y,[Z,X]]");
    t.close(Vec<S>(J.u3 - poly_bracket(F.Z, poly_bracket(F.X, F.Y)).at(m)), "u3 = [Z,[X,Y]]");
  });
}

template <class S>
PolyConnectionData<S> rand_connection_data(const RunConfig& cfg, Rng& rng) {
  PolyConnectionData<S> d;
  d.p = rand_dim(cfg, rng, 2);
  d.q = rand_dim(cfg, rng, 2);
  d.gamma = rand_poly_map<S>(d.p, d.p * d.q * d.q, 1, 2, rng).comps;
  d.X = rand_poly_field<S>(d.p, 2, 2, rng);
  d.Z = rand_poly_field<S>(d.p, 2, 2, rng);
  d.mu = rand_poly_map<S>(d.p, d.q, 2, 2, rng);
  return d;
}

template <class S>
SuiteReport suite_connection(const RunConfig& cfg, bool curvature) {
  const std::string name = curvature ? "curvature" : "connection";
  std::optional<PolyConnectionData<S>> data;
  if (cfg.inputPath) data = connection_from_json<S>(load_json_file(*cfg.inputPath));
  return sweep<S>(cfg, name, cfg.trials, [&](Trial<S>& t, Rng& rng) {
    PolyConnectionData<S> d = data ? *data : rand_connection_data<S>(cfg, rng);
    Connection<S> c = d.connection();
    T2aGrid<S> g(c, d.X.as_smooth_map(), d.Z.as_smooth_map(), d.mu.as_smooth_map());
    Vec<S> m = rand_grid_point<S>(d.p, rng);
    if (!curvature) {
      WarpCheck<S> wc = connection_warp_check(c, g.Z, g.mu, m);
      t.close(Vec<S>(wc.viaWarp - wc.expected), "warp of (T(mu), Z^H) = nabla_Z mu");
      Vec<S> vb = rand_grid_point<S>(d.p, rng), al = rand_grid_point<S>(d.q, rng), vu = rand_grid_point<S>(d.p, rng);
      FaceWarpsT2A<S> fw = face_warps_T2A(g, m, vb, al, vu), fc = face_warps_T2A_closed(g, m, vb, al, vu);
      t.close(Vec<S>(fw.down - fc.down), "Down face = nabla_X mu");
      t.close(Vec<S>(fw.front - fc.front), "Front face = -nabla_Z mu");
      t.close(Vec<S>(fw.right - fc.right), "Right face = [Z,X]");
      t.close_core(fw.back, fc.back, "Back face = -T(nabla_Z mu)");
      t.close_core(fw.left, fc.left, "Left face = [Z^H,X^H]");
      t.close_core(fw.up, fc.up, "Up face = T(nabla_X mu)");
      LrUltrawarp<S> lr = lr_ultrawarp(g, m);
      t.checks(lr.checks, "Left-Right ultrawarp");
      t.close(Vec<S>(lr.recombinationDefect.reshaped()), "[Z^H,X^H] = [Z,X]^H + bolt");
      t.close(lr.additivityDefect, "warp is additive over the bolt");
      t.close(Vec<S>((lr.bolt - lr.curvature).reshaped()), "bolt = R(Z,X)");
      t.close(Vec<S>(lr.intrinsic - lr.viaBolt), "u2 intrinsic = bolt decomposition");
      t.close(Vec<S>(lr.intrinsic - lr.closed), "u2 = -nabla_[Z,X] mu + R mu");
    } else {
      T2aTheoremResult<S> th = t2a_warp_theorem(g, m);
      t.checks(th.checks, "ultrawarp");
      t.close(th.residual, "u1 + u2 + u3 = 0");
      t.close(Vec<S>(th.u.u1 - th.expected.u1), "u1 = -nabla_X nabla_Z mu");
      t.close(Vec<S>(th.u.u2 - th.expected.u2), "u2 = -nabla_[Z,X] mu + R mu");
      t.close(Vec<S>(th.u.u3 - th.expected.u3), "u3 = nabla_Z nabla_X mu");
      Vec<S> Rmu = curvature_tensor(c, g.Z, g.X, m) * g.mu.at(m);
      t.close(Vec<S>(curvature_from_warps(g, m) - Rmu), "curvature from warps = R(Z,X) mu");
    }
  });
}

template <class S>
SuiteReport suite_duality(const RunConfig& cfg) {
  no_input(cfg, "duality");
  return sweep<S>(cfg, "duality", cfg.trials, [&](Trial<S>& t, Rng& rng) {
    DvbShape sh{rand_dim(cfg, rng, cfg.maxDim), rand_dim(cfg, rng, cfg.maxDim), rand_dim(cfg, rng, cfg.maxDim)};
    Grid2<S> g = rand_grid2<S>(sh, rng);
    Vec<S> kappa = rand_vec<S>(sh.dimC, rng);
    PairingWarp<S> pw = warp_via_pairing(g, kappa);
    t.close(pw.viaZA - pw.ellWarp, "pairing via Z_A = l_warp");
    t.close(pw.viaZB - pw.ellWarp, "pairing via Z_B = l_warp");
    t.close(pw.orthogonality, "<Z_B^-1(eta^sqcap), eta(X)> = 0");
    DualAElement<S> Phi{rand_vec<S>(sh.dimA, rng), kappa, rand_vec<S>(sh.dimB, rng)};
    DualBElement<S> Psi{rand_vec<S>(sh.dimB, rng), kappa, rand_vec<S>(sh.dimA, rng)};
    S pd = pair_duals(Phi, Psi);
    t.close(pd - pair_duals_via(Phi, Psi, rand_vec<S>(sh.dimC, rng)), "duals pairing is independent of c");
    t.close(pair_C(iso_Z_A(Phi), Psi) - pd, "Z_A defining identity");
    t.close(pair_C(iso_Z_B(Psi), Phi) - pd, "Z_B defining identity");
    t.close(pair_C(sqcap_lift(g.eta, kappa), Phi) - ell(g.eta, Phi), "eta^sqcap pairs as l_eta");
    t.close(pair_C(sqcap_lift(g.xi, kappa), Psi) - ell(g.xi, Psi), "xi^sqcap pairs as l_xi");
    DualAElement<S> coreElt{zeros<S>(sh.dimA), zeros<S>(sh.dimC), rand_vec<S>(sh.dimB, rng)};
    t.close(ell(g.eta, coreElt) - dot(coreElt.beta, g.eta.Y), "l_eta on the core is l_Y");

    // chart-level identities
    const int p = rand_dim(cfg, rng), q = rand_dim(cfg, rng);
    PolyField<S> X = rand_poly_field<S>(p, 2, 3, rng), Y = rand_poly_field<S>(p, 2, 3, rng);
    Vec<S> m = rand_grid_point<S>(p, rng), pi = rand_grid_point<S>(p, rng);
    ScalarCheck<S> h = hamiltonian_bracket_check(X.as_smooth_map(), Y.as_smooth_map(), m, pi);
    t.close(h.value - h.expected, "<dl_Y, H_{l_X}> = l_[X,Y]");
    Connection<S> c{p, q, rand_poly_map<S>(p, p * q * q, 1, 2, rng).as_smooth_map()};
    PolyMap<S> mu = rand_poly_map<S>(p, q, 2, 2, rng), phi = rand_poly_map<S>(p, q, 2, 2, rng);
    Vec<S> phim = rand_grid_point<S>(q, rng);
    ScalarCheck<S> cp = connection_pairing_check(c, X.as_smooth_map(), mu.as_smooth_map(), m, phim);
    t.close(cp.value - cp.expected, "X^H*(l_mu) = l_{nabla_X mu}");
    ScalarCheck<S> dc = dual_connection_check(c, X.as_smooth_map(), phi.as_smooth_map(), mu.as_smooth_map(), m);
    t.close(dc.value - dc.expected, "dual connection identity");
    CovectorWarpCheck<S> mx = mx_warp_check(phi.as_smooth_map(), mu.as_smooth_map(), m);
    t.close(Vec<S>(mx.warp - mx.expected), "warp of (dl_phi, R o dl_mu) = -d<phi, mu>");
    CotangentDualElement<S> F{m, rand_vec<S>(q, rng), rand_vec<S>(p, rng), rand_vec<S>(q, rng)};
    Vec<S> xdot = rand_vec<S>(p, rng);
    TangentA<S> Ya{m, F.thetaKappa, xdot, rand_vec<S>(q, rng)}, Xc{m, F.kappa, xdot, rand_vec<S>(q, rng)};
    t.close(reversal_characterization_defect(F, Ya, Xc), "reversal characterization");
  });
}

template <class S>
SuiteReport dispatch(const RunConfig& cfg, const std::string& s) {
  if (s == "dvb") return suite_dvb<S>(cfg);
  if (s == "tvb") return suite_tvb<S>(cfg, false);
  if (s == "proof") return suite_tvb<S>(cfg, true);
  if (s == "jet") return suite_jet<S>(cfg);
  if (s == "jacobi") return suite_jacobi<S>(cfg);
  if (s == "connection") return suite_connection<S>(cfg, false);
  if (s == "curvature") return suite_connection<S>(cfg, true);
  if (s == "duality") return suite_duality<S>(cfg);
  throw UsageError("unknown suite '" + s + "'");
}

}  // namespace

SuiteReport run_suite(const RunConfig& cfg, const std::string& suite) {
  ScalarMode mode = cfg.scalarMode.value_or(default_mode(suite));
  try {
    return mode == ScalarMode::rational ? dispatch<Rational>(cfg, suite) : dispatch<double>(cfg, suite);
  } catch (const InputError& e) {
    throw UsageError(e.what());
  }
}

std::vector<SuiteReport> run(const RunConfig& cfg) {
  validate(cfg);
  std::vector<SuiteReport> out;
  if (cfg.suite == "all") {
    if (cfg.inputPath) throw UsageError("--input cannot be combined with --suite all");
    for (const auto& s : suite_names()) out.push_back(run_suite(cfg, s));
  } else {
    out.push_back(run_suite(cfg, cfg.suite));
  }
  return out;
}

}  // namespace warpkit
