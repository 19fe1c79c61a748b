#pragma once

#include "warpkit/dvb.hpp"

#include <array>
#include <functional>
#include <string>
#include <vector>

namespace warpkit {

enum Slot : int { E1 = 0, E2, E3, E12, E13, E23, E123 };
inline constexpr std::array<const char*, 7> kSlotNames = {"e1",  "e2",  "e3",  "e12",
                                                          "e13", "e23", "e123"};

struct TvbShape {
  std::array<Eigen::Index, 7> d{};
  static TvbShape uniform(Eigen::Index n) { return {{n, n, n, n, n, n, n}}; }
  Eigen::Index operator[](int s) const { return d[s]; }
  bool operator==(const TvbShape&) const = default;
};

template <class S>
struct TvbElement {
  std::array<Vec<S>, 7> s;

  Vec<S>& operator[](int i) { return s[i]; }
  const Vec<S>& operator[](int i) const { return s[i]; }
  TvbShape shape() const {
    TvbShape sh;
    for (int i = 0; i < 7; ++i) sh.d[i] = s[i].size();
    return sh;
  }
};

// The three structures over the lower faces: (1,2) is q_{1,2}: E -> E_{1,2}, etc.
enum class Axis3 { A12, A13, A23 };

inline const char* axis_name(Axis3 a) {
  switch (a) {
    case Axis3::A12: return "(1,2)";
    case Axis3::A13: return "(1,3)";
    default: return "(2,3)";
  }
}

// slots of the lower face E_{i,j} that an (i,j)-operation holds fixed
inline std::array<int, 3> base_slots(Axis3 a) {
  switch (a) {
    case Axis3::A12: return {E1, E2, E12};
    case Axis3::A13: return {E1, E3, E13};
    default: return {E2, E3, E23};
  }
}

inline bool is_base_slot(Axis3 a, int slot) {
  for (int b : base_slots(a))
    if (b == slot) return true;
  return false;
}

template <class S>
bool tvb_equal(const TvbElement<S>& x, const TvbElement<S>& y) {
  for (int i = 0; i < 7; ++i)
    if (!vec_eq(x[i], y[i])) return false;
  return true;
}

template <class S>
std::string tvb_str(const TvbElement<S>& e) {
  std::string out = "(";
  for (int i = 0; i < 7; ++i) {
    if (i) out += "; ";
    for (Eigen::Index k = 0; k < e[i].size(); ++k) {
      if (k) out += ",";
      out += ScalarTraits<S>::str(e[i][k]);
    }
  }
  return out + ")";
}

template <class S>
TvbElement<S> tvb_zero(const TvbShape& sh) {
  TvbElement<S> e;
  for (int i = 0; i < 7; ++i) e[i] = zeros<S>(sh[i]);
  return e;
}

template <class S>
TvbElement<S> tvb_add(Axis3 ax, const TvbElement<S>& e, const TvbElement<S>& f) {
  if (!(e.shape() == f.shape())) throw PreconditionError("tvb_add: shape mismatch");
  for (int b : base_slots(ax))
    if (!vec_eq(e[b], f[b]))
      throw PreconditionError(std::string("tvb_add over ") + axis_name(ax) + ": slot " +
                              kSlotNames[b] + " differs");
  TvbElement<S> r = e;
  for (int i = 0; i < 7; ++i)
    if (!is_base_slot(ax, i)) r[i] = e[i] + f[i];
  return r;
}

template <class S>
TvbElement<S> tvb_scalar(Axis3 ax, const S& t, const TvbElement<S>& e) {
  TvbElement<S> r = e;
  for (int i = 0; i < 7; ++i)
    if (!is_base_slot(ax, i)) r[i] = t * e[i];
  return r;
}

template <class S>
TvbElement<S> tvb_sub(Axis3 ax, const TvbElement<S>& e, const TvbElement<S>& f) {
  return tvb_add(ax, e, tvb_scalar(ax, S(-1), f));
}

// element with only the listed slots nonzero; covers 0^ over edges, face
// elements and core elements, and ultracore elements regarded in E
template <class S>
TvbElement<S> tvb_with(const TvbShape& sh, std::initializer_list<std::pair<int, Vec<S>>> slots) {
  TvbElement<S> e = tvb_zero<S>(sh);
  for (const auto& [i, v] : slots) {
    if (v.size() != sh[i])
      throw PreconditionError(std::string("tvb_with: wrong dimension for slot ") + kSlotNames[i]);
    e[i] = v;
  }
  return e;
}

// A lower face element, e.g. for face (2,3): (x=e2, y=e3, core=e23).
struct LowerFace {
  Axis3 face;
  int x, y, core;
};
inline LowerFace lower_face(Axis3 a) {
  auto b = base_slots(a);
  return {a, b[0], b[1], b[2]};
}

template <class S>
struct FaceElement {
  Axis3 face;
  Vec<S> x, y, core;
  DvbElement<S> as_dvb() const { return {x, y, core}; }
};

template <class S>
FaceElement<S> project(Axis3 face, const TvbElement<S>& e) {
  auto f = lower_face(face);
  return {face, e[f.x], e[f.y], e[f.core]};
}

// 0^ over a lower face element
template <class S>
TvbElement<S> face_zero(const TvbShape& sh, const FaceElement<S>& fe) {
  auto f = lower_face(fe.face);
  TvbElement<S> e = tvb_zero<S>(sh);
  e[f.x] = fe.x;
  e[f.y] = fe.y;
  e[f.core] = fe.core;
  return e;
}

template <class S>
TvbElement<S> edge_zero(const TvbShape& sh, int edge, const Vec<S>& v) {
  TvbElement<S> e = tvb_zero<S>(sh);
  e[edge] = v;
  return e;
}

// 0^_w for w in the core E12, E13 or E23 of a lower face
template <class S>
TvbElement<S> core_zero(const TvbShape& sh, int coreSlot, const Vec<S>& w) {
  return edge_zero(sh, coreSlot, w);
}

template <class S>
TvbElement<S> ultra(const TvbShape& sh, const Vec<S>& u) {
  return edge_zero(sh, E123, u);
}

// ---------------------------------------------------------------------------
// Core double vector bundles: BF = E_{23,1}, LR = E_{13,2}, UD = E_{12,3}.

enum class CorePair { BF, LR, UD };

inline const char* pair_name(CorePair p) {
  switch (p) {
    case CorePair::BF: return "BF";
    case CorePair::LR: return "LR";
    default: return "UD";
  }
}

inline int core_base_slot(CorePair p) { return p == CorePair::BF ? E1 : p == CorePair::LR ? E2 : E3; }
inline int core_w_slot(CorePair p) { return p == CorePair::BF ? E23 : p == CorePair::LR ? E13 : E12; }

template <class S>
struct CoreDvbElement {
  CorePair which;
  Vec<S> base, w, u;
};

template <class S>
TvbElement<S> embed(const TvbShape& sh, const CoreDvbElement<S>& k) {
  TvbElement<S> e = tvb_zero<S>(sh);
  e[core_base_slot(k.which)] = k.base;
  e[core_w_slot(k.which)] = k.w;
  e[E123] = k.u;
  return e;
}

template <class S>
bool core_equal(const CoreDvbElement<S>& a, const CoreDvbElement<S>& b) {
  return a.which == b.which && vec_eq(a.base, b.base) && vec_eq(a.w, b.w) && vec_eq(a.u, b.u);
}

// ---------------------------------------------------------------------------
// Difference calculus.

struct IdentityCheck {
  std::string name;
  bool ok;
  std::string detail;
};

template <class S>
IdentityCheck check_identity(const std::string& name, const std::function<TvbElement<S>()>& lhs,
                             const std::function<TvbElement<S>()>& rhs) {
  try {
    TvbElement<S> l = lhs(), r = rhs();
    if (tvb_equal(l, r)) return {name, true, ""};
    return {name, false, "lhs " + tvb_str(l) + " != rhs " + tvb_str(r)};
  } catch (const PreconditionError& ex) {
    return {name, false, ex.what()};
  }
}

inline bool all_ok(const std::vector<IdentityCheck>& v) {
  for (const auto& c : v)
    if (!c.ok) return false;
  return true;
}

inline std::string first_failure(const std::vector<IdentityCheck>& v) {
  for (const auto& c : v)
    if (!c.ok) return c.name + ": " + c.detail;
  return "";
}

struct IdentityFailure : std::logic_error {
  using std::logic_error::logic_error;
};

template <class S>
struct SameOutlineResult {
  Vec<S> u;
  std::vector<IdentityCheck> checks;
  std::vector<Vec<S>> extracted;  // ultracore element read off each identity
};

template <class S>
void require_same_outline(const TvbElement<S>& e, const TvbElement<S>& f) {
  if (!(e.shape() == f.shape())) throw PreconditionError("same outline: shape mismatch");
  for (int i = 0; i < E123; ++i)
    if (!vec_eq(e[i], f[i]))
      throw PreconditionError(std::string("same outline: slot ") + kSlotNames[i] + " differs");
}

// The six expansions of e - e' over each structure.
template <class S>
SameOutlineResult<S> same_outline_checks(const TvbElement<S>& e, const TvbElement<S>& f) {
  require_same_outline(e, f);
  const TvbShape sh = e.shape();
  SameOutlineResult<S> res;
  res.u = e[E123] - f[E123];
  const Vec<S>& u = res.u;
  TvbElement<S> U = ultra(sh, u);
  auto z = [&](Axis3 face) { return face_zero(sh, project(face, e)); };
  auto ez = [&](int edge) { return edge_zero(sh, edge, e[edge]); };
  using A = Axis3;
  struct Row {
    const char* name;
    A sub;
    std::function<TvbElement<S>()> rhs;
  };
  std::vector<Row> rows = {
      {"(1,3) via e1", A::A13, [&] { return tvb_add(A::A12, z(A::A13), tvb_add(A::A23, ez(E1), U)); }},
      {"(1,3) via e3", A::A13, [&] { return tvb_add(A::A23, z(A::A13), tvb_add(A::A12, ez(E3), U)); }},
      {"(1,2) via e1", A::A12, [&] { return tvb_add(A::A13, z(A::A12), tvb_add(A::A23, ez(E1), U)); }},
      {"(1,2) via e2", A::A12, [&] { return tvb_add(A::A23, z(A::A12), tvb_add(A::A13, ez(E2), U)); }},
      {"(2,3) via e3", A::A23, [&] { return tvb_add(A::A13, z(A::A23), tvb_add(A::A12, ez(E3), U)); }},
      {"(2,3) via e2", A::A23, [&] { return tvb_add(A::A12, z(A::A23), tvb_add(A::A13, ez(E2), U)); }},
  };
  for (const auto& row : rows) {
    A ax = row.sub;
    res.checks.push_back(check_identity<S>(
        std::string("same outline ") + row.name, [&] { return tvb_sub(ax, e, f); }, row.rhs));
    res.extracted.push_back(tvb_sub(ax, e, f)[E123]);
  }
  return res;
}

template <class S>
Vec<S> same_outline_diff(const TvbElement<S>& e, const TvbElement<S>& f) {
  SameOutlineResult<S> r = same_outline_checks(e, f);
  if (!all_ok(r.checks)) throw IdentityFailure(first_failure(r.checks));
  for (const auto& x : r.extracted)
    if (!vec_eq(x, r.u)) throw IdentityFailure("same outline: extracted ultracore elements differ");
  return r.u;
}

// FR: same Front and Right faces, k in E_{12,3}
// FD: same Front and Down faces, k in E_{13,2}
// RD: same Right and Down faces, k in E_{23,1}
enum class TwoFace { FR, FD, RD };

inline const char* two_face_name(TwoFace c) {
  return c == TwoFace::FR ? "FR" : c == TwoFace::FD ? "FD" : "RD";
}

template <class S>
struct TwoFaceResult {
  CoreDvbElement<S> k;
  Vec<S> w;  // lower-face core difference
  std::vector<IdentityCheck> checks;
};

template <class S>
TwoFaceResult<S> two_face_checks(TwoFace c, const TvbElement<S>& e, const TvbElement<S>& f) {
  if (!(e.shape() == f.shape())) throw PreconditionError("two_face_diff: shape mismatch");
  using A = Axis3;
  // first two faces agree; the third is where the lower-face core differs
  A same1, same2, differ;
  CorePair which;
  switch (c) {
    case TwoFace::FR: same1 = A::A23, same2 = A::A13, differ = A::A12, which = CorePair::UD; break;
    case TwoFace::FD: same1 = A::A23, same2 = A::A12, differ = A::A13, which = CorePair::LR; break;
    default: same1 = A::A13, same2 = A::A12, differ = A::A23, which = CorePair::BF; break;
  }
  for (A face : {same1, same2})
    for (int s : base_slots(face))
      if (!vec_eq(e[s], f[s]))
        throw PreconditionError(std::string("two_face_diff ") + two_face_name(c) + ": slot " +
                                kSlotNames[s] + " differs");
  const TvbShape sh = e.shape();
  TwoFaceResult<S> res;
  res.w = dvb_core_diff(project(differ, e).as_dvb(), project(differ, f).as_dvb());
  res.k = {which, e[core_base_slot(which)], res.w, e[E123] - f[E123]};
  TvbElement<S> K = embed(sh, res.k);
  // e -_{a} e' = k +_{b} 0^_{q_a(e)} for the two defined subtractions a
  for (A sub : {same1, same2}) {
    A other = sub == same1 ? same2 : same1;
    res.checks.push_back(check_identity<S>(
        std::string(two_face_name(c)) + " e -" + axis_name(sub) + " e'",
        [&] { return tvb_sub(sub, e, f); },
        [&] { return tvb_add(other, K, face_zero(sh, project(sub, e))); }));
  }
  // q(k) on the differing face is the core element w
  FaceElement<S> qk = project(differ, K);
  bool proj_ok = all_zero(qk.x) && all_zero(qk.y) && vec_eq(qk.core, res.w);
  res.checks.push_back({std::string(two_face_name(c)) + " q(k) = w", proj_ok, proj_ok ? "" : "projection mismatch"});
  return res;
}

template <class S>
CoreDvbElement<S> two_face_diff(TwoFace c, const TvbElement<S>& e, const TvbElement<S>& f) {
  TwoFaceResult<S> r = two_face_checks(c, e, f);
  if (!all_ok(r.checks)) throw IdentityFailure(first_failure(r.checks));
  return r.k;
}

// 0^_low -_axis 0^_low2 for lower-face elements differing by a core element w.
template <class S>
TvbElement<S> zero_section_diff(const TvbShape& sh, Axis3 axis, const FaceElement<S>& low,
                                const FaceElement<S>& low2) {
  if (low.face != low2.face) throw PreconditionError("zero_section_diff: different faces");
  if (axis == low.face)
    throw PreconditionError("zero_section_diff: axis must differ from the face of the elements");
  Vec<S> w = dvb_core_diff(low.as_dvb(), low2.as_dvb());
  TvbElement<S> r = tvb_sub(axis, face_zero(sh, low), face_zero(sh, low2));
  auto lf = lower_face(low.face);
  auto ab = base_slots(axis);
  int shared = -1;
  for (int s : {lf.x, lf.y})
    for (int t : ab)
      if (s == t) shared = s;
  Axis3 other = Axis3::A12;
  for (Axis3 a : {Axis3::A12, Axis3::A13, Axis3::A23})
    if (a != axis && a != low.face) other = a;
  const Vec<S>& edge = shared == lf.x ? low.x : low.y;
  TvbElement<S> expect = tvb_add(other, core_zero(sh, lf.core, w), edge_zero(sh, shared, edge));
  if (!tvb_equal(r, expect))
    throw IdentityFailure(std::string("zero_section_diff over ") + axis_name(axis) + ": " +
                          tvb_str(r) + " != " + tvb_str(expect));
  return r;
}

// ---------------------------------------------------------------------------
// Linear double sections and grids.

// X: front -> back over X(m) in E1, acting on (e2, e3, e23)
// Y: right -> left over Y(m) in E2, acting on (e1, e3, e13)
// Z: down -> up over Z(m) in E3, acting on (e1, e2, e12)
enum class Direction { X, Y, Z };

template <class S>
struct LinearDoubleSection {
  Direction direction;
  Vec<S> base;
  Mat<S> edge1, edge2, core;
  BilMap<S> twist;
};

inline Axis3 source_face(Direction d) {
  return d == Direction::X ? Axis3::A23 : d == Direction::Y ? Axis3::A13 : Axis3::A12;
}
inline int base_slot(Direction d) { return d == Direction::X ? E1 : d == Direction::Y ? E2 : E3; }

template <class S>
void check_lds(const TvbShape& sh, const LinearDoubleSection<S>& L) {
  auto f = lower_face(source_face(L.direction));
  int b = base_slot(L.direction);
  // edge1 : f.x -> slot(f.x, b), edge2 : f.y -> slot(f.y, b)
  auto pair_slot = [](int i, int j) {
    int lo = std::min(i, j), hi = std::max(i, j);
    if (lo == E1 && hi == E2) return int(E12);
    if (lo == E1 && hi == E3) return int(E13);
    return int(E23);
  };
  bool ok = L.base.size() == sh[b] && L.edge1.cols() == sh[f.x] &&
            L.edge1.rows() == sh[pair_slot(f.x, b)] && L.edge2.cols() == sh[f.y] &&
            L.edge2.rows() == sh[pair_slot(f.y, b)] && L.core.cols() == sh[f.core] &&
            L.core.rows() == sh[E123] && L.twist.dom1 == sh[f.x] && L.twist.dom2 == sh[f.y] &&
            L.twist.cod() == sh[E123];
  if (!ok) throw PreconditionError("linear double section: shape mismatch");
}

template <class S>
TvbElement<S> lds_eval(const TvbShape& sh, const LinearDoubleSection<S>& L, const FaceElement<S>& fe) {
  if (fe.face != source_face(L.direction))
    throw PreconditionError("lds_eval: element is not in the source face of the section");
  check_lds(sh, L);
  TvbElement<S> e = tvb_zero<S>(sh);
  auto f = lower_face(fe.face);
  e[f.x] = fe.x;
  e[f.y] = fe.y;
  e[f.core] = fe.core;
  e[base_slot(L.direction)] = L.base;
  Vec<S> img1 = lin_apply(L.edge1, fe.x), img2 = lin_apply(L.edge2, fe.y);
  switch (L.direction) {
    case Direction::X: e[E12] = img1; e[E13] = img2; break;
    case Direction::Y: e[E12] = img1; e[E23] = img2; break;
    case Direction::Z: e[E13] = img1; e[E23] = img2; break;
  }
  e[E123] = lin_apply(L.core, fe.core) + bil_apply(L.twist, fe.x, fe.y);
  return e;
}

// Edge sections: X2 : E2 -> E12, X3 : E3 -> E13, Y1 : E1 -> E12, Y3 : E3 -> E23,
// Z1 : E1 -> E13, Z2 : E2 -> E23.
template <class S>
FaceElement<S> lds_edge(const LinearDoubleSection<S>& L, int edge, const Vec<S>& v) {
  auto f = lower_face(source_face(L.direction));
  const Mat<S>& m = edge == f.x ? L.edge1 : L.edge2;
  if (edge != f.x && edge != f.y) throw PreconditionError("lds_edge: edge not in source face");
  int b = base_slot(L.direction);
  Vec<S> img = lin_apply(m, v);
  Axis3 face;
  int lo = std::min(edge, b);
  int hi = std::max(edge, b);
  face = (lo == E1 && hi == E2) ? Axis3::A12 : (lo == E1 && hi == E3) ? Axis3::A13 : Axis3::A23;
  FaceElement<S> out{face, {}, {}, img};
  if (lo == edge) { out.x = v; out.y = L.base; }
  else { out.x = L.base; out.y = v; }
  return out;
}

// The core morphism: e.g. for Z, e12 |-> (Z, e12, z12 e12) in E_{12,3}.
template <class S>
struct CoreSection {
  CorePair which;
  Vec<S> base;
  Mat<S> map;
  CoreDvbElement<S> operator()(const Vec<S>& w) const { return {which, base, w, lin_apply(map, w)}; }
};

template <class S>
CoreSection<S> lds_core(const LinearDoubleSection<S>& L) {
  CorePair p = L.direction == Direction::X ? CorePair::BF
             : L.direction == Direction::Y ? CorePair::LR : CorePair::UD;
  return {p, L.base, L.core};
}

template <class S>
struct Grid3 {
  TvbShape shape;
  LinearDoubleSection<S> x, y, z;
};

template <class S>
struct Routes {
  TvbShape shape;
  TvbElement<S> ZYX, YZX, XZY, ZXY, YXZ, XYZ;
};

template <class S>
Routes<S> routes(const Grid3<S>& g) {
  const TvbShape& sh = g.shape;
  for (const auto* L : {&g.x, &g.y, &g.z}) check_lds(sh, *L);
  Routes<S> r;
  r.shape = sh;
  const Vec<S>&X = g.x.base, &Y = g.y.base, &Z = g.z.base;
  r.ZYX = lds_eval(sh, g.z, lds_edge(g.y, E1, X));
  r.YZX = lds_eval(sh, g.y, lds_edge(g.z, E1, X));
  r.XZY = lds_eval(sh, g.x, lds_edge(g.z, E2, Y));
  r.ZXY = lds_eval(sh, g.z, lds_edge(g.x, E2, Y));
  r.YXZ = lds_eval(sh, g.y, lds_edge(g.x, E3, Z));
  r.XYZ = lds_eval(sh, g.x, lds_edge(g.y, E3, Z));
  return r;
}

// Edge values and lower-face core differences read from the routes:
// w12 = Y1(X) - X2(Y), w13 = X3(Z) - Z1(X), w23 = Z2(Y) - Y3(Z).
template <class S>
struct GridData {
  Vec<S> e1, e2, e3, w12, w13, w23;
};

template <class S>
GridData<S> grid_data(const Routes<S>& r) {
  using A = Axis3;
  GridData<S> d;
  d.e1 = r.ZYX[E1];
  d.e2 = r.ZYX[E2];
  d.e3 = r.ZYX[E3];
  d.w12 = dvb_core_diff(project(A::A12, r.ZYX).as_dvb(), project(A::A12, r.ZXY).as_dvb());
  d.w13 = dvb_core_diff(project(A::A13, r.XZY).as_dvb(), project(A::A13, r.ZYX).as_dvb());
  d.w23 = dvb_core_diff(project(A::A23, r.ZYX).as_dvb(), project(A::A23, r.YZX).as_dvb());
  return d;
}

template <class S>
struct FaceWarpPair {
  CoreDvbElement<S> lambda, k;
  std::vector<IdentityCheck> checks;
};

// lambda from the upper-face route pair, k from the lower-face pair
template <class S>
FaceWarpPair<S> face_warp_pair(const Routes<S>& r, CorePair p) {
  FaceWarpPair<S> out;
  auto take = [&](TwoFace c, const TvbElement<S>& a, const TvbElement<S>& b, CoreDvbElement<S>& dst) {
    TwoFaceResult<S> t = two_face_checks(c, a, b);
    out.checks.insert(out.checks.end(), t.checks.begin(), t.checks.end());
    dst = t.k;
  };
  switch (p) {
    case CorePair::BF:
      take(TwoFace::RD, r.ZYX, r.YZX, out.lambda);
      take(TwoFace::RD, r.XZY, r.XYZ, out.k);
      break;
    case CorePair::LR:
      take(TwoFace::FD, r.XZY, r.ZXY, out.lambda);
      take(TwoFace::FD, r.YXZ, r.YZX, out.k);
      break;
    case CorePair::UD:
      take(TwoFace::FR, r.YXZ, r.XYZ, out.lambda);
      take(TwoFace::FR, r.ZYX, r.ZXY, out.k);
      break;
  }
  bool same = vec_eq(out.lambda.base, out.k.base) && vec_eq(out.lambda.w, out.k.w);
  out.checks.push_back({std::string(pair_name(p)) + " lambda/k outlines", same,
                        same ? "" : "lambda and k have different outlines"});
  return out;
}

template <class S>
struct UltrawarpResult {
  Vec<S> u;
  std::vector<IdentityCheck> checks;
};

// The four descriptions of the warp of each pair, with the ultracore element u.
template <class S>
std::vector<IdentityCheck> description_checks(const Routes<S>& r, CorePair p, const Vec<S>& u) {
  using A = Axis3;
  const TvbShape& sh = r.shape;
  GridData<S> d = grid_data(r);
  auto E = [&](int s, const Vec<S>& v) { return edge_zero(sh, s, v); };
  TvbElement<S> U = ultra(sh, u);
  TvbElement<S> W12 = core_zero(sh, E12, d.w12), W13 = core_zero(sh, E13, d.w13),
                W23 = core_zero(sh, E23, d.w23);
  TvbElement<S> nW12 = core_zero<S>(sh, E12, -d.w12), nW13 = core_zero<S>(sh, E13, -d.w13),
                nW23 = core_zero<S>(sh, E23, -d.w23);
  TvbElement<S> Z1 = E(E1, d.e1), Z2 = E(E2, d.e2), Z3 = E(E3, d.e3);
  const TvbElement<S>*a, *b, *c, *dd;
  switch (p) {
    case CorePair::BF: a = &r.ZYX, b = &r.YZX, c = &r.XZY, dd = &r.XYZ; break;
    case CorePair::LR: a = &r.XZY, b = &r.ZXY, c = &r.YXZ, dd = &r.YZX; break;
    default: a = &r.YXZ, b = &r.XYZ, c = &r.ZYX, dd = &r.ZXY; break;
  }
  struct Row {
    std::string name;
    A inner, outer;
    std::function<TvbElement<S>()> rhs;
  };
  // "0^_w +_{i/j} u" stands for two equal sums; both are produced.
  std::vector<Row> rows;
  auto both = [&](const std::string& n, A in, A out, std::function<TvbElement<S>(A)> mk, A s1, A s2) {
    rows.push_back({n + "/" + axis_name(s1), in, out, [mk, s1] { return mk(s1); }});
    rows.push_back({n + "/" + axis_name(s2), in, out, [mk, s2] { return mk(s2); }});
  };
  switch (p) {
    case CorePair::BF:
      both("1a", A::A12, A::A13, [&](A s) { return tvb_add(A::A23, Z1, tvb_add(s, W12, U)); }, A::A13, A::A23);
      rows.push_back({"1b", A::A12, A::A23, [&] { return tvb_add(A::A13, tvb_add(A::A13, W12, W23), tvb_add(A::A13, Z2, U)); }});
      both("1c", A::A13, A::A12, [&](A s) { return tvb_add(A::A23, Z1, tvb_add(s, nW13, U)); }, A::A12, A::A23);
      rows.push_back({"1d", A::A13, A::A23, [&] { return tvb_add(A::A12, tvb_add(A::A12, nW13, W23), tvb_add(A::A12, Z3, U)); }});
      break;
    case CorePair::LR:
      both("2a", A::A12, A::A23, [&](A s) { return tvb_add(A::A13, Z2, tvb_add(s, nW12, U)); }, A::A13, A::A23);
      rows.push_back({"2b", A::A12, A::A13, [&] { return tvb_add(A::A23, tvb_add(A::A23, W13, nW12), tvb_add(A::A23, Z1, U)); }});
      both("2c", A::A23, A::A12, [&](A s) { return tvb_add(A::A13, Z2, tvb_add(s, W23, U)); }, A::A12, A::A13);
      rows.push_back({"2d", A::A23, A::A13, [&] { return tvb_add(A::A12, tvb_add(A::A12, W23, W13), tvb_add(A::A12, Z3, U)); }});
      break;
    case CorePair::UD:
      both("3a", A::A13, A::A23, [&](A s) { return tvb_add(A::A12, Z3, tvb_add(s, W13, U)); }, A::A12, A::A23);
      rows.push_back({"3b", A::A13, A::A12, [&] { return tvb_add(A::A23, tvb_add(A::A23, W13, W12), tvb_add(A::A23, Z1, U)); }});
      both("3c", A::A23, A::A13, [&](A s) { return tvb_add(A::A12, Z3, tvb_add(s, nW23, U)); }, A::A12, A::A13);
      rows.push_back({"3d", A::A23, A::A12, [&] { return tvb_add(A::A13, tvb_add(A::A13, nW23, W12), tvb_add(A::A13, Z2, U)); }});
      break;
  }
  std::vector<IdentityCheck> out;
  for (const auto& row : rows) {
    A in = row.inner, o = row.outer;
    out.push_back(check_identity<S>(
        "description " + row.name,
        [&] { return tvb_sub(o, tvb_sub(in, *a, *b), tvb_sub(in, *c, *dd)); }, row.rhs));
  }
  return out;
}

// u_i from lambda_i - k_i (same outline), with all supporting identities recorded.
template <class S>
UltrawarpResult<S> ultrawarp_checked(const Routes<S>& r, CorePair p) {
  UltrawarpResult<S> res;
  FaceWarpPair<S> fw = face_warp_pair(r, p);
  res.checks = fw.checks;
  if (!all_ok(fw.checks)) {
    res.u = zeros<S>(r.shape[E123]);
    return res;
  }
  SameOutlineResult<S> so = same_outline_checks(embed(r.shape, fw.lambda), embed(r.shape, fw.k));
  res.checks.insert(res.checks.end(), so.checks.begin(), so.checks.end());
  for (std::size_t i = 0; i < so.extracted.size(); ++i) {
    bool ok = vec_eq(so.extracted[i], so.u);
    res.checks.push_back({"common ultracore element #" + std::to_string(i), ok, ok ? "" : "differs"});
  }
  res.u = so.u;
  auto desc = description_checks(r, p, res.u);
  res.checks.insert(res.checks.end(), desc.begin(), desc.end());
  return res;
}

template <class S>
Vec<S> ultrawarp_intrinsic(const Routes<S>& r, CorePair p) {
  UltrawarpResult<S> res = ultrawarp_checked(r, p);
  if (!all_ok(res.checks)) throw IdentityFailure(first_failure(res.checks));
  return res.u;
}

template <class S>
Vec<S> ultrawarp_intrinsic(const Grid3<S>& g, CorePair p) {
  return ultrawarp_intrinsic(routes(g), p);
}

template <class S>
Vec<S> ultrawarp_closed(const Grid3<S>& g, CorePair p) {
  const auto &x = g.x, &y = g.y, &z = g.z;
  const Vec<S>&X = x.base, &Y = y.base, &Z = z.base;
  // x.edge1 = x2, x.edge2 = x3, x.core = x23; y: y1, y3, y13; z: z1, z2, z12
  switch (p) {
    case CorePair::BF:
      return z.core * (y.edge1 * X) - y.core * (z.edge1 * X) + bil_apply(z.twist, X, Y) -
             bil_apply(y.twist, X, Z) - x.core * (z.edge2 * Y - y.edge2 * Z);
    case CorePair::LR:
      return x.core * (z.edge2 * Y) - z.core * (x.edge1 * Y) + bil_apply(x.twist, Y, Z) -
             bil_apply(z.twist, X, Y) - y.core * (x.edge2 * Z - z.edge1 * X);
    default:
      return y.core * (x.edge2 * Z) - x.core * (y.edge2 * Z) + bil_apply(y.twist, X, Z) -
             bil_apply(x.twist, Y, Z) - z.core * (y.edge1 * X - x.edge1 * Y);
  }
}

template <class S>
struct UltrawarpTriple {
  Vec<S> u1, u2, u3;
};

template <class S>
struct WarpTheoremResult {
  UltrawarpTriple<S> u;
  Vec<S> residual;
  std::vector<IdentityCheck> checks;
};

template <class S>
WarpTheoremResult<S> warp_theorem(const Routes<S>& r) {
  WarpTheoremResult<S> out;
  UltrawarpResult<S> a = ultrawarp_checked(r, CorePair::BF), b = ultrawarp_checked(r, CorePair::LR),
                     c = ultrawarp_checked(r, CorePair::UD);
  for (auto* x : {&a, &b, &c}) out.checks.insert(out.checks.end(), x->checks.begin(), x->checks.end());
  out.u = {a.u, b.u, c.u};
  out.residual = a.u + b.u + c.u;
  return out;
}

template <class S>
WarpTheoremResult<S> warp_theorem(const Grid3<S>& g) {
  return warp_theorem(routes(g));
}

// ---------------------------------------------------------------------------
// Replay of the proof chain: (1b) rewritten through the Left-face interchange
// law down to 0^_{w23} +13 0^_{e2} +13 0^_{w12} -13 (u3 +13 u2).

template <class S>
struct ProofReport {
  std::vector<IdentityCheck> steps;
  Vec<S> finalU;  // ultracore element of the last line
  Vec<S> u1, u2, u3;
  bool ok() const { return all_ok(steps); }
};

template <class S>
ProofReport<S> proof_replay(const Routes<S>& r) {
  using A = Axis3;
  const TvbShape& sh = r.shape;
  ProofReport<S> rep;
  rep.finalU = zeros<S>(sh[E123]);
  auto fail = [&](const std::string& step, const std::string& why) { rep.steps.push_back({step, false, why}); };

  UltrawarpResult<S> U1 = ultrawarp_checked(r, CorePair::BF), U2 = ultrawarp_checked(r, CorePair::LR),
                     U3 = ultrawarp_checked(r, CorePair::UD);
  rep.u1 = U1.u, rep.u2 = U2.u, rep.u3 = U3.u;
  FaceWarpPair<S> p2 = face_warp_pair(r, CorePair::LR), p3 = face_warp_pair(r, CorePair::UD);
  if (!all_ok(U1.checks) || !all_ok(U2.checks) || !all_ok(U3.checks)) {
    fail("setup", "ultrawarp bookkeeping failed: " + first_failure(U1.checks) +
                      first_failure(U2.checks) + first_failure(U3.checks));
    return rep;
  }
  GridData<S> d = grid_data(r);
  const TvbElement<S> lam2 = embed(sh, p2.lambda), k2 = embed(sh, p2.k), lam3 = embed(sh, p3.lambda),
                      k3 = embed(sh, p3.k);
  auto add = [](A a, const TvbElement<S>& x, const TvbElement<S>& y) { return tvb_add(a, x, y); };
  auto sub = [](A a, const TvbElement<S>& x, const TvbElement<S>& y) { return tvb_sub(a, x, y); };
  const TvbElement<S> z23 = face_zero(sh, project(A::A23, r.ZYX));   // over e_{2,3} = Z2(Y)
  const TvbElement<S> z23p = face_zero(sh, project(A::A23, r.XYZ));  // over e'_{2,3} = Y3(Z)
  const TvbElement<S> W12 = core_zero(sh, E12, d.w12), W23 = core_zero(sh, E23, d.w23);
  const TvbElement<S> Ze2 = edge_zero(sh, E2, d.e2);
  const TvbElement<S> u2 = ultra(sh, rep.u2), u3 = ultra(sh, rep.u3);

  auto step = [&](const std::string& name, std::function<TvbElement<S>()> l, std::function<TvbElement<S>()> rr) {
    rep.steps.push_back(check_identity<S>(name, l, rr));
  };

  auto line1b = [&] { return sub(A::A23, sub(A::A12, r.ZYX, r.YZX), sub(A::A12, r.XZY, r.XYZ)); };
  auto lineS1 = [&] { return sub(A::A12, sub(A::A23, r.ZYX, r.XZY), sub(A::A23, r.YZX, r.XYZ)); };
  step("step 1: Left-face interchange", line1b, lineS1);

  step("step 2: ZYX-XZY through ZXY", [&] { return sub(A::A23, r.ZYX, r.XZY); },
       [&] { return sub(A::A23, sub(A::A23, r.ZYX, r.ZXY), sub(A::A23, r.XZY, r.ZXY)); });
  step("step 2: ZYX-ZXY = 0^ +13 k3", [&] { return sub(A::A23, r.ZYX, r.ZXY); },
       [&] { return add(A::A13, z23, k3); });
  step("step 2: XZY-ZXY = 0^ +12 lambda2", [&] { return sub(A::A23, r.XZY, r.ZXY); },
       [&] { return add(A::A12, z23, lam2); });

  step("step 3: YZX-XYZ through YXZ", [&] { return sub(A::A23, r.YZX, r.XYZ); },
       [&] { return sub(A::A23, sub(A::A23, r.YXZ, r.XYZ), sub(A::A23, r.YXZ, r.YZX)); });
  step("step 3: YXZ-XYZ = 0^' +13 lambda3", [&] { return sub(A::A23, r.YXZ, r.XYZ); },
       [&] { return add(A::A13, z23p, lam3); });
  step("step 3: YXZ-YZX = 0^' +12 k2", [&] { return sub(A::A23, r.YXZ, r.YZX); },
       [&] { return add(A::A12, z23p, k2); });

  std::vector<std::pair<std::string, std::function<TvbElement<S>()>>> chain = {
      {"step 4: substitute step 2 and step 3", [&] {
         return sub(A::A12, sub(A::A23, add(A::A13, z23, k3), add(A::A12, z23, lam2)),
                    sub(A::A23, add(A::A13, z23p, lam3), add(A::A12, z23p, k2)));
       }},
      {"step 4: Left-face interchange of outer operations", [&] {
         return sub(A::A23, sub(A::A12, add(A::A13, z23, k3), add(A::A13, z23p, lam3)),
                    sub(A::A12, add(A::A12, z23, lam2), add(A::A12, z23p, k2)));
       }},
      {"step 4: Back-face interchange in the first term", [&] {
         return sub(A::A23, add(A::A13, sub(A::A12, z23, z23p), sub(A::A12, k3, lam3)),
                    add(A::A12, sub(A::A12, z23, z23p), sub(A::A12, lam2, k2)));
       }},
      {"step 4: zero-section differences and the u3, u2 descriptions", [&] {
         return sub(A::A23, add(A::A13, add(A::A13, W23, Ze2), sub(A::A13, W12, u3)),
                    add(A::A12, add(A::A13, W23, Ze2), add(A::A13, Ze2, u2)));
       }},
      {"step 4: Back-face interchange in the second group", [&] {
         return sub(A::A23, add(A::A13, W23, sub(A::A13, add(A::A13, Ze2, W12), u3)),
                    add(A::A13, add(A::A12, W23, u2), add(A::A12, Ze2, Ze2)));
       }},
      {"step 4: zeros over the base of the addition", [&] {
         return sub(A::A23, add(A::A13, W23, sub(A::A13, add(A::A13, Ze2, W12), u3)),
                    add(A::A13, add(A::A13, W23, u2), Ze2));
       }},
      {"step 4: second group in an ordinary vector bundle", [&] {
         return sub(A::A23, add(A::A13, W23, sub(A::A13, add(A::A13, Ze2, W12), u3)),
                    add(A::A13, W23, add(A::A13, Ze2, u2)));
       }},
      {"step 4: Up-face interchange", [&] {
         return add(A::A13, sub(A::A23, W23, W23),
                    sub(A::A23, sub(A::A13, add(A::A13, Ze2, W12), u3), add(A::A13, Ze2, u2)));
       }},
      {"step 4: Up-face interchange again", [&] {
         return add(A::A13, add(A::A13, W23, sub(A::A23, Ze2, Ze2)),
                    sub(A::A23, sub(A::A13, W12, u3), u2));
       }},
      {"step 4: (1,3) to (2,3) for the u3 term", [&] {
         return add(A::A13, add(A::A13, W23, Ze2), sub(A::A23, sub(A::A23, W12, u3), u2));
       }},
      {"step 4: collect u3 + u2", [&] {
         return add(A::A13, add(A::A13, W23, Ze2), sub(A::A23, W12, add(A::A23, u3, u2)));
       }},
      {"step 4: final form", [&] {
         return sub(A::A13, add(A::A13, add(A::A13, W23, Ze2), W12), add(A::A13, u3, u2));
       }},
  };
  step(chain[0].first, lineS1, chain[0].second);
  for (std::size_t i = 1; i < chain.size(); ++i) step(chain[i].first, chain[i - 1].second, chain[i].second);

  try {
    TvbElement<S> last = chain.back().second();
    rep.finalU = last[E123];
    TvbElement<S> expectLast = tvb_with<S>(sh, {{E2, d.e2}, {E12, d.w12}, {E23, d.w23}, {E123, Vec<S>(-(rep.u2 + rep.u3))}});
    bool shapeOk = tvb_equal(last, expectLast);
    rep.steps.push_back({"final element is (0, e2, 0, w12, 0, w23, -(u2+u3))", shapeOk, shapeOk ? "" : tvb_str(last)});
    TvbElement<S> first = line1b();
    bool eq1 = vec_eq(first[E123], rep.u1);
    rep.steps.push_back({"(1b) carries u1", eq1, eq1 ? "" : "ultracore of (1b) differs from u1"});
    bool eq = vec_eq(rep.finalU, rep.u1);
    rep.steps.push_back({"-(u2+u3) = u1", eq, eq ? "" : "final ultracore element differs from u1"});
  } catch (const PreconditionError& ex) {
    fail("final extraction", ex.what());
  }
  return rep;
}

template <class S>
ProofReport<S> proof_replay(const Grid3<S>& g) {
  return proof_replay(routes(g));
}

// ---------------------------------------------------------------------------

template <class S>
LinearDoubleSection<S> rand_lds(const TvbShape& sh, Direction dir, Rng& rng) {
  LinearDoubleSection<S> L;
  L.direction = dir;
  switch (dir) {
    case Direction::X:
      L.base = rand_vec<S>(sh[E1], rng);
      L.edge1 = rand_lin<S>(sh[E2], sh[E12], rng);
      L.edge2 = rand_lin<S>(sh[E3], sh[E13], rng);
      L.core = rand_lin<S>(sh[E23], sh[E123], rng);
      L.twist = rand_bil<S>(sh[E2], sh[E3], sh[E123], rng);
      break;
    case Direction::Y:
      L.base = rand_vec<S>(sh[E2], rng);
      L.edge1 = rand_lin<S>(sh[E1], sh[E12], rng);
      L.edge2 = rand_lin<S>(sh[E3], sh[E23], rng);
      L.core = rand_lin<S>(sh[E13], sh[E123], rng);
      L.twist = rand_bil<S>(sh[E1], sh[E3], sh[E123], rng);
      break;
    case Direction::Z:
      L.base = rand_vec<S>(sh[E3], rng);
      L.edge1 = rand_lin<S>(sh[E1], sh[E13], rng);
      L.edge2 = rand_lin<S>(sh[E2], sh[E23], rng);
      L.core = rand_lin<S>(sh[E12], sh[E123], rng);
      L.twist = rand_bil<S>(sh[E1], sh[E2], sh[E123], rng);
      break;
  }
  return L;
}

template <class S>
Grid3<S> rand_grid(const TvbShape& sh, Rng& rng) {
  Grid3<S> g;
  g.shape = sh;
  g.x = rand_lds<S>(sh, Direction::X, rng);
  g.y = rand_lds<S>(sh, Direction::Y, rng);
  g.z = rand_lds<S>(sh, Direction::Z, rng);
  return g;
}

inline TvbShape rand_shape(int maxDim, Rng& rng) {
  TvbShape sh;
  for (int i = 0; i < 7; ++i) sh.d[i] = rng.uniform_int(1, maxDim);
  return sh;
}

template <class S>
TvbElement<S> rand_tvb_element(const TvbShape& sh, Rng& rng) {
  TvbElement<S> e;
  for (int i = 0; i < 7; ++i) e[i] = rand_vec<S>(sh[i], rng);
  return e;
}

}  // namespace warpkit
