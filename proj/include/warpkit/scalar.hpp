#pragma once

#include <boost/multiprecision/gmp.hpp>
#include <boost/multiprecision/eigen.hpp>
#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace warpkit {

using Rational = boost::multiprecision::number<boost::multiprecision::gmp_rational,
                                               boost::multiprecision::et_off>;

template <class S>
using Vec = Eigen::Matrix<S, Eigen::Dynamic, 1>;
template <class S>
using Mat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;

struct PreconditionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

template <class S>
struct ScalarTraits;

template <>
struct ScalarTraits<Rational> {
  static constexpr bool exact = true;
  static constexpr const char* name = "rational";
  static double to_double(const Rational& x) { return x.convert_to<double>(); }
  static Rational abs(const Rational& x) { return x < 0 ? Rational(-x) : x; }
  static bool eq(const Rational& a, const Rational& b) { return a == b; }
  static bool is_zero(const Rational& a) { return a == 0; }
  static std::string str(const Rational& x) { return x.str(); }
};

template <>
struct ScalarTraits<double> {
  static constexpr bool exact = false;
  static constexpr const char* name = "float64";
  // absolute, scaled by magnitude once values leave [-1,1]
  static constexpr double kEqTol = 1e-12;
  static double to_double(double x) { return x; }
  static double abs(double x) { return std::fabs(x); }
  static bool eq(double a, double b) {
    double scale = std::max({1.0, std::fabs(a), std::fabs(b)});
    return std::fabs(a - b) <= kEqTol * scale;
  }
  static bool is_zero(double a) { return std::fabs(a) <= kEqTol; }
  static std::string str(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
  }
};

// Parses "p/q", integers and decimals ("1.25", "-3e-2").
// Decimals become exact rationals in rational mode.
template <class S>
S parse_scalar(const std::string& s);

template <class S>
bool vec_eq(const Vec<S>& a, const Vec<S>& b) {
  if (a.size() != b.size()) return false;
  for (Eigen::Index i = 0; i < a.size(); ++i)
    if (!ScalarTraits<S>::eq(a[i], b[i])) return false;
  return true;
}

template <class S>
Vec<S> zeros(Eigen::Index n) {
  return Vec<S>::Zero(n);
}

template <class S>
double max_abs(const Vec<S>& v) {
  double m = 0;
  for (Eigen::Index i = 0; i < v.size(); ++i)
    m = std::max(m, std::fabs(ScalarTraits<S>::to_double(v[i])));
  return m;
}

template <class S>
bool all_zero(const Vec<S>& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (!ScalarTraits<S>::is_zero(v[i])) return false;
  return true;
}

template <class S>
S dot(const Vec<S>& a, const Vec<S>& b) {
  if (a.size() != b.size()) throw PreconditionError("dot: dimension mismatch");
  S r = 0;
  for (Eigen::Index i = 0; i < a.size(); ++i) r += a[i] * b[i];
  return r;
}

// cod x dom matrix applied to a dom-vector
template <class S>
Vec<S> lin_apply(const Mat<S>& L, const Vec<S>& v) {
  if (L.cols() != v.size())
    throw PreconditionError("lin_apply: dimension mismatch (dom " + std::to_string(L.cols()) +
                            ", vector " + std::to_string(v.size()) + ")");
  return L * v;
}

// tensor[c] is a dom1 x dom2 matrix; result_c = u^T tensor[c] v
template <class S>
struct BilMap {
  Eigen::Index dom1 = 0, dom2 = 0;
  std::vector<Mat<S>> tensor;

  BilMap() = default;
  BilMap(Eigen::Index d1, Eigen::Index d2, Eigen::Index cod)
      : dom1(d1), dom2(d2), tensor(cod, Mat<S>::Zero(d1, d2)) {}

  Eigen::Index cod() const { return static_cast<Eigen::Index>(tensor.size()); }
  S& at(Eigen::Index c, Eigen::Index i, Eigen::Index j) { return tensor[c](i, j); }
  const S& at(Eigen::Index c, Eigen::Index i, Eigen::Index j) const { return tensor[c](i, j); }
};

template <class S>
Vec<S> bil_apply(const BilMap<S>& B, const Vec<S>& u, const Vec<S>& v) {
  if (u.size() != B.dom1 || v.size() != B.dom2)
    throw PreconditionError("bil_apply: dimension mismatch");
  Vec<S> r(B.cod());
  for (Eigen::Index c = 0; c < B.cod(); ++c) r[c] = u.dot(B.tensor[c] * v);
  return r;
}

// (B(., .)) with arguments swapped: Bt(v, u) = B(u, v)
template <class S>
BilMap<S> bil_swap(const BilMap<S>& B) {
  BilMap<S> r(B.dom2, B.dom1, B.cod());
  for (Eigen::Index c = 0; c < B.cod(); ++c) r.tensor[c] = B.tensor[c].transpose();
  return r;
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}
  int uniform_int(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(eng_); }
  std::uint64_t next() { return eng_(); }
  std::mt19937_64& engine() { return eng_; }

 private:
  std::mt19937_64 eng_;
};

inline constexpr int kRandLo = -9;
inline constexpr int kRandHi = 9;

template <class S>
Vec<S> rand_vec(Eigen::Index n, Rng& rng) {
  Vec<S> v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = S(rng.uniform_int(kRandLo, kRandHi));
  return v;
}

template <class S>
Mat<S> rand_lin(Eigen::Index dom, Eigen::Index cod, Rng& rng) {
  Mat<S> m(cod, dom);
  for (Eigen::Index r = 0; r < cod; ++r)
    for (Eigen::Index c = 0; c < dom; ++c) m(r, c) = S(rng.uniform_int(kRandLo, kRandHi));
  return m;
}

template <class S>
BilMap<S> rand_bil(Eigen::Index dom1, Eigen::Index dom2, Eigen::Index cod, Rng& rng) {
  BilMap<S> b(dom1, dom2, cod);
  for (Eigen::Index c = 0; c < cod; ++c) b.tensor[c] = rand_lin<S>(dom2, dom1, rng);
  return b;
}

}  // namespace warpkit
