#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "warpkit/scalar.hpp"

using namespace warpkit;
using Q = Rational;

namespace {
Vec<Q> vq(std::initializer_list<int> xs) {
  Vec<Q> v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (int x : xs) v[i++] = x;
  return v;
}
}  // namespace

TEST_CASE("lin_apply on small matrices") {
  Mat<Q> a(1, 1);
  a << 2;
  CHECK(lin_apply(a, vq({3})) == vq({6}));
  Mat<Q> id = Mat<Q>::Identity(2, 2);
  CHECK(lin_apply(id, vq({4, -5})) == vq({4, -5}));
  Mat<Q> m(2, 2);
  m << 1, 2, 3, 4;
  CHECK(lin_apply(m, vq({1, 1})) == vq({3, 7}));
  CHECK_THROWS_AS(lin_apply(m, vq({1})), PreconditionError);
}

TEST_CASE("bil_apply contracts both arguments") {
  BilMap<Q> z(2, 2, 1);
  CHECK(bil_apply(z, vq({1, 2}), vq({3, 4})) == vq({0}));
  BilMap<Q> s(1, 1, 1);
  s.at(0, 0, 0) = 29;
  CHECK(bil_apply(s, vq({1}), vq({1})) == vq({29}));
  BilMap<Q> b(2, 2, 1);
  b.at(0, 0, 1) = 1;
  CHECK(bil_apply(b, vq({2, 0}), vq({0, 3})) == vq({6}));
  CHECK(bil_apply(bil_swap(b), vq({0, 3}), vq({2, 0})) == vq({6}));
}

TEST_CASE("random generators are seeded and bounded") {
  Rng r1(5), r2(5);
  CHECK(rand_lin<Q>(1, 1, r1) == rand_lin<Q>(1, 1, r2));
  CHECK(rand_bil<Q>(2, 3, 2, r1).tensor == rand_bil<Q>(2, 3, 2, r2).tensor);
  Rng r(11);
  for (int t = 0; t < 200; ++t) {
    Mat<Q> m = rand_lin<Q>(2, 3, r);
    REQUIRE(m.rows() == 3);
    REQUIRE(m.cols() == 2);
    for (Eigen::Index i = 0; i < m.size(); ++i) {
      CHECK(m.data()[i] >= kRandLo);
      CHECK(m.data()[i] <= kRandHi);
    }
  }
}

TEST_CASE("scalar parsing") {
  CHECK(parse_scalar<Q>("3/4") == Q(3) / 4);
  CHECK(parse_scalar<Q>("-7") == Q(-7));
  CHECK(parse_scalar<Q>("1.25") == Q(5) / 4);
  CHECK(parse_scalar<Q>("-3e-2") == Q(-3) / 100);
  CHECK(parse_scalar<double>("1/8") == 0.125);
  CHECK(parse_scalar<double>("2.5") == 2.5);
  CHECK_THROWS(parse_scalar<Q>("abc"));
  CHECK_THROWS(parse_scalar<Q>("1/0"));
}

TEST_CASE("rational arithmetic is lossless") {
  Q third = Q(1) / 3;
  CHECK(third + third + third == Q(1));
  CHECK(ScalarTraits<Q>::is_zero(third * 3 - 1));
  CHECK(ScalarTraits<Q>::str(Q(-6) / 4) == "-3/2");
}

TEST_CASE("float equality scales with magnitude") {
  CHECK(ScalarTraits<double>::eq(0.1 + 0.2, 0.3));
  CHECK(ScalarTraits<double>::eq(1e6 + 1e-7, 1e6));
  CHECK_FALSE(ScalarTraits<double>::eq(1.0, 1.0 + 1e-9));
  CHECK(ScalarTraits<double>::is_zero(1e-13));
  CHECK_FALSE(ScalarTraits<double>::is_zero(1e-11));
}

TEST_CASE("dot checks dimensions") {
  CHECK(dot(vq({1, 2}), vq({3, 4})) == Q(11));
  CHECK_THROWS_AS(dot(vq({1}), vq({1, 2})), PreconditionError);
}
