#include <bit>
#include <cmath>

#include "doctest.h"
#include "lavgap/exterior.hpp"
#include "lavgap/sampling.hpp"

using namespace lavgap;

namespace {

ExteriorElement randomElement(Rng& rng, int dim, int degree) {
  ExteriorElement e(dim, degree);
  const std::uint32_t total = 1u << dim;
  for (std::uint32_t m = 0; m < total; ++m) {
    if (std::popcount(m) != degree) continue;
    e.setCoefficient(MultiIndex(m), 2.0 * rng.uniform() - 1.0);
  }
  return e;
}

}  // namespace

TEST_CASE("basis wedge products") {
  auto e1 = ExteriorElement::basis(3, {1});
  auto e2 = ExteriorElement::basis(3, {2});
  auto w = wedge(e1, e2);
  CHECK(w.coefficient(MultiIndex::fromIndices({1, 2}, 3)) == doctest::Approx(1.0));

  // v ^ v = 0
  auto v = e1 + e2;
  CHECK(wedge(v, v).isZero());

  // (2 e1) ^ (3 e2^e3) = 6 e1^e2^e3
  auto a = 2.0 * ExteriorElement::basis(3, {1});
  auto b = 3.0 * ExteriorElement::basis(3, {2, 3});
  auto c = wedge(a, b);
  CHECK(c.coefficient(MultiIndex::fromIndices({1, 2, 3}, 3)) == doctest::Approx(6.0));
}

TEST_CASE("wedge degree overflow yields zero element") {
  auto a = ExteriorElement::basis(2, {1, 2});
  auto b = ExteriorElement::basis(2, {1});
  auto w = wedge(a, b);
  CHECK(w.degree() == 3);
  CHECK(w.isZero());
}

TEST_CASE("wedge dimension mismatch rejected") {
  auto a = ExteriorElement::basis(2, {1});
  auto b = ExteriorElement::basis(3, {1});
  CHECK_THROWS(wedge(a, b));
}

TEST_CASE("hodge star on R^3 basis") {
  auto h1 = hodge(ExteriorElement::basis(3, {1}));
  CHECK(h1.coefficient(MultiIndex::fromIndices({2, 3}, 3)) == doctest::Approx(1.0));
  auto h2 = hodge(ExteriorElement::basis(3, {2}));
  CHECK(h2.coefficient(MultiIndex::fromIndices({1, 3}, 3)) == doctest::Approx(-1.0));
}

TEST_CASE("double hodge sign, all N and degrees") {
  Rng rng(42);
  for (int dim = 1; dim <= 6; ++dim) {
    for (int k = 0; k <= dim; ++k) {
      auto f = randomElement(rng, dim, k);
      auto hh = hodge(hodge(f));
      const double sign = (k * (dim - k)) % 2 == 0 ? 1.0 : -1.0;
      auto diff = hh - sign * f;
      CHECK(diff.isZero(0.0));  // integer sign arithmetic: exact
    }
  }
}

TEST_CASE("hodge isometry") {
  Rng rng(7);
  for (int dim = 2; dim <= 6; ++dim) {
    for (int k = 0; k <= dim; ++k) {
      auto f = randomElement(rng, dim, k);
      CHECK(std::abs(hodge(f).norm() - f.norm()) <= 1e-12);
    }
  }
}

TEST_CASE("contraction examples") {
  // e1 -| (e1^e2) = e2
  auto r = contract(ExteriorElement::basis(3, {1}), ExteriorElement::basis(3, {1, 2}));
  CHECK(r.coefficient(MultiIndex::fromIndices({2}, 3)) == doctest::Approx(1.0));

  // scalar contraction: c -| f = c f
  auto c = ExteriorElement::scalar(3, 2.5);
  auto f = ExteriorElement::basis(3, {1, 3});
  auto cf = contract(c, f);
  CHECK(cf.coefficient(MultiIndex::fromIndices({1, 3}, 3)) == doctest::Approx(2.5));

  // l = k: f -| f = |f|^2
  Rng rng(3);
  auto g = randomElement(rng, 4, 2);
  auto gg = contract(g, g);
  CHECK(gg.coefficient(MultiIndex(0)) == doctest::Approx(g.normSq()));

  // l > k: zero
  auto z = contract(ExteriorElement::basis(3, {1, 2}), ExteriorElement::basis(3, {1}));
  CHECK(z.isZero());
}

TEST_CASE("adjointness of wedge and contraction") {
  Rng rng(11);
  int checked = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int dim = 2 + static_cast<int>(rng.next() % 5);  // 2..6
    const int k = static_cast<int>(rng.next() % (dim + 1));
    const int l = static_cast<int>(rng.next() % (k + 1));
    auto f = randomElement(rng, dim, k);
    auto g = randomElement(rng, dim, l);
    auto a = randomElement(rng, dim, k - l);
    const double lhs = inner(wedge(g, a), f);
    const double rhs = inner(a, contract(g, f));
    CHECK(std::abs(lhs - rhs) <= 1e-12);
    ++checked;
  }
  CHECK(checked == 1000);
}

TEST_CASE("decomposition identity for 1-vectors") {
  Rng rng(13);
  for (int trial = 0; trial < 1000; ++trial) {
    const int dim = 2 + static_cast<int>(rng.next() % 5);
    const int k = 1 + static_cast<int>(rng.next() % (dim - 1));
    auto w = randomElement(rng, dim, 1);
    auto v = randomElement(rng, dim, 1);
    auto f = randomElement(rng, dim, k);
    auto lhs = contract(w, wedge(v, f)) + wedge(v, contract(w, f));
    auto rhs = inner(w, v) * f;
    CHECK((lhs - rhs).isZero(1e-12));
  }
}

TEST_CASE("wedge antisymmetry") {
  Rng rng(17);
  for (int trial = 0; trial < 500; ++trial) {
    const int dim = 2 + static_cast<int>(rng.next() % 5);
    const int k = static_cast<int>(rng.next() % (dim + 1));
    const int l = static_cast<int>(rng.next() % (dim + 1 - k));
    auto f = randomElement(rng, dim, k);
    auto g = randomElement(rng, dim, l);
    const double sign = (k * l) % 2 == 0 ? 1.0 : -1.0;
    auto diff = wedge(f, g) - sign * wedge(g, f);
    CHECK(diff.isZero(1e-12));
  }
}

TEST_CASE("inner product basics") {
  auto e12 = ExteriorElement::basis(3, {1, 2});
  auto e13 = ExteriorElement::basis(3, {1, 3});
  CHECK(inner(e12, e12) == doctest::Approx(1.0));
  CHECK(inner(e12, e13) == doctest::Approx(0.0));
  Rng rng(23);
  auto f = randomElement(rng, 5, 3);
  CHECK(inner(f, f) == doctest::Approx(f.normSq()));
  CHECK(inner(f, f) >= 0.0);
  CHECK_THROWS(inner(e12, ExteriorElement::basis(3, {1})));
}

TEST_CASE("contraction is the hodge conjugate of the wedge") {
  // g -| f = (-1)^{(N-k)(k-l)} * (g ^ *f)
  Rng rng(29);
  for (int trial = 0; trial < 200; ++trial) {
    const int dim = 2 + static_cast<int>(rng.next() % 5);
    const int k = static_cast<int>(rng.next() % (dim + 1));
    const int l = static_cast<int>(rng.next() % (k + 1));
    auto f = randomElement(rng, dim, k);
    auto g = randomElement(rng, dim, l);
    auto direct = contract(g, f);
    auto viaHodge = hodge(wedge(g, hodge(f)));
    const double sign = ((dim - k) * (k - l)) % 2 == 0 ? 1.0 : -1.0;
    CHECK((direct - sign * viaHodge).isZero(1e-12));
  }
}

TEST_CASE("multi-index validation") {
  CHECK_THROWS(MultiIndex::fromIndices({2, 1}, 3));
  CHECK_THROWS(MultiIndex::fromIndices({0}, 3));
  CHECK_THROWS(MultiIndex::fromIndices({4}, 3));
  auto idx = MultiIndex::fromIndices({1, 3}, 3);
  CHECK(idx.degree() == 2);
  CHECK(idx.indices() == std::vector<int>{1, 3});
}
