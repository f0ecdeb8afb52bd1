#include "lavgap/exterior.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace lavgap {

MultiIndex MultiIndex::fromIndices(std::span<const int> indices, int dim) {
  std::uint32_t bits = 0;
  int prev = 0;
  for (int i : indices) {
    if (i <= prev) throw std::invalid_argument("multi-index not strictly increasing");
    if (i < 1 || i > dim) throw std::invalid_argument("multi-index entry out of [1, N]");
    bits |= 1u << (i - 1);
    prev = i;
  }
  return MultiIndex(bits);
}

MultiIndex MultiIndex::fromIndices(std::initializer_list<int> indices, int dim) {
  std::vector<int> v(indices);
  return fromIndices(std::span<const int>(v), dim);
}

int MultiIndex::degree() const { return std::popcount(bits_); }

std::vector<int> MultiIndex::indices() const {
  std::vector<int> out;
  for (std::uint32_t b = bits_; b;) {
    int j = std::countr_zero(b);
    out.push_back(j + 1);
    b &= b - 1;
  }
  return out;
}

std::string MultiIndex::toString() const {
  std::ostringstream os;
  os << '(';
  bool first = true;
  for (int i : indices()) {
    if (!first) os << ',';
    os << i;
    first = false;
  }
  os << ')';
  return os.str();
}

bool lexLess(std::uint32_t a, std::uint32_t b) {
  // Compare ascending index lists entry by entry.
  while (a && b) {
    int ia = std::countr_zero(a);
    int ib = std::countr_zero(b);
    if (ia != ib) return ia < ib;
    a &= a - 1;
    b &= b - 1;
  }
  return a == 0 && b != 0;
}

int mergeSign(std::uint32_t a, std::uint32_t b) {
  // Inversions between the two ascending lists: pairs (i in a, j in b)
  // with i > j.
  int inversions = 0;
  for (std::uint32_t bb = b; bb;) {
    int j = std::countr_zero(bb);
    std::uint32_t higher = a >> (j + 1);
    inversions += std::popcount(higher);
    bb &= bb - 1;
  }
  return (inversions & 1) ? -1 : 1;
}

ExteriorElement::ExteriorElement(int dim, int degree) : dim_(dim), degree_(degree) {
  if (dim < 0 || dim > 30) throw std::invalid_argument("ambient dimension out of range");
  if (degree < 0) throw std::invalid_argument("negative form degree");
}

ExteriorElement ExteriorElement::basis(int dim, std::initializer_list<int> indices) {
  MultiIndex idx = MultiIndex::fromIndices(indices, dim);
  ExteriorElement e(dim, idx.degree());
  e.terms_.emplace_back(idx.bits(), 1.0);
  return e;
}

ExteriorElement ExteriorElement::scalar(int dim, double value) {
  ExteriorElement e(dim, 0);
  if (value != 0.0) e.terms_.emplace_back(0u, value);
  return e;
}

ExteriorElement ExteriorElement::fromTerms(
    int dim, int degree, std::vector<std::pair<std::uint32_t, double>> terms) {
  ExteriorElement e(dim, degree);
  for (const auto& [m, c] : terms) {
    if (std::popcount(m) != degree)
      throw std::invalid_argument("fromTerms: term degree mismatch");
    e.addTerm(m, c);
  }
  e.normalize();
  return e;
}

double ExteriorElement::coefficient(const MultiIndex& idx) const {
  return coefficient(idx.bits());
}

double ExteriorElement::coefficient(std::uint32_t bits) const {
  for (const auto& [m, c] : terms_)
    if (m == bits) return c;
  return 0.0;
}

void ExteriorElement::setCoefficient(const MultiIndex& idx, double value) {
  if (idx.degree() != degree_) throw std::invalid_argument("multi-index degree mismatch");
  for (auto& [m, c] : terms_) {
    if (m == idx.bits()) {
      c = value;
      normalize();
      return;
    }
  }
  if (value != 0.0) {
    terms_.emplace_back(idx.bits(), value);
    normalize();
  }
}

void ExteriorElement::addTerm(std::uint32_t bits, double value) {
  if (value == 0.0) return;
  for (auto& [m, c] : terms_) {
    if (m == bits) {
      c += value;
      return;
    }
  }
  terms_.emplace_back(bits, value);
}

void ExteriorElement::normalize() {
  std::erase_if(terms_, [](const auto& t) { return t.second == 0.0; });
  std::sort(terms_.begin(), terms_.end(),
            [](const auto& a, const auto& b) { return lexLess(a.first, b.first); });
}

double ExteriorElement::normSq() const {
  double s = 0.0;
  for (const auto& [m, c] : terms_) s += c * c;
  return s;
}

double ExteriorElement::norm() const { return std::sqrt(normSq()); }

bool ExteriorElement::isZero(double tol) const {
  for (const auto& [m, c] : terms_)
    if (std::abs(c) > tol) return false;
  return true;
}

ExteriorElement& ExteriorElement::operator+=(const ExteriorElement& other) {
  if (dim_ != other.dim_ || degree_ != other.degree_)
    throw std::invalid_argument("element shape mismatch in addition");
  for (const auto& [m, c] : other.terms_) addTerm(m, c);
  normalize();
  return *this;
}

ExteriorElement& ExteriorElement::operator-=(const ExteriorElement& other) {
  if (dim_ != other.dim_ || degree_ != other.degree_)
    throw std::invalid_argument("element shape mismatch in subtraction");
  for (const auto& [m, c] : other.terms_) addTerm(m, -c);
  normalize();
  return *this;
}

ExteriorElement& ExteriorElement::operator*=(double s) {
  if (s == 0.0) {
    terms_.clear();
    return *this;
  }
  for (auto& [m, c] : terms_) c *= s;
  return *this;
}

std::string ExteriorElement::toString() const {
  std::ostringstream os;
  if (terms_.empty()) return "0";
  bool first = true;
  for (const auto& [m, c] : terms_) {
    if (!first) os << " + ";
    os << c << "*e" << MultiIndex(m).toString();
    first = false;
  }
  return os.str();
}

ExteriorElement wedge(const ExteriorElement& f, const ExteriorElement& g) {
  if (f.dim() != g.dim()) throw std::invalid_argument("wedge: ambient dimension mismatch");
  const int dim = f.dim();
  const int degree = f.degree() + g.degree();
  ExteriorElement out(dim, degree);
  if (degree > dim) return out;  // zero element of formal degree k+l
  for (const auto& [ma, ca] : f.terms()) {
    for (const auto& [mb, cb] : g.terms()) {
      if (ma & mb) continue;
      out.addTerm(ma | mb, ca * cb * mergeSign(ma, mb));
    }
  }
  ExteriorElement normalized(dim, degree);
  for (const auto& [m, c] : out.terms()) normalized.setCoefficient(MultiIndex(m), c);
  return normalized;
}

ExteriorElement hodge(const ExteriorElement& f) {
  const int dim = f.dim();
  const int k = f.degree();
  if (k > dim) throw std::invalid_argument("hodge: degree exceeds dimension");
  const std::uint32_t full = (dim == 32) ? ~0u : ((1u << dim) - 1);
  ExteriorElement out(dim, dim - k);
  for (const auto& [m, c] : f.terms()) {
    const std::uint32_t mc = full ^ m;
    out.setCoefficient(MultiIndex(mc), c * mergeSign(m, mc));
  }
  return out;
}

ExteriorElement contract(const ExteriorElement& g, const ExteriorElement& f) {
  if (f.dim() != g.dim()) throw std::invalid_argument("contract: ambient dimension mismatch");
  const int k = f.degree();
  const int l = g.degree();
  if (l > k) return ExteriorElement(f.dim(), 0);
  ExteriorElement out(f.dim(), k - l);
  for (const auto& [mg, cg] : g.terms()) {
    for (const auto& [mf, cf] : f.terms()) {
      if ((mg & mf) != mg) continue;
      const std::uint32_t mj = mf ^ mg;
      // f_{I J} = mergeSign(I, J) * f_{sorted(I u J)}
      out.addTerm(mj, cg * cf * mergeSign(mg, mj));
    }
  }
  ExteriorElement normalized(f.dim(), k - l);
  for (const auto& [m, c] : out.terms()) normalized.setCoefficient(MultiIndex(m), c);
  return normalized;
}

double inner(const ExteriorElement& f, const ExteriorElement& g) {
  if (f.dim() != g.dim() || f.degree() != g.degree())
    throw std::invalid_argument("inner: shape mismatch");
  double s = 0.0;
  // Both term lists are lex-sorted; merge walk.
  auto ia = f.terms().begin();
  auto ib = g.terms().begin();
  while (ia != f.terms().end() && ib != g.terms().end()) {
    if (ia->first == ib->first) {
      s += ia->second * ib->second;
      ++ia;
      ++ib;
    } else if (lexLess(ia->first, ib->first)) {
      ++ia;
    } else {
      ++ib;
    }
  }
  return s;
}

}  // namespace lavgap
