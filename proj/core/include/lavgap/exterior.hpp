#ifndef LAVGAP_EXTERIOR_HPP
#define LAVGAP_EXTERIOR_HPP

#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace lavgap {

/// Strictly increasing multi-index (i1 < ... < ik), indices in 1..N, stored
/// as a bitmask (bit j-1 set iff index j present). The empty index (k = 0)
/// is valid and denotes the scalar basis monomial.
class MultiIndex {
public:
  MultiIndex() = default;
  explicit MultiIndex(std::uint32_t bits) : bits_(bits) {}

  /// Builds from a 1-based index list; throws if not strictly increasing or
  /// out of [1, dim].
  static MultiIndex fromIndices(std::span<const int> indices, int dim);
  static MultiIndex fromIndices(std::initializer_list<int> indices, int dim);

  std::uint32_t bits() const { return bits_; }
  int degree() const;
  bool contains(int index) const { return bits_ & (1u << (index - 1)); }
  bool subsetOf(const MultiIndex& other) const {
    return (bits_ & other.bits_) == bits_;
  }

  /// Ascending 1-based index list.
  std::vector<int> indices() const;
  std::string toString() const;

  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;

private:
  std::uint32_t bits_ = 0;
};

/// Lexicographic order on the ascending index lists (used for deterministic
/// storage and serialization; degrees are compared first).
bool lexLess(std::uint32_t a, std::uint32_t b);

/// Parity of the merge permutation taking the concatenation (A, B) of two
/// disjoint ascending index lists to the ascending order of their union.
/// Returns +1 or -1; exact integer arithmetic.
int mergeSign(std::uint32_t a, std::uint32_t b);

/// Element of Lambda^k(R^N) in sparse coordinates over the sorted basis
/// monomials. Immutable value semantics: every operation returns a new
/// element. Degrees above N are representable only as the zero element
/// (wedge overflow convention).
class ExteriorElement {
public:
  ExteriorElement() = default;
  ExteriorElement(int dim, int degree);

  static ExteriorElement basis(int dim, std::initializer_list<int> indices);
  static ExteriorElement scalar(int dim, double value);
  /// Bulk constructor: sorts, merges and drops zero terms.
  static ExteriorElement fromTerms(int dim, int degree,
                                   std::vector<std::pair<std::uint32_t, double>> terms);

  int dim() const { return dim_; }
  int degree() const { return degree_; }

  double coefficient(const MultiIndex& idx) const;
  double coefficient(std::uint32_t bits) const;
  void setCoefficient(const MultiIndex& idx, double value);
  void addTerm(std::uint32_t bits, double value);

  /// Terms sorted lexicographically on index lists; zero coefficients are
  /// dropped on construction.
  const std::vector<std::pair<std::uint32_t, double>>& terms() const {
    return terms_;
  }

  double normSq() const;
  double norm() const;
  bool isZero(double tol = 0.0) const;

  ExteriorElement& operator+=(const ExteriorElement& other);
  ExteriorElement& operator-=(const ExteriorElement& other);
  ExteriorElement& operator*=(double s);

  friend ExteriorElement operator+(ExteriorElement a, const ExteriorElement& b) {
    a += b;
    return a;
  }
  friend ExteriorElement operator-(ExteriorElement a, const ExteriorElement& b) {
    a -= b;
    return a;
  }
  friend ExteriorElement operator*(ExteriorElement a, double s) {
    a *= s;
    return a;
  }
  friend ExteriorElement operator*(double s, ExteriorElement a) {
    a *= s;
    return a;
  }

  std::string toString() const;

private:
  void normalize();

  int dim_ = 0;
  int degree_ = 0;
  std::vector<std::pair<std::uint32_t, double>> terms_;
};

/// Exterior product. Degrees add; if k + l > N the result is the zero
/// element of formal degree k + l. Throws on ambient dimension mismatch.
ExteriorElement wedge(const ExteriorElement& f, const ExteriorElement& g);

/// Hodge star Lambda^k -> Lambda^{N-k}; signs from shuffle parity.
ExteriorElement hodge(const ExteriorElement& f);

/// Interior product g -| f (adjoint of the wedge), degree k - l.
/// Zero element when deg g > deg f.
ExteriorElement contract(const ExteriorElement& g, const ExteriorElement& f);

/// Scalar product over sorted multi-indices. Throws on dim/degree mismatch.
double inner(const ExteriorElement& f, const ExteriorElement& g);

}  // namespace lavgap

#endif
