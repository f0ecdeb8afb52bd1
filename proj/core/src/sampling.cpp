#include "lavgap/sampling.hpp"

#include <stdexcept>

namespace lavgap {

namespace {
constexpr int kPrimes[8] = {2, 3, 5, 7, 11, 13, 17, 19};

double radicalInverse(std::uint64_t n, int base) {
  double inv = 1.0 / base;
  double f = inv;
  double out = 0.0;
  while (n > 0) {
    out += static_cast<double>(n % base) * f;
    n /= base;
    f *= inv;
  }
  return out;
}
}  // namespace

std::vector<double> haltonPoint(std::uint64_t index, int dim) {
  if (dim < 1 || dim > 8) throw std::invalid_argument("haltonPoint: dim out of [1,8]");
  std::vector<double> p(dim);
  // Skip the degenerate 0 point.
  for (int d = 0; d < dim; ++d) p[d] = radicalInverse(index + 1, kPrimes[d]);
  return p;
}

std::vector<double> jitteredBoxPoint(std::uint64_t index, int dim, double lo,
                                     double hi, std::uint64_t seed, double jitter) {
  std::vector<double> p = haltonPoint(index, dim);
  Rng rng(seed * 0x9e3779b97f4a7c15ull + index + 1);
  for (int d = 0; d < dim; ++d) {
    p[d] = lo + (hi - lo) * p[d] + jitter * (2.0 * rng.uniform() - 1.0);
  }
  return p;
}

}  // namespace lavgap
