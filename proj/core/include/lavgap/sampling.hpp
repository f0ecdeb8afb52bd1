#ifndef LAVGAP_SAMPLING_HPP
#define LAVGAP_SAMPLING_HPP

#include <cstdint>
#include <vector>

namespace lavgap {

/// splitmix64; deterministic across platforms.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1).
  double uniform() { return (next() >> 11) * 0x1.0p-53; }

  /// Uniform in [a, b).
  double uniform(double a, double b) { return a + (b - a) * uniform(); }

private:
  std::uint64_t state_;
};

/// Halton sequence point, dimension up to 8 (prime bases 2..19),
/// index-addressable so parallel consumers stay deterministic.
std::vector<double> haltonPoint(std::uint64_t index, int dim);

/// Low-discrepancy point in the box [lo, hi]^dim with additive jitter of the
/// given magnitude (keeps samples off measure-zero loci such as Cantor gap
/// midpoints). Seed folds into the jitter stream only.
std::vector<double> jitteredBoxPoint(std::uint64_t index, int dim, double lo,
                                     double hi, std::uint64_t seed,
                                     double jitter = 1e-9);

}  // namespace lavgap

#endif
