#ifndef SIMPLEXDIR_RNG_HPP_
#define SIMPLEXDIR_RNG_HPP_

#include <cstdint>
#include <random>
#include <span>

namespace simplexdir {

// Deterministic RNG with counter-based substream derivation. All draws go
// through our own transforms so that a (seed, stream) pair produces the same
// values on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  // Independent stream keyed by (root seed, index).
  Rng substream(std::uint64_t index) const;

  std::uint64_t next_u64();
  double uniform();                        // [0, 1)
  double uniform(double lo, double hi);
  double normal();                         // N(0, 1), polar method
  double gamma(double shape, double rate); // Marsaglia-Tsang
  double exponential(double rate = 1.0);
  // index in [0, probs.size()); probs need not be normalized
  int categorical(std::span<const double> probs);

  std::uint64_t root_seed() const { return root_; }

 private:
  std::uint64_t root_;
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace simplexdir

#endif
