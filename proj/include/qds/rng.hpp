#ifndef QDS_RNG_HPP
#define QDS_RNG_HPP

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

#include "qds/bitstring.hpp"

namespace qds {

// Seeded randomness source. All protocol randomness flows through this type so
// that a run seed fully determines a run. Sub-streams derived by label or index
// are independent and stable across platforms (mt19937_64 output is fixed by
// the standard; uniform draws use rejection sampling, not std distributions).
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  // Independent sub-stream identified by a label (e.g. a QKD link name).
  Rng derive(std::string_view label) const;
  // Independent sub-stream identified by an index (e.g. a Monte Carlo trial).
  Rng derive(std::uint64_t index) const;

  std::uint64_t next_u64();
  // Uniform on [0, bound); bound > 0.
  std::uint64_t below(std::uint64_t bound);
  bool next_bool();
  std::vector<std::uint8_t> bytes(std::size_t n);
  BitString bits(std::size_t n_bits);

  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

// SplitMix64 step; used for seed derivation.
std::uint64_t splitmix64(std::uint64_t x);

}  // namespace qds

#endif  // QDS_RNG_HPP
