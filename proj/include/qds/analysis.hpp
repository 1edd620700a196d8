#ifndef QDS_ANALYSIS_HPP
#define QDS_ANALYSIS_HPP

#include <cstdint>
#include <optional>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

#include "qds/hash_suite.hpp"

namespace qds::analysis {

using BigInt = boost::multiprecision::cpp_int;
using BigRational = boost::multiprecision::cpp_rational;

// Probability carrier. log2_value is the primary representation: the
// quantities here span far below double range.
struct ProbabilityValue {
  double value = 0.0;       // clamped to [0, 1]; may underflow to 0
  double log2_value = 0.0;  // -inf for exact zero

  static ProbabilityValue from_rational(const BigRational& r);
  static ProbabilityValue from_log2(double log2_value);
  static ProbabilityValue zero();
  static ProbabilityValue one();
};

// Exact binomial coefficient.
BigInt binomial(std::uint32_t n, std::uint32_t k);

// Probability that a verifier guesses the unknown half of an l-bit key:
// 2^(-l/2). l must be even and >= 2.
ProbabilityValue p_guess(std::uint32_t l_bits);

// Closed-form repudiation success probability: the product over i of
// (n - 2i) / (2 (n - i)) for i = 0..e-1. Exact rational. Returns exact zero
// when e > n/2.
ProbabilityValue p_rep_closed_form(std::uint32_t n, std::uint32_t e);
// The exact rational behind the closed form, for oracle comparisons.
BigRational p_rep_closed_form_exact(std::uint32_t n, std::uint32_t e);

// Independent oracle: count the e-subsets of n labels that avoid the n/2
// known labels. Exhaustive enumeration for n <= 16, binomial ratio
// C(n/2, e) / C(n, e) otherwise. n <= 40.
ProbabilityValue p_rep_bruteforce(std::uint32_t n, std::uint32_t e);
BigRational p_rep_bruteforce_exact(std::uint32_t n, std::uint32_t e);

// Threshold generalization: P(X <= t_b) where X ~ Hypergeometric counts how
// many of the e corrupted blocks land among the n/2 known labels. Reduces to
// the closed form at t_b = 0.
ProbabilityValue p_rep_threshold(std::uint32_t n, std::uint32_t e,
                                 std::uint32_t t_b);
BigRational p_rep_threshold_exact(std::uint32_t n, std::uint32_t e,
                                  std::uint32_t t_b);

// Input/output space sizes for the collision bound: 2^x inputs, 2^k outputs.
struct CollisionParams {
  std::uint32_t input_length_x_bits = 0;
  std::uint32_t digest_length_k_bits = 1;
};

// Collision probability bound:
//   P = 1 - exp(-(2^x + 1)^2 / (2 (2^k + 1 - 2^x))).
// Evaluated in arbitrary precision; valid for x, k up to 1024 and beyond.
// Throws DomainError when the denominator is not positive.
ProbabilityValue p_collision(const CollisionParams& params);

// Textbook birthday approximation 1 - exp(-2^(2x - k - 1)), as a
// cross-check. The two diverge when x approaches k.
ProbabilityValue p_collision_birthday(const CollisionParams& params);

struct SecondPreimageParams {
  std::uint32_t digest_d_bits = 0;
  double input_D_bits = 0;  // may be astronomically large, e.g. 2^64
  std::uint32_t hash_block_B_bits = 1;
};

// Second-preimage strength d - log2(D/B). SHA2-384's strength does not
// depend on the input size and is always its digest length.
double second_preimage_strength(const SecondPreimageParams& params,
                                std::optional<HashAlgorithm> alg = {});

// Renders "2^N" plus the decimal order of magnitude.
std::string work_factor(std::uint32_t strength_bits);

}  // namespace qds::analysis

#endif  // QDS_ANALYSIS_HPP
