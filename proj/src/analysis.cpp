#include "qds/analysis.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "qds/errors.hpp"

namespace qds::analysis {

using BigFloat = boost::multiprecision::cpp_bin_float_100;

namespace {

double log2_of(const BigRational& r) {
  if (r == 0) return -std::numeric_limits<double>::infinity();
  BigFloat num(boost::multiprecision::numerator(r));
  BigFloat den(boost::multiprecision::denominator(r));
  BigFloat l = (log(num) - log(den)) / log(BigFloat(2));
  return l.convert_to<double>();
}

}  // namespace

ProbabilityValue ProbabilityValue::from_rational(const BigRational& r) {
  ProbabilityValue p;
  p.log2_value = log2_of(r);
  p.value = BigFloat(r).convert_to<double>();
  return p;
}

ProbabilityValue ProbabilityValue::from_log2(double log2_value) {
  ProbabilityValue p;
  p.log2_value = log2_value;
  p.value = std::exp2(log2_value);  // underflows to 0 for extreme magnitudes
  return p;
}

ProbabilityValue ProbabilityValue::zero() {
  return {0.0, -std::numeric_limits<double>::infinity()};
}

ProbabilityValue ProbabilityValue::one() { return {1.0, 0.0}; }

BigInt binomial(std::uint32_t n, std::uint32_t k) {
  if (k > n) return 0;
  if (k > n - k) k = n - k;
  BigInt result = 1;
  for (std::uint32_t i = 1; i <= k; ++i) {
    result *= n - k + i;
    result /= i;
  }
  return result;
}

ProbabilityValue p_guess(std::uint32_t l_bits) {
  if (l_bits < 2 || l_bits % 2 != 0) {
    throw DomainError("p_guess: l must be even and at least 2");
  }
  return ProbabilityValue::from_log2(-static_cast<double>(l_bits) / 2.0);
}

BigRational p_rep_closed_form_exact(std::uint32_t n, std::uint32_t e) {
  if (n < 2 || n % 2 != 0) {
    throw DomainError("p_rep: n must be even and at least 2");
  }
  if (e < 1) throw DomainError("p_rep: e must be at least 1");
  if (e > n / 2) return 0;  // no placement avoids the known half
  BigRational p = 1;
  for (std::uint32_t i = 0; i < e; ++i) {
    p *= BigRational(n - 2 * i, 2 * (n - i));
  }
  return p;
}

ProbabilityValue p_rep_closed_form(std::uint32_t n, std::uint32_t e) {
  return ProbabilityValue::from_rational(p_rep_closed_form_exact(n, e));
}

BigRational p_rep_bruteforce_exact(std::uint32_t n, std::uint32_t e) {
  if (n < 2 || n % 2 != 0 || n > 40) {
    throw DomainError("p_rep_bruteforce: n must be even, 2..40");
  }
  if (e < 1) throw DomainError("p_rep_bruteforce: e must be at least 1");
  if (e > n) return 0;
  if (n <= 16) {
    // Walk every e-subset of {0..n-1}; count those inside the unknown half
    // {0..n/2-1}. Labels are symmetric, so which half is "unknown" is moot.
    std::vector<std::uint32_t> idx(e);
    for (std::uint32_t i = 0; i < e; ++i) idx[i] = i;
    BigInt total = 0;
    BigInt inside = 0;
    while (true) {
      ++total;
      bool all_inside = true;
      for (std::uint32_t v : idx) {
        if (v >= n / 2) {
          all_inside = false;
          break;
        }
      }
      if (all_inside) ++inside;
      // Advance to the next combination in lexicographic order.
      std::int32_t pos = static_cast<std::int32_t>(e) - 1;
      while (pos >= 0 && idx[pos] == n - e + pos) --pos;
      if (pos < 0) break;
      ++idx[pos];
      for (std::uint32_t j = pos + 1; j < e; ++j) idx[j] = idx[j - 1] + 1;
    }
    return BigRational(inside, total);
  }
  return BigRational(binomial(n / 2, e), binomial(n, e));
}

ProbabilityValue p_rep_bruteforce(std::uint32_t n, std::uint32_t e) {
  return ProbabilityValue::from_rational(p_rep_bruteforce_exact(n, e));
}

BigRational p_rep_threshold_exact(std::uint32_t n, std::uint32_t e,
                                  std::uint32_t t_b) {
  if (n < 2 || n % 2 != 0) {
    throw DomainError("p_rep_threshold: n must be even and at least 2");
  }
  if (e < 1 || e > n) {
    throw DomainError("p_rep_threshold: e must lie in 1..n");
  }
  if (t_b >= e) return 1;
  BigInt denom = binomial(n, e);
  BigInt acc = 0;
  // X = corrupted blocks among the n/2 known labels.
  for (std::uint32_t x = 0; x <= t_b; ++x) {
    if (e - x > n / 2) continue;  // more than n/2 blocks cannot avoid
    acc += binomial(n / 2, x) * binomial(n / 2, e - x);
  }
  return BigRational(acc, denom);
}

ProbabilityValue p_rep_threshold(std::uint32_t n, std::uint32_t e,
                                 std::uint32_t t_b) {
  return ProbabilityValue::from_rational(p_rep_threshold_exact(n, e, t_b));
}

namespace {

// Exponent ratio of the collision bound as a high-precision float.
BigFloat collision_exponent(const CollisionParams& params) {
  BigInt two_x = BigInt(1) << params.input_length_x_bits;
  BigInt two_k = BigInt(1) << params.digest_length_k_bits;
  BigInt num = (two_x + 1) * (two_x + 1);
  BigInt den = 2 * (two_k + 1 - two_x);
  if (den <= 0) {
    throw DomainError("p_collision: input space must be smaller than the "
                      "output space (2^x < 2^k + 1)");
  }
  return BigFloat(num) / BigFloat(den);
}

ProbabilityValue probability_from_exponent(const BigFloat& r) {
  static const BigFloat ln2 = log(BigFloat(2));
  ProbabilityValue p;
  if (r > 256) {
    // exp(-r) is negligible next to 1; log2(1 - exp(-r)) ~ -exp(-r)/ln 2.
    p.value = 1.0;
    p.log2_value = 0.0;
    return p;
  }
  BigFloat prob = 1 - exp(-r);
  if (prob == 0) return ProbabilityValue::zero();
  p.value = prob.convert_to<double>();
  p.log2_value = (log(prob) / ln2).convert_to<double>();
  return p;
}

}  // namespace

ProbabilityValue p_collision(const CollisionParams& params) {
  return probability_from_exponent(collision_exponent(params));
}

ProbabilityValue p_collision_birthday(const CollisionParams& params) {
  // 1 - exp(-2^(2x - k - 1)) with the exponent in high precision.
  std::int64_t shift = 2 * static_cast<std::int64_t>(
                               params.input_length_x_bits) -
                       params.digest_length_k_bits - 1;
  BigFloat r = shift >= 0 ? BigFloat(BigInt(1) << shift)
                          : 1 / BigFloat(BigInt(1) << -shift);
  return probability_from_exponent(r);
}

double second_preimage_strength(const SecondPreimageParams& params,
                                std::optional<HashAlgorithm> alg) {
  if (alg == HashAlgorithm::Sha2_384) {
    return 384.0;
  }
  if (params.hash_block_B_bits < 1 ||
      params.input_D_bits < params.hash_block_B_bits) {
    throw DomainError("second_preimage_strength: need D >= B >= 1");
  }
  return params.digest_d_bits -
         std::log2(params.input_D_bits / params.hash_block_B_bits);
}

std::string work_factor(std::uint32_t strength_bits) {
  std::ostringstream out;
  out << "2^" << strength_bits;
  if (strength_bits < 10) {
    out << " (" << (1u << strength_bits) << ")";
    return out.str();
  }
  double log10_value = strength_bits * std::log10(2.0);
  double exponent = std::floor(log10_value);
  double mantissa = std::pow(10.0, log10_value - exponent);
  out.setf(std::ios::fixed);
  out.precision(1);
  out << " (~" << mantissa << "e" << static_cast<long long>(exponent) << ")";
  return out.str();
}

}  // namespace qds::analysis
