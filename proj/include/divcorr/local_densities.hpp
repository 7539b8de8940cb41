#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <vector>

#include "divcorr/affine.hpp"
#include "divcorr/rational.hpp"

namespace divcorr {

// Local factor at p, truncated at exponent cap A, with a certified upper
// bound on the omitted mass.  [value, value + tail_bound] always contains the
// untruncated beta_p, and raising A shrinks the interval (nesting).
struct BetaP {
    std::uint64_t p = 0;
    std::uint32_t truncation = 0;
    ExactRational value;
    ExactRational tail_bound;

    bool exceptional = false; // some pair of linear parts proportional mod p
};

// Proportion of n in (Z/p^A Z)^d with psi_i(n) == 0 mod p^{a_i} for all i,
// A = max a_i; exact.  Fast path: row reduction of the lifted congruence
// system over Z/p^A.
ExactRational alpha_prime_power(const AffineSystem& system, std::uint64_t p,
                                const std::vector<std::uint32_t>& exponents);

// Same value by direct enumeration of (Z/p^A Z)^d; throws WorkCapError when
// p^{Ad} exceeds work_cap.  Test oracle for the fast path.
ExactRational alpha_prime_power_brute(const AffineSystem& system, std::uint64_t p,
                                      const std::vector<std::uint32_t>& exponents,
                                      std::uint64_t work_cap = 100'000'000);

// alpha(d_1, ..., d_t) via multiplicativity over the primes of lcm(d_i).
ExactRational alpha(const AffineSystem& system, const std::vector<std::uint64_t>& moduli);

// (1 - 1/p)^t sum of alpha over exponent tuples with max <= A, plus the
// certified tail bound from per-prime single-form densities.
BetaP beta_p(const AffineSystem& system, std::uint64_t p, std::uint32_t A);

// Per-prime default cap: max(10, ceil(log N / log p)).
std::uint32_t default_truncation(std::uint64_t p, std::uint64_t N);

struct SingularProduct {
    double value = 1.0;
    double lower = 1.0; // certified interval from the per-prime tails
    double upper = 1.0;
    std::vector<BetaP> per_prime;
    std::vector<double> partial_products;
    // fit of |beta_p - 1| <= C p^{-2} over unexceptional primes
    double fitted_p2_constant = 0.0;
    std::uint64_t largest_exceptional = 0;
};

// Product of beta_p over p <= p_max.  trunc = 0 selects the per-prime
// default cap (needs N); trunc > 0 pins A for every prime.
SingularProduct singular_product(const AffineSystem& system, std::uint64_t p_max,
                                 std::uint32_t trunc, std::uint64_t N, unsigned workers = 1);

// Process-wide beta_p memo keyed by (system key, p, A); concurrent inserts of
// the same key are idempotent.
class BetaCache {
  public:
    static BetaCache& instance();
    BetaP get(const AffineSystem& system, std::uint64_t p, std::uint32_t A);
    void clear();

  private:
    std::mutex mu_;
    std::map<std::tuple<std::string, std::uint64_t, std::uint32_t>, BetaP> map_;
};

} // namespace divcorr
