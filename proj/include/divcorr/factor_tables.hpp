#pragma once

#include <cstdint>
#include <vector>

#include "divcorr/errors.hpp"

namespace divcorr {

struct PrimePower {
    std::uint64_t p;
    std::uint32_t a;
    bool operator==(const PrimePower&) const = default;
};

// Prime factorization with strictly increasing primes; empty for n = 1.
using Factorization = std::vector<PrimePower>;

// Smallest-prime-factor table for [2, limit] plus a divisor-count table for
// [1, limit].  Built single-threaded by a linear sieve, immutable afterwards;
// every pointwise function over the tables is safe to call concurrently.
class FactorTables {
  public:
    // memory_budget_bytes caps the sieve allocation (spf + tau + transient).
    static FactorTables build(std::uint64_t limit,
                              std::uint64_t memory_budget_bytes = kDefaultBudget);

    std::uint64_t limit() const { return limit_; }

    std::uint32_t spf(std::uint64_t n) const { return spf_[n]; }
    std::uint32_t tau(std::uint64_t n) const { return tau_[n]; }

    bool is_prime(std::uint64_t n) const { return n >= 2 && spf_[n] == n; }

    const std::vector<std::uint32_t>& primes() const { return primes_; }

    Factorization factorize(std::uint64_t n) const;

    // FNV-1a over the spf table; used by run manifests.
    std::uint64_t checksum() const;

    static constexpr std::uint64_t kDefaultBudget = 3ull << 30;

  private:
    std::uint64_t limit_ = 0;
    std::vector<std::uint32_t> spf_;
    std::vector<std::uint16_t> tau_;
    std::vector<std::uint32_t> primes_;
};

} // namespace divcorr
