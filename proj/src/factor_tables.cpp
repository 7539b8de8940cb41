#include "divcorr/factor_tables.hpp"

#include <string>

namespace divcorr {

FactorTables FactorTables::build(std::uint64_t limit, std::uint64_t memory_budget_bytes) {
    if (limit < 2) throw ConfigError("sieve limit must be >= 2");
    if (limit > UINT32_MAX) throw CapacityError("sieve limit exceeds 32-bit spf storage");
    // spf u32 + tau u16 + transient exponent counter u8
    std::uint64_t need = limit * (4 + 2 + 1) + (limit / 8) * 4;
    if (need > memory_budget_bytes)
        throw CapacityError("sieve of size " + std::to_string(limit) +
                            " exceeds memory budget (" + std::to_string(need) + " bytes needed)");

    FactorTables t;
    t.limit_ = limit;
    t.spf_.assign(limit + 1, 0);
    t.tau_.assign(limit + 1, 0);
    std::vector<std::uint8_t> cnt(limit + 1, 0); // exponent of spf(i) in i
    t.tau_[1] = 1;
    for (std::uint64_t i = 2; i <= limit; ++i) {
        if (t.spf_[i] == 0) {
            t.spf_[i] = static_cast<std::uint32_t>(i);
            t.primes_.push_back(static_cast<std::uint32_t>(i));
            t.tau_[i] = 2;
            cnt[i] = 1;
        }
        for (std::uint32_t p : t.primes_) {
            if (p > t.spf_[i]) break;
            std::uint64_t m = static_cast<std::uint64_t>(p) * i;
            if (m > limit) break;
            t.spf_[m] = p;
            if (p == t.spf_[i]) {
                cnt[m] = static_cast<std::uint8_t>(cnt[i] + 1);
                // tau multiplicative over spf-power: replace (a+1) by (a+2)
                t.tau_[m] = static_cast<std::uint16_t>(t.tau_[i] / (cnt[i] + 1) * (cnt[i] + 2));
            } else {
                cnt[m] = 1;
                t.tau_[m] = static_cast<std::uint16_t>(t.tau_[i] * 2);
            }
        }
    }
    return t;
}

Factorization FactorTables::factorize(std::uint64_t n) const {
    if (n < 1 || n > limit_)
        throw RangeError("factorize: n=" + std::to_string(n) + " outside [1, " +
                         std::to_string(limit_) + "]");
    Factorization f;
    while (n > 1) {
        std::uint32_t p = spf_[n];
        std::uint32_t a = 0;
        while (n % p == 0) {
            n /= p;
            ++a;
        }
        f.push_back({p, a});
    }
    return f;
}

std::uint64_t FactorTables::checksum() const {
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&h](std::uint64_t v) {
        for (int i = 0; i < 8; ++i) {
            h ^= (v >> (8 * i)) & 0xff;
            h *= 1099511628211ull;
        }
    };
    mix(limit_);
    for (std::uint64_t n = 2; n <= limit_; ++n) mix(spf_[n]);
    return h;
}

} // namespace divcorr
