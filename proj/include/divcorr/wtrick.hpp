#pragma once

#include <cstdint>
#include <vector>

#include "divcorr/arith_core.hpp"
#include "divcorr/factor_tables.hpp"

namespace divcorr {

// W-trick quantities at cutoff w.  W multiplies primes strictly below w,
// bigW multiplies p^{floor(c1 log_p log N)} over primes <= w, matching the
// printed definitions; the asymmetry for prime w is deliberate and reported.
struct WContext {
    std::uint64_t N = 0;
    double w = 0.0;
    double c1 = 1.0;
    bool manual_w = false;
    std::uint64_t W = 1;
    std::uint64_t bigW = 1;
    std::uint64_t phiW = 1;
    std::vector<std::uint64_t> primes_below_w;  // p < w
    std::vector<std::uint64_t> primes_upto_w;   // p <= w
    std::vector<std::uint32_t> bigW_exponents;  // aligned with primes_upto_w
    bool degenerate = false;                    // W == 1
};

WContext make_context(std::uint64_t N, double c1, const WMode& w_mode);

// Count of divisors d | n with gcd(d, W) = 1.
std::uint64_t coprime_divisor_count(std::uint64_t n, const WContext& ctx,
                                    const FactorTables& tables);

// Count of those with d^g <= N as well.
std::uint64_t coprime_truncated_divisor_count(std::uint64_t n, const WContext& ctx,
                                              std::uint64_t N, std::uint64_t gamma_inv,
                                              const FactorTables& tables);

// (W/phi(W)) (log N)^{-1} sum_{(d,W)=1} 1_{d|n}
double tau_tilde_prime(std::uint64_t n, const WContext& ctx, std::uint64_t N,
                       const FactorTables& tables);

// (W/phi(W)) (gamma log N)^{-1} sum_{d <= N^gamma, (d,W)=1} 1_{d|n}
double tau_tilde_prime_gamma(std::uint64_t n, const WContext& ctx, std::uint64_t N,
                             std::uint64_t gamma_inv, const FactorTables& tables);

// w-smooth part of n: product of p^a || n over p <= w.
std::uint64_t varpi(std::uint64_t n, const WContext& ctx, const FactorTables& tables);

// tau~'(n) (phi(W)/W) 1_{varpi(n) | bigW/W} sum_{v | bigW} 1_{v|n}, the
// divisor sum evaluated as prod_p (min(v_p(n), v_p(bigW)) + 1).
double tau_bar(std::uint64_t n, const WContext& ctx, std::uint64_t N, const FactorTables& tables);

// Number of divisors of n all of whose prime factors are < w.
std::uint64_t smooth_divisor_count(std::uint64_t n, const WContext& ctx,
                                   const FactorTables& tables);

// Number of common divisors of n and bigW.
std::uint64_t bigw_common_divisor_count(std::uint64_t n, const WContext& ctx,
                                        const FactorTables& tables);

// (W/(phi(W) log N)) sum_{d <= sqrt(N/varpi(b)), (d,W)=1} 2 (1/d - varpi(b) d / N),
// the literal finite sum.  Requires b in [bigW] with varpi(b) | bigW/W.
double mu_Wb(std::uint64_t b, const WContext& ctx, std::uint64_t N, const FactorTables& tables);

} // namespace divcorr
