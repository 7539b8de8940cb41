#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "divcorr/arith_core.hpp"
#include "divcorr/wtrick.hpp"

namespace divcorr {

// A valid (i, s) cluster slot with its prime-count threshold.
struct ClusterSpec {
    std::int64_t i = 0;
    std::uint64_t s = 0;
    std::uint64_t m0 = 0;

    // nullopt when i + 3 - log2 s <= 0 or the structural bound i >= log2 s - 2
    // fails.
    static std::optional<ClusterSpec> make(std::int64_t i, std::uint64_t s,
                                           std::uint64_t gamma_inv);
};

std::uint64_t m0(std::int64_t i, std::uint64_t s, std::uint64_t gamma_inv);

// Number of u in U(i,s) with u | n, evaluated as binomial(omega_i(n), m0);
// U(i,s) is never enumerated outside test oracles.
std::uint64_t cluster_count(std::uint64_t n, const ClusterSpec& spec, std::uint64_t N,
                            const FactorTables& tables);

// Raw majorant (unnormalised): 2^{2/gamma} tau~_gamma(n) + cluster sums +
// exceptional term 1_{S1 u S2} tau~(n).
double nu_raw(std::uint64_t n, std::uint64_t N, const MajorantParams& params,
              const FactorTables& tables);

// W-tricked raw majorant against tau~'_gamma; no exceptional term.
double nu_prime_raw(std::uint64_t n, std::uint64_t N, const MajorantParams& params,
                    const WContext& ctx, const FactorTables& tables);

// Exact share of n <= N with omega_i(n) >= m0(i, s); 0 for empty slots.
double xis_density(std::int64_t i, std::uint64_t s, std::uint64_t N,
                   const MajorantParams& params, const FactorTables& tables);

// sum over primes of I_i of 1/p (the upper-bound ingredient for X(i,s)).
double interval_prime_reciprocal_sum(std::int64_t i, std::uint64_t N,
                                     const FactorTables& tables);

struct SigmaParams {
    double w = 0.0;       // small-prime cutoff
    double c_sigma = 1.0; // the unspecified O_m constant, made explicit
    std::uint32_t m = 2;
    double sigma0 = 0.0;  // value at shift 0; default N^{1/4} when unset
    // When set, the small-prime filter is p | W_coprime instead of p <= w.
    // The two agree unless w is itself prime, in which case p = w divides
    // W-tricked values but sits outside "p > w"; the coprime filter keeps
    // the correlation weight honest there.
    std::uint64_t W_coprime = 0;
};

struct DeltaSpec {
    std::uint64_t bigW = 1;
    std::vector<std::uint64_t> b; // one residue per factor of the product
};

struct SigmaValue {
    double value = 1.0;
    bool partial = false; // some factor resisted factorization: lower bound
};

// exp(c_sigma sum_{p > w, p | Delta(n)} p^{-1/2}) with
// Delta(n) = prod_{j != j'} (bigW n + b_j - b_{j'}).  Shift 0 (or a vanishing
// Delta) returns the configured sigma0.
SigmaValue sigma_m(std::int64_t n_shift, const DeltaSpec& delta, const SigmaParams& params,
                   std::uint64_t N, const FactorTables& tables);

} // namespace divcorr
