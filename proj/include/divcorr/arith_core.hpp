#pragma once

#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "divcorr/factor_tables.hpp"

namespace divcorr {

// ---------------------------------------------------------------------------
// Exact threshold comparisons.
//
// Rational exponents are handled by cross-exponentiation so that divisor
// thresholds like d <= N^{1/g} and the superdyadic interval bounds never
// depend on floating-point rounding.  Thresholds with transcendental
// exponents (the rough/smooth set cutoffs) are evaluated in long double;
// their boundaries are non-integers, so ties cannot occur on integer inputs.
// ---------------------------------------------------------------------------

// base^e >= lim, exact, with early exit (base >= 1, lim >= 1).
bool pow_at_least(std::uint64_t base, std::uint64_t e, std::uint64_t lim);

// base^e <= lim, exact.
inline bool pow_at_most(std::uint64_t base, std::uint64_t e, std::uint64_t lim) {
    return !pow_at_least(base, e, lim + 1);
}

// d <= N^{1/g}  <=>  d^g <= N.
inline bool below_gamma_threshold(std::uint64_t d, std::uint64_t g, std::uint64_t N) {
    return pow_at_most(d, g, N);
}

// Superdyadic interval I_i = [N^{1/2^{i+1}}, N^{1/2^i}].  A value on a shared
// endpoint N^{1/2^i} is counted in I_{i-1} (the wider interval) only, so for
// i >= 1 the upper endpoint is exclusive; I_0 keeps both endpoints.
bool in_superdyadic(std::uint64_t p, std::uint32_t i, std::uint64_t N);

// ---------------------------------------------------------------------------
// Majorant parameterisation
// ---------------------------------------------------------------------------

struct AsymptoticFormula {};

struct ManualRange {
    std::int64_t lo = 0;
    std::int64_t hi = -1; // hi < lo means explicitly empty
};

using RangeMode = std::variant<AsymptoticFormula, ManualRange>;

struct ManualW {
    double w = 0.0;
};

using WMode = std::variant<AsymptoticFormula, ManualW>;

struct MajorantParams {
    std::uint64_t gamma_inv = 4; // gamma = 1/gamma_inv, gamma_inv >= 2
    double c1 = 2.0;
    RangeMode s_range = AsymptoticFormula{};
    RangeMode i_range = AsymptoticFormula{};
    WMode w_mode = AsymptoticFormula{};

    void validate() const;

    // Cluster levels: s in (2/gamma, (log log N)^3] in asymptotic mode,
    // clipped manual range otherwise (values <= 2/gamma never cluster).
    std::pair<std::int64_t, std::int64_t> cluster_s_bounds(std::uint64_t N) const;
    // Interval indices for level s: structural lower bound max(ceil(log2 s)-2, 0)
    // always applies; the upper bound is 6 log log log N or the manual override.
    std::pair<std::int64_t, std::int64_t> cluster_i_bounds(std::uint64_t N, std::int64_t s) const;
};

// True when an analytic threshold collapses at this N (e.g. N^{gamma/loglog N} <= 1
// or empty asymptotic cluster ranges); reports flag such runs.
bool degenerate_regime(std::uint64_t N, const MajorantParams& params);

// ---------------------------------------------------------------------------
// Pointwise divisor-type functions
// ---------------------------------------------------------------------------

double tau_tilde(std::uint64_t n, std::uint64_t N, const FactorTables& tables);

// Number of divisors d | n with d^g <= N (exact threshold).
std::uint64_t truncated_divisor_count(std::uint64_t n, std::uint64_t N, std::uint64_t gamma_inv,
                                      const FactorTables& tables);

double tau_gamma_tilde(std::uint64_t n, std::uint64_t N, std::uint64_t gamma_inv,
                       const FactorTables& tables);

// Rough set S1: some p^a || n with a >= 2 and p^a > (log N)^{c1}.
bool is_rough_S1(std::uint64_t n, std::uint64_t N, double c1, const FactorTables& tables);

// Smooth set S2: product of p^a || n over p <= N^{1/(log log N)^3} is at
// least N^{gamma/log log N}.  Returns false whenever a threshold collapses
// to <= 1 (degenerate asymptotic regime).
bool is_smooth_S2(std::uint64_t n, std::uint64_t N, std::uint64_t gamma_inv,
                  const FactorTables& tables);

// Distinct primes of n inside I_i.
std::uint32_t omega_in_interval(std::uint64_t n, std::uint32_t i, std::uint64_t N,
                                const FactorTables& tables);

// Largest i such that I_i can contain a prime >= 2, i.e. 2^{2^i} <= N.
std::uint32_t max_superdyadic_index(std::uint64_t N);

// ---------------------------------------------------------------------------
// Three-alternative classifier
// ---------------------------------------------------------------------------

enum class AlternativeKind { NotApplicable, Rough, Smooth, Cluster, None };

struct Alternative {
    AlternativeKind kind = AlternativeKind::NotApplicable;
    std::uint32_t interval = 0; // for Cluster
    std::uint32_t count = 0;    // distinct primes found in the interval
};

// Hypothesis tau~(n) >= 2^s tau~_gamma(n) with s > 2/gamma, checked exactly
// as tau(n) >= 2^s * g * truncated_divisor_count(n).  For n within any
// sieveable range and integer g >= 2 the hypothesis never holds (integers
// with tau/tau_gamma ratios that large start far beyond 10^11), so the
// guarded call returns NotApplicable on all desk-scale inputs; the branch
// logic itself is reachable through classify_alternatives below.
Alternative classify_excess_divisors(std::uint64_t n, std::uint64_t N, const MajorantParams& params,
                           std::uint64_t s, const FactorTables& tables);

// Classification only (no hypothesis gate): Rough, then Smooth, then the
// first interval i in the level-s range holding at least m0(i, s) distinct
// primes of n, none squared.
Alternative classify_alternatives(std::uint64_t n, std::uint64_t N, const MajorantParams& params,
                                  std::uint64_t s, const FactorTables& tables);

// Exact ceiling of s(i+3-log2 s)/(100 g); nullopt when i+3-log2 s <= 0.
// log2 s enters only through integer comparisons of s^s against powers of 2.
std::optional<std::uint64_t> exact_m0(std::int64_t i, std::uint64_t s, std::uint64_t gamma_inv);

} // namespace divcorr
