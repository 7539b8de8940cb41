#include "divcorr/arith_core.hpp"

#include <cmath>
#include <string>

#include "divcorr/rational.hpp"

namespace divcorr {

bool pow_at_least(std::uint64_t base, std::uint64_t e, std::uint64_t lim) {
    if (lim <= 1) return true;
    if (e == 0) return 1 >= lim;
    if (base == 0) return false;
    if (base == 1) return 1 >= lim;
    unsigned __int128 r = 1;
    for (std::uint64_t k = 0; k < e; ++k) {
        r *= base;
        if (r >= lim) return true; // monotone, safe to stop
    }
    return false;
}

bool in_superdyadic(std::uint64_t p, std::uint32_t i, std::uint64_t N) {
    std::uint64_t e_lo = 1ull << (i + 1);
    std::uint64_t e_hi = 1ull << i;
    if (!pow_at_least(p, e_lo, N)) return false; // p < N^{1/2^{i+1}}
    if (i == 0) return p <= N;
    return !pow_at_least(p, e_hi, N); // p^{2^i} < N; ties go to I_{i-1}
}

std::uint32_t max_superdyadic_index(std::uint64_t N) {
    std::uint32_t i = 0;
    while (i + 1 < 32 && pow_at_most(2, 1ull << (i + 1), N)) ++i;
    return i;
}

// ---------------------------------------------------------------------------
// MajorantParams
// ---------------------------------------------------------------------------

void MajorantParams::validate() const {
    if (gamma_inv < 2) throw ConfigError("gamma must be 1/g with integer g >= 2");
    if (!(c1 > 0)) throw ConfigError("c1 must be positive");
    if (auto* m = std::get_if<ManualW>(&w_mode); m && m->w < 0)
        throw ConfigError("manual w must be nonnegative");
}

std::pair<std::int64_t, std::int64_t> MajorantParams::cluster_s_bounds(std::uint64_t N) const {
    std::int64_t base = static_cast<std::int64_t>(2 * gamma_inv);
    if (auto* m = std::get_if<ManualRange>(&s_range)) {
        return {std::max(m->lo, base + 1), m->hi};
    }
    double ll = std::log(std::log(static_cast<double>(N)));
    if (!(ll > 0)) return {base + 1, base}; // empty
    std::int64_t hi = static_cast<std::int64_t>(std::floor(ll * ll * ll));
    return {base + 1, hi};
}

std::pair<std::int64_t, std::int64_t> MajorantParams::cluster_i_bounds(std::uint64_t N,
                                                                       std::int64_t s) const {
    // structural lower bound: smallest i >= 0 with 2^{i+2} >= s
    std::int64_t lo_struct = 0;
    while (lo_struct + 2 < 63 && !pow_at_least(2, lo_struct + 2, static_cast<std::uint64_t>(s)))
        ++lo_struct;
    if (auto* m = std::get_if<ManualRange>(&i_range)) {
        return {std::max(m->lo, lo_struct), m->hi};
    }
    double lll = std::log(std::log(std::log(static_cast<double>(N))));
    if (!(lll > 0)) return {lo_struct, lo_struct - 1}; // empty
    return {lo_struct, static_cast<std::int64_t>(std::floor(6.0 * lll))};
}

bool degenerate_regime(std::uint64_t N, const MajorantParams& params) {
    double ln = std::log(static_cast<double>(N));
    if (!(ln > 1.0)) return true;
    double ll = std::log(ln);
    if (!(ll > 0)) return true;
    // no prime fits below the S2 small-prime cutoff
    if (std::pow(static_cast<double>(N), 1.0 / (ll * ll * ll)) < 2.0) return true;
    if (std::holds_alternative<AsymptoticFormula>(params.s_range)) {
        auto [lo, hi] = params.cluster_s_bounds(N);
        if (lo > hi) return true;
    }
    return false;
}

// ---------------------------------------------------------------------------
// Pointwise functions
// ---------------------------------------------------------------------------

static void check_range_n(std::uint64_t n, std::uint64_t N, const FactorTables& tables) {
    if (n < 1 || n > N) throw RangeError("n=" + std::to_string(n) + " outside [1, N]");
    if (N > tables.limit()) throw RangeError("N exceeds sieve limit");
}

double tau_tilde(std::uint64_t n, std::uint64_t N, const FactorTables& tables) {
    check_range_n(n, N, tables);
    return tables.tau(n) / std::log(static_cast<double>(N));
}

std::uint64_t truncated_divisor_count(std::uint64_t n, std::uint64_t N, std::uint64_t gamma_inv,
                                      const FactorTables& tables) {
    check_range_n(n, N, tables);
    // enumerate divisors from the factorization, count those with d^g <= N
    Factorization f = tables.factorize(n);
    std::vector<std::uint64_t> divs{1};
    for (const auto& [p, a] : f) {
        std::size_t old = divs.size();
        std::uint64_t pk = 1;
        for (std::uint32_t k = 1; k <= a; ++k) {
            pk *= p;
            for (std::size_t j = 0; j < old; ++j) {
                unsigned __int128 d = static_cast<unsigned __int128>(divs[j]) * pk;
                if (d <= n) divs.push_back(static_cast<std::uint64_t>(d));
            }
        }
    }
    std::uint64_t cnt = 0;
    for (std::uint64_t d : divs)
        if (below_gamma_threshold(d, gamma_inv, N)) ++cnt;
    return cnt;
}

double tau_gamma_tilde(std::uint64_t n, std::uint64_t N, std::uint64_t gamma_inv,
                       const FactorTables& tables) {
    double g = static_cast<double>(gamma_inv);
    return truncated_divisor_count(n, N, gamma_inv, tables) * g /
           std::log(static_cast<double>(N));
}

bool is_rough_S1(std::uint64_t n, std::uint64_t N, double c1, const FactorTables& tables) {
    if (n < 1) throw RangeError("is_rough_S1: n must be >= 1");
    if (n == 1) return false;
    double threshold = std::pow(std::log(static_cast<double>(N)), c1);
    for (const auto& [p, a] : tables.factorize(n)) {
        if (a < 2) continue;
        long double pa = 1;
        for (std::uint32_t k = 0; k < a; ++k) pa *= static_cast<long double>(p);
        if (pa > threshold) return true;
    }
    return false;
}

bool is_smooth_S2(std::uint64_t n, std::uint64_t N, std::uint64_t gamma_inv,
                  const FactorTables& tables) {
    if (n < 1) throw RangeError("is_smooth_S2: n must be >= 1");
    long double ln = std::log(static_cast<long double>(N));
    if (!(ln > 1)) return false;
    long double ll = std::log(ln);
    if (!(ll > 0)) return false; // degenerate asymptotic regime
    long double cutoff_exp = ll * ll * ll;   // p <= N^{1/(loglog N)^3}
    long double ln_threshold = ln / (ll * gamma_inv); // log of N^{gamma/loglog N}
    if (!(ln_threshold > 0)) return false;
    if (n == 1) return false;
    long double ln_product = 0;
    for (const auto& [p, a] : tables.factorize(n)) {
        if (std::log(static_cast<long double>(p)) * cutoff_exp <= ln)
            ln_product += a * std::log(static_cast<long double>(p));
    }
    return ln_product >= ln_threshold;
}

std::uint32_t omega_in_interval(std::uint64_t n, std::uint32_t i, std::uint64_t N,
                                const FactorTables& tables) {
    if (n < 1) throw RangeError("omega_in_interval: n must be >= 1");
    std::uint32_t cnt = 0;
    for (const auto& [p, a] : tables.factorize(n))
        if (in_superdyadic(p, i, N)) ++cnt;
    return cnt;
}

// ---------------------------------------------------------------------------
// Classifier
// ---------------------------------------------------------------------------

// Exact ceiling of s(i+3-log2 s)/(100 g): empty when 2^{i+3} <= s.
std::optional<std::uint64_t> exact_m0(std::int64_t i, std::uint64_t s, std::uint64_t gamma_inv) {
    if (i < 0 || s == 0) return std::nullopt;
    // need i + 3 - log2 s > 0  <=>  2^{i+3} > s
    if (!(i + 3 < 63 ? ((1ull << (i + 3)) > s) : true)) return std::nullopt;
    // smallest m >= 1 with 100 g m >= s(i+3) - s log2 s
    // <=> log2(s^s) >= s(i+3) - 100 g m  <=> s^s >= 2^E when E > 0
    BigInt s_pow_s = pow_big(s, static_cast<unsigned long>(s));
    for (std::uint64_t m = 1;; ++m) {
        __int128 E = static_cast<__int128>(s) * (i + 3) -
                     static_cast<__int128>(100) * gamma_inv * m;
        if (E <= 0) return m;
        BigInt two_E = pow_big(2, static_cast<unsigned long>(E));
        if (s_pow_s >= two_E) return m;
    }
}

Alternative classify_alternatives(std::uint64_t n, std::uint64_t N, const MajorantParams& params,
                                  std::uint64_t s, const FactorTables& tables) {
    if (is_rough_S1(n, N, params.c1, tables)) return {AlternativeKind::Rough};
    if (is_smooth_S2(n, N, params.gamma_inv, tables)) return {AlternativeKind::Smooth};
    auto [ilo, ihi] = params.cluster_i_bounds(N, static_cast<std::int64_t>(s));
    Factorization f = tables.factorize(n);
    for (std::int64_t i = ilo; i <= ihi; ++i) {
        auto m0 = exact_m0(i, s, params.gamma_inv);
        if (!m0) continue;
        std::uint32_t cnt = 0;
        bool squared = false;
        for (const auto& [p, a] : f) {
            if (!in_superdyadic(p, static_cast<std::uint32_t>(i), N)) continue;
            ++cnt;
            if (a >= 2) squared = true;
        }
        if (!squared && cnt >= *m0)
            return {AlternativeKind::Cluster, static_cast<std::uint32_t>(i), cnt};
    }
    return {AlternativeKind::None};
}

Alternative classify_excess_divisors(std::uint64_t n, std::uint64_t N, const MajorantParams& params,
                           std::uint64_t s, const FactorTables& tables) {
    params.validate();
    if (s <= 2 * params.gamma_inv) return {AlternativeKind::NotApplicable};
    // tau~(n) >= 2^s tau~_gamma(n)  <=>  tau(n) >= 2^s g C_gamma(n), exactly
    std::uint64_t cnt = truncated_divisor_count(n, N, params.gamma_inv, tables);
    if (s >= 64) return {AlternativeKind::NotApplicable};
    unsigned __int128 rhs = (static_cast<unsigned __int128>(1) << s) * params.gamma_inv * cnt;
    if (static_cast<unsigned __int128>(tables.tau(n)) < rhs)
        return {AlternativeKind::NotApplicable};
    return classify_alternatives(n, N, params, s, tables);
}

} // namespace divcorr
