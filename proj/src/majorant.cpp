#include "divcorr/majorant.hpp"

#include <cmath>

namespace divcorr {

std::optional<ClusterSpec> ClusterSpec::make(std::int64_t i, std::uint64_t s,
                                             std::uint64_t gamma_inv) {
    if (i < 0) return std::nullopt;
    // structural bound i >= log2 s - 2: 2^{i+2} >= s
    if (!pow_at_least(2, static_cast<std::uint64_t>(i) + 2, s)) return std::nullopt;
    auto m = exact_m0(i, s, gamma_inv);
    if (!m || *m < 1) return std::nullopt;
    return ClusterSpec{i, s, *m};
}

std::uint64_t m0(std::int64_t i, std::uint64_t s, std::uint64_t gamma_inv) {
    auto m = exact_m0(i, s, gamma_inv);
    if (!m) throw RangeError("m0: empty range, i + 3 - log2 s <= 0");
    return *m;
}

static std::uint64_t binom_u64(std::uint64_t n, std::uint64_t k) {
    if (k > n) return 0;
    k = std::min(k, n - k);
    unsigned __int128 r = 1;
    for (std::uint64_t j = 1; j <= k; ++j) {
        r = r * (n - k + j) / j;
        if (r > UINT64_MAX) throw CapacityError("binomial overflow");
    }
    return static_cast<std::uint64_t>(r);
}

std::uint64_t cluster_count(std::uint64_t n, const ClusterSpec& spec, std::uint64_t N,
                            const FactorTables& tables) {
    std::uint32_t w = omega_in_interval(n, static_cast<std::uint32_t>(spec.i), N, tables);
    return binom_u64(w, spec.m0);
}

namespace {

double cluster_sum(std::uint64_t n, std::uint64_t N, const MajorantParams& params,
                   const FactorTables& tables) {
    auto [slo, shi] = params.cluster_s_bounds(N);
    double sum = 0;
    for (std::int64_t s = slo; s <= shi; ++s) {
        auto [ilo, ihi] = params.cluster_i_bounds(N, s);
        for (std::int64_t i = ilo; i <= ihi; ++i) {
            auto spec = ClusterSpec::make(i, static_cast<std::uint64_t>(s), params.gamma_inv);
            if (!spec) continue;
            std::uint64_t c = cluster_count(n, *spec, N, tables);
            if (c > 0) sum += std::ldexp(static_cast<double>(c), static_cast<int>(s));
        }
    }
    return sum;
}

} // namespace

double nu_raw(std::uint64_t n, std::uint64_t N, const MajorantParams& params,
              const FactorTables& tables) {
    params.validate();
    double tg = tau_gamma_tilde(n, N, params.gamma_inv, tables);
    double base = std::ldexp(1.0, static_cast<int>(2 * params.gamma_inv));
    double v = (base + cluster_sum(n, N, params, tables)) * tg;
    if (is_rough_S1(n, N, params.c1, tables) || is_smooth_S2(n, N, params.gamma_inv, tables))
        v += tau_tilde(n, N, tables);
    return v;
}

double nu_prime_raw(std::uint64_t n, std::uint64_t N, const MajorantParams& params,
                    const WContext& ctx, const FactorTables& tables) {
    params.validate();
    double tg = tau_tilde_prime_gamma(n, ctx, N, params.gamma_inv, tables);
    double base = std::ldexp(1.0, static_cast<int>(2 * params.gamma_inv));
    return (base + cluster_sum(n, N, params, tables)) * tg;
}

double xis_density(std::int64_t i, std::uint64_t s, std::uint64_t N,
                   const MajorantParams& params, const FactorTables& tables) {
    auto spec = ClusterSpec::make(i, s, params.gamma_inv);
    if (!spec) return 0.0;
    if (N > tables.limit()) throw RangeError("xis_density: N exceeds sieve limit");
    std::uint64_t hits = 0;
    for (std::uint64_t n = 1; n <= N; ++n)
        if (omega_in_interval(n, static_cast<std::uint32_t>(i), N, tables) >= spec->m0) ++hits;
    return static_cast<double>(hits) / static_cast<double>(N);
}

double interval_prime_reciprocal_sum(std::int64_t i, std::uint64_t N,
                                     const FactorTables& tables) {
    double sum = 0;
    for (std::uint32_t p : tables.primes())
        if (in_superdyadic(p, static_cast<std::uint32_t>(i), N)) sum += 1.0 / p;
    return sum;
}

SigmaValue sigma_m(std::int64_t n_shift, const DeltaSpec& delta, const SigmaParams& params,
                   std::uint64_t N, const FactorTables& tables) {
    SigmaParams sp = params;
    if (sp.sigma0 <= 0) sp.sigma0 = std::pow(static_cast<double>(N), 0.25);
    if (n_shift == 0) return {sp.sigma0, false};

    std::vector<std::uint64_t> primes;
    bool partial = false;
    for (std::size_t j = 0; j < delta.b.size(); ++j)
        for (std::size_t jp = 0; jp < delta.b.size(); ++jp) {
            if (j == jp) continue;
            __int128 f = static_cast<__int128>(delta.bigW) * n_shift +
                         static_cast<__int128>(delta.b[j]) - static_cast<__int128>(delta.b[jp]);
            if (f < 0) f = -f;
            if (f == 0) return {sp.sigma0, false}; // Delta vanishes
            if (f == 1) continue;
            std::uint64_t v = static_cast<std::uint64_t>(f);
            if (v <= tables.limit()) {
                for (const auto& [p, a] : tables.factorize(v)) primes.push_back(p);
            } else {
                // trial division above the sieve limit
                std::uint64_t m = v;
                for (std::uint64_t q = 2; q * q <= m && q <= 10'000'000; ++q)
                    while (m % q == 0) {
                        primes.push_back(q);
                        m /= q;
                    }
                if (m > 1) {
                    if (m <= 100'000'000'000'000ull)
                        primes.push_back(m); // residual is prime after the scan
                    else
                        partial = true;
                }
            }
        }
    std::sort(primes.begin(), primes.end());
    primes.erase(std::unique(primes.begin(), primes.end()), primes.end());
    double sum = 0;
    for (std::uint64_t p : primes) {
        bool small = sp.W_coprime > 0 ? (sp.W_coprime % p == 0)
                                      : (static_cast<double>(p) <= sp.w);
        if (!small) sum += 1.0 / std::sqrt(static_cast<double>(p));
    }
    return {std::exp(sp.c_sigma * sum), partial};
}

} // namespace divcorr
