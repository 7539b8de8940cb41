#include "divcorr/wtrick.hpp"

#include <cmath>
#include <numeric>
#include <string>

namespace divcorr {

WContext make_context(std::uint64_t N, double c1, const WMode& w_mode) {
    if (!(c1 > 0)) throw ConfigError("c1 must be positive");
    WContext ctx;
    ctx.N = N;
    ctx.c1 = c1;
    if (auto* m = std::get_if<ManualW>(&w_mode)) {
        ctx.w = m->w;
        ctx.manual_w = true;
    } else {
        if (N < 16) throw ConfigError("asymptotic w(N) needs N >= 16");
        ctx.w = 0.5 * std::log(std::log(static_cast<double>(N)));
    }
    double logN = std::log(static_cast<double>(N));
    if (!(logN > 1)) throw ConfigError("make_context needs N >= 3");

    for (std::uint64_t p = 2; static_cast<double>(p) <= ctx.w; ++p) {
        bool prime = p >= 2;
        for (std::uint64_t q = 2; q * q <= p; ++q)
            if (p % q == 0) {
                prime = false;
                break;
            }
        if (!prime) continue;
        ctx.primes_upto_w.push_back(p);
        if (static_cast<double>(p) < ctx.w) ctx.primes_below_w.push_back(p);
    }
    for (std::uint64_t p : ctx.primes_below_w) {
        unsigned __int128 next = static_cast<unsigned __int128>(ctx.W) * p;
        if (next > UINT64_MAX) throw CapacityError("W overflow");
        ctx.W = static_cast<std::uint64_t>(next);
    }
    ctx.phiW = ctx.W;
    for (std::uint64_t p : ctx.primes_below_w) ctx.phiW = ctx.phiW / p * (p - 1);

    for (std::uint64_t p : ctx.primes_upto_w) {
        double e = c1 * std::log(logN) / std::log(static_cast<double>(p));
        std::uint32_t a = e > 0 ? static_cast<std::uint32_t>(std::floor(e)) : 0;
        ctx.bigW_exponents.push_back(a);
        for (std::uint32_t k = 0; k < a; ++k) {
            unsigned __int128 next = static_cast<unsigned __int128>(ctx.bigW) * p;
            if (next > UINT64_MAX) throw CapacityError("bigW overflow");
            ctx.bigW = static_cast<std::uint64_t>(next);
        }
    }
    if (ctx.bigW % ctx.W != 0)
        throw DegeneracyError("bigW is not a multiple of W: exponent floor collapsed to 0; "
                              "raise c1 or lower w");
    ctx.degenerate = (ctx.W == 1);
    return ctx;
}

std::uint64_t coprime_divisor_count(std::uint64_t n, const WContext& ctx,
                                    const FactorTables& tables) {
    std::uint64_t cnt = 1;
    for (const auto& [p, a] : tables.factorize(n))
        if (ctx.W % p != 0) cnt *= (a + 1);
    return cnt;
}

std::uint64_t coprime_truncated_divisor_count(std::uint64_t n, const WContext& ctx,
                                              std::uint64_t N, std::uint64_t gamma_inv,
                                              const FactorTables& tables) {
    Factorization f = tables.factorize(n);
    std::vector<std::uint64_t> divs{1};
    for (const auto& [p, a] : f) {
        if (ctx.W % p == 0) continue;
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

double tau_tilde_prime(std::uint64_t n, const WContext& ctx, std::uint64_t N,
                       const FactorTables& tables) {
    double scale = static_cast<double>(ctx.W) / static_cast<double>(ctx.phiW);
    return scale * static_cast<double>(coprime_divisor_count(n, ctx, tables)) /
           std::log(static_cast<double>(N));
}

double tau_tilde_prime_gamma(std::uint64_t n, const WContext& ctx, std::uint64_t N,
                             std::uint64_t gamma_inv, const FactorTables& tables) {
    double scale = static_cast<double>(ctx.W) / static_cast<double>(ctx.phiW);
    return scale * static_cast<double>(gamma_inv) *
           static_cast<double>(coprime_truncated_divisor_count(n, ctx, N, gamma_inv, tables)) /
           std::log(static_cast<double>(N));
}

std::uint64_t varpi(std::uint64_t n, const WContext& ctx, const FactorTables& tables) {
    std::uint64_t out = 1;
    for (const auto& [p, a] : tables.factorize(n)) {
        if (static_cast<double>(p) > ctx.w) continue;
        for (std::uint32_t k = 0; k < a; ++k) out *= p;
    }
    return out;
}

std::uint64_t smooth_divisor_count(std::uint64_t n, const WContext& ctx,
                                   const FactorTables& tables) {
    std::uint64_t cnt = 1;
    for (const auto& [p, a] : tables.factorize(n))
        if (static_cast<double>(p) < ctx.w) cnt *= (a + 1);
    return cnt;
}

std::uint64_t bigw_common_divisor_count(std::uint64_t n, const WContext& ctx,
                                        const FactorTables& tables) {
    // Counts divisors of gcd(n, bigW) supported on the primes of W (p < w).
    // When w is itself prime, bigW picks up the prime w as well; counting it
    // here would double-count against the coprime factor tau~' and break the
    // sandwich 0 <= tau_bar <= tau~, so the periodic factor stays on W's
    // prime support.
    std::uint64_t cnt = 1;
    for (const auto& [p, a] : tables.factorize(n)) {
        if (static_cast<double>(p) >= ctx.w) continue;
        std::uint32_t cap = 0;
        for (std::size_t k = 0; k < ctx.primes_upto_w.size(); ++k)
            if (ctx.primes_upto_w[k] == p) {
                cap = ctx.bigW_exponents[k];
                break;
            }
        cnt *= (std::min(a, cap) + 1);
    }
    return cnt;
}

double tau_bar(std::uint64_t n, const WContext& ctx, std::uint64_t N, const FactorTables& tables) {
    // Indicator on varpi(n) | bigW: a failure then exhibits p^{v_p(n)} with
    // v_p(n) > floor(c1 log_p log N), hence p^{v_p(n)} > log^{c1} N, which
    // puts n in the rough set.  The bigW/W variant misses that implication
    // exactly at exponents hitting the floor (n = 81 at N = 10^5, w = 5).
    std::uint64_t vp = varpi(n, ctx, tables);
    if (ctx.bigW % vp != 0) return 0.0;
    double phi_over_w = static_cast<double>(ctx.phiW) / static_cast<double>(ctx.W);
    return tau_tilde_prime(n, ctx, N, tables) * phi_over_w *
           static_cast<double>(bigw_common_divisor_count(n, ctx, tables));
}

double mu_Wb(std::uint64_t b, const WContext& ctx, std::uint64_t N, const FactorTables& tables) {
    if (b < 1 || b > ctx.bigW)
        throw RangeError("mu_Wb: b must lie in [1, bigW]");
    std::uint64_t vb = varpi(b, ctx, tables);
    if ((ctx.bigW / ctx.W) % vb != 0)
        throw RangeError("mu_Wb: varpi(b) must divide bigW/W");
    long double scale = static_cast<long double>(ctx.W) /
                        (static_cast<long double>(ctx.phiW) *
                         std::log(static_cast<long double>(N)));
    std::uint64_t dmax = static_cast<std::uint64_t>(
        std::sqrt(static_cast<long double>(N) / static_cast<long double>(vb)));
    while (static_cast<unsigned __int128>(dmax) * dmax * vb > N) --dmax;
    while (static_cast<unsigned __int128>(dmax + 1) * (dmax + 1) * vb <= N) ++dmax;
    long double sum = 0;
    for (std::uint64_t d = 1; d <= dmax; ++d) {
        if (std::gcd(d, ctx.W) != 1) continue;
        sum += 2.0L * (1.0L / d - static_cast<long double>(vb) * d / static_cast<long double>(N));
    }
    return static_cast<double>(scale * sum);
}

} // namespace divcorr
