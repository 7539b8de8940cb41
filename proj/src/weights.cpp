#include "divcorr/weights.hpp"

#include <cmath>
#include <numeric>

namespace divcorr {

std::string weight_name(WeightId id) {
    switch (id) {
        case WeightId::One: return "one";
        case WeightId::Tau: return "tau";
        case WeightId::TauTilde: return "tau-tilde";
        case WeightId::TauGammaTilde: return "tau-gamma-tilde";
        case WeightId::TauTildePrime: return "tau-tilde-prime";
        case WeightId::TauTildePrimeGamma: return "tau-tilde-prime-gamma";
        case WeightId::TauBar: return "tau-bar";
        case WeightId::NuRaw: return "nu";
        case WeightId::NuPrimeRaw: return "nu-prime";
    }
    return "?";
}

WeightId weight_from_name(const std::string& name) {
    for (WeightId id : {WeightId::One, WeightId::Tau, WeightId::TauTilde, WeightId::TauGammaTilde,
                        WeightId::TauTildePrime, WeightId::TauTildePrimeGamma, WeightId::TauBar,
                        WeightId::NuRaw, WeightId::NuPrimeRaw})
        if (weight_name(id) == name) return id;
    throw ConfigError("unknown weight '" + name + "'");
}

bool weight_is_integral(WeightId id) { return id == WeightId::One || id == WeightId::Tau; }

std::vector<std::vector<std::uint8_t>> build_omega_tables(std::uint64_t N,
                                                          const FactorTables& tables) {
    std::uint32_t imax = max_superdyadic_index(N);
    std::vector<std::vector<std::uint8_t>> om(imax + 1);
    for (std::uint32_t i = 0; i <= imax; ++i) {
        om[i].assign(N + 1, 0);
        for (std::uint32_t p : tables.primes()) {
            if (p > N) break;
            if (!in_superdyadic(p, i, N)) continue;
            for (std::uint64_t m = p; m <= N; m += p) om[i][m]++;
        }
    }
    return om;
}

std::vector<std::uint8_t> build_exceptional_mask(std::uint64_t N, const MajorantParams& params,
                                                 const FactorTables& tables) {
    std::vector<std::uint8_t> mask(N + 1, 0);
    for (std::uint64_t n = 1; n <= N; ++n)
        if (is_rough_S1(n, N, params.c1, tables) || is_smooth_S2(n, N, params.gamma_inv, tables))
            mask[n] = 1;
    return mask;
}

namespace {

// truncated divisor counts by divisor sieve; coprimality filter optional
std::vector<std::uint16_t> truncated_count_sieve(std::uint64_t N, std::uint64_t gamma_inv,
                                                 std::uint64_t coprime_to) {
    std::vector<std::uint16_t> cnt(N + 1, 0);
    for (std::uint64_t d = 1; d <= N && below_gamma_threshold(d, gamma_inv, N); ++d) {
        if (coprime_to > 1 && std::gcd(d, coprime_to) != 1) continue;
        for (std::uint64_t m = d; m <= N; m += d) cnt[m]++;
    }
    return cnt;
}

struct ClusterGrid {
    // valid specs grouped by s, i ascending (the pointwise evaluation order)
    std::vector<ClusterSpec> specs;
};

ClusterGrid make_cluster_grid(std::uint64_t N, const MajorantParams& params) {
    ClusterGrid g;
    auto [slo, shi] = params.cluster_s_bounds(N);
    for (std::int64_t s = slo; s <= shi; ++s) {
        auto [ilo, ihi] = params.cluster_i_bounds(N, s);
        for (std::int64_t i = ilo; i <= ihi; ++i) {
            auto spec = ClusterSpec::make(i, static_cast<std::uint64_t>(s), params.gamma_inv);
            if (spec) g.specs.push_back(*spec);
        }
    }
    return g;
}

std::uint64_t binom_small(std::uint32_t n, std::uint64_t k) {
    if (k > n) return 0;
    unsigned __int128 r = 1;
    std::uint64_t kk = std::min<std::uint64_t>(k, n - k);
    for (std::uint64_t j = 1; j <= kk; ++j) r = r * (n - kk + j) / j;
    return static_cast<std::uint64_t>(r);
}

} // namespace

WeightArray build_weight_array(WeightId id, std::uint64_t N, const FactorTables& tables,
                               const MajorantParams& params,
                               const std::optional<WContext>& wctx) {
    if (N > tables.limit()) throw RangeError("weight table needs sieve up to N");
    WeightArray w;
    w.id = id;
    w.N = N;
    double logN = std::log(static_cast<double>(N));

    switch (id) {
        case WeightId::One: {
            w.ints.assign(N + 1, 1);
            w.ints[0] = 0;
            return w;
        }
        case WeightId::Tau: {
            w.ints.assign(N + 1, 0);
            for (std::uint64_t n = 1; n <= N; ++n) w.ints[n] = tables.tau(n);
            return w;
        }
        case WeightId::TauTilde: {
            w.reals.assign(N + 1, 0.0);
            for (std::uint64_t n = 1; n <= N; ++n) w.reals[n] = tables.tau(n) / logN;
            return w;
        }
        case WeightId::TauGammaTilde: {
            auto cnt = truncated_count_sieve(N, params.gamma_inv, 1);
            w.reals.assign(N + 1, 0.0);
            double g = static_cast<double>(params.gamma_inv);
            for (std::uint64_t n = 1; n <= N; ++n) w.reals[n] = cnt[n] * g / logN;
            return w;
        }
        case WeightId::TauTildePrime: {
            if (!wctx) throw ConfigError("weight needs a W context");
            w.reals.assign(N + 1, 0.0);
            for (std::uint64_t n = 1; n <= N; ++n)
                w.reals[n] = tau_tilde_prime(n, *wctx, N, tables);
            return w;
        }
        case WeightId::TauTildePrimeGamma: {
            if (!wctx) throw ConfigError("weight needs a W context");
            auto cnt = truncated_count_sieve(N, params.gamma_inv, wctx->W);
            w.reals.assign(N + 1, 0.0);
            double scale = static_cast<double>(wctx->W) / static_cast<double>(wctx->phiW) *
                           static_cast<double>(params.gamma_inv);
            for (std::uint64_t n = 1; n <= N; ++n) w.reals[n] = scale * cnt[n] / logN;
            return w;
        }
        case WeightId::TauBar: {
            if (!wctx) throw ConfigError("weight needs a W context");
            w.reals.assign(N + 1, 0.0);
            for (std::uint64_t n = 1; n <= N; ++n) w.reals[n] = tau_bar(n, *wctx, N, tables);
            return w;
        }
        case WeightId::NuRaw:
        case WeightId::NuPrimeRaw: {
            if (id == WeightId::NuPrimeRaw && !wctx)
                throw ConfigError("weight needs a W context");
            std::uint64_t coprime_to = (id == WeightId::NuPrimeRaw) ? wctx->W : 1;
            auto cnt = truncated_count_sieve(N, params.gamma_inv, coprime_to);
            auto om = build_omega_tables(N, tables);
            ClusterGrid grid = make_cluster_grid(N, params);
            std::vector<std::uint8_t> mask;
            if (id == WeightId::NuRaw) mask = build_exceptional_mask(N, params, tables);

            double base = std::ldexp(1.0, static_cast<int>(2 * params.gamma_inv));
            double tg_scale = static_cast<double>(params.gamma_inv) / logN;
            if (id == WeightId::NuPrimeRaw)
                tg_scale *= static_cast<double>(wctx->W) / static_cast<double>(wctx->phiW);
            w.reals.assign(N + 1, 0.0);
            for (std::uint64_t n = 1; n <= N; ++n) {
                double sum = 0;
                for (const auto& spec : grid.specs) {
                    std::uint32_t i = static_cast<std::uint32_t>(spec.i);
                    std::uint32_t omega = i < om.size() ? om[i][n] : 0;
                    std::uint64_t c = binom_small(omega, spec.m0);
                    if (c > 0) sum += std::ldexp(static_cast<double>(c), static_cast<int>(spec.s));
                }
                double v = (base + sum) * (cnt[n] * tg_scale);
                if (id == WeightId::NuRaw && mask[n]) v += tables.tau(n) / logN;
                w.reals[n] = v;
            }
            return w;
        }
    }
    throw ConfigError("unhandled weight");
}

} // namespace divcorr
