#include "divcorr/correlation.hpp"

#include <chrono>
#include <cmath>

#include "divcorr/reduction.hpp"

namespace divcorr {

namespace {

std::string u128_to_string(unsigned __int128 v) {
    if (v == 0) return "0";
    std::string s;
    while (v > 0) {
        s.push_back(static_cast<char>('0' + static_cast<int>(v % 10)));
        v /= 10;
    }
    return std::string(s.rbegin(), s.rend());
}

std::string body_description(const ConvexBody& body) {
    std::string s = body.is_box() ? "box" : "polytope";
    const Box& b = body.bounding_box();
    s += "[";
    for (std::size_t k = 0; k < b.lo.size(); ++k) {
        if (k) s += ",";
        s += std::to_string(b.lo[k]) + ".." + std::to_string(b.hi[k]);
    }
    s += "]";
    return s;
}

// Advance a mixed-radix odometer within the bounding box; returns false on wrap.
inline void advance(std::vector<std::int64_t>& pt, const Box& box) {
    for (std::size_t k = pt.size(); k-- > 0;) {
        if (pt[k] < box.hi[k]) {
            ++pt[k];
            return;
        }
        pt[k] = box.lo[k];
    }
}

} // namespace

CorrelationReport correlate(const AffineSystem& system, const ConvexBody& body, std::uint64_t N,
                            const WeightArray& weight, unsigned workers,
                            const std::vector<std::uint8_t>* exceptional_mask) {
    auto t0 = std::chrono::steady_clock::now();
    if (system.dimension() != body.dimension())
        throw ConfigError("system/body dimension mismatch");
    if (weight.N < N) throw RangeError("weight table shorter than N");
    if (!check_range(system, body, N))
        throw RangeError("Psi(K) is not contained in [1, N]^t");

    CorrelationReport rep;
    rep.system_key = system.cache_key();
    rep.body_desc = body_description(body);
    rep.N = N;
    rep.weight = weight.id;

    std::uint64_t total = body.empty() ? 0 : body.bounding_count();
    std::uint64_t blocks = (total + kReductionBlock - 1) / kReductionBlock;
    const bool integral = weight.integral();

    if (integral) {
        // static guard: product of t max weights times count must fit u128
        double maxw = 1;
        for (std::uint64_t n = 1; n <= N; ++n)
            maxw = std::max(maxw, static_cast<double>(weight.at_int(n)));
        double bits = system.size() * std::log2(std::max(2.0, maxw)) +
                      std::log2(static_cast<double>(total + 1));
        if (bits > 120) throw CapacityError("integer correlation sum may overflow");
    }

    std::vector<unsigned __int128> int_partials(integral ? blocks : 0);
    std::vector<unsigned __int128> int_exc_partials(integral && exceptional_mask ? blocks : 0);
    std::vector<double> real_partials(integral ? 0 : blocks, 0.0);
    std::vector<double> real_exc_partials(!integral && exceptional_mask ? blocks : 0, 0.0);
    std::vector<std::uint64_t> member_counts(blocks, 0);

    const bool is_box = body.is_box();
    const Box& bbox = body.bounding_box();

    for_each_block(total, workers, [&](std::uint64_t blk, std::uint64_t begin, std::uint64_t end) {
        std::vector<std::int64_t> pt;
        body.decode(begin, pt);
        unsigned __int128 isum = 0, iexc = 0;
        CompensatedAccumulator racc, rexc;
        std::uint64_t members = 0;
        std::vector<std::int64_t> values(system.size());
        for (std::uint64_t idx = begin; idx < end; ++idx) {
            bool inside = is_box || body.contains(pt);
            if (inside) {
                ++members;
                bool exc = false;
                if (integral) {
                    unsigned __int128 prod = 1;
                    for (std::size_t i = 0; i < system.size(); ++i) {
                        std::int64_t v = system.form(i).evaluate(pt);
                        prod *= weight.at_int(static_cast<std::uint64_t>(v));
                        if (exceptional_mask && (*exceptional_mask)[static_cast<std::uint64_t>(v)])
                            exc = true;
                    }
                    isum += prod;
                    if (exc) iexc += prod;
                } else {
                    double prod = 1;
                    for (std::size_t i = 0; i < system.size(); ++i) {
                        std::int64_t v = system.form(i).evaluate(pt);
                        prod *= weight.at_real(static_cast<std::uint64_t>(v));
                        if (exceptional_mask && (*exceptional_mask)[static_cast<std::uint64_t>(v)])
                            exc = true;
                    }
                    racc.add(prod);
                    if (exc) rexc.add(prod);
                }
            }
            advance(pt, bbox);
        }
        member_counts[blk] = members;
        if (integral) {
            int_partials[blk] = isum;
            if (exceptional_mask) int_exc_partials[blk] = iexc;
        } else {
            real_partials[blk] = racc.value();
            if (exceptional_mask) real_exc_partials[blk] = rexc.value();
        }
    });

    for (std::uint64_t b = 0; b < blocks; ++b) rep.lattice_count += member_counts[b];

    if (integral) {
        unsigned __int128 raw = 0, exc = 0;
        for (std::uint64_t b = 0; b < blocks; ++b) raw += int_partials[b];
        if (exceptional_mask)
            for (std::uint64_t b = 0; b < blocks; ++b) exc += int_exc_partials[b];
        rep.raw_exact = u128_to_string(raw);
        rep.raw = static_cast<double>(raw);
        if (exceptional_mask && raw > 0)
            rep.exceptional_fraction = static_cast<double>(exc) / static_cast<double>(raw);
    } else {
        rep.raw = pairwise_sum(real_partials);
        if (exceptional_mask && rep.raw != 0)
            rep.exceptional_fraction = pairwise_sum(real_exc_partials) / rep.raw;
    }

    VolumeEstimate vol = body.volume();
    rep.volume = vol.value;
    rep.volume_exact = vol.exact;
    if (vol.value > 0) rep.normalized = rep.raw / vol.value;
    rep.runtime_ms = std::chrono::duration<double, std::milli>(
                         std::chrono::steady_clock::now() - t0)
                         .count();
    return rep;
}

// ---------------------------------------------------------------------------
// Naive oracle
// ---------------------------------------------------------------------------

namespace {

std::uint64_t tau_by_trial_division(std::uint64_t n) {
    std::uint64_t cnt = 0;
    for (std::uint64_t d = 1; d * d <= n; ++d) {
        if (n % d) continue;
        cnt += (d * d == n) ? 1 : 2;
    }
    return cnt;
}

} // namespace

CorrelationReport correlate_oracle(const AffineSystem& system, const ConvexBody& body,
                                   std::uint64_t N, WeightId weight) {
    if (!weight_is_integral(weight))
        throw ConfigError("the oracle runner handles integral weights only");
    if (!check_range(system, body, N))
        throw RangeError("Psi(K) is not contained in [1, N]^t");

    CorrelationReport rep;
    rep.system_key = system.cache_key();
    rep.body_desc = body_description(body);
    rep.N = N;
    rep.weight = weight;

    unsigned __int128 raw = 0;
    std::uint64_t members = 0;
    const Box& bbox = body.bounding_box();
    std::size_t d = body.dimension();
    std::vector<std::int64_t> pt(d);

    // plain nested iteration, rational membership straight off the constraints
    std::function<void(std::size_t)> rec = [&](std::size_t k) {
        if (k == d) {
            if (!body.is_box()) {
                const Polytope* poly = body.polytope_data();
                for (std::size_t r = 0; r < poly->rows.size(); ++r) {
                    ExactRational acc(0);
                    for (std::size_t c = 0; c < d; ++c)
                        acc += poly->rows[r][c] * ExactRational(static_cast<long>(pt[c]));
                    if (acc > poly->rhs[r]) return;
                }
            }
            ++members;
            unsigned __int128 prod = 1;
            for (std::size_t i = 0; i < system.size(); ++i) {
                std::int64_t v = 0;
                for (std::size_t c = 0; c < d; ++c) v += system.form(i).coeffs[c] * pt[c];
                v += system.form(i).constant;
                prod *= (weight == WeightId::Tau)
                            ? tau_by_trial_division(static_cast<std::uint64_t>(v))
                            : 1;
            }
            raw += prod;
            return;
        }
        for (std::int64_t x = bbox.lo[k]; x <= bbox.hi[k]; ++x) {
            pt[k] = x;
            rec(k + 1);
        }
    };
    if (!body.empty()) rec(0);

    rep.raw_exact = u128_to_string(raw);
    rep.raw = static_cast<double>(raw);
    rep.lattice_count = members;
    VolumeEstimate vol = body.volume();
    rep.volume = vol.value;
    rep.volume_exact = vol.exact;
    if (vol.value > 0) rep.normalized = rep.raw / vol.value;
    return rep;
}

// ---------------------------------------------------------------------------
// Main-theorem pipeline, Ingham, moments
// ---------------------------------------------------------------------------

MainTheoremRun verify_main_theorem(const AffineSystem& system,
                                   const std::function<ConvexBody(std::uint64_t)>& body_for_n,
                                   const std::vector<std::uint64_t>& grid, std::uint64_t p_max,
                                   std::uint32_t trunc, const FactorTables& tables,
                                   unsigned workers) {
    MainTheoremRun run;
    std::uint64_t maxN = 0;
    for (auto n : grid) maxN = std::max(maxN, n);
    run.reference = singular_product(system, p_max, trunc, maxN, workers);

    MajorantParams defaults;
    for (std::uint64_t N : grid) {
        WeightArray w = build_weight_array(WeightId::TauTilde, N, tables, defaults, std::nullopt);
        CorrelationReport rep = correlate(system, body_for_n(N), N, w, workers);
        rep.reference = run.reference.value;
        rep.reference_lower = run.reference.lower;
        rep.reference_upper = run.reference.upper;
        if (run.reference.value != 0)
            rep.deviation = std::fabs(rep.normalized / run.reference.value - 1.0);
        run.reports.push_back(std::move(rep));
    }
    return run;
}

ExactRational sigma_minus_one(std::uint64_t a) {
    ExactRational s(0);
    for (std::uint64_t d = 1; d <= a; ++d)
        if (a % d == 0) s += make_rational(1, static_cast<long>(d));
    return s;
}

InghamResult ingham(std::uint64_t a, std::uint64_t N, const FactorTables& tables) {
    if (a < 1) throw ConfigError("shift a must be >= 1");
    if (N + a > tables.limit()) throw RangeError("ingham needs sieve up to N + a");
    unsigned __int128 raw = 0;
    for (std::uint64_t n = 1; n <= N; ++n)
        raw += static_cast<unsigned __int128>(tables.tau(n)) * tables.tau(n + a);
    InghamResult res;
    res.N = N;
    res.a = a;
    res.raw_exact = u128_to_string(raw);
    res.sigma_minus1 = to_double(sigma_minus_one(a));
    double logN = std::log(static_cast<double>(N));
    double main = 6.0 / (M_PI * M_PI) * res.sigma_minus1 * static_cast<double>(N) * logN * logN;
    res.ratio = static_cast<double>(raw) / main;
    return res;
}

double kth_moment(const AffineSystem& system, const ConvexBody& body, std::uint64_t N,
                  std::uint32_t k, const FactorTables& tables, unsigned workers) {
    if (k > 6) throw CapacityError("k-th moment limited to k <= 6");
    MajorantParams defaults;
    WeightArray w;
    w.id = WeightId::Tau;
    w.N = N;
    w.ints.assign(N + 1, 0);
    for (std::uint64_t n = 1; n <= N; ++n) {
        std::uint64_t t = 1;
        for (std::uint32_t j = 0; j < k; ++j) t *= tables.tau(n);
        w.ints[n] = t;
    }
    CorrelationReport rep = correlate(system, body, N, w, workers);
    if (rep.lattice_count == 0) return 0;
    return rep.raw / static_cast<double>(rep.lattice_count);
}

// ---------------------------------------------------------------------------
// nu'-based empirical checks
// ---------------------------------------------------------------------------

namespace {

// deterministic mean of table[bigW n + b] over n = 1..M
double progression_mean(const WeightArray& table, std::uint64_t bigW, std::uint64_t b,
                        std::uint64_t M, unsigned workers) {
    std::uint64_t blocks = (M + kReductionBlock - 1) / kReductionBlock;
    std::vector<double> partials(blocks, 0.0);
    for_each_block(M, workers, [&](std::uint64_t blk, std::uint64_t begin, std::uint64_t end) {
        CompensatedAccumulator acc;
        for (std::uint64_t idx = begin; idx < end; ++idx) {
            std::uint64_t n = idx + 1;
            acc.add(table.at_real(bigW * n + b));
        }
        partials[blk] = acc.value();
    });
    return pairwise_sum(partials) / static_cast<double>(M);
}

void validate_b(const WContext& ctx, std::uint64_t b, const FactorTables& tables) {
    if (b < 1 || b > ctx.bigW) throw ConfigError("residue b must lie in [1, bigW]");
    std::uint64_t vb = varpi(b, ctx, tables);
    if ((ctx.bigW / ctx.W) % vb != 0)
        throw ConfigError("residue b has varpi(b) not dividing bigW/W");
}

} // namespace

LinearFormsReport linear_forms_check(const AffineSystem& system, const ConvexBody& body,
                                     std::uint64_t N, const MajorantParams& params,
                                     const WContext& ctx, const std::vector<std::uint64_t>& b,
                                     const FactorTables& tables, unsigned workers) {
    if (!system.finite_complexity())
        throw InfiniteComplexityError("linear forms check needs a finite-complexity system");
    if (b.size() != system.size())
        throw ConfigError("one residue b_j per form is required");
    for (auto bj : b) validate_b(ctx, bj, tables);

    WeightArray nu = build_weight_array(WeightId::NuPrimeRaw, N, tables, params, ctx);

    LinearFormsReport rep;
    rep.bigW = ctx.bigW;
    for (auto bj : b) {
        std::uint64_t M = (N - bj) / ctx.bigW;
        if (M < 16) throw RangeError("bigW too large: no room to measure the one-form mean");
        rep.c_primes.push_back(progression_mean(nu, ctx.bigW, bj, M, workers));
    }

    // transformed system psi'_j = bigW psi_j + b_j evaluated through the engine
    std::vector<AffineForm> tforms;
    for (std::size_t j = 0; j < system.size(); ++j) {
        AffineForm f = system.form(j);
        for (auto& c : f.coeffs) c *= static_cast<std::int64_t>(ctx.bigW);
        f.constant = f.constant * static_cast<std::int64_t>(ctx.bigW) +
                     static_cast<std::int64_t>(b[j]);
        tforms.push_back(std::move(f));
    }
    AffineSystem tsystem = AffineSystem::create(std::move(tforms));
    CorrelationReport core = correlate(tsystem, body, N, nu, workers);
    if (core.lattice_count == 0) throw RangeError("empty body in linear forms check");
    rep.mean = core.raw / static_cast<double>(core.lattice_count);
    rep.sample_points = core.lattice_count;
    double denom = 1;
    for (double c : rep.c_primes) denom *= c;
    rep.deviation = std::fabs(rep.mean / denom - 1.0);
    return rep;
}

CorrelationConditionReport correlation_condition_check(
    const std::vector<std::int64_t>& shifts, const std::vector<std::uint64_t>& b,
    std::uint64_t interval_lo, std::uint64_t interval_hi, std::uint64_t N,
    const MajorantParams& params, const WContext& ctx, const SigmaParams& sigma,
    const FactorTables& tables) {
    CorrelationConditionReport rep;
    std::size_t m = shifts.size();
    if (m != b.size()) throw ConfigError("one residue per shift is required");
    if (m < 2) {
        rep.applicable = false;
        return rep;
    }
    for (auto bj : b) validate_b(ctx, bj, tables);
    if (interval_lo < 1 || interval_lo > interval_hi)
        throw ConfigError("invalid interval");

    WeightArray nu = build_weight_array(WeightId::NuPrimeRaw, N, tables, params, ctx);

    // range check each factor over the interval
    for (std::size_t j = 0; j < m; ++j) {
        __int128 lo_v = static_cast<__int128>(ctx.bigW) * (static_cast<__int128>(interval_lo) + shifts[j]) + b[j];
        __int128 hi_v = static_cast<__int128>(ctx.bigW) * (static_cast<__int128>(interval_hi) + shifts[j]) + b[j];
        if (lo_v < 1 || hi_v > static_cast<__int128>(N))
            throw RangeError("shifted progression leaves [1, N]");
    }

    std::vector<double> cps(m);
    for (std::size_t j = 0; j < m; ++j) {
        std::uint64_t M = (N - b[j]) / ctx.bigW;
        cps[j] = progression_mean(nu, ctx.bigW, b[j], M, 1);
    }

    std::uint64_t len = interval_hi - interval_lo + 1;
    std::uint64_t blocks = (len + kReductionBlock - 1) / kReductionBlock;
    std::vector<double> partials(blocks, 0.0);
    for_each_block(len, 1, [&](std::uint64_t blk, std::uint64_t begin, std::uint64_t end) {
        CompensatedAccumulator acc;
        for (std::uint64_t idx = begin; idx < end; ++idx) {
            std::uint64_t n = interval_lo + idx;
            double prod = 1;
            for (std::size_t j = 0; j < m; ++j) {
                std::int64_t shifted = static_cast<std::int64_t>(n) + shifts[j];
                std::uint64_t v = ctx.bigW * static_cast<std::uint64_t>(shifted) + b[j];
                prod *= nu.at_real(v) / cps[j];
            }
            acc.add(prod);
        }
        partials[blk] = acc.value();
    });
    rep.lhs = pairwise_sum(partials) / static_cast<double>(len);

    DeltaSpec delta{ctx.bigW, b};
    SigmaParams sp = sigma;
    sp.w = ctx.w;
    sp.W_coprime = ctx.W;
    auto rhs_at = [&](double c) {
        SigmaParams s2 = sp;
        s2.c_sigma = c;
        double total = 0;
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = i + 1; j < m; ++j)
                total += sigma_m(shifts[i] - shifts[j], delta, s2, N, tables).value;
        return total;
    };
    rep.rhs = rhs_at(sp.c_sigma);
    rep.holds = rep.lhs <= rep.rhs;

    if (rep.lhs <= rhs_at(0.0)) {
        rep.min_c_sigma = 0.0;
    } else {
        double hi = 1.0;
        while (rhs_at(hi) < rep.lhs && hi < 1e6) hi *= 2;
        double lo = 0.0;
        for (int it = 0; it < 80; ++it) {
            double mid = 0.5 * (lo + hi);
            if (rhs_at(mid) >= rep.lhs)
                hi = mid;
            else
                lo = mid;
        }
        rep.min_c_sigma = hi;
    }
    return rep;
}

} // namespace divcorr
