#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "divcorr/correlation.hpp"
#include "divcorr/csv.hpp"
#include "divcorr/gowers.hpp"
#include "divcorr/reduction.hpp"
#include "divcorr/runconfig.hpp"
#include "json.hpp"

namespace divcorr {

using nlohmann::ordered_json;

namespace {

std::vector<std::uint64_t> effective_grid(const RunConfig& cfg) {
    if (!cfg.grid.empty()) return cfg.grid;
    if (cfg.n > 0) return {cfg.n};
    throw ConfigError("command needs --n or --grid");
}

std::string opt_cell(const std::optional<double>& v) { return v ? fmt_double(*v) : ""; }

const std::vector<std::string> kCorrelateColumns = {
    "system",    "body",      "N",          "weight",     "raw",
    "raw_exact", "lattice_count", "volume", "volume_exact", "normalized",
    "reference", "ref_lower", "ref_upper",  "deviation",  "exceptional_fraction",
    "degenerate_regime", "manual_w", "manual_ranges"};

std::vector<std::string> correlate_row(const CorrelationReport& r) {
    return {r.system_key,
            r.body_desc,
            std::to_string(r.N),
            weight_name(r.weight),
            fmt_double(r.raw),
            r.raw_exact,
            std::to_string(r.lattice_count),
            fmt_double(r.volume),
            r.volume_exact ? "1" : "0",
            fmt_double(r.normalized),
            opt_cell(r.reference),
            opt_cell(r.reference_lower),
            opt_cell(r.reference_upper),
            opt_cell(r.deviation),
            opt_cell(r.exceptional_fraction),
            r.degenerate_regime ? "1" : "0",
            r.manual_w ? "1" : "0",
            r.manual_ranges ? "1" : "0"};
}

struct RunOutput {
    CsvWriter csv;
    ordered_json summary;
};

std::optional<WContext> maybe_context(const RunConfig& cfg, std::uint64_t N) {
    return make_context(N, cfg.c1, cfg.w_mode());
}

bool weight_needs_context(WeightId id) {
    return id == WeightId::TauTildePrime || id == WeightId::TauTildePrimeGamma ||
           id == WeightId::TauBar || id == WeightId::NuPrimeRaw;
}

void fill_mode_flags(CorrelationReport& rep, const RunConfig& cfg, std::uint64_t N) {
    rep.degenerate_regime = degenerate_regime(N, cfg.majorant_params());
    rep.manual_w = cfg.w.has_value();
    rep.manual_ranges = cfg.s_range.has_value() || cfg.i_range.has_value();
}

// ---------------------------------------------------------------------------

RunOutput cmd_sieve(const RunConfig& cfg) {
    std::uint64_t N = cfg.n;
    if (N < 2) throw ConfigError("sieve needs --n >= 2");
    FactorTables tables = FactorTables::build(N);
    unsigned __int128 tau_sum = 0;
    for (std::uint64_t n = 1; n <= N; ++n) tau_sum += tables.tau(n);
    std::string ts;
    {
        unsigned __int128 v = tau_sum;
        if (v == 0) ts = "0";
        while (v > 0) {
            ts.insert(ts.begin(), static_cast<char>('0' + static_cast<int>(v % 10)));
            v /= 10;
        }
    }
    CsvWriter csv({"limit", "prime_count", "tau_sum", "checksum"});
    csv.add_row({std::to_string(N), std::to_string(tables.primes().size()), ts,
                 std::to_string(tables.checksum())});
    return {std::move(csv), {{"limit", N}}};
}

RunOutput cmd_alpha(const RunConfig& cfg) {
    AffineSystem system = cfg.make_system();
    if (cfg.moduli.size() != system.size())
        throw ConfigError("alpha needs one modulus per form (--moduli)");
    ExactRational v = alpha(system, cfg.moduli);
    std::string mod;
    for (std::size_t i = 0; i < cfg.moduli.size(); ++i)
        mod += (i ? ";" : "") + std::to_string(cfg.moduli[i]);
    CsvWriter csv({"moduli", "alpha", "alpha_decimal"});
    csv.add_row({mod, fraction_string(v), fmt_double(to_double(v))});
    return {std::move(csv), {{"alpha", fraction_string(v)}}};
}

RunOutput cmd_beta(const RunConfig& cfg) {
    AffineSystem system = cfg.make_system();
    std::uint64_t N = cfg.n ? cfg.n : 1000000;
    std::uint32_t A = cfg.trunc ? cfg.trunc : default_truncation(cfg.p, N);
    BetaP b = beta_p(system, cfg.p, A);
    CsvWriter csv({"p", "truncation", "beta", "beta_decimal", "tail_bound_decimal", "exceptional"});
    csv.add_row({std::to_string(b.p), std::to_string(b.truncation), fraction_string(b.value),
                 fmt_double(to_double(b.value)), fmt_double(to_double(b.tail_bound)),
                 b.exceptional ? "1" : "0"});
    return {std::move(csv), {{"beta_decimal", to_double(b.value)}}};
}

RunOutput cmd_singular_product(const RunConfig& cfg) {
    AffineSystem system = cfg.make_system();
    std::uint64_t N = cfg.n ? cfg.n : 1000000;
    SingularProduct sp = singular_product(system, cfg.pmax, cfg.trunc, N, cfg.workers);
    CsvWriter csv({"p", "truncation", "beta_decimal", "tail_bound_decimal", "partial_product",
                   "exceptional"});
    for (std::size_t i = 0; i < sp.per_prime.size(); ++i) {
        const BetaP& b = sp.per_prime[i];
        csv.add_row({std::to_string(b.p), std::to_string(b.truncation),
                     fmt_double(to_double(b.value)), fmt_double(to_double(b.tail_bound)),
                     fmt_double(sp.partial_products[i]), b.exceptional ? "1" : "0"});
    }
    ordered_json summary{{"value", sp.value},
                         {"lower", sp.lower},
                         {"upper", sp.upper},
                         {"fitted_p2_constant", sp.fitted_p2_constant},
                         {"largest_exceptional", sp.largest_exceptional}};
    return {std::move(csv), std::move(summary)};
}

RunOutput cmd_correlate(const RunConfig& cfg, bool oracle) {
    AffineSystem system = cfg.make_system();
    std::uint64_t N = cfg.n;
    if (N == 0) throw ConfigError("correlate needs --n");
    ConvexBody body = cfg.make_body(N);
    WeightId wid = weight_from_name(cfg.weight);
    CorrelationReport rep;
    if (oracle) {
        rep = correlate_oracle(system, body, N, wid);
    } else {
        FactorTables tables = FactorTables::build(std::max<std::uint64_t>(N, 2));
        std::optional<WContext> ctx;
        if (weight_needs_context(wid)) ctx = maybe_context(cfg, N);
        WeightArray w = build_weight_array(wid, N, tables, cfg.majorant_params(), ctx);
        rep = correlate(system, body, N, w, cfg.workers);
    }
    fill_mode_flags(rep, cfg, N);
    CsvWriter csv(kCorrelateColumns);
    csv.add_row(correlate_row(rep));
    ordered_json summary{{"raw_exact", rep.raw_exact}, {"normalized", rep.normalized}};
    return {std::move(csv), std::move(summary)};
}

RunOutput cmd_verify_main_theorem(const RunConfig& cfg) {
    AffineSystem system = cfg.make_system();
    std::vector<std::uint64_t> grid = effective_grid(cfg);
    std::uint64_t maxN = *std::max_element(grid.begin(), grid.end());
    FactorTables tables = FactorTables::build(maxN);
    MainTheoremRun run = verify_main_theorem(
        system, [&](std::uint64_t N) { return cfg.make_body(N); }, grid, cfg.pmax, cfg.trunc,
        tables, cfg.workers);
    CsvWriter csv(kCorrelateColumns);
    std::vector<double> devs;
    for (auto& rep : run.reports) {
        fill_mode_flags(rep, cfg, rep.N);
        csv.add_row(correlate_row(rep));
        if (rep.deviation) devs.push_back(*rep.deviation);
    }
    ordered_json summary{{"reference", run.reference.value},
                         {"reference_lower", run.reference.lower},
                         {"reference_upper", run.reference.upper},
                         {"deviations", devs},
                         {"tables_checksum", tables.checksum()}};
    return {std::move(csv), std::move(summary)};
}

RunOutput cmd_ingham(const RunConfig& cfg) {
    std::vector<std::uint64_t> grid = effective_grid(cfg);
    std::uint64_t maxN = *std::max_element(grid.begin(), grid.end());
    FactorTables tables = FactorTables::build(maxN + cfg.a);
    CsvWriter csv({"N", "a", "raw_exact", "sigma_minus1", "ratio", "abs_deviation"});
    std::vector<double> ratios;
    std::uint64_t checksum = tables.checksum();
    for (std::uint64_t N : grid) {
        InghamResult r = ingham(cfg.a, N, tables);
        csv.add_row({std::to_string(r.N), std::to_string(r.a), r.raw_exact,
                     fmt_double(r.sigma_minus1), fmt_double(r.ratio),
                     fmt_double(std::fabs(r.ratio - 1.0))});
        ratios.push_back(r.ratio);
    }
    return {std::move(csv), {{"ratios", ratios}, {"tables_checksum", checksum}}};
}

RunOutput cmd_majorant_check(const RunConfig& cfg) {
    std::vector<std::uint64_t> grid = effective_grid(cfg);
    std::uint64_t maxN = *std::max_element(grid.begin(), grid.end());
    FactorTables tables = FactorTables::build(maxN);
    MajorantParams params = cfg.majorant_params();
    CsvWriter csv({"N", "mean_nu", "violations", "max_gap", "degenerate_regime", "manual_ranges"});
    std::vector<double> means;
    for (std::uint64_t N : grid) {
        WeightArray nu = build_weight_array(WeightId::NuRaw, N, tables, params, std::nullopt);
        double logN = std::log(static_cast<double>(N));
        CompensatedAccumulator mean;
        std::uint64_t violations = 0;
        double max_gap = 0;
        for (std::uint64_t n = 1; n <= N; ++n) {
            double nv = nu.at_real(n);
            mean.add(nv);
            double tt = tables.tau(n) / logN;
            if (tt > nv) {
                ++violations;
                max_gap = std::max(max_gap, tt - nv);
            }
        }
        double m = mean.value() / static_cast<double>(N);
        means.push_back(m);
        csv.add_row({std::to_string(N), fmt_double(m), std::to_string(violations),
                     fmt_double(max_gap), degenerate_regime(N, params) ? "1" : "0",
                     cfg.s_range || cfg.i_range ? "1" : "0"});
    }
    return {std::move(csv), {{"means", means}, {"tables_checksum", tables.checksum()}}};
}

RunOutput cmd_exceptional_density(const RunConfig& cfg) {
    std::vector<std::uint64_t> grid = effective_grid(cfg);
    std::uint64_t maxN = *std::max_element(grid.begin(), grid.end());
    FactorTables tables = FactorTables::build(maxN);
    MajorantParams params = cfg.majorant_params();
    CsvWriter csv({"kind", "N", "i", "s", "m0", "value", "bound", "holds"});
    for (std::uint64_t N : grid) {
        std::uint64_t s1 = 0, s2 = 0;
        for (std::uint64_t n = 1; n <= N; ++n) {
            if (is_rough_S1(n, N, params.c1, tables)) ++s1;
            if (is_smooth_S2(n, N, params.gamma_inv, tables)) ++s2;
        }
        csv.add_row({"s1", std::to_string(N), "", "", "",
                     fmt_double(static_cast<double>(s1) / N), "", ""});
        csv.add_row({"s2", std::to_string(N), "", "", "",
                     fmt_double(static_cast<double>(s2) / N), "", ""});
    }
    if (cfg.s_range && cfg.i_range) {
        std::uint64_t N = maxN;
        auto om = build_omega_tables(N, tables);
        for (std::int64_t s = cfg.s_range->first; s <= cfg.s_range->second; ++s) {
            for (std::int64_t i = cfg.i_range->first; i <= cfg.i_range->second; ++i) {
                auto spec = ClusterSpec::make(i, static_cast<std::uint64_t>(s), params.gamma_inv);
                if (!spec) continue;
                std::uint64_t hits = 0;
                for (std::uint64_t n = 1; n <= N; ++n) {
                    std::uint32_t omega =
                        static_cast<std::size_t>(i) < om.size() ? om[i][n] : 0;
                    if (omega >= spec->m0) ++hits;
                }
                double density = static_cast<double>(hits) / static_cast<double>(N);
                double rsum = interval_prime_reciprocal_sum(i, N, tables);
                double fact = 1;
                for (std::uint64_t j = 2; j <= spec->m0; ++j) fact *= static_cast<double>(j);
                double bound = std::pow(rsum, static_cast<double>(spec->m0)) / fact;
                bool holds = density <= bound * 1.10 + 1e-15;
                csv.add_row({"xis", std::to_string(N), std::to_string(i), std::to_string(s),
                             std::to_string(spec->m0), fmt_double(density), fmt_double(bound),
                             holds ? "1" : "0"});
            }
        }
    }
    return {std::move(csv), {{"grid", grid}, {"tables_checksum", tables.checksum()}}};
}

RunOutput cmd_linear_forms_check(const RunConfig& cfg) {
    AffineSystem system = cfg.make_system();
    std::uint64_t N = cfg.n;
    if (N == 0) throw ConfigError("linear-forms-check needs --n");
    FactorTables tables = FactorTables::build(N);
    WContext ctx = make_context(N, cfg.c1, cfg.w_mode());
    std::vector<std::uint64_t> b = cfg.b;
    if (b.empty()) b.assign(system.size(), 1);
    ConvexBody body = cfg.make_body(N);
    LinearFormsReport rep = linear_forms_check(system, body, N, cfg.majorant_params(), ctx, b,
                                               tables, cfg.workers);
    CsvWriter csv({"kind", "index", "value"});
    for (std::size_t j = 0; j < rep.c_primes.size(); ++j)
        csv.add_row({"c_prime", std::to_string(j + 1), fmt_double(rep.c_primes[j])});
    csv.add_row({"mean", "", fmt_double(rep.mean)});
    csv.add_row({"deviation", "", fmt_double(rep.deviation)});
    ordered_json summary{{"deviation", rep.deviation},
                         {"mean", rep.mean},
                         {"bigW", rep.bigW},
                         {"sample_points", rep.sample_points},
                         {"tables_checksum", tables.checksum()}};
    return {std::move(csv), std::move(summary)};
}

RunOutput cmd_correlation_check(const RunConfig& cfg) {
    std::uint64_t N = cfg.n;
    if (N == 0) throw ConfigError("correlation-check needs --n");
    FactorTables tables = FactorTables::build(N);
    WContext ctx = make_context(N, cfg.c1, cfg.w_mode());
    MajorantParams params = cfg.majorant_params();
    SigmaParams sig;
    sig.c_sigma = cfg.c_sigma;
    sig.sigma0 = cfg.sigma0;
    sig.w = ctx.w;

    CsvWriter csv({"tuple", "m", "shifts", "lhs", "rhs", "holds", "min_c_sigma"});
    double max_min_c = 0;
    bool all_hold = true;

    std::mt19937_64 rng(cfg.seed);
    std::uint32_t count = cfg.shifts.empty() ? cfg.tuples : 1;
    for (std::uint32_t t = 0; t < count; ++t) {
        std::vector<std::int64_t> shifts = cfg.shifts;
        std::vector<std::uint64_t> b = cfg.b;
        if (shifts.empty() || t > 0 || cfg.shifts.empty()) {
            std::uint32_t m = 2 + static_cast<std::uint32_t>(rng() % 2);
            std::uint64_t span = std::max<std::uint64_t>(4, N / ctx.bigW / 8);
            shifts.clear();
            for (std::uint32_t j = 0; j < m; ++j)
                shifts.push_back(static_cast<std::int64_t>(rng() % span));
        }
        if (b.size() != shifts.size()) b.assign(shifts.size(), 1);

        std::int64_t smin = *std::min_element(shifts.begin(), shifts.end());
        std::int64_t smax = *std::max_element(shifts.begin(), shifts.end());
        std::uint64_t bmax = *std::max_element(b.begin(), b.end());
        std::uint64_t lo = cfg.interval_lo;
        if (static_cast<std::int64_t>(lo) + smin < 1)
            lo = static_cast<std::uint64_t>(1 - smin);
        std::uint64_t hi = cfg.interval_hi;
        std::uint64_t cap = (N - bmax) / ctx.bigW;
        if (hi == 0 || hi + static_cast<std::uint64_t>(std::max<std::int64_t>(smax, 0)) > cap)
            hi = cap - static_cast<std::uint64_t>(std::max<std::int64_t>(smax, 0));
        if (hi <= lo) throw RangeError("correlation-check interval is empty");

        CorrelationConditionReport rep = correlation_condition_check(
            shifts, b, lo, hi, N, params, ctx, sig, tables);
        std::string sh;
        for (std::size_t j = 0; j < shifts.size(); ++j)
            sh += (j ? ";" : "") + std::to_string(shifts[j]);
        csv.add_row({std::to_string(t + 1), std::to_string(shifts.size()), sh,
                     fmt_double(rep.lhs), fmt_double(rep.rhs), rep.holds ? "1" : "0",
                     fmt_double(rep.min_c_sigma)});
        max_min_c = std::max(max_min_c, rep.min_c_sigma);
        all_hold = all_hold && rep.holds;
    }
    return {std::move(csv),
            {{"max_min_c_sigma", max_min_c},
             {"all_hold", all_hold},
             {"tables_checksum", tables.checksum()}}};
}

RunOutput cmd_gowers(const RunConfig& cfg) {
    std::vector<std::uint64_t> grid = effective_grid(cfg);
    if (!cfg.w_schedule.empty() && cfg.w_schedule.size() != grid.size())
        throw ConfigError("w_schedule must match the grid length");
    CsvWriter csv({"N", "s", "w", "W", "norm", "path"});
    std::vector<double> norms;
    for (std::size_t gi = 0; gi < grid.size(); ++gi) {
        std::uint64_t N = grid[gi];
        FactorTables tables = FactorTables::build(N);
        WMode mode = cfg.w_mode();
        if (!cfg.w_schedule.empty()) mode = ManualW{cfg.w_schedule[gi]};
        WContext ctx = make_context(N, cfg.c1, mode);
        std::vector<double> f(N + 1, 0.0);
        CompensatedAccumulator mean;
        for (std::uint64_t n = 1; n <= N; ++n) {
            f[n] = tau_tilde_prime(n, ctx, N, tables);
            mean.add(f[n]);
        }
        double m = mean.value() / static_cast<double>(N);
        for (std::uint64_t n = 1; n <= N; ++n) f[n] -= m;
        double norm = gowers_norm(f, cfg.s, /*fast=*/cfg.s == 2);
        norms.push_back(norm);
        csv.add_row({std::to_string(N), std::to_string(cfg.s), fmt_double(ctx.w),
                     std::to_string(ctx.W), fmt_double(norm),
                     cfg.s == 2 ? "autocorrelation" : "h1-conditioned"});
    }
    return {std::move(csv), {{"norms", norms}}};
}

RunOutput cmd_moment(const RunConfig& cfg) {
    AffineSystem system = cfg.make_system();
    std::vector<std::uint64_t> grid = effective_grid(cfg);
    std::uint64_t maxN = *std::max_element(grid.begin(), grid.end());
    FactorTables tables = FactorTables::build(maxN);
    CsvWriter csv({"N", "k", "moment", "loglog_slope"});
    std::vector<double> logs, loglogs;
    for (std::uint64_t N : grid) {
        double m = kth_moment(system, cfg.make_body(N), N, cfg.k, tables, cfg.workers);
        logs.push_back(std::log(m));
        loglogs.push_back(std::log(std::log(static_cast<double>(N))));
        double slope = 0;
        if (logs.size() >= 2) {
            // least squares through the points so far
            double mx = 0, my = 0;
            for (std::size_t i = 0; i < logs.size(); ++i) {
                mx += loglogs[i];
                my += logs[i];
            }
            mx /= logs.size();
            my /= logs.size();
            double num = 0, den = 0;
            for (std::size_t i = 0; i < logs.size(); ++i) {
                num += (loglogs[i] - mx) * (logs[i] - my);
                den += (loglogs[i] - mx) * (loglogs[i] - mx);
            }
            slope = den > 0 ? num / den : 0;
        }
        csv.add_row({std::to_string(N), std::to_string(cfg.k), fmt_double(std::exp(logs.back())),
                     fmt_double(slope)});
    }
    return {std::move(csv), {}};
}

} // namespace

void run(const RunConfig& cfg) {
    auto t0 = std::chrono::steady_clock::now();
    RunOutput out = [&]() -> RunOutput {
        const std::string& c = cfg.command;
        if (c == "sieve") return cmd_sieve(cfg);
        if (c == "alpha") return cmd_alpha(cfg);
        if (c == "beta") return cmd_beta(cfg);
        if (c == "singular-product") return cmd_singular_product(cfg);
        if (c == "correlate") return cmd_correlate(cfg, false);
        if (c == "oracle") return cmd_correlate(cfg, true);
        if (c == "verify-main-theorem") return cmd_verify_main_theorem(cfg);
        if (c == "ingham") return cmd_ingham(cfg);
        if (c == "majorant-check") return cmd_majorant_check(cfg);
        if (c == "exceptional-density") return cmd_exceptional_density(cfg);
        if (c == "linear-forms-check") return cmd_linear_forms_check(cfg);
        if (c == "correlation-check") return cmd_correlation_check(cfg);
        if (c == "gowers") return cmd_gowers(cfg);
        if (c == "kth-moment") return cmd_moment(cfg);
        throw ConfigError("unknown command '" + c + "'");
    }();

    std::string prefix = cfg.out.empty() ? ("out/" + cfg.command) : cfg.out;
    std::filesystem::path base(prefix);
    if (base.has_parent_path()) std::filesystem::create_directories(base.parent_path());
    out.csv.write(prefix + ".csv");

    double wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    ordered_json manifest;
    manifest["command"] = cfg.command;
    manifest["version"] = kVersion;
    manifest["wall_ms"] = wall_ms;
    ordered_json params;
    params["n"] = cfg.n;
    params["grid"] = cfg.grid;
    params["gamma_inv"] = cfg.gamma_inv;
    params["c1"] = cfg.c1;
    if (cfg.w) params["w"] = *cfg.w;
    if (!cfg.w_schedule.empty()) params["w_schedule"] = cfg.w_schedule;
    if (cfg.s_range) params["s_range"] = {cfg.s_range->first, cfg.s_range->second};
    if (cfg.i_range) params["i_range"] = {cfg.i_range->first, cfg.i_range->second};
    params["trunc"] = cfg.trunc;
    params["pmax"] = cfg.pmax;
    params["weight"] = cfg.weight;
    params["workers"] = cfg.workers;
    params["seed"] = cfg.seed;
    manifest["params"] = params;
    ordered_json flags;
    std::uint64_t flagN = cfg.n ? cfg.n : (cfg.grid.empty() ? 0 : cfg.grid.back());
    if (flagN >= 3) flags["degenerate_regime"] = degenerate_regime(flagN, cfg.majorant_params());
    flags["manual_w"] = cfg.w.has_value() || !cfg.w_schedule.empty();
    flags["manual_ranges"] = cfg.s_range.has_value() || cfg.i_range.has_value();
    manifest["flags"] = flags;
    manifest["rows"] = out.csv.row_count();
    manifest["summary"] = out.summary;

    std::ofstream mf(prefix + ".manifest.json", std::ios::binary);
    if (!mf) throw ConfigError("cannot open manifest output");
    mf << manifest.dump(2) << "\n";
}

} // namespace divcorr
