#include <cstdio>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "divcorr/runconfig.hpp"

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep))
        if (!item.empty()) out.push_back(item);
    return out;
}

// "1,0;1,1" -> forms (coeffs..., constant), one ';'-separated group per form
std::vector<divcorr::AffineForm> parse_system_arg(const std::string& arg) {
    std::vector<divcorr::AffineForm> forms;
    for (const auto& group : split(arg, ';')) {
        std::vector<std::string> cells = split(group, ',');
        if (cells.size() < 2)
            throw divcorr::ConfigError("each form needs at least one coefficient and a constant");
        divcorr::AffineForm f;
        for (std::size_t i = 0; i + 1 < cells.size(); ++i)
            f.coeffs.push_back(std::stoll(cells[i]));
        f.constant = std::stoll(cells.back());
        forms.push_back(std::move(f));
    }
    return forms;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"divisor-correlation laboratory: exact local densities, the truncated-divisor "
                 "majorant, W-tricked divisor sums and lattice correlation sweeps"};
    app.require_subcommand(0, 1);

    std::string config_path, system_arg, body_lo, body_hi, grid_arg, shifts_arg, b_arg,
        moduli_arg, wsched_arg, weight_arg, out_arg;
    double gamma_arg = 0, w_arg = -1, c1_arg = -1, c_sigma_arg = -1, sigma0_arg = -1;
    std::uint64_t n_arg = 0, pmax_arg = 0, a_arg = 0, p_arg = 0, seed_arg = 0;
    std::vector<std::int64_t> srange, irange;
    std::vector<std::uint64_t> interval;
    unsigned workers_arg = 0;
    std::uint32_t trunc_arg = 0, k_arg = 0, s_arg = 0, tuples_arg = 0;
    bool have_srange = false, have_irange = false, have_interval = false;

    const std::vector<std::string> commands = {
        "sieve",        "alpha",        "beta",
        "singular-product", "correlate", "oracle",
        "verify-main-theorem", "ingham", "majorant-check",
        "exceptional-density", "linear-forms-check", "correlation-check",
        "gowers",       "kth-moment"};
    std::vector<CLI::App*> subs;
    for (const auto& c : commands) {
        subs.push_back(app.add_subcommand(c));
        subs.back()->fallthrough(); // global flags may follow the command
    }

    app.add_option("--config", config_path, "JSON config file; flags override it");
    app.add_option("--n", n_arg, "problem size N");
    app.add_option("--grid", grid_arg, "comma-separated N grid");
    app.add_option("--system", system_arg, "forms as 'c1,..,cd,const;...'");
    app.add_option("--body-lo", body_lo, "box lower bounds (expressions in N allowed)");
    app.add_option("--body-hi", body_hi, "box upper bounds");
    app.add_option("--gamma", gamma_arg, "truncation exponent, the reciprocal of an integer");
    app.add_option("--c1", c1_arg, "rough-set / bigW exponent parameter");
    app.add_option("--w", w_arg, "manual W-trick cutoff (omit for the asymptotic formula)");
    app.add_option("--w-schedule", wsched_arg, "comma list of w cutoffs, one per grid entry");
    app.add_option("--s-range", srange, "manual cluster level range lo hi")->expected(2);
    app.add_option("--i-range", irange, "manual interval index range lo hi")->expected(2);
    app.add_option("--trunc", trunc_arg, "fixed beta_p truncation cap");
    app.add_option("--pmax", pmax_arg, "largest prime in singular products");
    app.add_option("--weight", weight_arg, "weight id for correlate");
    app.add_option("--a", a_arg, "shift for the binary correlation");
    app.add_option("--k", k_arg, "moment order");
    app.add_option("--s", s_arg, "uniformity norm order (2 or 3)");
    app.add_option("--shifts", shifts_arg, "comma-separated shift tuple");
    app.add_option("--b", b_arg, "comma-separated residues");
    app.add_option("--tuples", tuples_arg, "number of random shift tuples");
    app.add_option("--interval", interval, "interval lo hi")->expected(2);
    app.add_option("--c-sigma", c_sigma_arg, "correlation weight constant");
    app.add_option("--sigma0", sigma0_arg, "sigma value at shift 0");
    app.add_option("--moduli", moduli_arg, "comma-separated moduli, one per form");
    app.add_option("--p", p_arg, "prime for the beta command");
    app.add_option("--workers", workers_arg, "worker threads for lattice sweeps");
    app.add_option("--seed", seed_arg, "seed for randomized suites");
    app.add_option("--out", out_arg, "output path prefix");

    try {
        app.parse(argc, argv);
        have_srange = srange.size() == 2;
        have_irange = irange.size() == 2;
        have_interval = interval.size() == 2;

        divcorr::RunConfig cfg;
        if (!config_path.empty()) cfg.merge_json_file(config_path);
        for (std::size_t i = 0; i < subs.size(); ++i)
            if (subs[i]->parsed()) cfg.command = commands[i];
        if (cfg.command.empty()) throw divcorr::ConfigError("no command given");

        if (n_arg) cfg.n = n_arg;
        if (!grid_arg.empty()) {
            cfg.grid.clear();
            for (const auto& t : split(grid_arg, ',')) cfg.grid.push_back(std::stoull(t));
        }
        if (!system_arg.empty()) cfg.forms = parse_system_arg(system_arg);
        if (!body_lo.empty() || !body_hi.empty()) {
            divcorr::BodySpec b;
            b.type = "box";
            b.lo = split(body_lo, ',');
            b.hi = split(body_hi, ',');
            cfg.body = b;
        }
        if (gamma_arg > 0) {
            double g = 1.0 / gamma_arg;
            auto gi = static_cast<std::uint64_t>(g + 0.5);
            if (gi < 2 || std::abs(g - static_cast<double>(gi)) > 1e-9)
                throw divcorr::ConfigError("--gamma must be the reciprocal of an integer >= 2");
            cfg.gamma_inv = gi;
        }
        if (c1_arg > 0) cfg.c1 = c1_arg;
        if (w_arg >= 0) cfg.w = w_arg;
        if (!wsched_arg.empty()) {
            cfg.w_schedule.clear();
            for (const auto& t : split(wsched_arg, ',')) cfg.w_schedule.push_back(std::stod(t));
        }
        if (have_srange) cfg.s_range = std::make_pair(srange[0], srange[1]);
        if (have_irange) cfg.i_range = std::make_pair(irange[0], irange[1]);
        if (trunc_arg) cfg.trunc = trunc_arg;
        if (pmax_arg) cfg.pmax = pmax_arg;
        if (!weight_arg.empty()) cfg.weight = weight_arg;
        if (a_arg) cfg.a = a_arg;
        if (k_arg) cfg.k = k_arg;
        if (s_arg) cfg.s = s_arg;
        if (!shifts_arg.empty()) {
            cfg.shifts.clear();
            for (const auto& t : split(shifts_arg, ',')) cfg.shifts.push_back(std::stoll(t));
        }
        if (!b_arg.empty()) {
            cfg.b.clear();
            for (const auto& t : split(b_arg, ',')) cfg.b.push_back(std::stoull(t));
        }
        if (tuples_arg) cfg.tuples = tuples_arg;
        if (have_interval) {
            cfg.interval_lo = interval[0];
            cfg.interval_hi = interval[1];
        }
        if (c_sigma_arg >= 0) cfg.c_sigma = c_sigma_arg;
        if (sigma0_arg >= 0) cfg.sigma0 = sigma0_arg;
        if (!moduli_arg.empty()) {
            cfg.moduli.clear();
            for (const auto& t : split(moduli_arg, ',')) cfg.moduli.push_back(std::stoull(t));
        }
        if (p_arg) cfg.p = p_arg;
        if (workers_arg) cfg.workers = workers_arg;
        if (seed_arg) cfg.seed = seed_arg;
        if (!out_arg.empty()) cfg.out = out_arg;

        divcorr::run(cfg);
        return 0;
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2; // parse problems are configuration errors
    } catch (const divcorr::Error& e) {
        std::fprintf(stderr, "error[%d]: %s\n", e.exit_code(), e.what());
        return e.exit_code();
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
