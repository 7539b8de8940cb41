#include "doctest.h"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "divcorr/csv.hpp"
#include "divcorr/runconfig.hpp"

using namespace divcorr;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& body) {
    std::ofstream f(path, std::ios::binary);
    f << body;
}

} // namespace

TEST_CASE("bound expressions") {
    CHECK(RunConfig::eval_bound("12", 100) == 12);
    CHECK(RunConfig::eval_bound("-3", 100) == -3);
    CHECK(RunConfig::eval_bound("N", 100) == 100);
    CHECK(RunConfig::eval_bound("N-1", 100) == 99);
    CHECK(RunConfig::eval_bound("N/2", 100) == 50);
    CHECK(RunConfig::eval_bound("N/2-3", 100) == 47);
    CHECK(RunConfig::eval_bound("N+5", 100) == 105);
    CHECK_THROWS_AS(RunConfig::eval_bound("N*2", 100), ConfigError);
    CHECK_THROWS_AS(RunConfig::eval_bound("", 100), ConfigError);
}

TEST_CASE("config files reject unknown keys and bad shapes") {
    write_file("/tmp/divcorr_bad1.json", R"({"command":"sieve","frobnicate":1})");
    CHECK_THROWS_AS(RunConfig::from_json_file("/tmp/divcorr_bad1.json"), ConfigError);
    write_file("/tmp/divcorr_bad2.json", R"({"command":"alpha","system":{"forms":[]}})");
    RunConfig c2 = RunConfig::from_json_file("/tmp/divcorr_bad2.json");
    CHECK_THROWS_AS(c2.make_system(), ConfigError); // zero forms
    write_file("/tmp/divcorr_ok.json",
               R"({"command":"correlate","n":50,"weight":"tau",
                   "system":{"forms":[{"coeffs":[1],"constant":0},{"coeffs":[1],"constant":1}]},
                   "body":{"type":"box","lo":[1],"hi":["N-1"]}})");
    RunConfig ok = RunConfig::from_json_file("/tmp/divcorr_ok.json");
    CHECK(ok.command == "correlate");
    CHECK(ok.make_system().size() == 2);
}

TEST_CASE("runs rewrite byte-identical CSV bodies") {
    RunConfig cfg;
    cfg.command = "correlate";
    cfg.n = 300;
    cfg.weight = "tau-tilde";
    cfg.forms = std::vector<AffineForm>{{{1}, 0}, {{1}, 1}};
    BodySpec body;
    body.type = "box";
    body.lo = {"1"};
    body.hi = {"N-1"};
    cfg.body = body;
    cfg.out = "/tmp/divcorr_det_a";
    run(cfg);
    std::string a = slurp("/tmp/divcorr_det_a.csv");
    cfg.out = "/tmp/divcorr_det_b";
    cfg.workers = 8;
    run(cfg);
    std::string b = slurp("/tmp/divcorr_det_b.csv");
    CHECK(a == b);
    CHECK(!a.empty());
}

TEST_CASE("csv writer keeps the column contract") {
    CsvWriter w({"a", "b"});
    w.add_row({"1", "2"});
    CHECK_THROWS_AS(w.add_row({"1"}), ConfigError);
    CHECK(w.body() == "a,b\n1,2\n");
    CHECK(fmt_double(0.5) == "0.5");
    CHECK(fmt_double(1.0 / 3.0) == "0.33333333333333331");
}

#ifdef DIVCORR_BIN
TEST_CASE("cli exit codes") {
    std::string bin = DIVCORR_BIN;
    // config error: no command
    int rc = std::system((bin + " correlate --out /tmp/divcorr_cli_t1 >/dev/null 2>&1").c_str());
    CHECK(WEXITSTATUS(rc) == 2); // missing system
    rc = std::system((bin + " sieve --n 200 --out /tmp/divcorr_cli_t2 >/dev/null 2>&1").c_str());
    CHECK(WEXITSTATUS(rc) == 0);
    // range error: forms escape [1, N]
    rc = std::system((bin + " correlate --system \"1,0;1,1\" --body-lo 1 --body-hi 100 --n 50 "
                            "--weight tau --out /tmp/divcorr_cli_t3 >/dev/null 2>&1")
                         .c_str());
    CHECK(WEXITSTATUS(rc) == 3);
}
#endif

TEST_CASE("command dispatch smoke runs") {
    // exercise each subcommand end to end on small inputs
    auto base = [](const std::string& cmd, const std::string& out) {
        RunConfig cfg;
        cfg.command = cmd;
        cfg.out = out;
        return cfg;
    };
    {
        RunConfig cfg = base("sieve", "/tmp/divcorr_smoke_sieve");
        cfg.n = 1000;
        run(cfg);
        CHECK(slurp("/tmp/divcorr_smoke_sieve.csv").find("limit,") == 0);
    }
    {
        RunConfig cfg = base("alpha", "/tmp/divcorr_smoke_alpha");
        cfg.forms = std::vector<AffineForm>{{{1}, 0}, {{1}, 1}};
        cfg.moduli = {2, 3};
        run(cfg);
        CHECK(slurp("/tmp/divcorr_smoke_alpha.csv").find("1/6") != std::string::npos);
    }
    {
        RunConfig cfg = base("beta", "/tmp/divcorr_smoke_beta");
        cfg.forms = std::vector<AffineForm>{{{1}, 0}, {{1}, 1}};
        cfg.p = 2;
        cfg.trunc = 10;
        run(cfg);
        CHECK(slurp("/tmp/divcorr_smoke_beta.csv").find("1535/2048") != std::string::npos);
    }
    {
        RunConfig cfg = base("singular-product", "/tmp/divcorr_smoke_sp");
        cfg.forms = std::vector<AffineForm>{{{1}, 0}, {{1}, 1}};
        cfg.pmax = 100;
        cfg.trunc = 8;
        run(cfg);
    }
    {
        RunConfig cfg = base("ingham", "/tmp/divcorr_smoke_ingham");
        cfg.n = 500;
        cfg.a = 1;
        run(cfg);
    }
    {
        RunConfig cfg = base("majorant-check", "/tmp/divcorr_smoke_mc");
        cfg.grid = {2000, 4000};
        run(cfg);
    }
    {
        RunConfig cfg = base("exceptional-density", "/tmp/divcorr_smoke_ed");
        cfg.grid = {2000, 4000};
        cfg.s_range = {8, 16};
        cfg.i_range = {1, 4};
        run(cfg);
        CHECK(slurp("/tmp/divcorr_smoke_ed.csv").find("xis") != std::string::npos);
    }
    {
        RunConfig cfg = base("linear-forms-check", "/tmp/divcorr_smoke_lf");
        cfg.forms = std::vector<AffineForm>{{{1}, 0}};
        cfg.n = 20000;
        cfg.w = 5.0;
        cfg.c1 = 0.6;
        BodySpec body;
        body.type = "box";
        body.lo = {"1"};
        body.hi = {"3333"};  // exactly (N-1)/bigW with bigW = 6 at these parameters
        cfg.body = body;
        run(cfg);
        // one-form case self-normalises
        CHECK(slurp("/tmp/divcorr_smoke_lf.csv").find("deviation,,0\n") != std::string::npos);
    }
    {
        RunConfig cfg = base("correlation-check", "/tmp/divcorr_smoke_cc");
        cfg.n = 20000;
        cfg.w = 5.0;
        cfg.c1 = 0.6;
        cfg.tuples = 3;
        run(cfg);
    }
    {
        RunConfig cfg = base("gowers", "/tmp/divcorr_smoke_gowers");
        cfg.grid = {300, 600};
        cfg.w_schedule = {5.0, 7.0};
        cfg.s = 2;
        run(cfg);
    }
    {
        RunConfig cfg = base("kth-moment", "/tmp/divcorr_smoke_km");
        cfg.forms = std::vector<AffineForm>{{{1}, 0}};
        cfg.grid = {1000, 4000};
        cfg.k = 2;
        BodySpec body;
        body.type = "box";
        body.lo = {"1"};
        body.hi = {"N"};
        cfg.body = body;
        run(cfg);
    }
    {
        RunConfig cfg = base("verify-main-theorem", "/tmp/divcorr_smoke_vmt");
        cfg.forms = std::vector<AffineForm>{{{1}, 0}, {{1}, 1}};
        cfg.grid = {500, 1000};
        cfg.pmax = 200;
        cfg.trunc = 8;
        BodySpec body;
        body.type = "box";
        body.lo = {"1"};
        body.hi = {"N-1"};
        cfg.body = body;
        run(cfg);
    }
    CHECK_THROWS_AS(run(base("no-such-command", "/tmp/divcorr_smoke_x")), ConfigError);
}
