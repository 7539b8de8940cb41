#include "divcorr/runconfig.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "json.hpp"

namespace divcorr {

using nlohmann::json;

namespace {

const std::set<std::string> kAllowedKeys = {
    "command", "n",       "grid",     "system",   "body",    "gamma_inv", "c1",
    "w",       "w_schedule", "s_range", "i_range", "trunc",  "pmax",      "weight",
    "a",       "k",       "s",        "shifts",   "b",       "tuples",    "interval",
    "c_sigma", "sigma0",  "moduli",   "p",        "workers", "seed",      "out"};

std::vector<AffineForm> parse_forms(const json& j) {
    if (!j.contains("forms") || !j["forms"].is_array())
        throw ConfigError("system.forms must be an array");
    std::vector<AffineForm> forms;
    for (const auto& f : j["forms"]) {
        AffineForm form;
        if (!f.contains("coeffs")) throw ConfigError("form needs coeffs");
        for (const auto& c : f["coeffs"]) form.coeffs.push_back(c.get<std::int64_t>());
        form.constant = f.value("constant", 0ll);
        forms.push_back(std::move(form));
    }
    return forms;
}

BodySpec parse_body(const json& j) {
    BodySpec b;
    b.type = j.value("type", std::string("box"));
    if (b.type == "box") {
        for (const auto& v : j.at("lo"))
            b.lo.push_back(v.is_string() ? v.get<std::string>() : std::to_string(v.get<std::int64_t>()));
        for (const auto& v : j.at("hi"))
            b.hi.push_back(v.is_string() ? v.get<std::string>() : std::to_string(v.get<std::int64_t>()));
    } else if (b.type == "polytope") {
        for (const auto& row : j.at("rows")) {
            std::vector<std::string> r;
            for (const auto& v : row)
                r.push_back(v.is_string() ? v.get<std::string>() : std::to_string(v.get<std::int64_t>()));
            b.rows.push_back(std::move(r));
        }
        for (const auto& v : j.at("rhs"))
            b.rhs.push_back(v.is_string() ? v.get<std::string>() : std::to_string(v.get<std::int64_t>()));
        b.bound_cap = j.value("bound_cap", 0ll);
    } else {
        throw ConfigError("body.type must be box or polytope");
    }
    return b;
}

} // namespace

void RunConfig::merge_json_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config file " + path);
    json j;
    try {
        f >> j;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config root must be an object");
    for (const auto& [key, _] : j.items())
        if (!kAllowedKeys.count(key)) throw ConfigError("unknown config key '" + key + "'");

    if (j.contains("command")) command = j["command"].get<std::string>();
    if (j.contains("n")) n = j["n"].get<std::uint64_t>();
    if (j.contains("grid")) grid = j["grid"].get<std::vector<std::uint64_t>>();
    if (j.contains("system")) forms = parse_forms(j["system"]);
    if (j.contains("body")) body = parse_body(j["body"]);
    if (j.contains("gamma_inv")) gamma_inv = j["gamma_inv"].get<std::uint64_t>();
    if (j.contains("c1")) c1 = j["c1"].get<double>();
    if (j.contains("w")) {
        if (j["w"].is_string() && j["w"].get<std::string>() == "auto")
            w.reset();
        else
            w = j["w"].get<double>();
    }
    if (j.contains("w_schedule")) w_schedule = j["w_schedule"].get<std::vector<double>>();
    if (j.contains("s_range")) {
        auto v = j["s_range"].get<std::vector<std::int64_t>>();
        if (v.size() != 2) throw ConfigError("s_range must be [lo, hi]");
        s_range = {v[0], v[1]};
    }
    if (j.contains("i_range")) {
        auto v = j["i_range"].get<std::vector<std::int64_t>>();
        if (v.size() != 2) throw ConfigError("i_range must be [lo, hi]");
        i_range = {v[0], v[1]};
    }
    if (j.contains("trunc")) trunc = j["trunc"].get<std::uint32_t>();
    if (j.contains("pmax")) pmax = j["pmax"].get<std::uint64_t>();
    if (j.contains("weight")) weight = j["weight"].get<std::string>();
    if (j.contains("a")) a = j["a"].get<std::uint64_t>();
    if (j.contains("k")) k = j["k"].get<std::uint32_t>();
    if (j.contains("s")) s = j["s"].get<std::uint32_t>();
    if (j.contains("shifts")) shifts = j["shifts"].get<std::vector<std::int64_t>>();
    if (j.contains("b")) b = j["b"].get<std::vector<std::uint64_t>>();
    if (j.contains("tuples")) tuples = j["tuples"].get<std::uint32_t>();
    if (j.contains("interval")) {
        auto v = j["interval"].get<std::vector<std::uint64_t>>();
        if (v.size() != 2) throw ConfigError("interval must be [lo, hi]");
        interval_lo = v[0];
        interval_hi = v[1];
    }
    if (j.contains("c_sigma")) c_sigma = j["c_sigma"].get<double>();
    if (j.contains("sigma0")) sigma0 = j["sigma0"].get<double>();
    if (j.contains("moduli")) moduli = j["moduli"].get<std::vector<std::uint64_t>>();
    if (j.contains("p")) p = j["p"].get<std::uint64_t>();
    if (j.contains("workers")) workers = j["workers"].get<unsigned>();
    if (j.contains("seed")) seed = j["seed"].get<std::uint64_t>();
    if (j.contains("out")) out = j["out"].get<std::string>();
}

RunConfig RunConfig::from_json_file(const std::string& path) {
    RunConfig c;
    c.merge_json_file(path);
    return c;
}

MajorantParams RunConfig::majorant_params() const {
    MajorantParams p;
    p.gamma_inv = gamma_inv;
    p.c1 = c1;
    if (s_range) p.s_range = ManualRange{s_range->first, s_range->second};
    if (i_range) p.i_range = ManualRange{i_range->first, i_range->second};
    p.w_mode = w_mode();
    p.validate();
    return p;
}

WMode RunConfig::w_mode() const {
    if (w) return ManualW{*w};
    return AsymptoticFormula{};
}

std::int64_t RunConfig::eval_bound(const std::string& expr, std::uint64_t N) {
    std::string s = expr;
    s.erase(std::remove(s.begin(), s.end(), ' '), s.end());
    if (s.empty()) throw ConfigError("empty bound expression");
    std::size_t pos = 0;
    std::int64_t value;
    if (s[0] == 'N') {
        value = static_cast<std::int64_t>(N);
        pos = 1;
        if (pos < s.size() && s[pos] == '/') {
            std::size_t used = 0;
            std::int64_t div = std::stoll(s.substr(pos + 1), &used);
            if (div <= 0) throw ConfigError("bound divisor must be positive");
            value /= div;
            pos += 1 + used;
        }
    } else {
        std::size_t used = 0;
        value = std::stoll(s, &used);
        pos = used;
    }
    if (pos < s.size()) {
        char op = s[pos];
        if (op != '+' && op != '-') throw ConfigError("bad bound expression '" + expr + "'");
        std::size_t used = 0;
        std::int64_t off = std::stoll(s.substr(pos + 1), &used);
        value += (op == '+') ? off : -off;
        pos += 1 + used;
    }
    if (pos != s.size()) throw ConfigError("bad bound expression '" + expr + "'");
    return value;
}

ConvexBody RunConfig::make_body(std::uint64_t N) const {
    if (!body) throw ConfigError("this command needs a body");
    if (body->type == "box") {
        std::vector<std::int64_t> lo, hi;
        for (const auto& e : body->lo) lo.push_back(eval_bound(e, N));
        for (const auto& e : body->hi) hi.push_back(eval_bound(e, N));
        return ConvexBody::box(std::move(lo), std::move(hi));
    }
    Polytope poly;
    for (const auto& row : body->rows) {
        std::vector<ExactRational> r;
        for (const auto& cell : row) {
            ExactRational q(cell);
            q.canonicalize();
            r.push_back(q);
        }
        poly.rows.push_back(std::move(r));
    }
    for (const auto& cell : body->rhs) {
        ExactRational q(cell);
        q.canonicalize();
        poly.rhs.push_back(q);
    }
    std::int64_t cap = body->bound_cap > 0 ? body->bound_cap : static_cast<std::int64_t>(N);
    return ConvexBody::polytope(std::move(poly), cap);
}

AffineSystem RunConfig::make_system() const {
    if (!forms || forms->empty()) throw ConfigError("this command needs a system");
    return AffineSystem::create(*forms);
}

} // namespace divcorr
