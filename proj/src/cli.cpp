#include "tract/cli.hpp"

#include "tract/boundcheck.hpp"
#include "tract/parallel.hpp"

#include <CLI11.hpp>
#include <json.hpp>
#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <unistd.h>

namespace tract::cli {

namespace {

using json = nlohmann::ordered_json;

// Thrown while reading a config; converted to a ConfigError at the boundary.
struct ConfigFailure {
    std::string path;
    std::string message;
};

[[noreturn]] void fail(const std::string& path, const std::string& message) { throw ConfigFailure{path, message}; }

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

void strict(const json& o, std::initializer_list<const char*> allowed, const std::string& path) {
    if (!o.is_object()) fail(path, "expected an object");
    for (const auto& item : o.items()) {
        bool known = false;
        for (const char* a : allowed) known = known || item.key() == a;
        if (!known) fail(join(path, item.key()), "unknown key");
    }
}

double number(const json& v, const std::string& path) {
    if (!v.is_number()) fail(path, "expected a number");
    return v.get<double>();
}

Index integer(const json& v, const std::string& path) {
    if (v.is_number_integer()) return v.get<Index>();
    if (v.is_number_float()) {
        const double x = v.get<double>();
        if (std::floor(x) == x && std::fabs(x) < 9.0e15) return static_cast<Index>(x);
    }
    fail(path, "expected an integer");
}

std::string text(const json& v, const std::string& path) {
    if (!v.is_string()) fail(path, "expected a string");
    return v.get<std::string>();
}

bool boolean(const json& v, const std::string& path) {
    if (!v.is_boolean()) fail(path, "expected true or false");
    return v.get<bool>();
}

double number_or(const json& o, const char* key, double dflt, const std::string& path) {
    return o.contains(key) ? number(o.at(key), join(path, key)) : dflt;
}

const json& required(const json& o, const char* key, const std::string& path) {
    if (!o.contains(key)) fail(join(path, key), "missing required key");
    return o.at(key);
}

template <class T>
T unwrap(Result<T> r, const std::string& path) {
    if (!r) fail(path, r.error().describe());
    return std::move(*r);
}

std::vector<double> number_list(const json& v, const std::string& path) {
    std::vector<double> out;
    if (v.is_array()) {
        for (std::size_t i = 0; i < v.size(); ++i) out.push_back(number(v[i], path + "[" + std::to_string(i) + "]"));
    } else {
        out.push_back(number(v, path));
    }
    return out;
}

std::vector<Index> integer_list(const json& v, const std::string& path) {
    std::vector<Index> out;
    if (v.is_array()) {
        for (std::size_t i = 0; i < v.size(); ++i) out.push_back(integer(v[i], path + "[" + std::to_string(i) + "]"));
    } else {
        out.push_back(integer(v, path));
    }
    return out;
}

std::vector<std::vector<double>> tables_of(const json& params, const std::string& path) {
    if (params.contains("values") == params.contains("tables")) fail(path, "give exactly one of values, tables");
    if (params.contains("values")) {
        const auto& v = params.at("values");
        if (!v.is_array()) fail(join(path, "values"), "expected an array");
        return {number_list(v, join(path, "values"))};
    }
    const auto& t = params.at("tables");
    if (!t.is_array()) fail(join(path, "tables"), "expected an array of arrays");
    std::vector<std::vector<double>> out;
    for (std::size_t i = 0; i < t.size(); ++i) {
        const std::string p = join(path, "tables") + "[" + std::to_string(i) + "]";
        if (!t[i].is_array()) fail(p, "expected an array");
        out.push_back(number_list(t[i], p));
    }
    return out;
}

TailEnvelope tail_of(const json& t, const std::string& path) {
    const std::string form = text(required(t, "form", path), join(path, "form"));
    const double A = number_or(t, "A", 1.0, path);
    const Index from = t.contains("valid_from") ? integer(t.at("valid_from"), join(path, "valid_from")) : 1;
    if (form == "PowerLaw") {
        strict(t, {"form", "A", "beta", "valid_from"}, path);
        return TailEnvelope::power_law(A, number(required(t, "beta", path), join(path, "beta")), from);
    }
    if (form == "Geometric") {
        strict(t, {"form", "A", "r", "valid_from"}, path);
        return TailEnvelope::geometric(A, number(required(t, "r", path), join(path, "r")), from);
    }
    if (form == "StretchedExp") {
        strict(t, {"form", "A", "b", "gamma", "valid_from"}, path);
        return TailEnvelope::stretched_exp(A, number(required(t, "b", path), join(path, "b")),
                                           number_or(t, "gamma", 1.0, path), from);
    }
    fail(join(path, "form"), "unknown envelope form '" + form + "' (PowerLaw, Geometric, StretchedExp)");
}

expr::Expr formula_of(const json& v, const std::string& path) {
    const std::string src = text(v, path);
    auto e = expr::parse(src);
    if (!e) {
        std::string msg = e.error().describe();
        if (e.error().offset) msg += " in \"" + src + "\"";
        fail(path, msg);
    }
    return *e;
}

EigenModel model_of(const json& m) {
    const std::string path = "model";
    strict(m, {"kind", "params", "tail", "d_scale"}, path);
    const std::string kind = text(required(m, "kind", path), "model.kind");
    const json empty = json::object();
    const json& params = m.contains("params") ? m.at("params") : empty;
    const std::string pp = "model.params";
    std::optional<TailEnvelope> tail;
    if (m.contains("tail")) tail = tail_of(m.at("tail"), "model.tail");

    std::optional<EigenModel> model;
    if (kind == "PolyDecay") {
        strict(params, {"a", "alpha"}, pp);
        model = unwrap(EigenModel::poly_decay(number_or(params, "a", 1.0, pp),
                                              number(required(params, "alpha", pp), pp + ".alpha")),
                       path);
    } else if (kind == "ExpDecay") {
        strict(params, {"a", "b", "gamma"}, pp);
        model = unwrap(EigenModel::exp_decay(number_or(params, "a", 1.0, pp), number_or(params, "b", 1.0, pp),
                                             number_or(params, "gamma", 1.0, pp)),
                       path);
    } else if (kind == "Geometric") {
        strict(params, {"a", "r"}, pp);
        model = unwrap(EigenModel::geometric(number_or(params, "a", 1.0, pp),
                                             number(required(params, "r", pp), pp + ".r")),
                       path);
    } else if (kind == "FiniteRank") {
        strict(params, {"values", "tables"}, pp);
        model = unwrap(EigenModel::finite_rank(tables_of(params, pp)), path);
    } else if (kind == "Tabulated") {
        strict(params, {"values", "tables"}, pp);
        if (!tail) fail("model.tail", "Tabulated models need a tail envelope");
        model = unwrap(EigenModel::tabulated(tables_of(params, pp), *tail), path);
    } else if (kind == "Expression") {
        strict(params, {"formula"}, pp);
        model = unwrap(EigenModel::expression(formula_of(required(params, "formula", pp), pp + ".formula"), tail),
                       path);
    } else {
        fail("model.kind",
             "unknown kind '" + kind + "' (PolyDecay, ExpDecay, Geometric, FiniteRank, Tabulated, Expression)");
    }
    if (tail && kind != "Tabulated" && kind != "Expression") fail("model.tail", "only Tabulated and Expression models take a tail");
    if (m.contains("d_scale")) model = unwrap(model->with_d_scale(formula_of(m.at("d_scale"), "model.d_scale")), "model.d_scale");
    return *model;
}

Limits limits_of(const json& l) {
    const std::string path = "limits";
    strict(l, {"d_max", "j_max", "n_max", "tol", "c_min", "max_terms"}, path);
    Limits out;
    auto positive_int = [&](const char* key, Index& slot) {
        if (!l.contains(key)) return;
        slot = integer(l.at(key), join(path, key));
        if (slot < 1) fail(join(path, key), "must be >= 1");
    };
    positive_int("d_max", out.d_max);
    positive_int("j_max", out.j_max);
    positive_int("n_max", out.n_max);
    positive_int("max_terms", out.max_terms);
    out.tol = number_or(l, "tol", out.tol, path);
    if (!(out.tol > 0.0 && out.tol < 1.0)) fail("limits.tol", "must lie in (0, 1)");
    out.c_min = number_or(l, "c_min", out.c_min, path);
    if (!(out.c_min > 0.0 && out.c_min <= 1.0)) fail("limits.c_min", "must lie in (0, 1]");
    if (out.n_max < 10) fail("limits.n_max", "must be >= 10");
    return out;
}

Criterion criterion_of(const std::string& s, const std::string& path) {
    if (s == "ABS") return Criterion::Abs;
    if (s == "NOR") return Criterion::Nor;
    fail(path, "expected \"ABS\" or \"NOR\"");
}

std::pair<std::size_t, std::size_t> line_col(const std::string& text, std::size_t byte) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

Result<json> parse_json(const std::string& text, const std::string& source) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        auto [line, col] = line_col(text, e.byte);
        std::string what = e.what();
        if (auto p = what.find("parse error"); p != std::string::npos) what = what.substr(p);
        return make_error(ErrorKind::ConfigError,
                          source + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + what);
    }
}

Result<RunConfig> config_from(const json& doc, const std::string& source) {
    try {
        strict(doc, {"model", "criterion", "analysis", "limits", "output"}, "");
        EigenModel model = model_of(required(doc, "model", ""));
        RunConfig cfg{model, Criterion::Abs, Limits{}, OutputSpec{}, "{}"};
        if (doc.contains("criterion")) cfg.criterion = criterion_of(text(doc.at("criterion"), "criterion"), "criterion");
        if (doc.contains("limits")) cfg.limits = limits_of(doc.at("limits"));
        if (auto md = model.max_dimension()) cfg.limits.d_max = std::min(cfg.limits.d_max, *md);
        if (doc.contains("output")) {
            const auto& o = doc.at("output");
            strict(o, {"format", "path"}, "output");
            if (o.contains("format")) cfg.output.format = text(o.at("format"), "output.format");
            if (o.contains("path")) cfg.output.path = text(o.at("path"), "output.path");
            if (cfg.output.format != "json" && cfg.output.format != "csv")
                fail("output.format", "expected \"json\" or \"csv\"");
        }
        if (doc.contains("analysis")) {
            if (!doc.at("analysis").is_object()) fail("analysis", "expected an object");
            cfg.analysis = doc.at("analysis").dump();
        }
        return cfg;
    } catch (const ConfigFailure& f) {
        return make_error(ErrorKind::ConfigError, source + ": " + (f.path.empty() ? "" : f.path + ": ") + f.message);
    }
}

// ---- formatting

std::string g17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

json num(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json opt_num(const std::optional<double>& x) { return x ? num(*x) : json(nullptr); }

json limits_json(const Limits& l) {
    json j;
    j["d_max"] = l.d_max;
    j["j_max"] = l.j_max;
    j["n_max"] = l.n_max;
    j["tol"] = l.tol;
    j["c_min"] = l.c_min;
    j["max_terms"] = l.max_terms;
    return j;
}

json sum_json(const SumEvaluation& e) {
    json j;
    j["value"] = num(e.value);
    j["status"] = to_string(e.status);
    j["remainder_bound"] = opt_num(e.remainder_bound);
    j["terms_used"] = e.terms_used;
    return j;
}

json params_json(const CriterionParams& p, std::initializer_list<const char*> keys) {
    json j = json::object();
    for (const std::string k : keys) {
        if (k == "tau") j[k] = p.tau;
        else if (k == "tau1") j[k] = p.tau1;
        else if (k == "tau2") j[k] = p.tau2;
        else if (k == "tau3") j[k] = p.tau3;
        else if (k == "c_tilde") j[k] = p.c_tilde;
        else if (k == "c") j[k] = p.c;
        else if (k == "s") j[k] = p.s;
        else if (k == "t") j[k] = p.t;
        else if (k == "k") j[k] = p.k;
    }
    return j;
}

json sum_params_json(SumKind k, const CriterionParams& p) {
    switch (k) {
        case SumKind::SptAlg:
        case SumKind::SptExp: return params_json(p, {"tau", "c_tilde"});
        case SumKind::PtAlg:
        case SumKind::PtExp: return params_json(p, {"tau1", "tau2", "tau3", "c_tilde"});
        case SumKind::QptAlg: return params_json(p, {"tau1", "tau2", "c_tilde"});
        case SumKind::QptExp: return params_json(p, {"tau"});
        case SumKind::WtAlg:
        case SumKind::WtExp: return params_json(p, {"c", "s", "t"});
    }
    return json::object();
}

json witness_json(const Notion& n, const CriterionParams& p) {
    switch (n.kind) {
        case NotionKind::SPT: return params_json(p, {"tau", "c_tilde"});
        case NotionKind::PT: return params_json(p, {"tau1", "tau2", "tau3", "c_tilde"});
        case NotionKind::QPT:
            return n.cs == Case::Alg ? params_json(p, {"tau1", "tau2", "c_tilde"}) : params_json(p, {"tau"});
        case NotionKind::WT: return params_json(p, {"c", "s", "t"});
        case NotionKind::UWT: return params_json(p, {"k"});
    }
    return json::object();
}

json theorem_params_json(Theorem th, const CriterionParams& p) {
    switch (th) {
        case Theorem::T1: return params_json(p, {"tau1", "tau2", "tau3", "c_tilde"});
        case Theorem::T2: return params_json(p, {"tau"});
        case Theorem::T3: return params_json(p, {"c", "s", "t"});
    }
    return json::object();
}

json verdict_json(const TractabilityVerdict& v) {
    json j;
    j["notion"] = v.notion.name();
    j["status"] = to_string(v.status);
    j["witness"] = v.witness ? witness_json(v.notion, *v.witness) : json(nullptr);
    json e;
    e["d_evaluated"] = v.evidence.d_evaluated;
    e["sup_observed"] = num(v.evidence.sup_observed);
    e["sup_upper"] = opt_num(v.evidence.sup_upper);
    e["trend"] = to_string(v.evidence.trend);
    e["sum_status"] = v.evidence.status ? json(to_string(*v.evidence.status)) : json(nullptr);
    json stat = json::array();
    for (const auto& [n, x] : v.evidence.statistic) stat.push_back(json::array({n, num(x)}));
    e["statistic"] = stat;
    e["note"] = v.evidence.note;
    j["evidence"] = e;
    j["limits"] = limits_json(v.limits);
    return j;
}

std::string csv_bool(bool b) { return b ? "true" : "false"; }

std::string opt_g17(const std::optional<double>& x) { return x ? g17(*x) : ""; }

// ---- output

struct Emitted {
    std::string body;
    int code = kOk;
};

bool write_atomic(const std::string& path, const std::string& data, std::string& why) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(target.parent_path(), ec);
    }
    const std::string tmp = path + ".tmp." + std::to_string(::getpid());
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) {
            why = "cannot open " + tmp;
            return false;
        }
        f.write(data.data(), static_cast<std::streamsize>(data.size()));
        f.flush();
        if (!f) {
            why = "write to " + tmp + " failed";
            return false;
        }
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp, ec);
        why = "cannot rename onto " + path;
        return false;
    }
    return true;
}

struct Session {
    std::string subcommand;
    std::vector<std::string> args;
    std::string config_path;
    std::string config_text;
    RunConfig* cfg = nullptr;
    int threads = 1;
    std::string manifest_path;
};

json manifest_json(const Session& s, const std::optional<std::string>& out_path, const std::string& body) {
    json m;
    m["tool"] = "tract";
    m["version"] = kVersion;
    m["subcommand"] = s.subcommand;
    m["args"] = s.args;
    m["config_path"] = s.config_path;
    m["config_sha256"] = sha256_hex(s.config_text);
    auto doc = json::parse(s.config_text, nullptr, false);
    m["config"] = doc.is_discarded() ? json(nullptr) : doc;
    m["criterion"] = to_string(s.cfg->criterion);
    m["limits"] = limits_json(s.cfg->limits);
    m["threads"] = s.threads;
    json o;
    o["format"] = s.cfg->output.format;
    o["path"] = out_path ? json(*out_path) : json(nullptr);
    o["sha256"] = sha256_hex(body);
    m["output"] = o;
    return m;
}

int deliver(const Session& s, const Emitted& e, std::ostream& out, std::ostream& err) {
    const auto& path = s.cfg->output.path;
    std::string why;
    if (path) {
        if (!write_atomic(*path, e.body, why)) {
            err << "tract: " << why << "\n";
            return kFailed;
        }
    } else {
        out << e.body;
    }
    std::string mpath = s.manifest_path;
    if (mpath.empty() && path) mpath = *path + ".manifest.json";
    if (!mpath.empty() && !write_atomic(mpath, manifest_json(s, path, e.body).dump(2) + "\n", why)) {
        err << "tract: " << why << "\n";
        return kFailed;
    }
    return e.code;
}

int report(const Error& e, std::ostream& err) {
    err << "tract: " << e.describe() << "\n";
    switch (e.kind) {
        case ErrorKind::ConfigError:
        case ErrorKind::SyntaxError:
        case ErrorKind::ArityError:
        case ErrorKind::UnknownIdentifier:
        case ErrorKind::InvalidModel: return kConfigError;
        default: return kFailed;
    }
}

// ---- analysis parameters (config "analysis" object merged with flags)

struct Flags {
    std::map<std::string, json> values;

    void set(const std::string& key, const json& v) { values[key] = v; }
};

json merged_analysis(const RunConfig& cfg, const Flags& flags) {
    json a = json::parse(cfg.analysis);
    for (const auto& [k, v] : flags.values) a[k] = v;
    return a;
}

CriterionParams params_from(const json& a) {
    CriterionParams p;
    const std::string path = "analysis";
    p.tau = number_or(a, "tau", p.tau, path);
    p.tau1 = number_or(a, "tau1", p.tau1, path);
    p.tau2 = number_or(a, "tau2", p.tau2, path);
    p.tau3 = number_or(a, "tau3", p.tau3, path);
    p.c_tilde = number_or(a, "c_tilde", p.c_tilde, path);
    p.c = number_or(a, "c", p.c, path);
    p.s = number_or(a, "s", p.s, path);
    p.t = number_or(a, "t", p.t, path);
    if (a.contains("k")) p.k = integer(a.at("k"), "analysis.k");
    return p;
}

std::vector<double> log_grid(double from, double to, Index points) {
    std::vector<double> out;
    if (points == 1) return {from};
    const double lf = std::log10(from), lt = std::log10(to);
    for (Index i = 0; i < points; ++i) out.push_back(std::pow(10.0, lf + (lt - lf) * static_cast<double>(i) / static_cast<double>(points - 1)));
    return out;
}

std::vector<double> eps_grid_from(const json& a) {
    if (a.contains("eps")) return number_list(a.at("eps"), "analysis.eps");
    const double from = number_or(a, "eps_from", 1e-1, "analysis");
    const double to = number_or(a, "eps_to", 1e-6, "analysis");
    const Index points = a.contains("eps_points") ? integer(a.at("eps_points"), "analysis.eps_points") : 25;
    if (!(from > 0.0) || !(to > 0.0) || points < 1) fail("analysis", "eps grid needs positive bounds and points >= 1");
    return log_grid(from, to, points);
}

std::vector<Index> d_grid_from(const json& a, Index dflt_max) {
    if (a.contains("d")) return integer_list(a.at("d"), "analysis.d");
    std::vector<Index> out;
    for (Index d = 1; d <= dflt_max; ++d) out.push_back(d);
    return out;
}

// ---- subcommands

Emitted cmd_complexity(const RunConfig& cfg, const json& a, int threads) {
    strict(a, {"eps", "d"}, "analysis");
    const auto eps = number_list(required(a, "eps", "analysis"), "analysis.eps");
    const auto ds = a.contains("d") ? integer_list(a.at("d"), "analysis.d") : std::vector<Index>{1};
    for (double e : eps)
        if (!(e > 0.0)) fail("analysis.eps", "must be positive");
    for (Index d : ds)
        if (d < 1) fail("analysis.d", "must be >= 1");

    const std::size_t ne = eps.size();
    auto res = parallel_map<Result<ComplexityResult>>(ds.size() * ne, threads, [&](std::size_t k) {
        return info_complexity(cfg.model, ComplexityQuery{ds[k / ne], eps[k % ne], cfg.criterion}, cfg.limits.j_max);
    });
    for (auto& r : res)
        if (!r) throw r.error();

    Emitted e;
    const char* crit = to_string(cfg.criterion);
    if (cfg.output.format == "csv") {
        e.body = "d,eps,criterion,n,capped\n";
        for (std::size_t k = 0; k < res.size(); ++k)
            e.body += std::to_string(ds[k / ne]) + "," + g17(eps[k % ne]) + "," + crit + "," +
                      std::to_string(res[k]->n) + "," + csv_bool(res[k]->capped) + "\n";
        return e;
    }
    auto row = [&](std::size_t k) {
        json j;
        j["d"] = ds[k / ne];
        j["eps"] = eps[k % ne];
        j["criterion"] = crit;
        j["n"] = res[k]->n;
        j["capped"] = res[k]->capped;
        return j;
    };
    if (res.size() == 1) {
        e.body = row(0).dump(2) + "\n";
    } else {
        json rows = json::array();
        for (std::size_t k = 0; k < res.size(); ++k) rows.push_back(row(k));
        json j;
        j["rows"] = rows;
        e.body = j.dump(2) + "\n";
    }
    return e;
}

Emitted cmd_criterion(const RunConfig& cfg, const json& a, int threads) {
    strict(a, {"sum", "d", "sup", "n", "tau", "tau1", "tau2", "tau3", "c_tilde", "c", "s", "t", "k"}, "analysis");
    const std::string name = text(required(a, "sum", "analysis"), "analysis.sum");
    const CriterionParams p = params_from(a);
    Emitted e;

    if (name == "uwt-alg" || name == "uwt-exp") {
        const Case cs = name == "uwt-alg" ? Case::Alg : Case::Exp;
        const Index n = integer(required(a, "n", "analysis"), "analysis.n");
        auto v = uwt_statistic(cfg.model, n, p.k, cs, cfg.criterion);
        if (!v) throw v.error();
        if (cfg.output.format == "csv") {
            e.body = "n,k,value\n" + std::to_string(n) + "," + std::to_string(p.k) + "," + g17(*v) + "\n";
        } else {
            json j;
            j["sum"] = name;
            j["criterion"] = to_string(cfg.criterion);
            j["n"] = n;
            j["k"] = p.k;
            j["value"] = num(*v);
            e.body = j.dump(2) + "\n";
        }
        return e;
    }

    const auto kind = sum_kind_from_string(name);
    if (!kind) fail("analysis.sum", "unknown sum '" + name + "'");
    const SumOptions opt = cfg.limits.sum_options();
    const bool sup = a.contains("sup") && boolean(a.at("sup"), "analysis.sup");

    if (!sup) {
        const Index d = a.contains("d") ? integer(a.at("d"), "analysis.d") : 1;
        auto r = evaluate_sum(cfg.model, *kind, p, d, cfg.criterion, opt);
        if (!r) throw r.error();
        if (cfg.output.format == "csv") {
            e.body = "d,value,remainder_bound,status,terms_used\n" + std::to_string(d) + "," + g17(r->value) + "," +
                     opt_g17(r->remainder_bound) + "," + to_string(r->status) + "," + std::to_string(r->terms_used) + "\n";
        } else {
            json j;
            j["sum"] = name;
            j["criterion"] = to_string(cfg.criterion);
            j["d"] = d;
            j["params"] = sum_params_json(*kind, p);
            j.update(sum_json(*r));
            e.body = j.dump(2) + "\n";
        }
        return e;
    }

    auto r = sup_over_d(cfg.model, *kind, p, cfg.criterion, cfg.limits.d_max, opt, threads);
    if (!r) throw r.error();
    if (cfg.output.format == "csv") {
        e.body = "d,value,remainder_bound,status,terms_used\n";
        for (std::size_t i = 0; i < r->per_d.size(); ++i) {
            const auto& s = r->per_d[i];
            e.body += std::to_string(i + 1) + "," + g17(s.value) + "," + opt_g17(s.remainder_bound) + "," +
                      to_string(s.status) + "," + std::to_string(s.terms_used) + "\n";
        }
        return e;
    }
    json j;
    j["sum"] = name;
    j["criterion"] = to_string(cfg.criterion);
    j["params"] = sum_params_json(*kind, p);
    j["d_max"] = cfg.limits.d_max;
    j["sup_observed"] = num(r->sup_observed);
    j["sup_upper"] = opt_num(r->sup_upper);
    j["trend"] = to_string(r->trend);
    j["status"] = to_string(r->status);
    json per = json::array();
    for (std::size_t i = 0; i < r->per_d.size(); ++i) {
        json row;
        row["d"] = i + 1;
        row.update(sum_json(r->per_d[i]));
        per.push_back(row);
    }
    j["per_d"] = per;
    e.body = j.dump(2) + "\n";
    return e;
}

Emitted cmd_classify(const RunConfig& cfg, const json& a, int threads) {
    strict(a, {}, "analysis");
    Limits lim = cfg.limits;
    lim.threads = threads;
    const ClassifyReport rep = classify(cfg.model, cfg.criterion, lim);
    Emitted e;
    if (!rep.consistency.consistent()) e.code = kFailed;
    if (cfg.output.format == "csv") {
        e.body = "notion,status,d_evaluated,sup_observed,sup_upper,trend\n";
        for (const auto& v : rep.verdicts)
            e.body += v.notion.name() + "," + to_string(v.status) + "," + std::to_string(v.evidence.d_evaluated) + "," +
                      g17(v.evidence.sup_observed) + "," + opt_g17(v.evidence.sup_upper) + "," +
                      to_string(v.evidence.trend) + "\n";
        return e;
    }
    json j;
    j["model"] = to_string(cfg.model.kind());
    j["criterion"] = to_string(cfg.criterion);
    j["limits"] = limits_json(cfg.limits);
    json vs = json::array();
    for (const auto& v : rep.verdicts) vs.push_back(verdict_json(v));
    j["verdicts"] = vs;
    json c;
    c["consistent"] = rep.consistency.consistent();
    json viol = json::array();
    for (const auto& x : rep.consistency.violations) viol.push_back(json{{"upstream", x.upstream}, {"downstream", x.downstream}});
    c["violations"] = viol;
    j["consistency"] = c;
    e.body = j.dump(2) + "\n";
    return e;
}

Notion notion_from(const std::string& s, Criterion dflt) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    for (std::string tok; std::getline(ss, tok, '-');) parts.push_back(tok);
    if (parts.size() < 2 || parts.size() > 3) fail("analysis.notion", "expected e.g. \"ALG-SPT\" or \"EXP-QPT-NOR\"");
    Notion n;
    n.criterion = dflt;
    if (parts[0] == "ALG") n.cs = Case::Alg;
    else if (parts[0] == "EXP") n.cs = Case::Exp;
    else fail("analysis.notion", "case must be ALG or EXP");
    if (parts[1] == "SPT") n.kind = NotionKind::SPT;
    else if (parts[1] == "QPT") n.kind = NotionKind::QPT;
    else fail("analysis.notion", "exponents exist for SPT and QPT only");
    if (parts.size() == 3) n.criterion = criterion_of(parts[2], "analysis.notion");
    return n;
}

Emitted cmd_exponent(const RunConfig& cfg, const json& a, int threads) {
    strict(a, {"notion", "fit", "eps", "eps_from", "eps_to", "eps_points", "d"}, "analysis");
    const Notion n = notion_from(text(required(a, "notion", "analysis"), "analysis.notion"), cfg.criterion);
    Limits lim = cfg.limits;
    lim.threads = threads;
    auto b = exponent_bracket(cfg.model, n, lim);
    if (!b) throw b.error();
    const bool want_fit = a.contains("fit") && boolean(a.at("fit"), "analysis.fit");
    std::optional<GrowthFit> fit;
    if (want_fit) {
        auto f = growth_fit(cfg.model, n.cs, n.criterion, eps_grid_from(a), d_grid_from(a, std::min<Index>(16, cfg.limits.d_max)),
                            cfg.limits.j_max);
        if (!f) throw f.error();
        fit = *f;
    }
    Emitted e;
    if (cfg.output.format == "csv") {
        e.body = "notion,lo,hi,iterations\n" + n.name() + "," + g17(b->lo) + "," + g17(b->hi) + "," +
                 std::to_string(b->iterations) + "\n";
        return e;
    }
    json j;
    j["notion"] = n.name();
    j["lo"] = b->lo;
    j["hi"] = b->hi;
    j["lo_witness"] = b->lo_witness ? witness_json(n, *b->lo_witness) : json(nullptr);
    j["hi_witness"] = witness_json(n, b->hi_witness);
    j["iterations"] = b->iterations;
    if (fit) {
        json f;
        f["C"] = num(fit->C);
        f["p"] = num(fit->p);
        f["q"] = num(fit->q);
        f["residual"] = num(fit->residual);
        f["points"] = fit->points;
        j["fit"] = f;
    }
    j["limits"] = limits_json(cfg.limits);
    e.body = j.dump(2) + "\n";
    return e;
}

Emitted cmd_verify_bounds(const RunConfig& cfg, const json& a, int threads, std::ostream& err) {
    strict(a, {"theorem", "eps", "eps_from", "eps_to", "eps_points", "d", "tau", "tau1", "tau2", "tau3", "c_tilde", "c",
               "s", "t"},
           "analysis");
    const std::string tname = text(required(a, "theorem", "analysis"), "analysis.theorem");
    const auto th = theorem_from_string(tname);
    if (!th) fail("analysis.theorem", "expected T1, T2 or T3");
    const CriterionParams p = params_from(a);
    const auto eps = eps_grid_from(a);
    const auto ds = d_grid_from(a, std::min<Index>(16, cfg.limits.d_max));
    Index d_top = 1;
    for (Index d : ds) d_top = std::max(d_top, d);

    auto spec = certify_bound_spec(cfg.model, *th, p, cfg.criterion, d_top, cfg.limits.sum_options(), threads);
    if (!spec) throw spec.error();
    auto rep = verify_domination(cfg.model, *spec, eps, ds, cfg.limits.j_max, threads);
    if (!rep) throw rep.error();

    json summary;
    summary["theorem"] = to_string(*th);
    summary["criterion"] = to_string(cfg.criterion);
    summary["params"] = theorem_params_json(*th, p);
    json c = sum_json(spec->constant);
    c["M"] = num(spec->M());
    summary["constant"] = c;
    summary["points"] = rep->rows.size();
    summary["violations"] = rep->violations;

    Emitted e;
    if (!rep->ok()) e.code = kFailed;
    if (cfg.output.format == "csv") {
        e.body = "d,eps,oracle_n,bound,ok\n";
        for (const auto& r : rep->rows)
            e.body += std::to_string(r.d) + "," + g17(r.eps) + "," + std::to_string(r.oracle_n) + "," +
                      std::to_string(r.bound) + "," + csv_bool(r.ok) + "\n";
        err << summary.dump() << "\n";
        return e;
    }
    json rows = json::array();
    for (const auto& r : rep->rows) {
        json row;
        row["d"] = r.d;
        row["eps"] = r.eps;
        row["oracle_n"] = r.oracle_n;
        row["bound"] = r.bound;
        row["ok"] = r.ok;
        rows.push_back(row);
    }
    summary["rows"] = rows;
    e.body = summary.dump(2) + "\n";
    return e;
}

constexpr Index kDefaultProbe = 4096;

json validation_json(const ValidationReport& rep) {
    json j;
    j["ok"] = rep.ok();
    j["d_max"] = rep.d_max;
    j["j_probe"] = rep.j_probe;
    j["dense_prefix"] = rep.dense_prefix;
    j["probes"] = rep.probes;
    j["sampled"] = rep.sampled;
    j["clamped"] = rep.clamped;
    json v = json::array();
    for (const auto& x : rep.violations) v.push_back(json{{"d", x.d}, {"j", x.j}, {"what", x.what}});
    j["violations"] = v;
    return j;
}

Emitted cmd_validate(const RunConfig& cfg, const json& a) {
    strict(a, {"d_max", "j_probe"}, "analysis");
    Index d_max = a.contains("d_max") ? integer(a.at("d_max"), "analysis.d_max") : cfg.limits.d_max;
    if (auto md = cfg.model.max_dimension()) d_max = std::min(d_max, *md);
    const Index probe = a.contains("j_probe") ? integer(a.at("j_probe"), "analysis.j_probe") : kDefaultProbe;
    if (d_max < 1 || probe < 1) fail("analysis", "d_max and j_probe must be >= 1");
    const ValidationReport rep = validate(cfg.model, d_max, probe);
    Emitted e;
    if (!rep.ok()) e.code = kFailed;
    if (cfg.output.format == "csv") {
        e.body = "d,j,what\n";
        for (const auto& v : rep.violations) e.body += std::to_string(v.d) + "," + std::to_string(v.j) + ",\"" + v.what + "\"\n";
        return e;
    }
    e.body = validation_json(rep).dump(2) + "\n";
    return e;
}

std::string read_file(const std::string& path, bool& ok) {
    std::ifstream f(path, std::ios::binary);
    ok = static_cast<bool>(f);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

}  // namespace

std::string sha256_hex(const std::string& data) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr);
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 15];
    }
    return out;
}

Result<RunConfig> parse_config(const std::string& text, const std::string& source) {
    auto doc = parse_json(text, source);
    if (!doc) return doc.error();
    return config_from(*doc, source);
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Information complexity and tractability analysis of eigenvalue sequences", "tract"};
    app.require_subcommand(1, 1);
    app.set_version_flag("--version", kVersion);

    struct Common {
        std::string config;
        int threads = 1;
        std::string output;
        std::string format;
        std::string manifest;
    } common;
    Flags flags;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", common.config, "JSON config file")->required();
        sub->add_option("--threads", common.threads, "worker threads (never changes output)")->check(CLI::PositiveNumber);
        sub->add_option("--output", common.output, "output file (overrides output.path)");
        sub->add_option("--format", common.format, "json or csv (overrides output.format)")
            ->check(CLI::IsMember({"json", "csv"}));
        sub->add_option("--manifest", common.manifest, "write a run manifest here");
    };
    // Flags land in the analysis object under the same name.
    auto num_flag = [&](CLI::App* sub, const std::string& name, const std::string& key, const std::string& help) {
        sub->add_option_function<double>(name, [&flags, key](const double& v) { flags.set(key, v); }, help);
    };
    auto int_flag = [&](CLI::App* sub, const std::string& name, const std::string& key, const std::string& help) {
        sub->add_option_function<Index>(name, [&flags, key](const Index& v) { flags.set(key, v); }, help);
    };
    auto str_flag = [&](CLI::App* sub, const std::string& name, const std::string& key, const std::string& help) {
        sub->add_option_function<std::string>(name, [&flags, key](const std::string& v) { flags.set(key, v); }, help);
    };
    auto param_flags = [&](CLI::App* sub) {
        for (const char* k : {"tau", "tau1", "tau2", "tau3", "c", "s", "t"}) num_flag(sub, std::string("--") + k, k, k);
        num_flag(sub, "--c-tilde", "c_tilde", "c_tilde");
    };

    auto* complexity = app.add_subcommand("complexity", "information complexity n(eps, d)");
    add_common(complexity);
    complexity->add_option_function<std::vector<double>>("--eps", [&](const std::vector<double>& v) { flags.set("eps", v); },
                                                          "error threshold(s)");
    complexity->add_option_function<std::vector<Index>>("--d", [&](const std::vector<Index>& v) { flags.set("d", v); },
                                                         "dimension(s)");

    auto* criterion = app.add_subcommand("criterion", "one criterion sum or UWT statistic");
    add_common(criterion);
    str_flag(criterion, "--sum", "sum", "spt-alg ... wt-exp, uwt-alg, uwt-exp");
    int_flag(criterion, "--d", "d", "dimension");
    int_flag(criterion, "--n", "n", "UWT index");
    int_flag(criterion, "--k", "k", "UWT window exponent");
    criterion->add_flag_callback("--sup", [&] { flags.set("sup", true); }, "sup over d = 1..d_max");
    param_flags(criterion);

    auto* classify_cmd = app.add_subcommand("classify", "tractability verdicts for every notion");
    add_common(classify_cmd);

    auto* exponent = app.add_subcommand("exponent", "exponent bracket for an SPT or QPT notion");
    add_common(exponent);
    str_flag(exponent, "--notion", "notion", "e.g. ALG-SPT, EXP-QPT-NOR");
    exponent->add_flag_callback("--fit", [&] { flags.set("fit", true); }, "also fit the complexity growth");

    auto* verify = app.add_subcommand("verify-bounds", "check the explicit bounds against counted complexity");
    add_common(verify);
    str_flag(verify, "--theorem", "theorem", "T1, T2 or T3");
    num_flag(verify, "--eps-from", "eps_from", "largest eps");
    num_flag(verify, "--eps-to", "eps_to", "smallest eps");
    int_flag(verify, "--eps-points", "eps_points", "log-spaced eps points");
    param_flags(verify);

    auto* validate_cmd = app.add_subcommand("validate", "check positivity, monotonicity and the tail envelope");
    add_common(validate_cmd);
    int_flag(validate_cmd, "--d-max", "d_max", "largest d checked");
    int_flag(validate_cmd, "--j-probe", "j_probe", "largest j probed");

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kConfigError;
    }

    Session s;
    s.subcommand = app.get_subcommands().front()->get_name();
    s.args = args;
    s.config_path = common.config;
    s.threads = common.threads;
    s.manifest_path = common.manifest;

    bool ok = false;
    s.config_text = read_file(common.config, ok);
    if (!ok) {
        err << "tract: ConfigError: cannot read " << common.config << "\n";
        return kConfigError;
    }
    auto cfg = parse_config(s.config_text, common.config);
    if (!cfg) return report(cfg.error(), err);
    if (!common.output.empty()) cfg->output.path = common.output;
    if (!common.format.empty()) cfg->output.format = common.format;
    s.cfg = &*cfg;

    try {
        const json a = merged_analysis(*cfg, flags);
        if (s.subcommand == "validate") return deliver(s, cmd_validate(*cfg, a), out, err);

        const ValidationReport pre = validate(cfg->model, cfg->limits.d_max, kDefaultProbe);
        if (!pre.ok()) return report(pre.to_error(), err);

        Emitted e;
        if (s.subcommand == "complexity") e = cmd_complexity(*cfg, a, s.threads);
        else if (s.subcommand == "criterion") e = cmd_criterion(*cfg, a, s.threads);
        else if (s.subcommand == "classify") e = cmd_classify(*cfg, a, s.threads);
        else if (s.subcommand == "exponent") e = cmd_exponent(*cfg, a, s.threads);
        else e = cmd_verify_bounds(*cfg, a, s.threads, err);
        return deliver(s, e, out, err);
    } catch (const ConfigFailure& f) {
        err << "tract: ConfigError: " << common.config << ": " << f.path << ": " << f.message << "\n";
        return kConfigError;
    } catch (const Error& e) {
        return report(e, err);
    }
}

}  // namespace tract::cli
