// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero when any selected criterion fails. `--only N` runs a single one.

#include "oracles.hpp"
#include "soundness.hpp"
#include "tract/boundcheck.hpp"
#include "tract/classifier.hpp"
#include "tract/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <unistd.h>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

using namespace tract;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
    bool pass = true;
    std::string detail;

    void fail(const std::string& why) {
        if (pass) detail = why;
        pass = false;
    }
};

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

EigenModel must(Result<EigenModel> r) {
    if (!r) {
        std::fprintf(stderr, "model construction failed: %s\n", r.error().describe().c_str());
        std::exit(2);
    }
    return *r;
}

expr::Expr formula(const char* s) {
    auto e = expr::parse(s);
    if (!e) std::exit(2);
    return *e;
}

std::vector<Index> d_range(Index n) {
    std::vector<Index> out;
    for (Index d = 1; d <= n; ++d) out.push_back(d);
    return out;
}

// 1. search-based complexity equals the linear count

Outcome oracle_equivalence() {
    Outcome o;
    const auto t0 = Clock::now();
    auto rng = oracle::rng(20240601);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    auto in = [&](double lo, double hi) { return lo + (hi - lo) * u(rng); };

    std::vector<EigenModel> models;
    for (int i = 0; i < 20; ++i) {
        EigenModel m = must(EigenModel::geometric(1.0, 0.5));
        switch (i % 5) {
            case 0: m = must(EigenModel::poly_decay(in(0.5, 4.0), in(1.2, 3.0))); break;
            case 1: m = must(EigenModel::exp_decay(in(0.5, 4.0), in(0.2, 2.0), in(0.3, 1.5))); break;
            case 2: m = must(EigenModel::geometric(in(0.5, 4.0), in(0.1, 0.95))); break;
            case 3: {
                std::vector<double> v(50);
                for (auto& x : v) x = in(1e-3, 2.0);
                std::sort(v.begin(), v.end(), std::greater<>());
                const double r = in(0.5, 0.9);
                const double A = 0.9 * v.back() / std::pow(r, 51.0);
                m = must(EigenModel::tabulated({v}, TailEnvelope::geometric(A, r, 51)));
                break;
            }
            default: {
                auto base = must(EigenModel::poly_decay(in(0.5, 2.0), in(1.5, 3.0)));
                m = must(base.with_d_scale(formula(i % 2 ? "1 + 1/d" : "exp(0-d/8)")));
                break;
            }
        }
        models.push_back(m);
    }

    const auto eps = oracle::log_grid(2.0, 1e-3, 100);
    long long checked = 0, failures = 0;
    for (std::size_t i = 0; i < models.size(); ++i) {
        const auto& m = models[i];
        auto rep = validate(m, 32, 4096);
        if (!rep.ok()) {
            o.fail(fmt("model %zu failed validation", i));
            continue;
        }
        const Criterion crit = i % 2 ? Criterion::Nor : Criterion::Abs;
        for (Index d = 1; d <= 32; ++d) {
            for (double e : eps) {
                auto a = info_complexity(m, {d, e, crit});
                auto b = count_oracle(m, {d, e, crit});
                ++checked;
                if (!a || !b || a->n != b->n) {
                    ++failures;
                    o.fail(fmt("model %zu d=%lld eps=%.17g: search %lld, count %lld", i, static_cast<long long>(d), e,
                               a ? static_cast<long long>(a->n) : -1LL, b ? static_cast<long long>(b->n) : -1LL));
                }
            }
        }
    }
    const double secs = seconds_since(t0);
    if (secs >= 60.0) o.fail(fmt("runtime %.1f s exceeds 60 s", secs));
    if (o.pass) o.detail = fmt("%lld points, 0 mismatches, %.1f s", checked, secs);
    else o.detail += fmt(" (%lld mismatches of %lld, %.1f s)", failures, checked, secs);
    return o;
}

// 2. n^-alpha: ALG-UWT supported, EXP-UWT fails on the plateau

Outcome polynomial_uwt() {
    Outcome o;
    const auto t0 = Clock::now();
    Limits lim;
    lim.d_max = 16;
    lim.n_max = 1000000;
    std::vector<Index> grid;
    for (int q = 4; q <= 24; ++q) grid.push_back(static_cast<Index>(std::llround(std::pow(10.0, q / 4.0))));
    std::string notes;
    for (double alpha : {0.5, 1.0, 2.0}) {
        auto m = must(EigenModel::poly_decay(1.0, alpha));
        auto alg = decide(m, {NotionKind::UWT, Case::Alg, Criterion::Abs}, lim);
        if (alg.status != VerdictStatus::SupportedUpTo)
            o.fail(fmt("alpha=%g ALG-UWT is %s", alpha, to_string(alg.status)));
        // statistic above ln ln n at every grid n past the first decade
        for (Index n : grid) {
            if (n <= 10) continue;
            const double s = *uwt_statistic(m, n, 1, Case::Alg, Criterion::Abs);
            const double T = std::log(std::log(static_cast<double>(n)));
            if (!(s > T)) {
                o.fail(fmt("alpha=%g ALG statistic %.6f <= ln ln n = %.6f at n=%lld", alpha, s, T, static_cast<long long>(n)));
                break;
            }
        }
        auto ex = decide(m, {NotionKind::UWT, Case::Exp, Criterion::Abs}, lim);
        if (ex.status != VerdictStatus::Fails) o.fail(fmt("alpha=%g EXP-UWT is %s", alpha, to_string(ex.status)));
        for (Index n : grid) {
            if (n < 10) continue;
            const double ln = std::log(static_cast<double>(n));
            const double closed = std::log(std::max(1.0, alpha * ln)) / std::log(ln);
            for (Index k : {1, 2, 3}) {
                const double s = *uwt_statistic(m, n, k, Case::Exp, Criterion::Abs);
                if (std::fabs(s - closed) > 1e-12) {
                    o.fail(fmt("alpha=%g EXP statistic %.17g vs closed form %.17g at n=%lld", alpha, s, closed,
                               static_cast<long long>(n)));
                    break;
                }
            }
        }
    }
    const double secs = seconds_since(t0);
    if (secs >= 30.0) o.fail(fmt("runtime %.1f s exceeds 30 s", secs));
    if (o.pass) o.detail = fmt("alpha in {1/2, 1, 2}, %.1f s", secs);
    return o;
}

// 3. exp(-n^alpha): EXP-UWT statistic large and increasing, verdict Holds

Outcome stretched_uwt() {
    Outcome o;
    const auto t0 = Clock::now();
    Limits lim;
    lim.d_max = 16;
    std::vector<Index> grid;
    for (int q = 2; q <= 24; ++q) grid.push_back(static_cast<Index>(std::llround(std::pow(10.0, q / 4.0))));
    for (double alpha : {0.5, 1.0}) {
        auto m = must(EigenModel::exp_decay(1.0, 1.0, alpha));
        const double at = *uwt_statistic(m, 10000, 1, Case::Exp, Criterion::Abs);
        if (!(at > 5.0)) o.fail(fmt("alpha=%g statistic at n=10^4 is %.4f, not above 5", alpha, at));
        double prev = -1.0;
        for (Index n : grid) {
            const double s = *uwt_statistic(m, n, 1, Case::Exp, Criterion::Abs);
            if (!(s > prev)) {
                o.fail(fmt("alpha=%g statistic not increasing at n=%lld", alpha, static_cast<long long>(n)));
                break;
            }
            prev = s;
        }
        auto v = decide(m, {NotionKind::UWT, Case::Exp, Criterion::Abs}, lim);
        if (v.status != VerdictStatus::Holds) o.fail(fmt("alpha=%g EXP-UWT is %s", alpha, to_string(v.status)));
    }
    const double secs = seconds_since(t0);
    if (secs >= 30.0) o.fail(fmt("runtime %.1f s exceeds 30 s", secs));
    if (o.pass) o.detail = fmt("alpha in {1/2, 1}, %.1f s", secs);
    return o;
}

// 4. exponent brackets and their agreement with the growth fit

Outcome exponent_brackets() {
    Outcome o;
    const auto t0 = Clock::now();
    Limits lim;
    lim.d_max = 16;
    const auto eps = oracle::log_grid(1e-1, 1e-6, 25);
    const auto ds = d_range(8);
    struct Row {
        const char* label;
        EigenModel m;
        Case cs;
    };
    std::vector<Row> rows = {{"ALG-SPT-ABS PolyDecay(2)", must(EigenModel::poly_decay(1.0, 2.0)), Case::Alg},
                             {"EXP-SPT-ABS ExpDecay(1,1)", must(EigenModel::exp_decay(1.0, 1.0, 1.0)), Case::Exp}};
    std::string summary;
    for (auto& r : rows) {
        auto b = exponent_bracket(r.m, {NotionKind::SPT, r.cs, Criterion::Abs}, lim);
        if (!b) {
            o.fail(fmt("%s: %s", r.label, b.error().describe().c_str()));
            continue;
        }
        if (!(b->lo >= 0.98 && b->hi <= 1.02 && b->lo <= 1.0 + 1e-12 && b->hi >= 1.0 - 1e-12))
            o.fail(fmt("%s: bracket [%.4f, %.4f] does not hold 1 within 0.02", r.label, b->lo, b->hi));
        auto f = growth_fit(r.m, r.cs, Criterion::Abs, eps, ds);
        if (!f) {
            o.fail(fmt("%s: fit %s", r.label, f.error().describe().c_str()));
            continue;
        }
        if (!(f->p >= b->lo - 0.1 && f->p <= b->hi + 0.1))
            o.fail(fmt("%s: fitted slope %.4f outside [%.4f, %.4f] widened by 0.1", r.label, f->p, b->lo, b->hi));
        summary += fmt("%s[%.4f, %.4f] p=%.4f", summary.empty() ? "" : "; ", b->lo, b->hi, f->p);
    }
    const double secs = seconds_since(t0);
    if (secs >= 120.0) o.fail(fmt("runtime %.1f s exceeds 120 s", secs));
    if (o.pass) o.detail = summary + fmt(", %.1f s", secs);
    return o;
}

// 5. domination of the counted complexity by the explicit bounds

Outcome bound_domination() {
    Outcome o;
    const auto eps = oracle::log_grid(1e-1, 1e-6, 25);
    const auto ds = d_range(16);
    struct Case5 {
        const char* label;
        EigenModel m;
        Theorem th;
        CriterionParams p;
    };
    CriterionParams a;
    a.tau2 = 1.0;
    CriterionParams b;
    b.tau = 3.0;
    CriterionParams c;
    std::vector<Case5> cases = {{"(a) T1 Geometric(1/2) tau2=1", must(EigenModel::geometric(1.0, 0.5)), Theorem::T1, a},
                                {"(b) T2 ExpDecay(2,1) tau=3", must(EigenModel::exp_decay(1.0, 2.0, 1.0)), Theorem::T2, b},
                                {"(c) T3 ExpDecay(2,1) c=s=t=1", must(EigenModel::exp_decay(1.0, 2.0, 1.0)), Theorem::T3, c}};
    std::string summary;
    for (auto& k : cases) {
        auto spec = certify_bound_spec(k.m, k.th, k.p, Criterion::Abs, 16);
        if (!spec) {
            o.fail(fmt("%s: constant not certified (%s)", k.label, spec.error().describe().c_str()));
            continue;
        }
        auto rep = verify_domination(k.m, *spec, eps, ds);
        if (!rep) {
            o.fail(fmt("%s: %s", k.label, rep.error().describe().c_str()));
            continue;
        }
        if (!rep->ok()) o.fail(fmt("%s: %zu violations", k.label, rep->violations));
        summary += fmt("%s%s M=%.6g ok", summary.empty() ? "" : "; ", k.label, spec->M());
    }
    if (o.pass) o.detail = summary;
    return o;
}

// 6. certified remainders against a tenfold extension

Outcome certification_soundness() {
    Outcome o;
    struct Fam {
        EigenModel m;
        oracle::Seq log_seq;
    };
    std::vector<Fam> fams = {
        {must(EigenModel::poly_decay(1.0, 2.0)), oracle::log_poly(1.0L, 2.0L)},
        {must(EigenModel::poly_decay(2.5, 3.0)), oracle::log_poly(2.5L, 3.0L)},
        {must(EigenModel::exp_decay(1.0, 1.0, 1.0)), oracle::log_expd(1.0L, 1.0L, 1.0L)},
        {must(EigenModel::exp_decay(3.0, 0.5, 0.6)), oracle::log_expd(3.0L, 0.5L, 0.6L)},
        {must(EigenModel::exp_decay(1.0, 2.0, 1.0)), oracle::log_expd(1.0L, 2.0L, 1.0L)},
        {must(EigenModel::geometric(1.0, 0.5)), oracle::log_geom(1.0L, 0.5L)},
        {must(EigenModel::geometric(2.0, 0.8)), oracle::log_geom(2.0L, 0.8L)},
    };
    std::vector<CriterionParams> params;
    for (double x : {0.5, 1.0, 2.0}) {
        CriterionParams p;
        p.tau = x + 0.25;
        p.tau2 = x;
        p.tau1 = x / 2;
        p.tau3 = x / 2;
        p.c_tilde = 1.0 + x / 4;
        p.c = x;
        p.s = 1.0 + x / 2;
        p.t = 1.0;
        params.push_back(p);
    }
    SumOptions opt;
    opt.max_terms = Index{1} << 14;
    int certified = 0, bad = 0;
    for (auto& f : fams) {
        for (SumKind kind : {SumKind::SptAlg, SumKind::SptExp, SumKind::PtAlg, SumKind::PtExp, SumKind::QptAlg,
                             SumKind::QptExp, SumKind::WtAlg, SumKind::WtExp}) {
            for (const auto& p : params) {
                for (Criterion crit : {Criterion::Abs, Criterion::Nor}) {
                    for (Index d : {1, 3}) {
                        auto ev = evaluate_sum(f.m, kind, p, d, crit, opt);
                        if (!ev || ev->status != SumStatus::Certified) continue;
                        ++certified;
                        const long double log_cri = crit == Criterion::Abs ? 0.0L : f.log_seq(1);
                        auto chk = oracle::check_certified(kind, f.log_seq, log_cri, p, d, crit, *ev);
                        if (!chk.ok) {
                            ++bad;
                            o.fail(fmt("%s d=%lld: value %.17g, extended %.17Lg, allowed %.3g", to_string(kind),
                                       static_cast<long long>(d), ev->value, chk.extended, chk.allowed));
                        }
                    }
                }
            }
        }
    }
    if (certified < 200) o.fail(fmt("only %d certified evaluations", certified));
    if (o.pass) o.detail = fmt("%d certified evaluations, 0 unsound", certified);
    else o.detail += fmt(" (%d unsound of %d)", bad, certified);
    return o;
}

// 7. value-only sums do not depend on the order of the tabulated prefix

Outcome order_invariance() {
    Outcome o;
    std::vector<double> sorted(1000);
    for (int j = 1; j <= 1000; ++j) sorted[static_cast<std::size_t>(j - 1)] = std::pow(j, -2.0);
    const auto env = TailEnvelope::power_law(1.0, 2.0, 1001);
    auto base = must(EigenModel::tabulated({sorted}, env));
    CriterionParams p;
    p.tau = 1.0;
    p.tau2 = 1.0;
    p.c = 1.0;
    p.s = 2.0;
    struct Kind7 {
        SumKind kind;
        CriterionParams p;
    };
    CriterionParams q = p;
    q.tau = 3.0;
    std::vector<Kind7> kinds = {{SumKind::WtAlg, p}, {SumKind::WtExp, p}, {SumKind::QptExp, q}, {SumKind::SptAlg, p},
                                {SumKind::PtAlg, p}};
    auto rng = oracle::rng(77);
    std::vector<std::vector<double>> perms;
    for (int i = 0; i < 50; ++i) {
        auto v = sorted;
        std::shuffle(v.begin(), v.end(), rng);
        perms.push_back(std::move(v));
    }
    double worst = 0.0;
    // ABS only: under NOR the first table entry is the normalizer itself
    const Criterion crit = Criterion::Abs;
    for (auto& k : kinds) {
        {
            auto ref = evaluate_sum(base, k.kind, k.p, 1, crit);
            if (!ref) {
                o.fail(fmt("%s: %s", to_string(k.kind), ref.error().describe().c_str()));
                continue;
            }
            for (const auto& v : perms) {
                auto m = must(EigenModel::tabulated({v}, env));
                auto ev = evaluate_sum(m, k.kind, k.p, 1, crit);
                if (!ev) {
                    o.fail(fmt("%s: %s", to_string(k.kind), ev.error().describe().c_str()));
                    break;
                }
                const double rel = std::fabs(ev->value - ref->value) / std::fabs(ref->value);
                worst = std::max(worst, rel);
                if (rel > 1e-12) {
                    o.fail(fmt("%s: relative change %.3g", to_string(k.kind), rel));
                    break;
                }
            }
        }
    }
    if (o.pass) o.detail = fmt("50 permutations x 5 sums, worst relative change %.3g", worst);
    return o;
}

// 8. the implication chain holds on every built-in family

Outcome implication_chain() {
    Outcome o;
    std::vector<std::pair<const char*, EigenModel>> fams = {
        {"PolyDecay", must(EigenModel::poly_decay(1.0, 2.0))},
        {"PolyDecay(0.5)", must(EigenModel::poly_decay(2.0, 0.5))},
        {"ExpDecay", must(EigenModel::exp_decay(1.0, 1.0, 1.0))},
        {"Geometric", must(EigenModel::geometric(1.0, 0.5))},
        {"FiniteRank", must(EigenModel::finite_rank({{2.0, 1.0, 0.5, 0.25}}))},
        {"Tabulated", must(EigenModel::tabulated({{1.0, 0.5, 0.5, 0.2}}, TailEnvelope::geometric(1.0, 0.5, 5)))},
        {"Expression", must(EigenModel::expression(formula("exp(0-0.5*j) * (1 + 1/d)")))},
    };
    Limits lim;
    lim.d_max = 16;
    int verdicts = 0;
    for (auto& [name, m] : fams) {
        for (Criterion crit : {Criterion::Abs, Criterion::Nor}) {
            auto rep = classify(m, crit, lim);
            verdicts += static_cast<int>(rep.verdicts.size());
            for (const auto& v : rep.consistency.violations)
                o.fail(fmt("%s %s: %s holds but %s fails", name, to_string(crit), v.upstream.c_str(), v.downstream.c_str()));
        }
    }
    TractabilityVerdict spt, pt;
    spt.notion = {NotionKind::SPT, Case::Alg, Criterion::Abs};
    spt.status = VerdictStatus::Holds;
    pt.notion = {NotionKind::PT, Case::Alg, Criterion::Abs};
    pt.status = VerdictStatus::Fails;
    if (check_implications({spt, pt}).consistent()) o.fail("injected SPT=Holds, PT=Fails was not flagged");
    if (o.pass) o.detail = fmt("%zu families x ABS/NOR, %d verdicts consistent; injected fault flagged", fams.size(), verdicts);
    return o;
}

// 9. classify output does not depend on the worker count

Outcome determinism() {
    Outcome o;
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / ("tract_accept_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    const fs::path cfg = dir / "model.json";
    std::ofstream(cfg) << R"({"model": {"kind": "ExpDecay", "params": {"a": 1, "b": 0.5, "gamma": 0.7}, "d_scale": "1 + 1/d"},)"
                       << R"( "criterion": "ABS", "limits": {"d_max": 24}})";
    std::vector<std::string> outs;
    for (const char* th : {"1", "4", "16"}) {
        std::ostringstream out, err;
        const int code = cli::run({"classify", "--config", cfg.string(), "--threads", th}, out, err);
        if (code != 0) o.fail(fmt("threads=%s exited %d: %s", th, code, err.str().c_str()));
        outs.push_back(out.str());
    }
    std::error_code ec;
    fs::remove_all(dir, ec);
    if (outs.size() == 3 && !(outs[0] == outs[1] && outs[1] == outs[2])) o.fail("JSON differs between worker counts");
    if (o.pass) o.detail = fmt("1, 4 and 16 workers, %zu identical bytes", outs[0].size());
    return o;
}

struct Criterion_ {
    int id;
    const char* name;
    std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion_> all = {
        {1, "oracle equivalence", oracle_equivalence},
        {2, "polynomial decay UWT", polynomial_uwt},
        {3, "stretched-exponential UWT", stretched_uwt},
        {4, "exponent brackets", exponent_brackets},
        {5, "bound domination", bound_domination},
        {6, "certification soundness", certification_soundness},
        {7, "order invariance", order_invariance},
        {8, "implication chain", implication_chain},
        {9, "determinism", determinism},
    };
    int only = 0;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) {
            only = std::atoi(argv[++i]);
        } else {
            std::fprintf(stderr, "usage: %s [--only N]\n", argv[0]);
            return 2;
        }
    }
    int failed = 0;
    for (const auto& c : all) {
        if (only && c.id != only) continue;
        const Outcome r = c.run();
        std::printf("%s %d %s: %s\n", r.pass ? "PASS" : "FAIL", c.id, c.name, r.detail.c_str());
        std::fflush(stdout);
        if (!r.pass) ++failed;
    }
    return failed ? 1 : 0;
}
