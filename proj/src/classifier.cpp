#include "tract/classifier.hpp"

#include "tract/parallel.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <functional>

namespace tract {

namespace {

enum class Level { Fail = 0, Unknown = 1, Weak = 2, Finite = 3, Strong = 4 };

const std::vector<double>& tau_grid() {
    static const std::vector<double> grid = [] {
        std::vector<double> g;
        for (int e = -8; e <= 8; ++e) g.push_back(std::ldexp(1.0, e));
        return g;
    }();
    return grid;
}

const std::vector<double> kTauSecondary = {4.0, 2.0, 1.0, 0.5, 0.0};

std::vector<double> c_tilde_grid(Criterion crit) {
    if (crit == Criterion::Nor) return {1.0};
    return {1.0, 2.0, 4.0, 8.0, 16.0};
}

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", x);
    return buf;
}

// lambda_{d,j} / CRI_d does not depend on d.
bool flat_in_d(const EigenModel& m, Criterion crit) {
    return m.d_independent() || (crit == Criterion::Nor && m.base_d_independent());
}

Index effective_d_max(const EigenModel& m, const Limits& lim) {
    Index d = std::max<Index>(lim.d_max, 1);
    if (auto dims = m.max_dimension()) d = std::min(d, *dims);
    return d;
}

// Whether boundedness at d = 1 implies boundedness for every d: the sums
// are then non-increasing in d.
bool d_certifiable(const EigenModel& m, SumKind kind, const CriterionParams& p, Criterion crit) {
    if (!flat_in_d(m, crit)) return false;
    if (kind == SumKind::QptAlg && crit == Criterion::Abs) {
        auto l = m.lambda(1, start_index(p.c_tilde, 1, 0.0));
        return l && *l <= 1.0;
    }
    return true;
}

struct Point {
    CriterionParams params;
    Level level = Level::Unknown;
    bool diverged = false;
    SupEvaluation sup;
    Index d_evaluated = 0;
    std::string error;
};

Point eval_point(const EigenModel& m, SumKind kind, const CriterionParams& p, Criterion crit, const Limits& lim) {
    Point out;
    out.params = p;
    const bool cert = d_certifiable(m, kind, p, crit);
    out.d_evaluated = cert ? 1 : effective_d_max(m, lim);
    auto sup = sup_over_d(m, kind, p, crit, out.d_evaluated, lim.sum_options(), lim.threads);
    if (!sup) {
        out.error = sup.error().describe();
        out.level = Level::Unknown;
        return out;
    }
    out.sup = std::move(sup).value();
    if (out.sup.status == SumStatus::DivergenceCertified) {
        out.level = Level::Fail;
        out.diverged = true;
    } else if (out.sup.trend == Trend::Growing) {
        out.level = Level::Fail;
    } else if (out.sup.trend != Trend::Bounded) {
        out.level = Level::Unknown;
    } else if (out.sup.status == SumStatus::Certified) {
        out.level = cert ? Level::Strong : Level::Finite;
    } else {
        out.level = Level::Weak;
    }
    return out;
}

Evidence evidence_from(const Point& p) {
    Evidence e;
    e.d_evaluated = p.d_evaluated;
    e.sup_observed = p.sup.sup_observed;
    e.sup_upper = p.sup.sup_upper;
    e.trend = p.sup.trend;
    if (p.error.empty()) e.status = p.sup.status;
    else e.note = p.error;
    return e;
}

// Full sup over d at a certified witness, for the report.
Evidence full_evidence(const EigenModel& m, SumKind kind, const Point& p, Criterion crit, const Limits& lim) {
    Evidence e = evidence_from(p);
    if (p.d_evaluated == 1) {
        const Index dn = effective_d_max(m, lim);
        if (dn > 1) {
            auto sup = sup_over_d(m, kind, p.params, crit, dn, lim.sum_options(), lim.threads);
            if (sup) {
                e.d_evaluated = dn;
                e.sup_observed = sup->sup_observed;
                e.sup_upper = sup->sup_upper;
                e.trend = sup->trend;
                e.status = sup->status;
            }
        }
        e.note = "sum is non-increasing in d, so the d = 1 certificate bounds every d";
    }
    return e;
}

// Envelope at d = 1 when it is exact and of power-law form.
bool exact_power_law(const EigenModel& m) {
    auto tb = m.tail_bound(1, 1);
    return tb && tb->exact_from && tb->envelope.form == EnvelopeForm::PowerLaw;
}

struct Search {
    SumKind kind;
    bool larger_lenient;
    std::function<void(CriterionParams&, double)> set_primary;
    std::function<double(const CriterionParams&)> exponent;
    std::vector<CriterionParams> secondaries;
};

Search make_search(const EigenModel& m, const Notion& n) {
    Search s;
    const bool flat = flat_in_d(m, n.criterion);
    const auto ct = c_tilde_grid(n.criterion);
    auto with_ct = [&](CriterionParams base) {
        for (double c : ct) {
            base.c_tilde = c;
            s.secondaries.push_back(base);
        }
    };
    switch (n.kind) {
        case NotionKind::SPT:
            s.kind = n.cs == Case::Alg ? SumKind::SptAlg : SumKind::SptExp;
            s.larger_lenient = n.cs == Case::Alg;
            s.set_primary = [](CriterionParams& p, double v) { p.tau = v; };
            s.exponent = n.cs == Case::Alg ? std::function<double(const CriterionParams&)>(
                                                 [](const CriterionParams& p) { return 2.0 * p.tau; })
                                           : [](const CriterionParams& p) { return 1.0 / p.tau; };
            with_ct({});
            break;
        case NotionKind::PT:
            s.kind = n.cs == Case::Alg ? SumKind::PtAlg : SumKind::PtExp;
            s.larger_lenient = n.cs == Case::Alg;
            s.set_primary = [](CriterionParams& p, double v) { p.tau2 = v; };
            s.exponent = [](const CriterionParams& p) { return p.tau2; };
            if (flat) {
                with_ct({});
            } else {
                for (double t1 : kTauSecondary)
                    for (double t3 : kTauSecondary) {
                        CriterionParams p;
                        p.tau1 = t1;
                        p.tau3 = t3;
                        with_ct(p);
                    }
            }
            break;
        case NotionKind::QPT:
            if (n.cs == Case::Alg) {
                s.kind = SumKind::QptAlg;
                s.larger_lenient = true;
                s.set_primary = [](CriterionParams& p, double v) { p.tau2 = v; };
                s.exponent = [](const CriterionParams& p) { return std::max(p.tau1, 2.0 * p.tau2); };
                if (flat) {
                    with_ct({});
                } else {
                    for (double t1 : kTauSecondary) {
                        CriterionParams p;
                        p.tau1 = t1;
                        with_ct(p);
                    }
                }
            } else {
                s.kind = SumKind::QptExp;
                s.larger_lenient = true;
                s.set_primary = [](CriterionParams& p, double v) { p.tau = v; };
                s.exponent = [](const CriterionParams& p) { return p.tau; };
                s.secondaries.push_back({});
            }
            break;
        default: break;
    }
    return s;
}

std::vector<double> lenient_order(const Search& s) {
    std::vector<double> g = tau_grid();
    if (s.larger_lenient) std::reverse(g.begin(), g.end());
    return g;
}

// Highest level any point can reach: without a tail envelope a sampled
// formula only admits heuristic sums.
Level level_cap(const EigenModel& m) {
    if (m.kind() == ModelKind::Expression && !m.tail_bound(1, 1)) return Level::Weak;
    return Level::Strong;
}

// Best point over the secondary grid at one primary value.
Point best_at(const EigenModel& m, const Search& s, const std::vector<CriterionParams>& secondaries, double primary,
              Criterion crit, const Limits& lim) {
    Point best;
    bool have = false;
    const Level cap = level_cap(m);
    for (CriterionParams p : secondaries) {
        s.set_primary(p, primary);
        Point pt = eval_point(m, s.kind, p, crit, lim);
        if (!have || pt.level > best.level) {
            best = std::move(pt);
            have = true;
        }
        if (best.level >= cap) break;
        if (best.level == Level::Finite && !flat_in_d(m, crit)) break;
    }
    return best;
}

TractabilityVerdict decide_search(const EigenModel& m, const Notion& n, const Limits& lim) {
    TractabilityVerdict v;
    v.notion = n;
    v.limits = lim;
    const Criterion crit = n.criterion;

    if (n.cs == Case::Exp && exact_power_law(m)) {
        v.status = VerdictStatus::Fails;
        v.evidence.note = n.kind == NotionKind::QPT
                              ? "power-law eigenvalues: terms dominate a harmonic series for every tau"
                              : "power-law eigenvalues: terms stay bounded below for every tau";
        return v;
    }

    const Search s = make_search(m, n);
    const auto order = lenient_order(s);
    Point best;
    std::size_t best_idx = 0;
    bool have = false;
    Point last;
    for (std::size_t i = 0; i < order.size(); ++i) {
        Point p = best_at(m, s, s.secondaries, order[i], crit, lim);
        const bool stop = p.level == Level::Fail && p.diverged;
        if (p.level >= Level::Weak && (!have || p.level >= best.level)) {
            best = p;
            best_idx = i;
            have = true;
        }
        last = std::move(p);
        if (stop) break;
    }
    if (!have) {
        v.status = VerdictStatus::Inconclusive;
        v.evidence = evidence_from(last);
        if (v.evidence.note.empty()) v.evidence.note = "no parameter point on the search grid passed";
        return v;
    }

    // One bisection step toward the stricter neighbour.
    if (best_idx + 1 < order.size()) {
        const double mid = 0.5 * (order[best_idx] + order[best_idx + 1]);
        CriterionParams p = best.params;
        s.set_primary(p, mid);
        Point refined = eval_point(m, s.kind, p, crit, lim);
        if (refined.level >= best.level) best = std::move(refined);
    }

    v.witness = best.params;
    if (best.level == Level::Strong) {
        v.status = VerdictStatus::Holds;
        v.evidence = full_evidence(m, s.kind, best, crit, lim);
    } else {
        v.status = VerdictStatus::SupportedUpTo;
        v.evidence = evidence_from(best);
        v.evidence.note = best.level == Level::Weak ? "heuristic truncation only" : "bounded on the tested d range";
    }
    return v;
}

TractabilityVerdict decide_wt(const EigenModel& m, const Notion& n, const Limits& lim) {
    TractabilityVerdict v;
    v.notion = n;
    v.limits = lim;
    const SumKind kind = n.cs == Case::Alg ? SumKind::WtAlg : SumKind::WtExp;

    bool every_c = false;
    if (auto tb = m.tail_bound(1, 1)) {
        every_c = kind == SumKind::WtAlg || n.s > 1.0 || tb->envelope.form != EnvelopeForm::PowerLaw;
    }

    Level worst = Level::Strong;
    Point worst_point;
    Point smallest;
    bool first = true;
    const double c_floor = lim.c_min * (1.0 - 1e-12);
    for (double c = 1.0; c >= c_floor; c *= 0.5) {
        CriterionParams p;
        p.c = c;
        p.s = n.s;
        p.t = n.t;
        Point pt = eval_point(m, kind, p, n.criterion, lim);
        if (pt.diverged) {
            v.status = VerdictStatus::Fails;
            v.witness = p;
            v.evidence = evidence_from(pt);
            v.evidence.note = "series diverges at c = " + fmt(c);
            return v;
        }
        if (first || pt.level < worst) {
            worst = pt.level;
            worst_point = pt;
            first = false;
        }
        smallest = std::move(pt);
    }
    CriterionParams w;
    w.c = smallest.params.c;
    w.s = n.s;
    w.t = n.t;
    v.witness = w;
    // With a decaying envelope the series converges for every c > 0, even
    // where the remainder bound itself overflows a double.
    if (every_c && worst >= Level::Weak && flat_in_d(m, n.criterion)) {
        v.status = VerdictStatus::Holds;
        v.evidence = full_evidence(m, kind, smallest, n.criterion, lim);
        v.evidence.note = "convergent for every c > 0; " + v.evidence.note;
    } else if (worst >= Level::Weak) {
        v.status = VerdictStatus::SupportedUpTo;
        v.evidence = evidence_from(smallest);
        v.evidence.note = "bounded for every tested c down to " + fmt(smallest.params.c);
    } else {
        v.status = VerdictStatus::Inconclusive;
        v.witness = worst_point.params;
        v.evidence = evidence_from(worst_point);
        if (v.evidence.note.empty())
            v.evidence.note = std::string("trend ") + to_string(worst_point.sup.trend) + " at c = " +
                              fmt(worst_point.params.c);
    }
    return v;
}

std::vector<Index> uwt_grid(Index n_max) {
    std::vector<Index> g;
    for (Index n = 10; n <= n_max; n *= 10) {
        g.push_back(n);
        if (n > n_max / 10) break;
    }
    if (g.empty() || g.back() != n_max) {
        if (n_max >= 3) g.push_back(n_max);
    }
    return g;
}

TractabilityVerdict decide_uwt(const EigenModel& m, const Notion& n, const Limits& lim) {
    TractabilityVerdict v;
    v.notion = n;
    v.limits = lim;
    const Criterion crit = n.criterion;
    const auto grid = uwt_grid(lim.n_max);

    // Statistic per n (min over k), or an error.
    std::vector<std::array<double, 3>> stats(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        for (Index k = 1; k <= 3; ++k) {
            auto s = uwt_statistic(m, grid[i], k, n.cs, crit);
            if (!s) {
                v.status = VerdictStatus::Inconclusive;
                v.evidence.note = s.error().describe();
                return v;
            }
            stats[i][static_cast<std::size_t>(k - 1)] = *s;
        }
        v.evidence.statistic.emplace_back(grid[i], *std::min_element(stats[i].begin(), stats[i].end()));
    }

    const bool flat = flat_in_d(m, crit);
    if (m.kind() == ModelKind::FiniteRank && flat) {
        v.status = VerdictStatus::Holds;
        v.evidence.note = "finite rank: complexity is bounded by the rank";
        return v;
    }

    if (n.cs == Case::Exp && flat && m.closed_form()) {
        // ln(CRI / lambda_n) = g(n) + c0 with c0 = ln CRI - ln a.
        const double c0 = crit == Criterion::Nor ? 0.0 : -std::log(m.a());
        std::function<double(double)> g;
        switch (m.kind()) {
            case ModelKind::PolyDecay: g = [&](double x) { return m.alpha() * std::log(x); }; break;
            case ModelKind::ExpDecay: g = [&](double x) { return m.b() * std::pow(x, m.gamma()); }; break;
            default: g = [&](double x) { return -x * std::log(m.r()); }; break;
        }
        auto closed = [&](double x) {
            double e = g(x) + c0;
            if (crit == Criterion::Nor) e -= g(1.0);
            return std::log(std::max(1.0, e)) / std::log(std::log(x));
        };
        bool matches = true;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const double want = closed(static_cast<double>(grid[i]));
            for (double s : stats[i])
                if (!(std::fabs(s - want) <= 1e-12 * std::max(1.0, std::fabs(want)))) matches = false;
        }
        if (matches) {
            if (m.kind() == ModelKind::PolyDecay) {
                v.status = VerdictStatus::Fails;
                v.evidence.note = "statistic equals ln(max(1, alpha ln n + c0)) / ln ln n, which stays bounded";
            } else {
                v.status = VerdictStatus::Holds;
                v.evidence.note = "ln(CRI/lambda_n) grows like a power of n, so the statistic diverges";
            }
            return v;
        }
    }

    // Threshold sqrt(ln ln n) at every grid n beyond the first decade.
    bool exceeds = true;
    Index witness_n = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (grid[i] <= 10) continue;
        const double thr = std::sqrt(std::log(std::log(static_cast<double>(grid[i]))));
        for (double s : stats[i])
            if (!(s > thr)) {
                if (exceeds) witness_n = grid[i];
                exceeds = false;
            }
    }
    if (exceeds) {
        v.status = VerdictStatus::SupportedUpTo;
        v.evidence.note = "statistic exceeds sqrt(ln ln n) for k = 1, 2, 3 up to n = " + std::to_string(lim.n_max);
    } else {
        v.status = VerdictStatus::Inconclusive;
        v.evidence.note = "statistic below sqrt(ln ln n) at n = " + std::to_string(witness_n);
    }
    return v;
}

}  // namespace

std::string Notion::name() const {
    const char* k = "";
    switch (kind) {
        case NotionKind::SPT: k = "SPT"; break;
        case NotionKind::PT: k = "PT"; break;
        case NotionKind::QPT: k = "QPT"; break;
        case NotionKind::WT: k = "WT"; break;
        case NotionKind::UWT: k = "UWT"; break;
    }
    std::string out = std::string(to_string(cs)) + "-";
    if (kind == NotionKind::WT) out += "(" + fmt(s) + "," + fmt(t) + ")-";
    out += k;
    out += "-";
    out += to_string(criterion);
    return out;
}

const char* to_string(VerdictStatus s) {
    switch (s) {
        case VerdictStatus::Holds: return "Holds";
        case VerdictStatus::Fails: return "Fails";
        case VerdictStatus::SupportedUpTo: return "SupportedUpTo";
        case VerdictStatus::Inconclusive: return "Inconclusive";
    }
    return "?";
}

SumOptions Limits::sum_options() const {
    SumOptions o;
    o.tol = tol;
    o.max_terms = std::min(max_terms, j_max);
    return o;
}

TractabilityVerdict decide(const EigenModel& model, const Notion& notion, const Limits& limits) {
    if (model.kind() == ModelKind::FiniteRank && flat_in_d(model, notion.criterion) &&
        notion.kind != NotionKind::UWT) {
        TractabilityVerdict v;
        v.notion = notion;
        v.limits = limits;
        v.status = VerdictStatus::Holds;
        CriterionParams w;
        w.c_tilde = static_cast<double>(model.rank(1).value_or(0) + 1);
        if (notion.kind == NotionKind::WT) {
            w.c = limits.c_min;
            w.s = notion.s;
            w.t = notion.t;
        }
        v.witness = w;
        v.evidence.note = "finite rank: every criterion sum is a finite sum";
        return v;
    }
    switch (notion.kind) {
        case NotionKind::WT: return decide_wt(model, notion, limits);
        case NotionKind::UWT: return decide_uwt(model, notion, limits);
        default: return decide_search(model, notion, limits);
    }
}

Result<ExponentBracket> exponent_bracket(const EigenModel& model, const Notion& notion, const Limits& limits) {
    if (notion.kind != NotionKind::SPT && notion.kind != NotionKind::QPT)
        return make_error(ErrorKind::ConfigError, "exponent brackets exist for SPT and QPT only");
    const Search s = make_search(model, notion);
    const Criterion crit = notion.criterion;
    const auto order = lenient_order(s);

    auto passes = [&](const std::vector<CriterionParams>& secs, double primary) -> std::optional<CriterionParams> {
        for (CriterionParams p : secs) {
            s.set_primary(p, primary);
            Point pt = eval_point(model, s.kind, p, crit, limits);
            if (pt.level >= Level::Finite) return p;
        }
        return std::nullopt;
    };

    // Groups of secondaries sharing tau1 (only QPT-ALG varies it).
    std::vector<std::vector<CriterionParams>> groups;
    for (const auto& p : s.secondaries) {
        if (!groups.empty() && groups.back().front().tau1 == p.tau1) groups.back().push_back(p);
        else groups.push_back({p});
    }

    std::optional<ExponentBracket> best;
    for (const auto& group : groups) {
        std::optional<CriterionParams> pass;
        std::size_t pass_idx = 0;
        for (std::size_t i = 0; i < order.size(); ++i) {
            auto p = passes(group, order[i]);
            if (p) {
                pass = p;
                pass_idx = i;
            } else if (pass) {
                break;
            }
        }
        if (!pass) continue;
        ExponentBracket b;
        std::optional<double> fail;
        if (pass_idx + 1 < order.size()) fail = order[pass_idx + 1];
        CriterionParams hi_w = *pass;
        std::optional<CriterionParams> lo_w;
        if (fail) {
            lo_w = *pass;
            s.set_primary(*lo_w, *fail);
        }
        double pass_value = order[pass_idx];
        int it = 0;
        if (fail) {
            double f = *fail;
            while (it < 20 && std::fabs(s.exponent(hi_w) - s.exponent(*lo_w)) > 0.01) {
                const double mid = 0.5 * (pass_value + f);
                ++it;
                if (auto p = passes(group, mid)) {
                    hi_w = *p;
                    pass_value = mid;
                } else {
                    s.set_primary(*lo_w, mid);
                    f = mid;
                }
            }
        }
        b.hi = s.exponent(hi_w);
        b.hi_witness = hi_w;
        b.lo_witness = lo_w;
        b.lo = lo_w ? std::min(s.exponent(*lo_w), b.hi) : 0.0;
        if (notion.kind == NotionKind::QPT && notion.cs == Case::Alg && lo_w) b.lo = std::max(b.lo, hi_w.tau1);
        b.iterations = it;
        if (!best || b.hi < best->hi) best = b;
    }
    if (!best) {
        Error e = make_error(ErrorKind::NoPassingPoint, "no parameter point on the search grid passed");
        return e;
    }
    return *best;
}

Result<GrowthFit> growth_fit(const EigenModel& model, Case cs, Criterion crit, const std::vector<double>& eps_grid,
                             const std::vector<Index>& d_grid, Index j_max) {
    if (eps_grid.size() < 8 || d_grid.size() < 8)
        return make_error(ErrorKind::DegenerateGrid, "growth fit needs at least 8 points per axis");
    const std::size_t rows = eps_grid.size() * d_grid.size();
    Eigen::MatrixXd X(rows, 3);
    Eigen::VectorXd y(rows);
    std::size_t r = 0;
    for (Index d : d_grid) {
        for (double eps : eps_grid) {
            auto n = info_complexity(model, {d, eps, crit}, j_max);
            if (!n) return n.error();
            const double inv = std::log(std::max(1.0, 1.0 / eps));
            X(r, 0) = 1.0;
            X(r, 1) = std::log(static_cast<double>(d));
            X(r, 2) = cs == Case::Alg ? inv : std::log(1.0 + inv);
            y(r) = std::log(std::max<double>(1.0, static_cast<double>(n->n)));
            ++r;
        }
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
    if (qr.rank() < 3) return make_error(ErrorKind::DegenerateGrid, "regressors are linearly dependent");
    const Eigen::VectorXd beta = qr.solve(y);
    GrowthFit fit;
    fit.C = std::exp(beta(0));
    fit.q = beta(1);
    fit.p = beta(2);
    fit.residual = std::sqrt((X * beta - y).squaredNorm() / static_cast<double>(rows));
    fit.points = rows;
    return fit;
}

bool implies(const Notion& a, const Notion& b) {
    if (a.cs != b.cs || a.criterion != b.criterion) return false;
    auto rank = [](NotionKind k) {
        switch (k) {
            case NotionKind::SPT: return 0;
            case NotionKind::PT: return 1;
            case NotionKind::QPT: return 2;
            default: return 3;
        }
    };
    const bool a_chain = rank(a.kind) <= 2;
    const bool b_chain = rank(b.kind) <= 2;
    if (a_chain && b_chain) return rank(a.kind) < rank(b.kind);
    if (a_chain) return true;  // QPT implies UWT and every WT
    if (b_chain) return false;
    if (a.kind == NotionKind::UWT) return b.kind == NotionKind::WT;
    if (a.kind == NotionKind::WT && b.kind == NotionKind::WT)
        return b.s >= a.s && b.t >= a.t && !(b.s == a.s && b.t == a.t);
    return false;
}

ConsistencyReport check_implications(const std::vector<TractabilityVerdict>& verdicts) {
    ConsistencyReport rep;
    for (const auto& a : verdicts) {
        if (a.status != VerdictStatus::Holds) continue;
        for (const auto& b : verdicts) {
            if (b.status == VerdictStatus::Fails && implies(a.notion, b.notion))
                rep.violations.push_back({a.notion.name(), b.notion.name()});
        }
    }
    return rep;
}

std::vector<Notion> standard_notions(Criterion crit) {
    std::vector<Notion> out;
    for (Case cs : {Case::Alg, Case::Exp}) {
        for (NotionKind k : {NotionKind::SPT, NotionKind::PT, NotionKind::QPT}) out.push_back({k, cs, crit});
        for (double s : {0.5, 1.0, 2.0})
            for (double t : {0.5, 1.0, 2.0}) out.push_back({NotionKind::WT, cs, crit, s, t});
        out.push_back({NotionKind::UWT, cs, crit});
    }
    return out;
}

ClassifyReport classify(const EigenModel& model, Criterion crit, const Limits& limits) {
    const auto notions = standard_notions(crit);
    Limits inner = limits;
    inner.threads = 1;
    ClassifyReport rep;
    rep.verdicts = parallel_map<TractabilityVerdict>(notions.size(), limits.threads, [&](std::size_t i) {
        TractabilityVerdict v = decide(model, notions[i], inner);
        v.limits = limits;
        return v;
    });
    rep.consistency = check_implications(rep.verdicts);
    return rep;
}

}  // namespace tract
