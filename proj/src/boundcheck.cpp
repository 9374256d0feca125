#include "tract/boundcheck.hpp"

#include "tract/parallel.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <limits>

namespace tract {

namespace {

constexpr std::uint64_t kSat = std::numeric_limits<std::uint64_t>::max();
constexpr double kTwo64 = 18446744073709551616.0;

// Values within a few ulp of an integer are taken to be that integer, so
// e.g. 2 ln(e) rounds up to 2 and not 3.
double snap(double x) {
    const double r = std::nearbyint(x);
    if (std::fabs(x - r) <= 4.0 * DBL_EPSILON * std::max(1.0, std::fabs(x))) return r;
    return x;
}

std::uint64_t to_count(double x) {
    if (std::isnan(x) || x >= kTwo64) return kSat;
    if (x <= 0.0) return 0;
    return static_cast<std::uint64_t>(x);
}

std::uint64_t floor_count(double x) { return to_count(std::floor(snap(x))); }
std::uint64_t ceil_count(double x) { return to_count(std::ceil(snap(x))); }

std::uint64_t sat_add(std::uint64_t a, std::uint64_t b) { return a > kSat - b ? kSat : a + b; }

double dpow(Index d, double e) { return std::pow(static_cast<double>(d), e); }

Error invalid(const char* what) { return make_error(ErrorKind::ConfigError, what); }

std::uint64_t j_eps(const CriterionParams& p, double mu, Index d, double eps) {
    const double e2 = eps * eps;
    const double br = std::max(0.0, 1.0 + std::log(2.0 / e2));
    return ceil_count(std::max(1.0, mu) * std::exp(p.c * (std::pow(br, p.s) + dpow(d, p.t))));
}

// (b, gamma) of an envelope that decays at least like exp(-b j^gamma).
std::optional<std::pair<double, double>> stretched_rate(const TailEnvelope& env) {
    switch (env.form) {
        case EnvelopeForm::Geometric: return std::make_pair(-std::log(env.r), 1.0);
        case EnvelopeForm::StretchedExp: return std::make_pair(env.b, env.gamma);
        case EnvelopeForm::PowerLaw: return std::nullopt;
    }
    return std::nullopt;
}

}  // namespace

const char* to_string(Theorem t) {
    switch (t) {
        case Theorem::T1: return "T1";
        case Theorem::T2: return "T2";
        case Theorem::T3: return "T3";
    }
    return "?";
}

std::optional<Theorem> theorem_from_string(const std::string& name) {
    if (name == "T1") return Theorem::T1;
    if (name == "T2") return Theorem::T2;
    if (name == "T3") return Theorem::T3;
    return std::nullopt;
}

double BoundSpec::M() const { return constant.value + constant.remainder_bound.value_or(0.0); }

Result<BoundSpec> make_bound_spec(Theorem th, const CriterionParams& p, const SumEvaluation& constant,
                                  Criterion crit) {
    if (constant.status != SumStatus::Certified || !constant.remainder_bound)
        return make_error(ErrorKind::NotCertified, "bound constant is not certified");
    if (!(constant.value >= 0.0) || !std::isfinite(constant.value + *constant.remainder_bound))
        return make_error(ErrorKind::NotCertified, "bound constant is not finite");
    switch (th) {
        case Theorem::T1:
            if (!(p.tau2 > 0.0) || !(p.c_tilde > 0.0)) return invalid("T1 needs tau2 > 0 and c_tilde > 0");
            if (!(p.tau1 >= 0.0) || !(p.tau3 >= 0.0)) return invalid("T1 needs tau1, tau3 >= 0");
            if (crit == Criterion::Nor && (p.c_tilde != 1.0 || p.tau3 != 0.0))
                return invalid("T1 under NOR needs c_tilde = 1 and tau3 = 0");
            break;
        case Theorem::T2:
            if (!(p.tau > 0.0)) return invalid("T2 needs tau > 0");
            break;
        case Theorem::T3:
            if (!(p.c > 0.0) || !(p.s > 0.0) || !(p.t > 0.0)) return invalid("T3 needs c, s, t > 0");
            break;
    }
    return BoundSpec{th, p, constant, crit};
}

Result<BoundSpec> certify_bound_spec(const EigenModel& m, Theorem th, const CriterionParams& p, Criterion crit,
                                     Index d_max, const SumOptions& opt, int threads) {
    // Parameter checks first so a bad spec is not mistaken for a failed sum.
    SumEvaluation probe;
    probe.status = SumStatus::Certified;
    probe.remainder_bound = 0.0;
    if (auto chk = make_bound_spec(th, p, probe, crit); !chk) return chk.error();

    const SumKind kind = th == Theorem::T1 ? SumKind::PtExp : th == Theorem::T2 ? SumKind::QptExp : SumKind::WtExp;
    auto sup = sup_over_d(m, kind, p, crit, d_max, opt, threads);
    if (!sup) return sup.error();
    if (sup->status != SumStatus::Certified || !sup->sup_upper) {
        Error e = make_error(ErrorKind::NotCertified, std::string(to_string(th)) + " constant: " +
                                                          to_string(kind) + " sum is " + to_string(sup->status));
        for (std::size_t i = 0; i < sup->per_d.size(); ++i)
            if (sup->per_d[i].status != SumStatus::Certified) {
                e.d = static_cast<Index>(i) + 1;
                break;
            }
        return e;
    }
    SumEvaluation c;
    c.value = sup->sup_observed;
    c.remainder_bound = std::max(0.0, *sup->sup_upper - sup->sup_observed);
    c.status = SumStatus::Certified;
    for (const auto& e : sup->per_d) c.terms_used = std::max(c.terms_used, e.terms_used);
    return make_bound_spec(th, p, c, crit);
}

std::uint64_t bound_t1(const BoundSpec& spec, Index d, double eps) {
    const auto& p = spec.params;
    const std::uint64_t b = floor_count(spec.M() * std::exp(1.0) * dpow(d, p.tau1));
    const std::uint64_t start = ceil_count(p.c_tilde * dpow(d, p.tau3));
    const double tail = std::pow(std::max(0.0, -2.0 * std::log(eps)), 1.0 / p.tau2);
    return sat_add(sat_add(b, start), ceil_count(tail));
}

std::uint64_t bound_t2(const BoundSpec& spec, Index d, double eps) {
    const double tau = spec.params.tau;
    const double md = spec.M() * dpow(d, tau);
    const double br = std::max(0.0, 1.0 - std::log(eps));
    const double e = tau * (1.0 + std::log(static_cast<double>(d)));
    return ceil_count(1.0 + md + md * std::pow(br, e));
}

std::uint64_t bound_t3(const BoundSpec& spec, Index d, double eps) { return j_eps(spec.params, spec.M(), d, eps); }

std::uint64_t bound(const BoundSpec& spec, Index d, double eps) {
    switch (spec.theorem) {
        case Theorem::T1: return bound_t1(spec, d, eps);
        case Theorem::T2: return bound_t2(spec, d, eps);
        case Theorem::T3: return bound_t3(spec, d, eps);
    }
    return kSat;
}

Result<DominationReport> verify_domination(const EigenModel& m, const BoundSpec& spec,
                                           const std::vector<double>& eps_grid, const std::vector<Index>& d_grid,
                                           Index j_max, int threads) {
    for (double e : eps_grid)
        if (!(e > 0.0)) return invalid("eps grid values must be positive");
    for (Index d : d_grid)
        if (d < 1) return invalid("d grid values must be >= 1");

    const bool need_j1 = spec.theorem == Theorem::T3 && spec.criterion == Criterion::Abs;
    std::vector<Result<ComplexityResult>> j1(d_grid.size(), ComplexityResult{});
    if (need_j1)
        j1 = parallel_map<Result<ComplexityResult>>(d_grid.size(), threads, [&](std::size_t i) {
            return count_oracle(m, ComplexityQuery{d_grid[i], 1.0, Criterion::Abs}, j_max);
        });
    for (auto& r : j1)
        if (!r) return r.error();

    const std::size_t ne = eps_grid.size();
    auto rows = parallel_map<Result<DominationRow>>(d_grid.size() * ne, threads,
                                                    [&](std::size_t k) -> Result<DominationRow> {
        DominationRow row;
        row.d = d_grid[k / ne];
        row.eps = eps_grid[k % ne];
        auto n = count_oracle(m, ComplexityQuery{row.d, row.eps, spec.criterion}, j_max);
        if (!n) return n.error();
        row.oracle_n = n->n;
        row.bound = bound(spec, row.d, row.eps);
        if (need_j1) row.bound = std::max(row.bound, static_cast<std::uint64_t>(j1[k / ne]->n));
        row.ok = static_cast<std::uint64_t>(row.oracle_n) <= row.bound;
        return row;
    });

    DominationReport rep;
    rep.rows.reserve(rows.size());
    for (auto& r : rows) {
        if (!r) return r.error();
        if (!r->ok) ++rep.violations;
        rep.rows.push_back(*r);
    }
    return rep;
}

Result<Diagnostics> diagnostics(const EigenModel& m, const BoundSpec& spec, Index d, double eps,
                                std::optional<Index> C, Index scan_limit) {
    if (d < 1) return invalid("d must be >= 1");
    if (!(eps > 0.0)) return invalid("eps must be positive");
    const auto& p = spec.params;
    Diagnostics out;

    auto j1 = count_oracle(m, ComplexityQuery{d, 1.0, spec.criterion});
    if (!j1) return j1.error();
    out.j1_star = j1->n;

    // B_d = {j >= start : (lambda/CRI)^(j^-tau2) > 1/e}
    const Index start = start_index(p.c_tilde, d, p.tau3);
    Index last = start + scan_limit - 1;
    const auto rank = m.rank(d);
    if (rank && *rank <= last) {
        last = *rank;
        out.b_complete = true;
    }
    auto tb = m.tail_bound(d, start);
    std::optional<std::pair<double, double>> rate;
    double ln_cri = 0.0;
    if (tb) {
        rate = stretched_rate(tb->envelope);
        auto c = m.cri(d, spec.criterion);
        if (!c) return c.error();
        ln_cri = std::log(*c);
    }
    for (Index j = start; j <= last; ++j) {
        const double jd = static_cast<double>(j);
        if (rate && j >= tb->valid_from && rate->second >= p.tau2) {
            // Past this j the envelope stays below exp(-j^tau2).
            const double g = tb->envelope.log_value(j) - ln_cri + std::pow(jd, p.tau2);
            const double slope = (rate->second - p.tau2) * std::log(jd) + std::log(rate->first * rate->second / p.tau2);
            if (g <= 0.0 && slope >= 0.0) {
                out.b_complete = true;
                break;
            }
        }
        auto lx = m.log_ratio(d, j, spec.criterion);
        if (!lx) return lx.error();
        if (*lx * std::pow(jd, -p.tau2) > -1.0) ++out.b_size;
    }

    out.j_eps_d = j_eps(p, spec.M(), d, eps);
    if (C) {
        const double inner = 1.0 + std::log(std::max(1.0, static_cast<double>(*C - d)));
        out.k1_star = sat_add(floor_count(std::exp(p.c * (std::pow(inner, p.s) + dpow(d, p.t)))), 1);
    }
    if (spec.theorem == Theorem::T1)
        out.b_bound_holds = static_cast<std::uint64_t>(out.b_size) <= floor_count(spec.M() * std::exp(1.0) * dpow(d, p.tau1));
    if (spec.theorem == Theorem::T2)
        out.j1_bound_holds = static_cast<double>(out.j1_star) <= spec.M() * dpow(d, p.tau);
    return out;
}

}  // namespace tract
