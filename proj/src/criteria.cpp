#include "tract/criteria.hpp"

#include "tract/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace tract {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
const double kLn2 = std::log(2.0);

enum class Series { AlgPower, ExpPower, QptExp, WtAlg, WtExp };

struct SeriesSpec {
    Series kind = Series::AlgPower;
    double p = 1.0;    // AlgPower / QptExp exponent
    double tau = 1.0;  // ExpPower
    double c = 1.0;    // WT
    double s = 1.0;
};

// Term as a function of lnx = ln(lambda / CRI). Every form is
// non-decreasing in lnx, so envelope bounds on lnx bound the terms.
double term(const SeriesSpec& sp, double j, double lnx) {
    switch (sp.kind) {
        case Series::AlgPower: return std::exp(sp.p * lnx);
        case Series::ExpPower: return std::exp(std::pow(j, -sp.tau) * lnx);
        case Series::QptExp: return std::pow(1.0 + 0.5 * std::max(0.0, -lnx), -sp.p);
        case Series::WtAlg: return std::exp(-sp.c * std::exp(-0.5 * sp.s * lnx));
        case Series::WtExp: return std::exp(-sp.c * std::pow(1.0 + kLn2 + std::max(0.0, -lnx), sp.s));
    }
    return 0.0;
}

// Neumaier's compensated summation.
struct Accumulator {
    double sum = 0.0;
    double comp = 0.0;
    void add(double x) {
        const double t = sum + x;
        if (std::fabs(sum) >= std::fabs(x)) comp += (sum - t) + x;
        else comp += (x - t) + sum;
        sum = t;
    }
    double value() const { return sum + comp; }
};

// lnx <= lnK - h(j) for j >= valid_from, with h = beta ln j (power) or
// b j^gamma (stretched; geometric is gamma = 1).
struct LogEnvelope {
    bool power = true;
    double lnK = 0.0;
    double beta = 0.0;
    double b = 0.0;
    double gamma = 1.0;
    Index valid_from = 1;
    std::optional<Index> exact_from;

    double h(double j) const { return power ? beta * std::log(j) : b * std::pow(j, gamma); }
    double bound(double j) const { return lnK - h(j); }
};

LogEnvelope to_log_envelope(const TailBound& tb, double lnCRI) {
    LogEnvelope e;
    const TailEnvelope& t = tb.envelope;
    e.lnK = std::log(t.A) - lnCRI;
    e.valid_from = tb.valid_from;
    e.exact_from = tb.exact_from;
    switch (t.form) {
        case EnvelopeForm::PowerLaw:
            e.power = true;
            e.beta = t.beta;
            break;
        case EnvelopeForm::Geometric:
            e.power = false;
            e.b = -std::log(t.r);
            e.gamma = 1.0;
            break;
        case EnvelopeForm::StretchedExp:
            e.power = false;
            e.b = t.b;
            e.gamma = t.gamma;
            break;
    }
    return e;
}

double log_sum_exp(double a, double b) {
    if (a == -kInf) return b;
    if (b == -kInf) return a;
    const double m = std::max(a, b);
    return m + std::log1p(std::exp(std::min(a, b) - m));
}

// Upper bound on ln Gamma(sigma, y), y > 0.
double log_upper_gamma(double sigma, double y) {
    if (!(y < kInf)) return -kInf;
    const double ly = std::log(y);
    if (sigma <= 1.0) return (sigma - 1.0) * ly - y;
    double best = std::lgamma(sigma);
    if (y > sigma - 1.0) best = std::min(best, (sigma - 1.0) * ly - y - std::log1p(-(sigma - 1.0) / y));
    return best;
}

// ln of C * int_N^inf x^-q dx.
double log_power_tail(double logC, double q, double N) {
    if (!(q > 1.0)) return kInf;
    return logC + (1.0 - q) * std::log(N) - std::log(q - 1.0);
}

// ln of C * int_N^inf exp(-a x^g) dx, given ln a.
double log_stretched_tail(double logC, double ln_a, double g, double N) {
    if (!(g > 0.0) || !std::isfinite(g)) return kInf;
    if (ln_a == kInf) return -kInf;
    const double ln_y = ln_a + g * std::log(N);
    const double y = std::exp(ln_y);
    if (!(y > 0.0)) return kInf;
    return logC + log_upper_gamma(1.0 / g, y) - std::log(g) - ln_a / g;
}

// ln of C * int_N^inf (a0 + a1 x)^-p dx.
double log_affine_tail(double logC, double a0, double a1, double p, double N) {
    const double base = a0 + a1 * N;
    if (!(p > 1.0) || !(base > 0.0) || !(a1 > 0.0)) return kInf;
    return logC + (1.0 - p) * std::log(base) - std::log(a1) - std::log(p - 1.0);
}

// ln of int_N^inf exp(-c (alpha + beta ln x)^s) dx for s > 1. With v = ln x
// the integrand is e^phi, phi(v) = v - c (alpha + beta v)^s concave; the
// bound is flat up to the point where phi' = -1 and the tangent beyond it.
double log_log_integral(double c, double s, double alpha, double beta, double N) {
    const double vN = std::log(N);
    const double wN = alpha + beta * vN;
    if (!(wN > 0.0)) return kInf;
    auto phi = [&](double v) { return v - c * std::pow(alpha + beta * v, s); };
    auto dphi = [&](double v) { return 1.0 - c * beta * s * std::pow(alpha + beta * v, s - 1.0); };
    const double w_star = std::pow(2.0 / (c * beta * s), 1.0 / (s - 1.0));
    const double v_star = (w_star - alpha) / beta;
    if (vN >= v_star) {
        const double slope = -dphi(vN);
        if (!(slope > 0.0)) return kInf;
        return phi(vN) - std::log(slope);
    }
    const double w0 = std::pow(1.0 / (c * beta * s), 1.0 / (s - 1.0));
    const double v0 = std::max(vN, (w0 - alpha) / beta);
    const double flat = std::log(v_star - vN) + phi(v0);
    return log_sum_exp(flat, phi(v_star));
}

bool diverges(const SeriesSpec& sp, const LogEnvelope& e) {
    switch (sp.kind) {
        case Series::AlgPower: return e.power && sp.p * e.beta <= 1.0;
        case Series::ExpPower: return e.power || e.gamma <= sp.tau;
        case Series::QptExp: return e.power || e.gamma * sp.p <= 1.0;
        case Series::WtAlg: return false;
        case Series::WtExp: return e.power && (sp.s < 1.0 || (sp.s == 1.0 && sp.c * e.beta <= 1.0));
    }
    return false;
}

bool certifiable(const SeriesSpec& sp, const LogEnvelope& e) {
    switch (sp.kind) {
        case Series::AlgPower: return !e.power || sp.p * e.beta > 1.0;
        case Series::ExpPower: return !e.power && e.gamma > sp.tau;
        case Series::QptExp: return !e.power && e.gamma * sp.p > 1.0;
        case Series::WtAlg: return true;
        case Series::WtExp:
            if (sp.s > 1.0) return true;
            if (sp.s == 1.0) return !e.power || sp.c * e.beta > 1.0;
            return !e.power;
    }
    return false;
}

// ln of an upper bound on sum_{j > N} term(j); +inf when no bound applies
// at this N. Requires N + 1 >= valid_from.
double log_remainder(const SeriesSpec& sp, const LogEnvelope& e, Index n) {
    const double N = static_cast<double>(n);
    const double N1 = N + 1.0;
    switch (sp.kind) {
        case Series::AlgPower:
            if (e.power) return log_power_tail(sp.p * e.lnK, sp.p * e.beta, N);
            return log_stretched_tail(sp.p * e.lnK, std::log(sp.p * e.b), e.gamma, N);
        case Series::ExpPower: {
            if (e.power || !(e.gamma > sp.tau)) return kInf;
            const double pre = std::max(0.0, e.lnK) * std::pow(N1, -sp.tau);
            return log_stretched_tail(pre, std::log(e.b), e.gamma - sp.tau, N);
        }
        case Series::QptExp: {
            if (e.power) return kInf;
            const double a0 = 1.0 - 0.5 * e.lnK;
            if (e.gamma == 1.0) return log_affine_tail(0.0, a0, 0.5 * e.b, sp.p, N);
            if (a0 >= 0.0) return log_power_tail(-sp.p * std::log(0.5 * e.b), e.gamma * sp.p, N);
            if (0.25 * e.b * std::pow(N1, e.gamma) >= -a0)
                return log_power_tail(-sp.p * std::log(0.25 * e.b), e.gamma * sp.p, N);
            return kInf;
        }
        case Series::WtAlg: {
            const double ln_a = std::log(sp.c) - 0.5 * sp.s * e.lnK;
            if (e.power) return log_stretched_tail(0.0, ln_a, 0.5 * e.beta * sp.s, N);
            // e^u >= (e^{u1}/u1) u for u >= u1 >= 1, and e^u >= u always.
            const double u1 = 0.5 * sp.s * e.b * std::pow(N1, e.gamma);
            const double ln_m = u1 >= 1.0 ? u1 - std::log(u1) : 0.0;
            return log_stretched_tail(0.0, ln_a + ln_m + std::log(0.5 * sp.s * e.b), e.gamma, N);
        }
        case Series::WtExp: {
            const double alpha = 1.0 + kLn2 - e.lnK;
            if (sp.s >= 1.0) {
                if (e.power) {
                    if (!(alpha + e.beta * std::log(N) > 0.0)) return kInf;
                    if (sp.s == 1.0) return log_power_tail(-sp.c * alpha, sp.c * e.beta, N);
                    return log_log_integral(sp.c, sp.s, alpha, e.beta, N);
                }
                const double u1 = alpha + e.h(N1);
                if (!(u1 > 0.0)) return kInf;
                const double cp = sp.c * std::pow(u1, sp.s - 1.0);
                return log_stretched_tail(-cp * alpha, std::log(cp * e.b), e.gamma, N);
            }
            if (e.power) return kInf;
            double kappa = 1.0;
            if (alpha < 0.0) {
                if (!(e.h(N1) >= -2.0 * alpha)) return kInf;
                kappa = 0.5;
            }
            return log_stretched_tail(0.0, std::log(sp.c) + sp.s * std::log(kappa * e.b), e.gamma * sp.s, N);
        }
    }
    return kInf;
}

Error at_d(Error e, Index d) {
    if (!e.d) e.d = d;
    return e;
}

Result<SumEvaluation> series(const EigenModel& m, Index d, Criterion crit, const SeriesSpec& sp, Index start,
                             const SumOptions& opt) {
    start = std::max<Index>(start, 1);
    double lnCRI = 0.0;
    if (crit == Criterion::Nor) {
        auto l1 = m.log_lambda(d, 1);
        if (!l1) return at_d(l1.error(), d);
        lnCRI = *l1;
    }
    const auto rank = m.rank(d);
    std::optional<LogEnvelope> env;
    if (auto tb = m.tail_bound(d, 1)) env = to_log_envelope(*tb, lnCRI);

    auto lnx_at = [&](Index j) -> Result<double> {
        auto l = m.log_ratio(d, j, crit);
        if (!l) return at_d(l.error(), d);
        double v = *l;
        // Upper-only envelopes cap values the model could only clamp.
        if (env && j >= env->valid_from && !(env->exact_from && j >= *env->exact_from))
            v = std::min(v, env->bound(static_cast<double>(j)));
        return v;
    };

    Accumulator acc;
    SumEvaluation out;

    if (env && env->exact_from && diverges(sp, *env)) {
        const Index last = std::max(start, *env->exact_from);
        for (Index j = start; j <= last; ++j) {
            auto lnx = lnx_at(j);
            if (!lnx) return lnx.error();
            acc.add(term(sp, static_cast<double>(j), *lnx));
            ++out.terms_used;
        }
        out.value = acc.value();
        out.status = SumStatus::DivergenceCertified;
        return out;
    }

    const bool certify = env && certifiable(sp, *env);
    std::optional<double> best_r;
    Index quiet = 0;

    auto try_certificate = [&](Index n) {
        if (n < 1 || n + 1 < env->valid_from) return;
        const double r = std::exp(log_remainder(sp, *env, n));
        if (std::isfinite(r) && (!best_r || r < *best_r)) best_r = r;
    };

    for (Index j = start;; ++j) {
        if (rank && j > *rank) {
            out.value = acc.value();
            out.remainder_bound = 0.0;
            out.status = SumStatus::Certified;
            return out;
        }
        if (out.terms_used >= opt.max_terms) break;
        auto lnx = lnx_at(j);
        if (!lnx) return lnx.error();
        const double t = term(sp, static_cast<double>(j), *lnx);
        acc.add(t);
        ++out.terms_used;
        if (certify) {
            if (out.terms_used <= 64 || out.terms_used % 64 == 0) {
                try_certificate(j);
                if (best_r && *best_r <= opt.tol * acc.value()) {
                    out.value = acc.value();
                    out.remainder_bound = best_r;
                    out.status = SumStatus::Certified;
                    return out;
                }
            }
        } else {
            quiet = t <= opt.tol * acc.value() ? quiet + 1 : 0;
            if (quiet >= opt.heuristic_window) break;
        }
    }
    out.value = acc.value();
    if (certify) {
        try_certificate(start + out.terms_used - 1);
        if (best_r) {
            out.remainder_bound = best_r;
            out.status = SumStatus::Certified;
            return out;
        }
    }
    out.status = SumStatus::Heuristic;
    return out;
}

SumEvaluation scaled(SumEvaluation e, double factor) {
    e.value *= factor;
    if (e.remainder_bound) e.remainder_bound = *e.remainder_bound * factor;
    return e;
}

Result<SumEvaluation> positive(double x, const char* what, Index d) {
    Error e = make_error(ErrorKind::ConfigError, std::string(what) + " must be positive");
    e.d = d;
    if (!(x > 0.0) || !std::isfinite(x)) return e;
    return SumEvaluation{};
}

Result<SumEvaluation> non_negative(double x, const char* what, Index d) {
    Error e = make_error(ErrorKind::ConfigError, std::string(what) + " must be non-negative");
    e.d = d;
    if (!(x >= 0.0) || !std::isfinite(x)) return e;
    return SumEvaluation{};
}

#define TRACT_REQUIRE(check) \
    do {                     \
        auto r_ = (check);   \
        if (!r_) return r_;  \
    } while (0)

}  // namespace

const char* to_string(SumStatus s) {
    switch (s) {
        case SumStatus::Certified: return "Certified";
        case SumStatus::Heuristic: return "Heuristic";
        case SumStatus::DivergenceCertified: return "DivergenceCertified";
    }
    return "?";
}

const char* to_string(Case c) { return c == Case::Alg ? "ALG" : "EXP"; }

const char* to_string(Trend t) {
    switch (t) {
        case Trend::Bounded: return "Bounded";
        case Trend::Growing: return "Growing";
        case Trend::Mixed: return "Mixed";
    }
    return "?";
}

const char* to_string(SumKind k) {
    switch (k) {
        case SumKind::SptAlg: return "spt-alg";
        case SumKind::SptExp: return "spt-exp";
        case SumKind::PtAlg: return "pt-alg";
        case SumKind::PtExp: return "pt-exp";
        case SumKind::QptAlg: return "qpt-alg";
        case SumKind::QptExp: return "qpt-exp";
        case SumKind::WtAlg: return "wt-alg";
        case SumKind::WtExp: return "wt-exp";
    }
    return "?";
}

std::optional<SumKind> sum_kind_from_string(const std::string& name) {
    for (SumKind k : {SumKind::SptAlg, SumKind::SptExp, SumKind::PtAlg, SumKind::PtExp, SumKind::QptAlg,
                      SumKind::QptExp, SumKind::WtAlg, SumKind::WtExp})
        if (name == to_string(k)) return k;
    return std::nullopt;
}

std::optional<double> SumEvaluation::upper() const {
    if (status != SumStatus::Certified || !remainder_bound) return std::nullopt;
    return value + *remainder_bound;
}

Index start_index(double c_tilde, Index d, double tau3) {
    double x = c_tilde * std::pow(static_cast<double>(d), tau3);
    const double r = std::nearbyint(x);
    if (std::fabs(x - r) <= std::numeric_limits<double>::epsilon() * std::fabs(r)) x = r;
    if (!(x < 4e18)) return Index{4} * 1000000000000000000;
    return std::max<Index>(1, static_cast<Index>(std::ceil(x)));
}

Result<SumEvaluation> sum_spt_alg(const EigenModel& m, Index d, double tau, Index start, Criterion crit,
                                  const SumOptions& opt) {
    TRACT_REQUIRE(positive(tau, "tau", d));
    SeriesSpec sp{Series::AlgPower, tau};
    return series(m, d, crit, sp, crit == Criterion::Nor ? 1 : start, opt);
}

Result<SumEvaluation> sum_spt_exp(const EigenModel& m, Index d, double tau, Index start, Criterion crit,
                                  const SumOptions& opt) {
    TRACT_REQUIRE(positive(tau, "tau", d));
    SeriesSpec sp{Series::ExpPower};
    sp.tau = tau;
    return series(m, d, crit, sp, crit == Criterion::Nor ? 1 : start, opt);
}

Result<SumEvaluation> sum_pt_alg(const EigenModel& m, Index d, double tau1, double tau2, double tau3,
                                 double c_tilde, Criterion crit, const SumOptions& opt) {
    TRACT_REQUIRE(non_negative(tau1, "tau1", d));
    TRACT_REQUIRE(non_negative(tau3, "tau3", d));
    TRACT_REQUIRE(positive(tau2, "tau2", d));
    TRACT_REQUIRE(positive(c_tilde, "c_tilde", d));
    const Index start = crit == Criterion::Nor ? 1 : start_index(c_tilde, d, tau3);
    auto inner = series(m, d, crit, SeriesSpec{Series::AlgPower, tau2}, start, opt);
    if (!inner) return inner;
    return scaled(*inner, std::pow(static_cast<double>(d), -tau1));
}

Result<SumEvaluation> sum_pt_exp(const EigenModel& m, Index d, double tau1, double tau2, double tau3,
                                 double c_tilde, Criterion crit, const SumOptions& opt) {
    TRACT_REQUIRE(non_negative(tau1, "tau1", d));
    TRACT_REQUIRE(non_negative(tau3, "tau3", d));
    TRACT_REQUIRE(positive(tau2, "tau2", d));
    TRACT_REQUIRE(positive(c_tilde, "c_tilde", d));
    const Index start = crit == Criterion::Nor ? 1 : start_index(c_tilde, d, tau3);
    SeriesSpec sp{Series::ExpPower};
    sp.tau = tau2;
    auto inner = series(m, d, crit, sp, start, opt);
    if (!inner) return inner;
    return scaled(*inner, std::pow(static_cast<double>(d), -tau1));
}

Result<SumEvaluation> sum_qpt_alg(const EigenModel& m, Index d, double tau1, double tau2, double c_tilde,
                                  Criterion crit, const SumOptions& opt) {
    TRACT_REQUIRE(non_negative(tau1, "tau1", d));
    TRACT_REQUIRE(positive(tau2, "tau2", d));
    TRACT_REQUIRE(positive(c_tilde, "c_tilde", d));
    const double dd = static_cast<double>(d);
    const Index start = crit == Criterion::Nor ? 1 : start_index(c_tilde, d, tau1);
    auto inner = series(m, d, crit, SeriesSpec{Series::AlgPower, tau2 * (1.0 + std::log(dd))}, start, opt);
    if (!inner) return inner;
    SumEvaluation out = *inner;
    const double pre = 1.0 / (dd * dd);
    const double v = std::pow(inner->value, 1.0 / tau2);
    out.value = pre * v;
    if (inner->remainder_bound)
        out.remainder_bound = pre * (std::pow(inner->value + *inner->remainder_bound, 1.0 / tau2) - v);
    return out;
}

Result<SumEvaluation> sum_qpt_exp(const EigenModel& m, Index d, double tau, Criterion crit, const SumOptions& opt) {
    TRACT_REQUIRE(positive(tau, "tau", d));
    const double dd = static_cast<double>(d);
    auto inner = series(m, d, crit, SeriesSpec{Series::QptExp, tau * (1.0 + std::log(dd))}, 1, opt);
    if (!inner) return inner;
    return scaled(*inner, std::pow(dd, -tau));
}

Result<SumEvaluation> sum_wt_alg(const EigenModel& m, Index d, double c, double s, double t, Criterion crit,
                                 const SumOptions& opt) {
    TRACT_REQUIRE(positive(c, "c", d));
    TRACT_REQUIRE(positive(s, "s", d));
    TRACT_REQUIRE(positive(t, "t", d));
    SeriesSpec sp{Series::WtAlg};
    sp.c = c;
    sp.s = s;
    auto inner = series(m, d, crit, sp, 1, opt);
    if (!inner) return inner;
    return scaled(*inner, std::exp(-c * std::pow(static_cast<double>(d), t)));
}

Result<SumEvaluation> sum_wt_exp(const EigenModel& m, Index d, double c, double s, double t, Criterion crit,
                                 const SumOptions& opt) {
    TRACT_REQUIRE(positive(c, "c", d));
    TRACT_REQUIRE(positive(s, "s", d));
    TRACT_REQUIRE(positive(t, "t", d));
    SeriesSpec sp{Series::WtExp};
    sp.c = c;
    sp.s = s;
    auto inner = series(m, d, crit, sp, 1, opt);
    if (!inner) return inner;
    return scaled(*inner, std::exp(-c * std::pow(static_cast<double>(d), t)));
}

Result<double> uwt_statistic(const EigenModel& m, Index n, Index k, Case cs, Criterion crit) {
    if (n < 3) return make_error(ErrorKind::ConfigError, "UWT statistic needs n >= 3");
    if (k < 1) return make_error(ErrorKind::ConfigError, "UWT statistic needs k >= 1");
    const double ln_n = std::log(static_cast<double>(n));
    const double lnln = std::log(ln_n);
    double window = std::floor(std::pow(ln_n, static_cast<double>(k)));
    Index w = window < 1.0 ? 1 : static_cast<Index>(window);
    if (m.d_independent() || (crit == Criterion::Nor && m.base_d_independent())) w = 1;
    if (auto dims = m.max_dimension(); dims && w > *dims) {
        Error e = make_error(ErrorKind::DimensionOutOfRange, "UWT window exceeds the tabulated dimensions");
        e.d = w;
        e.j = n;
        return e;
    }
    double best = kInf;
    for (Index d = 1; d <= w; ++d) {
        if (auto r = m.rank(d); r && n > *r) continue;
        auto lr = m.log_ratio(d, n, crit);
        if (!lr) return at_d(lr.error(), d);
        const double x = -*lr;
        const double stat = cs == Case::Alg ? x / lnln : std::log(std::max(1.0, x)) / lnln;
        best = std::min(best, stat);
    }
    return best;
}

Result<SumEvaluation> evaluate_sum(const EigenModel& m, SumKind kind, const CriterionParams& p, Index d,
                                   Criterion crit, const SumOptions& opt) {
    switch (kind) {
        case SumKind::SptAlg: return sum_spt_alg(m, d, p.tau, start_index(p.c_tilde, d, 0.0), crit, opt);
        case SumKind::SptExp: return sum_spt_exp(m, d, p.tau, start_index(p.c_tilde, d, 0.0), crit, opt);
        case SumKind::PtAlg: return sum_pt_alg(m, d, p.tau1, p.tau2, p.tau3, p.c_tilde, crit, opt);
        case SumKind::PtExp: return sum_pt_exp(m, d, p.tau1, p.tau2, p.tau3, p.c_tilde, crit, opt);
        case SumKind::QptAlg: return sum_qpt_alg(m, d, p.tau1, p.tau2, p.c_tilde, crit, opt);
        case SumKind::QptExp: return sum_qpt_exp(m, d, p.tau, crit, opt);
        case SumKind::WtAlg: return sum_wt_alg(m, d, p.c, p.s, p.t, crit, opt);
        case SumKind::WtExp: return sum_wt_exp(m, d, p.c, p.s, p.t, crit, opt);
    }
    return make_error(ErrorKind::ConfigError, "unknown sum kind");
}

Trend classify_trend(const std::vector<double>& v) {
    const std::size_t n = v.size();
    if (n < 2) return Trend::Bounded;
    const std::size_t half = n / 2;  // last half is [half, n)
    bool monotone = true;
    for (std::size_t i = half; i + 1 < n; ++i)
        if (v[i + 1] < v[i]) monotone = false;
    if (monotone && v.back() > 2.0 * v.front()) return Trend::Growing;
    const double first_max = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(half));
    const double last_max = *std::max_element(v.begin() + static_cast<std::ptrdiff_t>(half), v.end());
    if (last_max <= 2.0 * first_max) return Trend::Bounded;
    return Trend::Mixed;
}

SupEvaluation summarize(std::vector<SumEvaluation> per_d) {
    SupEvaluation out;
    out.per_d = std::move(per_d);
    std::vector<double> values;
    values.reserve(out.per_d.size());
    bool all_certified = true;
    bool any_divergent = false;
    double upper = 0.0;
    for (const auto& e : out.per_d) {
        values.push_back(e.value);
        out.sup_observed = std::max(out.sup_observed, e.value);
        if (e.status == SumStatus::DivergenceCertified) any_divergent = true;
        if (auto u = e.upper()) upper = std::max(upper, *u);
        else all_certified = false;
    }
    out.trend = classify_trend(values);
    if (any_divergent) out.status = SumStatus::DivergenceCertified;
    else if (all_certified) out.status = SumStatus::Certified;
    else out.status = SumStatus::Heuristic;
    if (all_certified && !out.per_d.empty()) out.sup_upper = upper;
    return out;
}

Result<SupEvaluation> sup_over_d(const EigenModel& m, SumKind kind, const CriterionParams& p, Criterion crit,
                                 Index d_max, const SumOptions& opt, int threads) {
    if (d_max < 1) return make_error(ErrorKind::ConfigError, "d_max must be >= 1");
    // SPT sums carry no d outside the eigenvalues themselves.
    const bool spt = kind == SumKind::SptAlg || kind == SumKind::SptExp;
    if (spt && (m.d_independent() || (crit == Criterion::Nor && m.base_d_independent()))) {
        auto one = evaluate_sum(m, kind, p, 1, crit, opt);
        if (!one) return one.error();
        return summarize(std::vector<SumEvaluation>(static_cast<std::size_t>(d_max), *one));
    }
    auto results = parallel_map<Result<SumEvaluation>>(static_cast<std::size_t>(d_max), threads, [&](std::size_t i) {
        return evaluate_sum(m, kind, p, static_cast<Index>(i) + 1, crit, opt);
    });
    std::vector<SumEvaluation> per_d;
    per_d.reserve(results.size());
    for (auto& r : results) {
        if (!r) return r.error();
        per_d.push_back(std::move(r).value());
    }
    return summarize(std::move(per_d));
}

}  // namespace tract
