#pragma once

// Criterion sums for SPT, PT, QPT and (s,t)-WT, the UWT statistics, and
// their suprema over d. Infinite series are truncated with a rigorous
// remainder bound whenever the model supplies a tail envelope.

#include "tract/eigenmodel.hpp"

#include <optional>
#include <vector>

namespace tract {

struct CriterionParams {
    double tau = 1.0;
    double tau1 = 0.0;
    double tau2 = 1.0;
    double tau3 = 0.0;
    double c_tilde = 1.0;
    double c = 1.0;
    double s = 1.0;
    double t = 1.0;
    Index k = 1;
};

enum class SumStatus { Certified, Heuristic, DivergenceCertified };
const char* to_string(SumStatus s);

struct SumEvaluation {
    double value = 0.0;
    Index terms_used = 0;
    std::optional<double> remainder_bound;
    SumStatus status = SumStatus::Heuristic;

    // value + remainder_bound when certified.
    std::optional<double> upper() const;
};

struct SumOptions {
    double tol = 1e-10;
    // Hard cap on summed terms. A certificate reached at the cap keeps its
    // (larger) remainder bound.
    Index max_terms = Index{1} << 20;
    Index heuristic_window = 64;
};

// Start index ceil(c_tilde * d^tau3); products within an ulp of an integer
// are snapped to it first.
Index start_index(double c_tilde, Index d, double tau3);

Result<SumEvaluation> sum_spt_alg(const EigenModel& m, Index d, double tau, Index start, Criterion crit,
                                  const SumOptions& opt = {});
Result<SumEvaluation> sum_spt_exp(const EigenModel& m, Index d, double tau, Index start, Criterion crit,
                                  const SumOptions& opt = {});
Result<SumEvaluation> sum_pt_alg(const EigenModel& m, Index d, double tau1, double tau2, double tau3,
                                 double c_tilde, Criterion crit, const SumOptions& opt = {});
Result<SumEvaluation> sum_pt_exp(const EigenModel& m, Index d, double tau1, double tau2, double tau3,
                                 double c_tilde, Criterion crit, const SumOptions& opt = {});
Result<SumEvaluation> sum_qpt_alg(const EigenModel& m, Index d, double tau1, double tau2, double c_tilde,
                                  Criterion crit, const SumOptions& opt = {});
Result<SumEvaluation> sum_qpt_exp(const EigenModel& m, Index d, double tau, Criterion crit,
                                  const SumOptions& opt = {});
Result<SumEvaluation> sum_wt_alg(const EigenModel& m, Index d, double c, double s, double t, Criterion crit,
                                 const SumOptions& opt = {});
Result<SumEvaluation> sum_wt_exp(const EigenModel& m, Index d, double c, double s, double t, Criterion crit,
                                 const SumOptions& opt = {});

enum class Case { Alg, Exp };
const char* to_string(Case c);

// inf over d <= floor((ln n)^k) of ln(CRI/lambda_{d,n}) / ln ln n (ALG) or
// ln max(1, ln(CRI/lambda_{d,n})) / ln ln n (EXP). Infinite past a finite rank.
Result<double> uwt_statistic(const EigenModel& m, Index n, Index k, Case cs, Criterion crit);

enum class SumKind { SptAlg, SptExp, PtAlg, PtExp, QptAlg, QptExp, WtAlg, WtExp };
const char* to_string(SumKind k);
std::optional<SumKind> sum_kind_from_string(const std::string& name);

// Dispatches on kind; SPT sums start at ceil(c_tilde).
Result<SumEvaluation> evaluate_sum(const EigenModel& m, SumKind kind, const CriterionParams& p, Index d,
                                   Criterion crit, const SumOptions& opt = {});

enum class Trend { Bounded, Growing, Mixed };
const char* to_string(Trend t);

struct SupEvaluation {
    std::vector<SumEvaluation> per_d;  // index 0 is d = 1
    double sup_observed = 0.0;
    Trend trend = Trend::Bounded;
    SumStatus status = SumStatus::Certified;
    // max over d of value + remainder, when every d is certified.
    std::optional<double> sup_upper;
};

// Growing: non-decreasing over the last half and final value above twice the
// first. Bounded: last-half max within twice the first-half max.
Trend classify_trend(const std::vector<double>& values);

Result<SupEvaluation> sup_over_d(const EigenModel& m, SumKind kind, const CriterionParams& p, Criterion crit,
                                 Index d_max, const SumOptions& opt = {}, int threads = 1);

// Builds a SupEvaluation from per-d results already computed.
SupEvaluation summarize(std::vector<SumEvaluation> per_d);

}  // namespace tract
