#pragma once

// Tractability verdicts from criterion sums: parameter search, exponent
// brackets, empirical growth fits and the implication chain.

#include "tract/complexity.hpp"
#include "tract/criteria.hpp"

#include <string>
#include <vector>

namespace tract {

enum class NotionKind { SPT, PT, QPT, WT, UWT };

struct Notion {
    NotionKind kind = NotionKind::SPT;
    Case cs = Case::Alg;
    Criterion criterion = Criterion::Abs;
    double s = 1.0;  // WT only
    double t = 1.0;

    // e.g. "ALG-SPT-ABS", "EXP-(1,0.5)-WT-NOR"
    std::string name() const;
};

enum class VerdictStatus { Holds, Fails, SupportedUpTo, Inconclusive };
const char* to_string(VerdictStatus s);

struct Limits {
    Index d_max = 64;
    Index j_max = kDefaultJMax;
    Index n_max = 1000000;
    double tol = 1e-10;
    double c_min = 1.0 / 1024.0;
    Index max_terms = Index{1} << 16;  // per criterion sum during searches
    int threads = 1;

    SumOptions sum_options() const;
};

struct Evidence {
    Index d_evaluated = 0;
    double sup_observed = 0.0;
    std::optional<double> sup_upper;
    Trend trend = Trend::Bounded;
    std::optional<SumStatus> status;
    std::vector<std::pair<Index, double>> statistic;  // UWT: (n, min over k)
    std::string note;
};

struct TractabilityVerdict {
    Notion notion;
    VerdictStatus status = VerdictStatus::Inconclusive;
    std::optional<CriterionParams> witness;
    Evidence evidence;
    Limits limits;
};

TractabilityVerdict decide(const EigenModel& model, const Notion& notion, const Limits& limits);

struct ExponentBracket {
    double lo = 0.0;
    double hi = 0.0;
    std::optional<CriterionParams> lo_witness;
    CriterionParams hi_witness;
    int iterations = 0;
};

// notion.kind must be SPT or QPT.
Result<ExponentBracket> exponent_bracket(const EigenModel& model, const Notion& notion, const Limits& limits);

struct GrowthFit {
    double C = 0.0;
    double p = 0.0;
    double q = 0.0;
    double residual = 0.0;  // root mean square
    std::size_t points = 0;
};

// Least squares of ln max(1, n(eps, d)) on [1, ln d, x(eps)] with
// x = ln max(1, 1/eps) (ALG) or ln(1 + ln max(1, 1/eps)) (EXP).
Result<GrowthFit> growth_fit(const EigenModel& model, Case cs, Criterion crit, const std::vector<double>& eps_grid,
                             const std::vector<Index>& d_grid, Index j_max = kDefaultJMax);

struct Inconsistency {
    std::string upstream;
    std::string downstream;
};

struct ConsistencyReport {
    std::vector<Inconsistency> violations;
    bool consistent() const { return violations.empty(); }
};

// True when notion a implies notion b.
bool implies(const Notion& a, const Notion& b);

// Holds upstream with Fails downstream is a violation.
ConsistencyReport check_implications(const std::vector<TractabilityVerdict>& verdicts);

// The notions reported by classify for one criterion.
std::vector<Notion> standard_notions(Criterion crit);

struct ClassifyReport {
    std::vector<TractabilityVerdict> verdicts;
    ConsistencyReport consistency;
};

ClassifyReport classify(const EigenModel& model, Criterion crit, const Limits& limits);

}  // namespace tract
