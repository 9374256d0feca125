#pragma once

// Information complexity n(eps, S_d) = min{n : lambda_{d,n+1} <= eps^2 CRI_d}.

#include "tract/eigenmodel.hpp"

namespace tract {

inline constexpr Index kDefaultJMax = Index{1} << 26;

struct ComplexityQuery {
    Index d = 1;
    double eps = 1.0;
    Criterion criterion = Criterion::Abs;
};

enum class ComplexityMethod { Search, Count };

struct ComplexityResult {
    Index n = 0;
    bool capped = false;  // FiniteRank rank reached
    ComplexityMethod method = ComplexityMethod::Search;
};

// Exponential then binary search on the monotone sequence.
Result<ComplexityResult> info_complexity(const EigenModel& model, const ComplexityQuery& q,
                                         Index j_max = kDefaultJMax);

// Counts eigenvalues strictly above the threshold by linear scan. The scan
// stops early once a declared envelope falls to the threshold.
Result<ComplexityResult> count_oracle(const EigenModel& model, const ComplexityQuery& q,
                                      Index j_max = kDefaultJMax);

// sqrt(lambda_{d,n+1}); zero past a finite rank.
Result<double> nth_minimal_error(const EigenModel& model, Index d, Index n);

}  // namespace tract
