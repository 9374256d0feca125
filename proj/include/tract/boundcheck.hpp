#pragma once

// Explicit complexity upper bounds for EXP-SPT/PT (T1), EXP-QPT (T2) and
// EXP-(s,t)-WT (T3), and their check against the counted complexity.

#include "tract/complexity.hpp"
#include "tract/criteria.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace tract {

enum class Theorem { T1, T2, T3 };
const char* to_string(Theorem t);
std::optional<Theorem> theorem_from_string(const std::string& name);

// T1: M = sup_d d^-tau1 sum_{j >= ceil(c_tilde d^tau3)} (lambda/CRI)^(j^-tau2)
// T2: M = sup_d d^-tau sum_j [1 + ln max(1, CRI/lambda) / 2]^(-tau (1 + ln d))
// T3: mu = sup_d sigma(c, d, s) exp(-c d^t)
struct BoundSpec {
    Theorem theorem = Theorem::T1;
    CriterionParams params;
    SumEvaluation constant;  // M or mu, always Certified
    Criterion criterion = Criterion::Abs;

    // value + remainder bound
    double M() const;
};

// Checks the constant is Certified and the parameters are admissible.
Result<BoundSpec> make_bound_spec(Theorem th, const CriterionParams& p, const SumEvaluation& constant,
                                  Criterion crit);

// Computes the constant as the sup over d = 1..d_max of the matching
// criterion sum. Fails with NotCertified unless every d is certified.
Result<BoundSpec> certify_bound_spec(const EigenModel& m, Theorem th, const CriterionParams& p, Criterion crit,
                                     Index d_max, const SumOptions& opt = {}, int threads = 1);

// Saturating at UINT64_MAX.
std::uint64_t bound_t1(const BoundSpec& spec, Index d, double eps);
std::uint64_t bound_t2(const BoundSpec& spec, Index d, double eps);
std::uint64_t bound_t3(const BoundSpec& spec, Index d, double eps);
std::uint64_t bound(const BoundSpec& spec, Index d, double eps);

struct DominationRow {
    Index d = 1;
    double eps = 1.0;
    Index oracle_n = 0;
    std::uint64_t bound = 0;
    bool ok = true;
};

struct DominationReport {
    std::vector<DominationRow> rows;  // d-major, eps in grid order
    std::size_t violations = 0;
    bool ok() const { return violations == 0; }
};

// Under T3 with ABS the compared bound is max(j1*, j_{eps,d}): for eps >= 1
// the theorem only controls min(1, lambda / CRI).
Result<DominationReport> verify_domination(const EigenModel& m, const BoundSpec& spec,
                                           const std::vector<double>& eps_grid, const std::vector<Index>& d_grid,
                                           Index j_max = kDefaultJMax, int threads = 1);

struct Diagnostics {
    Index b_size = 0;
    bool b_complete = false;  // false when the scan stopped at its limit
    Index j1_star = 0;
    std::uint64_t j_eps_d = 0;
    std::optional<std::uint64_t> k1_star;
    std::optional<bool> b_bound_holds;   // T1: |B_d| <= floor(M e d^tau1)
    std::optional<bool> j1_bound_holds;  // T2: j1* <= M d^tau
};

Result<Diagnostics> diagnostics(const EigenModel& m, const BoundSpec& spec, Index d, double eps,
                                std::optional<Index> C = {}, Index scan_limit = Index{1} << 20);

}  // namespace tract
