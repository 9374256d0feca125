#pragma once

// Eigenvalue sequence models lambda_{d,j}: the non-increasing spectrum of
// W_d = S_d^* S_d for each dimension d. Every other module reads eigenvalues
// through this interface.

#include "tract/expr.hpp"
#include "tract/result.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace tract {

using Index = std::int64_t;

enum class Criterion { Abs, Nor };
const char* to_string(Criterion c);

// Eigenvalues below this are reported as kMinPositive with a clamp flag.
inline constexpr double kMinPositive = 1e-300;

enum class EnvelopeForm { PowerLaw, Geometric, StretchedExp };
const char* to_string(EnvelopeForm f);

// Analytic upper bound on lambda_{d,j} for j >= valid_from:
//   PowerLaw      A * j^-beta
//   Geometric     A * r^j
//   StretchedExp  A * exp(-b * j^gamma)
struct TailEnvelope {
    EnvelopeForm form = EnvelopeForm::PowerLaw;
    double A = 1.0;
    double beta = 0.0;
    double r = 0.0;
    double b = 0.0;
    double gamma = 0.0;
    Index valid_from = 1;

    static TailEnvelope power_law(double A, double beta, Index from = 1);
    static TailEnvelope geometric(double A, double r, Index from = 1);
    static TailEnvelope stretched_exp(double A, double b, double gamma, Index from = 1);

    double log_value(Index j) const;
    double value(Index j) const;

    // ln E(j) = ln A - decay(j): decay is beta ln j, j ln(1/r) or b j^gamma.
    double decay(double j) const;
};

// Envelope specialised to one dimension (scale folded into A).
struct TailBound {
    TailEnvelope envelope;
    Index valid_from = 1;
    // Index from which lambda_{d,j} equals the envelope exactly (two-sided).
    std::optional<Index> exact_from;
};

enum class ModelKind { PolyDecay, ExpDecay, Geometric, FiniteRank, Tabulated, Expression };
const char* to_string(ModelKind k);

struct EigenSample {
    double value;
    bool clamped;
};

class EigenModel {
public:
    static Result<EigenModel> poly_decay(double a, double alpha);
    static Result<EigenModel> exp_decay(double a, double b, double gamma);
    static Result<EigenModel> geometric(double a, double r);
    // One table shared by every d, or one table per d (tables.size() > 1).
    static Result<EigenModel> finite_rank(std::vector<std::vector<double>> tables);
    // Values past the table end continue as the envelope itself.
    static Result<EigenModel> tabulated(std::vector<std::vector<double>> tables, TailEnvelope tail);
    static Result<EigenModel> expression(expr::Expr formula, std::optional<TailEnvelope> tail = {});

    // Multiplies every eigenvalue of dimension d by c_d = scale(d). The
    // declared tail (if any) bounds the unscaled sequence.
    Result<EigenModel> with_d_scale(expr::Expr scale) const;

    ModelKind kind() const { return kind_; }

    Result<EigenSample> sample(Index d, Index j) const;
    Result<double> lambda(Index d, Index j) const;
    // Closed form where available, so values far below kMinPositive keep
    // their true logarithm.
    Result<double> log_lambda(Index d, Index j) const;
    Result<double> cri(Index d, Criterion c) const;
    // ln(lambda_{d,j} / CRI_d). Under NOR the scale c_d cancels exactly.
    Result<double> log_ratio(Index d, Index j, Criterion c) const;
    // Logarithm of the unscaled sequence (before c_d is applied).
    Result<double> log_base(Index d, Index j) const;
    Result<double> scale(Index d) const;

    // Tightest envelope valid for j >= max(J, J0), or nullopt.
    std::optional<TailBound> tail_bound(Index d, Index J) const;

    // Finite support size for FiniteRank models.
    std::optional<Index> rank(Index d) const;
    // Number of dimensions covered by per-d tables; nullopt when unbounded.
    std::optional<Index> max_dimension() const;

    // True when lambda_{d,j} does not depend on d at all.
    bool d_independent() const;
    bool has_d_scale() const { return !d_scale_.empty(); }
    // True when the unscaled sequence does not depend on d (only c_d may).
    bool base_d_independent() const;
    // Closed-form families whose envelope is exact from j = 1.
    bool closed_form() const;

    // Family parameters.
    double a() const { return a_; }
    double alpha() const { return alpha_; }
    double b() const { return b_; }
    double gamma() const { return gamma_; }
    double r() const { return r_; }
    const std::vector<std::vector<double>>& tables() const { return tables_; }
    const expr::Expr& formula() const { return formula_; }
    const std::optional<TailEnvelope>& declared_tail() const { return tail_; }
    const expr::Expr& d_scale_expr() const { return d_scale_; }

private:
    EigenModel() = default;

    Result<const std::vector<double>*> table_for(Index d) const;

    ModelKind kind_ = ModelKind::PolyDecay;
    double a_ = 1.0, alpha_ = 0.0, b_ = 0.0, gamma_ = 0.0, r_ = 0.0;
    std::vector<std::vector<double>> tables_;
    expr::Expr formula_;
    std::optional<TailEnvelope> tail_;
    expr::Expr d_scale_;
};

struct Violation {
    Index d;
    Index j;
    std::string what;
};

struct ValidationReport {
    Index d_max = 0;
    Index j_probe = 0;
    Index dense_prefix = 0;
    std::size_t probes = 0;
    bool sampled = false;  // monotonicity only checked on the probe grid
    std::size_t clamped = 0;
    std::vector<Violation> violations;

    bool ok() const { return violations.empty(); }
    Error to_error() const;
};

// Positivity, non-increase and envelope domination on a dense prefix plus a
// logarithmic probe grid up to j_probe, for every d <= d_max.
ValidationReport validate(const EigenModel& model, Index d_max, Index j_probe);

// Logarithmic probe grid: 1..dense, then geometric steps to j_max inclusive.
std::vector<Index> probe_grid(Index j_max, Index dense = 256, double ratio = 1.25);

}  // namespace tract
