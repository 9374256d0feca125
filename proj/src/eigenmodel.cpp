#include "tract/eigenmodel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

namespace tract {

namespace {

Error at(Error e, Index d, Index j) {
    if (!e.d) e.d = d;
    if (!e.j) e.j = j;
    return e;
}

Error invalid(const std::string& msg) { return make_error(ErrorKind::InvalidModel, msg); }

bool positive_finite(double x) { return std::isfinite(x) && x > 0.0; }

Result<TailEnvelope> check_envelope(const TailEnvelope& t, bool declared) {
    if (!positive_finite(t.A)) return invalid("tail envelope needs A > 0");
    if (t.valid_from < 1) return invalid("tail envelope needs valid_from >= 1");
    switch (t.form) {
        case EnvelopeForm::PowerLaw:
            if (!std::isfinite(t.beta) || t.beta <= (declared ? 1.0 : 0.0))
                return invalid(declared ? "PowerLaw tail needs beta > 1" : "PowerLaw tail needs beta > 0");
            break;
        case EnvelopeForm::Geometric:
            if (!(t.r > 0.0 && t.r < 1.0)) return invalid("Geometric tail needs r in (0, 1)");
            break;
        case EnvelopeForm::StretchedExp:
            if (!positive_finite(t.b) || !positive_finite(t.gamma))
                return invalid("StretchedExp tail needs b > 0 and gamma > 0");
            break;
    }
    return t;
}

Result<std::vector<std::vector<double>>> check_tables(std::vector<std::vector<double>> tables) {
    if (tables.empty()) return invalid("eigenvalue table list is empty");
    for (std::size_t i = 0; i < tables.size(); ++i) {
        if (tables[i].empty()) {
            Error e = invalid("eigenvalue table is empty");
            e.d = static_cast<Index>(i + 1);
            return e;
        }
        for (std::size_t k = 0; k < tables[i].size(); ++k) {
            if (!positive_finite(tables[i][k])) {
                Error e = invalid("eigenvalues must be positive and finite");
                e.d = static_cast<Index>(i + 1);
                e.j = static_cast<Index>(k + 1);
                return e;
            }
        }
    }
    return tables;
}

}  // namespace

const char* to_string(Criterion c) { return c == Criterion::Abs ? "ABS" : "NOR"; }

const char* to_string(EnvelopeForm f) {
    switch (f) {
        case EnvelopeForm::PowerLaw: return "PowerLaw";
        case EnvelopeForm::Geometric: return "Geometric";
        case EnvelopeForm::StretchedExp: return "StretchedExp";
    }
    return "?";
}

const char* to_string(ModelKind k) {
    switch (k) {
        case ModelKind::PolyDecay: return "PolyDecay";
        case ModelKind::ExpDecay: return "ExpDecay";
        case ModelKind::Geometric: return "Geometric";
        case ModelKind::FiniteRank: return "FiniteRank";
        case ModelKind::Tabulated: return "Tabulated";
        case ModelKind::Expression: return "Expression";
    }
    return "?";
}

// ---- TailEnvelope ----

TailEnvelope TailEnvelope::power_law(double A, double beta, Index from) {
    TailEnvelope t;
    t.form = EnvelopeForm::PowerLaw;
    t.A = A;
    t.beta = beta;
    t.valid_from = from;
    return t;
}

TailEnvelope TailEnvelope::geometric(double A, double r, Index from) {
    TailEnvelope t;
    t.form = EnvelopeForm::Geometric;
    t.A = A;
    t.r = r;
    t.valid_from = from;
    return t;
}

TailEnvelope TailEnvelope::stretched_exp(double A, double b, double gamma, Index from) {
    TailEnvelope t;
    t.form = EnvelopeForm::StretchedExp;
    t.A = A;
    t.b = b;
    t.gamma = gamma;
    t.valid_from = from;
    return t;
}

double TailEnvelope::decay(double j) const {
    switch (form) {
        case EnvelopeForm::PowerLaw: return beta * std::log(j);
        case EnvelopeForm::Geometric: return -j * std::log(r);
        case EnvelopeForm::StretchedExp: return b * std::pow(j, gamma);
    }
    return 0.0;
}

double TailEnvelope::log_value(Index j) const { return std::log(A) - decay(static_cast<double>(j)); }

double TailEnvelope::value(Index j) const {
    const double x = static_cast<double>(j);
    switch (form) {
        case EnvelopeForm::PowerLaw: return A * std::pow(x, -beta);
        case EnvelopeForm::Geometric: return A * std::pow(r, x);
        case EnvelopeForm::StretchedExp: return A * std::exp(-b * std::pow(x, gamma));
    }
    return 0.0;
}

// ---- construction ----

Result<EigenModel> EigenModel::poly_decay(double a, double alpha) {
    if (!positive_finite(a) || !positive_finite(alpha)) return invalid("PolyDecay needs a > 0 and alpha > 0");
    EigenModel m;
    m.kind_ = ModelKind::PolyDecay;
    m.a_ = a;
    m.alpha_ = alpha;
    return m;
}

Result<EigenModel> EigenModel::exp_decay(double a, double b, double gamma) {
    if (!positive_finite(a) || !positive_finite(b) || !positive_finite(gamma))
        return invalid("ExpDecay needs a > 0, b > 0 and gamma > 0");
    EigenModel m;
    m.kind_ = ModelKind::ExpDecay;
    m.a_ = a;
    m.b_ = b;
    m.gamma_ = gamma;
    return m;
}

Result<EigenModel> EigenModel::geometric(double a, double r) {
    if (!positive_finite(a) || !(r > 0.0 && r < 1.0)) return invalid("Geometric needs a > 0 and r in (0, 1)");
    EigenModel m;
    m.kind_ = ModelKind::Geometric;
    m.a_ = a;
    m.r_ = r;
    return m;
}

Result<EigenModel> EigenModel::finite_rank(std::vector<std::vector<double>> tables) {
    auto checked = check_tables(std::move(tables));
    if (!checked) return checked.error();
    EigenModel m;
    m.kind_ = ModelKind::FiniteRank;
    m.tables_ = std::move(checked).value();
    return m;
}

Result<EigenModel> EigenModel::tabulated(std::vector<std::vector<double>> tables, TailEnvelope tail) {
    auto checked = check_tables(std::move(tables));
    if (!checked) return checked.error();
    auto env = check_envelope(tail, true);
    if (!env) return env.error();
    for (std::size_t i = 0; i < checked->size(); ++i) {
        if (tail.valid_from > static_cast<Index>((*checked)[i].size()) + 1) {
            Error e = invalid("tail valid_from must not exceed the table length + 1");
            e.d = static_cast<Index>(i + 1);
            return e;
        }
    }
    EigenModel m;
    m.kind_ = ModelKind::Tabulated;
    m.tables_ = std::move(checked).value();
    m.tail_ = tail;
    return m;
}

Result<EigenModel> EigenModel::expression(expr::Expr formula, std::optional<TailEnvelope> tail) {
    if (formula.empty()) return invalid("Expression model needs a formula");
    if (tail) {
        auto env = check_envelope(*tail, true);
        if (!env) return env.error();
    }
    EigenModel m;
    m.kind_ = ModelKind::Expression;
    m.formula_ = std::move(formula);
    m.tail_ = tail;
    return m;
}

Result<EigenModel> EigenModel::with_d_scale(expr::Expr scale) const {
    if (scale.empty()) return invalid("d_scale is empty");
    if (scale.uses(expr::Variable::J)) return invalid("d_scale may depend on d only");
    EigenModel m = *this;
    m.d_scale_ = std::move(scale);
    return m;
}

// ---- evaluation ----

Result<double> EigenModel::scale(Index d) const {
    if (d < 1) return at(make_error(ErrorKind::DimensionOutOfRange, "d must be >= 1"), d, 1);
    if (d_scale_.empty()) return 1.0;
    auto c = expr::eval(d_scale_, static_cast<double>(d), 1.0);
    if (!c) {
        Error e = c.error();
        e.d = d;
        return e;
    }
    if (!positive_finite(*c)) {
        Error e = make_error(ErrorKind::EvalDomain, "d_scale must be positive and finite");
        e.d = d;
        return e;
    }
    return *c;
}

Result<const std::vector<double>*> EigenModel::table_for(Index d) const {
    if (tables_.size() == 1) return &tables_.front();
    if (d < 1 || d > static_cast<Index>(tables_.size())) {
        Error e = make_error(ErrorKind::DimensionOutOfRange, "no eigenvalue table for this dimension");
        e.d = d;
        return e;
    }
    return &tables_[static_cast<std::size_t>(d - 1)];
}

std::optional<Index> EigenModel::rank(Index d) const {
    if (kind_ != ModelKind::FiniteRank) return std::nullopt;
    auto t = table_for(d);
    if (!t) return std::nullopt;
    return static_cast<Index>((*t)->size());
}

bool EigenModel::closed_form() const {
    return kind_ == ModelKind::PolyDecay || kind_ == ModelKind::ExpDecay || kind_ == ModelKind::Geometric;
}

bool EigenModel::base_d_independent() const {
    switch (kind_) {
        case ModelKind::PolyDecay:
        case ModelKind::ExpDecay:
        case ModelKind::Geometric: return true;
        case ModelKind::FiniteRank:
        case ModelKind::Tabulated: return tables_.size() == 1;
        case ModelKind::Expression: return !formula_.uses(expr::Variable::D);
    }
    return false;
}

bool EigenModel::d_independent() const { return d_scale_.empty() && base_d_independent(); }

namespace {

// Unscaled value and logarithm for one index.
struct Base {
    double value;
    double log;
};

}  // namespace

static Result<Base> base_eval(const EigenModel& m, Index d, Index j,
                              const std::vector<double>* table) {
    const double x = static_cast<double>(j);
    switch (m.kind()) {
        case ModelKind::PolyDecay:
            return Base{m.a() * std::pow(x, -m.alpha()), std::log(m.a()) - m.alpha() * std::log(x)};
        case ModelKind::ExpDecay: {
            const double e = m.b() * std::pow(x, m.gamma());
            return Base{m.a() * std::exp(-e), std::log(m.a()) - e};
        }
        case ModelKind::Geometric:
            return Base{m.a() * std::pow(m.r(), x), std::log(m.a()) + x * std::log(m.r())};
        case ModelKind::FiniteRank: {
            if (j > static_cast<Index>(table->size()))
                return at(make_error(ErrorKind::BeyondRank, "index past the finite rank"), d, j);
            const double v = (*table)[static_cast<std::size_t>(j - 1)];
            return Base{v, std::log(v)};
        }
        case ModelKind::Tabulated: {
            if (j <= static_cast<Index>(table->size())) {
                const double v = (*table)[static_cast<std::size_t>(j - 1)];
                return Base{v, std::log(v)};
            }
            const TailEnvelope& t = *m.declared_tail();
            return Base{t.value(j), t.log_value(j)};
        }
        case ModelKind::Expression: {
            auto v = expr::eval(m.formula(), static_cast<double>(d), x);
            if (!v) return at(v.error(), d, j);
            if (*v < 0.0) return at(make_error(ErrorKind::EvalDomain, "formula produced a negative eigenvalue"), d, j);
            if (!std::isfinite(*v)) return at(make_error(ErrorKind::EvalDomain, "formula produced a non-finite eigenvalue"), d, j);
            const double clamped = std::max(*v, kMinPositive);
            return Base{*v, std::log(clamped)};
        }
    }
    return make_error(ErrorKind::InvalidModel, "unknown model kind");
}

Result<double> EigenModel::log_base(Index d, Index j) const {
    if (d < 1 || j < 1) return at(make_error(ErrorKind::DimensionOutOfRange, "d and j must be >= 1"), d, j);
    const std::vector<double>* table = nullptr;
    if (!tables_.empty()) {
        auto t = table_for(d);
        if (!t) return t.error();
        table = *t;
    }
    auto b = base_eval(*this, d, j, table);
    if (!b) return b.error();
    return b->log;
}

Result<EigenSample> EigenModel::sample(Index d, Index j) const {
    if (d < 1 || j < 1) return at(make_error(ErrorKind::DimensionOutOfRange, "d and j must be >= 1"), d, j);
    const std::vector<double>* table = nullptr;
    if (!tables_.empty()) {
        auto t = table_for(d);
        if (!t) return t.error();
        table = *t;
    }
    auto b = base_eval(*this, d, j, table);
    if (!b) return b.error();
    double v = b->value;
    if (!d_scale_.empty()) {
        auto c = scale(d);
        if (!c) return c.error();
        v *= *c;
    }
    if (!(v >= kMinPositive)) return EigenSample{kMinPositive, true};
    return EigenSample{v, false};
}

Result<double> EigenModel::lambda(Index d, Index j) const {
    auto s = sample(d, j);
    if (!s) return s.error();
    return s->value;
}

Result<double> EigenModel::log_lambda(Index d, Index j) const {
    auto l = log_base(d, j);
    if (!l) return l;
    if (d_scale_.empty()) return l;
    auto c = scale(d);
    if (!c) return c.error();
    return *l + std::log(*c);
}

Result<double> EigenModel::cri(Index d, Criterion c) const {
    if (c == Criterion::Abs) {
        if (d < 1) return at(make_error(ErrorKind::DimensionOutOfRange, "d must be >= 1"), d, 1);
        return 1.0;
    }
    return lambda(d, 1);
}

Result<double> EigenModel::log_ratio(Index d, Index j, Criterion c) const {
    if (c == Criterion::Abs) return log_lambda(d, j);
    auto lj = log_base(d, j);
    if (!lj) return lj;
    if (j == 1) return 0.0;
    auto l1 = log_base(d, 1);
    if (!l1) return l1;
    return *lj - *l1;
}

std::optional<Index> EigenModel::max_dimension() const {
    if (tables_.size() > 1) return static_cast<Index>(tables_.size());
    return std::nullopt;
}

std::optional<TailBound> EigenModel::tail_bound(Index d, Index J) const {
    auto c = scale(d);
    if (!c) return std::nullopt;
    TailBound out;
    const Index start = std::max<Index>(J, 1);
    switch (kind_) {
        case ModelKind::PolyDecay:
            out.envelope = TailEnvelope::power_law(a_ * *c, alpha_);
            out.exact_from = 1;
            break;
        case ModelKind::ExpDecay:
            out.envelope = TailEnvelope::stretched_exp(a_ * *c, b_, gamma_);
            out.exact_from = 1;
            break;
        case ModelKind::Geometric:
            out.envelope = TailEnvelope::geometric(a_ * *c, r_);
            out.exact_from = 1;
            break;
        case ModelKind::FiniteRank: return std::nullopt;
        case ModelKind::Tabulated: {
            auto t = table_for(d);
            if (!t) return std::nullopt;
            out.envelope = *tail_;
            out.envelope.A *= *c;
            out.exact_from = static_cast<Index>((*t)->size()) + 1;
            break;
        }
        case ModelKind::Expression:
            if (!tail_) return std::nullopt;
            out.envelope = *tail_;
            out.envelope.A *= *c;
            break;
    }
    out.valid_from = std::max(start, out.envelope.valid_from);
    out.envelope.valid_from = out.valid_from;
    return out;
}

// ---- validation ----

std::vector<Index> probe_grid(Index j_max, Index dense, double ratio) {
    std::vector<Index> grid;
    if (j_max < 1) return grid;
    const Index head = std::min(dense, j_max);
    for (Index j = 1; j <= head; ++j) grid.push_back(j);
    double x = static_cast<double>(head);
    Index last = head;
    while (last < j_max) {
        x *= ratio;
        Index next = std::max(last + 1, static_cast<Index>(std::floor(x)));
        next = std::min(next, j_max);
        grid.push_back(next);
        last = next;
    }
    return grid;
}

Error ValidationReport::to_error() const {
    Error e = make_error(ErrorKind::ValidationFailed, std::to_string(violations.size()) + " violation(s)");
    if (!violations.empty()) {
        e.message += "; first: " + violations.front().what;
        e.d = violations.front().d;
        e.j = violations.front().j;
    }
    return e;
}

ValidationReport validate(const EigenModel& model, Index d_max, Index j_probe) {
    ValidationReport rep;
    rep.d_max = d_max;
    Index limit = std::max<Index>(j_probe, 1);
    const auto& tail = model.declared_tail();
    if (tail) limit = std::max(limit, 10 * tail->valid_from);
    for (const auto& t : model.tables()) limit = std::max(limit, static_cast<Index>(t.size()) + 1);
    if (model.kind() == ModelKind::FiniteRank) {
        limit = 0;
        for (const auto& t : model.tables()) limit = std::max(limit, static_cast<Index>(t.size()));
    }
    rep.j_probe = limit;
    rep.dense_prefix = std::min<Index>(256, limit);

    std::set<Index> points;
    for (Index j : probe_grid(limit)) {
        points.insert(j);
        if (j > rep.dense_prefix && j < limit) points.insert(j + 1);
    }
    // Tables are checked exhaustively, including the step into the tail.
    for (const auto& t : model.tables())
        for (Index j = 1; j <= static_cast<Index>(t.size()) + 1 && j <= limit; ++j) points.insert(j);
    if (tail) {
        points.insert(tail->valid_from);
        if (tail->valid_from > 1) points.insert(tail->valid_from - 1);
    }
    rep.probes = points.size();
    rep.sampled = model.kind() == ModelKind::Expression || model.closed_form();

    // A d-independent sequence is the same list for every d.
    const Index d_top = model.d_independent() ? std::min<Index>(d_max, 1) : d_max;
    for (Index d = 1; d <= d_top; ++d) {
        auto c = model.scale(d);
        if (!c) {
            rep.violations.push_back({d, 1, c.error().describe()});
            continue;
        }
        const Index top = model.rank(d).value_or(limit);
        double prev = 0.0;
        Index prev_j = 0;
        for (Index j : points) {
            if (j > top) break;
            auto s = model.sample(d, j);
            if (!s) {
                rep.violations.push_back({d, j, s.error().describe()});
                prev_j = 0;
                continue;
            }
            if (s->clamped) ++rep.clamped;
            if (!(s->value > 0.0) || !std::isfinite(s->value)) {
                rep.violations.push_back({d, j, "eigenvalue is not positive and finite"});
            }
            if (prev_j > 0 && s->value > prev) {
                char buf[160];
                std::snprintf(buf, sizeof buf, "not non-increasing: lambda(%lld)=%.17g > lambda(%lld)=%.17g",
                              static_cast<long long>(j), s->value, static_cast<long long>(prev_j), prev);
                rep.violations.push_back({d, j, buf});
            }
            prev = s->value;
            prev_j = j;
            if (tail && j >= tail->valid_from) {
                // The envelope bounds the unscaled sequence.
                auto lb = model.log_base(d, j);
                if (lb) {
                    const double unscaled = *lb;
                    const double bound = tail->log_value(j);
                    if (unscaled > bound + 1e-12 * std::max(1.0, std::fabs(bound))) {
                        char buf[160];
                        std::snprintf(buf, sizeof buf, "exceeds tail envelope: lambda=%.17g > envelope=%.17g",
                                      std::exp(unscaled), tail->value(j));
                        rep.violations.push_back({d, j, buf});
                    }
                }
            }
        }
    }
    return rep;
}

}  // namespace tract
