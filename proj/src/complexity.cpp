#include "tract/complexity.hpp"

#include <cmath>

namespace tract {

namespace {

Error tag(Error e, const ComplexityQuery& q) {
    if (!e.d) e.d = q.d;
    e.eps = q.eps;
    return e;
}

Result<double> threshold(const EigenModel& model, const ComplexityQuery& q) {
    if (!(q.eps > 0.0)) return tag(make_error(ErrorKind::ConfigError, "eps must be positive"), q);
    auto c = model.cri(q.d, q.criterion);
    if (!c) return tag(c.error(), q);
    return q.eps * q.eps * *c;
}

}  // namespace

Result<ComplexityResult> info_complexity(const EigenModel& model, const ComplexityQuery& q, Index j_max) {
    auto t = threshold(model, q);
    if (!t) return t.error();
    const double T = *t;

    // First index in (lo, hi] with lambda <= T, assuming one exists at hi.
    auto satisfied = [&](Index j) -> Result<bool> {
        auto l = model.lambda(q.d, j);
        if (!l) return tag(l.error(), q);
        return *l <= T;
    };

    ComplexityResult out;
    out.method = ComplexityMethod::Search;

    Index lo = 0;
    Index hi = 1;
    const auto rank = model.rank(q.d);
    const Index cap = rank ? *rank : j_max;
    while (true) {
        if (hi > cap) hi = cap;
        auto s = satisfied(hi);
        if (!s) return s.error();
        if (*s) break;
        if (hi == cap) {
            if (rank) {
                out.n = *rank;
                out.capped = true;
                return out;
            }
            Error e = make_error(ErrorKind::Unbounded, "no eigenvalue at or below eps^2 * CRI_d within j_max");
            e.j = j_max;
            return tag(e, q);
        }
        lo = hi;
        hi = hi > cap / 2 ? cap : hi * 2;
    }
    while (hi - lo > 1) {
        const Index mid = lo + (hi - lo) / 2;
        auto s = satisfied(mid);
        if (!s) return s.error();
        if (*s) hi = mid;
        else lo = mid;
    }
    out.n = hi - 1;
    return out;
}

Result<ComplexityResult> count_oracle(const EigenModel& model, const ComplexityQuery& q, Index j_max) {
    auto t = threshold(model, q);
    if (!t) return t.error();
    const double T = *t;

    ComplexityResult out;
    out.method = ComplexityMethod::Count;
    const auto rank = model.rank(q.d);
    const auto tail = model.tail_bound(q.d, 1);
    const Index cap = rank ? *rank : j_max;

    Index count = 0;
    for (Index j = 1; j <= cap; ++j) {
        // Every later eigenvalue sits below a decreasing envelope that is
        // already at the threshold.
        if (tail && j >= tail->valid_from && tail->envelope.value(j) <= T) {
            out.n = count;
            return out;
        }
        auto l = model.lambda(q.d, j);
        if (!l) return tag(l.error(), q);
        if (*l > T) ++count;
    }
    if (rank) {
        out.n = count;
        out.capped = count == *rank;
        return out;
    }
    auto last = model.lambda(q.d, cap);
    if (!last) return tag(last.error(), q);
    if (*last > T) {
        Error e = make_error(ErrorKind::Unbounded, "eigenvalues above eps^2 * CRI_d persist up to j_max");
        e.j = j_max;
        return tag(e, q);
    }
    out.n = count;
    return out;
}

Result<double> nth_minimal_error(const EigenModel& model, Index d, Index n) {
    if (n < 0) {
        Error e = make_error(ErrorKind::ConfigError, "n must be non-negative");
        e.d = d;
        return e;
    }
    const auto rank = model.rank(d);
    if (rank && n + 1 > *rank) return 0.0;
    auto l = model.lambda(d, n + 1);
    if (!l) return l.error();
    return std::sqrt(*l);
}

}  // namespace tract
