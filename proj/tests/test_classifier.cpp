#include "oracles.hpp"
#include "tract/classifier.hpp"

#include <doctest.h>

#include <cmath>

using namespace tract;

namespace {

EigenModel must(Result<EigenModel> r) {
    REQUIRE(r.has_value());
    return *r;
}

Limits quick() {
    Limits l;
    l.d_max = 16;
    return l;
}

std::vector<Index> d_range(Index n) {
    std::vector<Index> out;
    for (Index d = 1; d <= n; ++d) out.push_back(d);
    return out;
}

// Slope of ln max(1, n) against x over the eps grid, n from a forward walk.
double oracle_slope(const oracle::Seq& lam, const std::vector<double>& eps, bool exp_case) {
    long double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const long double k = static_cast<long double>(eps.size());
    for (double e : eps) {
        // ties are decided in double, as the library does
        const auto lam_d = [&](std::int64_t j) { return static_cast<long double>(static_cast<double>(lam(j))); };
        const long double n = oracle::first_below(lam_d, static_cast<long double>(e * e), 5000000);
        const long double inv = std::log(std::max(1.0L, 1.0L / e));
        const long double x = exp_case ? std::log(1.0L + inv) : inv;
        const long double y = std::log(std::max(1.0L, n));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return static_cast<double>((k * sxy - sx * sy) / (k * sxx - sx * sx));
}

TractabilityVerdict verdict(Notion n, VerdictStatus s) {
    TractabilityVerdict v;
    v.notion = n;
    v.status = s;
    return v;
}

}  // namespace

TEST_CASE("ALG-SPT holds for j^-2 with witness 0.75") {
    auto poly = must(EigenModel::poly_decay(1.0, 2.0));
    auto v = decide(poly, {NotionKind::SPT, Case::Alg, Criterion::Abs}, quick());
    CHECK(v.status == VerdictStatus::Holds);
    REQUIRE(v.witness.has_value());
    CHECK(v.witness->tau == 0.75);
}

TEST_CASE("EXP-UWT fails for j^-1 and holds for exp(-j)") {
    auto poly = must(EigenModel::poly_decay(1.0, 1.0));
    auto a = decide(poly, {NotionKind::UWT, Case::Exp, Criterion::Abs}, quick());
    CHECK(a.status == VerdictStatus::Fails);

    auto ex = must(EigenModel::exp_decay(1.0, 1.0, 1.0));
    auto b = decide(ex, {NotionKind::UWT, Case::Exp, Criterion::Abs}, quick());
    CHECK(b.status == VerdictStatus::Holds);
}

TEST_CASE("ALG-UWT is supported for every alpha") {
    for (double alpha : {0.5, 1.0, 2.0}) {
        auto poly = must(EigenModel::poly_decay(1.0, alpha));
        auto v = decide(poly, {NotionKind::UWT, Case::Alg, Criterion::Abs}, quick());
        INFO(alpha);
        CHECK(v.status == VerdictStatus::SupportedUpTo);
    }
}

TEST_CASE("exponent brackets") {
    auto poly = must(EigenModel::poly_decay(1.0, 2.0));
    auto a = exponent_bracket(poly, {NotionKind::SPT, Case::Alg, Criterion::Abs}, quick());
    REQUIRE(a.has_value());
    CHECK(a->lo <= a->hi);
    CHECK(a->lo >= 0.99);
    CHECK(a->hi <= 1.01);

    auto ex = must(EigenModel::exp_decay(1.0, 1.0, 1.0));
    auto b = exponent_bracket(ex, {NotionKind::SPT, Case::Exp, Criterion::Abs}, quick());
    REQUIRE(b.has_value());
    CHECK(b->lo >= 0.99);
    CHECK(b->hi <= 1.01);

    auto geo = must(EigenModel::geometric(1.0, 0.5));
    auto c = exponent_bracket(geo, {NotionKind::SPT, Case::Alg, Criterion::Abs}, quick());
    REQUIRE(c.has_value());
    CHECK(c->lo == 0.0);
    CHECK(c->hi <= 0.02);
}

TEST_CASE("bracket errors") {
    auto geo = must(EigenModel::geometric(1.0, 0.5));
    CHECK_FALSE(exponent_bracket(geo, {NotionKind::WT, Case::Alg, Criterion::Abs}, quick()).has_value());
}

TEST_CASE("growth fit against a brute-force count") {
    const auto eps = oracle::log_grid(1e-1, 1e-6, 25);
    const auto ds = d_range(8);

    auto poly = must(EigenModel::poly_decay(1.0, 2.0));
    auto a = growth_fit(poly, Case::Alg, Criterion::Abs, eps, ds);
    REQUIRE(a.has_value());
    CHECK(a->p == doctest::Approx(1.0).epsilon(0.05));
    CHECK(std::fabs(a->q) <= 0.05);
    CHECK(a->p == doctest::Approx(oracle_slope(oracle::poly(1, 2), eps, false)).epsilon(1e-9));

    // n ~ 2 ln(1/eps), so the slope on ln(1 + ln(1/eps)) is pulled above 1 by the +1
    auto ex = must(EigenModel::exp_decay(1.0, 1.0, 1.0));
    auto b = growth_fit(ex, Case::Exp, Criterion::Abs, eps, ds);
    REQUIRE(b.has_value());
    CHECK(std::fabs(b->q) <= 0.05);
    CHECK(b->p == doctest::Approx(oracle_slope(oracle::expd(1, 1, 1), eps, true)).epsilon(1e-9));
    CHECK(a->points == 25 * 8);
}

TEST_CASE("growth fit rejects degenerate grids") {
    auto poly = must(EigenModel::poly_decay(1.0, 2.0));
    auto a = growth_fit(poly, Case::Alg, Criterion::Abs, oracle::log_grid(1e-1, 1e-3, 5), d_range(8));
    REQUIRE_FALSE(a.has_value());
    CHECK(a.error().kind == ErrorKind::DegenerateGrid);
    auto b = growth_fit(poly, Case::Alg, Criterion::Abs, oracle::log_grid(1e-1, 1e-3, 10), std::vector<Index>(8, 2));
    REQUIRE_FALSE(b.has_value());
    CHECK(b.error().kind == ErrorKind::DegenerateGrid);
}

TEST_CASE("implication chain") {
    const Notion spt{NotionKind::SPT, Case::Alg, Criterion::Abs};
    const Notion pt{NotionKind::PT, Case::Alg, Criterion::Abs};
    const Notion qpt{NotionKind::QPT, Case::Alg, Criterion::Abs};
    const Notion wt11{NotionKind::WT, Case::Alg, Criterion::Abs, 1.0, 1.0};
    const Notion wt22{NotionKind::WT, Case::Alg, Criterion::Abs, 2.0, 2.0};

    CHECK_FALSE(check_implications({verdict(spt, VerdictStatus::Holds), verdict(pt, VerdictStatus::Fails)}).consistent());
    CHECK_FALSE(check_implications({verdict(wt11, VerdictStatus::Holds), verdict(wt22, VerdictStatus::Fails)}).consistent());
    CHECK(check_implications({verdict(qpt, VerdictStatus::SupportedUpTo), verdict(wt11, VerdictStatus::SupportedUpTo)}).consistent());
    CHECK(check_implications({verdict(spt, VerdictStatus::Holds), verdict(pt, VerdictStatus::SupportedUpTo)}).consistent());
    CHECK(check_implications({verdict(wt22, VerdictStatus::Holds), verdict(wt11, VerdictStatus::Fails)}).consistent());

    CHECK(implies(spt, qpt));
    CHECK_FALSE(implies(qpt, spt));
    CHECK(implies(wt11, wt22));
    CHECK_FALSE(implies(wt22, wt11));
    CHECK_FALSE(implies(spt, Notion{NotionKind::PT, Case::Exp, Criterion::Abs}));
}

TEST_CASE("standard notions") {
    auto ns = standard_notions(Criterion::Nor);
    CHECK(ns.size() == 26);
    for (const auto& n : ns) CHECK(n.criterion == Criterion::Nor);
    CHECK(ns.front().name() == "ALG-SPT-NOR");
}

TEST_CASE("ABS and NOR verdicts coincide when lambda_1 = 1") {
    auto poly = must(EigenModel::poly_decay(1.0, 2.0));
    Limits l = quick();
    l.d_max = 8;
    auto abs = classify(poly, Criterion::Abs, l);
    auto nor = classify(poly, Criterion::Nor, l);
    REQUIRE(abs.verdicts.size() == nor.verdicts.size());
    for (std::size_t i = 0; i < abs.verdicts.size(); ++i) {
        INFO(abs.verdicts[i].notion.name());
        CHECK(abs.verdicts[i].status == nor.verdicts[i].status);
    }
    CHECK(abs.consistency.consistent());
    CHECK(nor.consistency.consistent());
}

TEST_CASE("certificates do not flip when limits grow") {
    std::vector<EigenModel> models = {must(EigenModel::poly_decay(1.0, 2.0)), must(EigenModel::geometric(1.0, 0.5)),
                                      must(EigenModel::poly_decay(1.0, 0.8))};
    const std::vector<Notion> notions = {{NotionKind::SPT, Case::Alg, Criterion::Abs},
                                         {NotionKind::QPT, Case::Exp, Criterion::Abs},
                                         {NotionKind::WT, Case::Alg, Criterion::Nor, 1.0, 1.0},
                                         {NotionKind::UWT, Case::Exp, Criterion::Abs}};
    Limits small = quick();
    small.d_max = 4;
    small.n_max = 10000;
    Limits big = quick();
    big.d_max = 24;
    for (const auto& m : models) {
        for (const auto& n : notions) {
            auto a = decide(m, n, small).status;
            auto b = decide(m, n, big).status;
            INFO(n.name());
            const bool certain_a = a == VerdictStatus::Holds || a == VerdictStatus::Fails;
            const bool certain_b = b == VerdictStatus::Holds || b == VerdictStatus::Fails;
            if (certain_a && certain_b) CHECK(a == b);
        }
    }
}
