#include "prodwalk/adversary.hpp"
#include "prodwalk/certificates.hpp"
#include "prodwalk/error.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <cmath>

using namespace prodwalk;
using prodwalk::testing::random_finite;
using prodwalk::testing::two_point;

namespace {

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("no exception thrown");
    return ErrorCode::InvalidArgument;
}

// min over |a0| + |a1| = 1 of (|a0| + |a0 + 2 a1|)/2 on a fine grid.
double dense_grid_n1() {
    double best = 1e300;
    const int steps = 2'000'000;
    for (int k = 0; k <= steps; ++k) {
        const double a0 = -1.0 + 2.0 * k / steps;
        for (double s : {1.0, -1.0}) {
            const double a1 = s * (1.0 - std::abs(a0));
            best = std::min(best, 0.5 * std::abs(a0) + 0.5 * std::abs(a0 + 2.0 * a1));
        }
    }
    return best;
}

bool same(const SearchResult& a, const SearchResult& b) {
    if (a.best_ratio != b.best_ratio || a.evaluations_used != b.evaluations_used || a.best_restart != b.best_restart ||
        a.verified_ratio != b.verified_ratio || a.trace.size() != b.trace.size()) {
        return false;
    }
    for (std::size_t r = 0; r < a.trace.size(); ++r) {
        if (a.trace[r].values != b.trace[r].values) return false;
    }
    const auto da = a.best_coeffs.data();
    const auto db = b.best_coeffs.data();
    return std::equal(da.begin(), da.end(), db.begin(), db.end());
}

SearchConfig config(std::size_t n, std::size_t budget, std::size_t restarts, std::uint64_t seed) {
    SearchConfig c;
    c.n = n;
    c.budget = budget;
    c.restarts = restarts;
    c.seed = seed;
    return c;
}

} // namespace

TEST_CASE("n = 1 on the two-point law reaches 1/3 at (2/3, -1/3)") {
    const double oracle = dense_grid_n1();
    CHECK(oracle == doctest::Approx(1.0 / 3.0).epsilon(1e-6));
    const auto res = minimize_ratio(two_point(), config(1, 4000, 4, 1));
    CHECK(res.best_ratio == doctest::Approx(oracle).epsilon(1e-5));
    const auto a = res.best_coeffs.data();
    const double sign = a[0] > 0.0 ? 1.0 : -1.0;
    CHECK(sign * a[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-4));
    CHECK(sign * a[1] == doctest::Approx(-1.0 / 3.0).epsilon(1e-4));
}

TEST_CASE("n = 0 always has ratio one") {
    const auto res = minimize_ratio(two_point(), config(0, 100, 2, 0));
    CHECK(res.best_ratio == doctest::Approx(1.0).epsilon(1e-15));
    auto mc = config(0, 100, 2, 0);
    mc.oracle = {Method::monte_carlo, 500, 0};
    CHECK(minimize_ratio(make_one_plus_cosine(), mc).best_ratio == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("n = 6 on the two-point law stays above the certificate") {
    const auto res = minimize_ratio(two_point(), config(6, 6000, 4, 3));
    const double floor = best_constant(certify_all(two_point()));
    CHECK(floor == 1.0 / 128.0);
    CHECK(res.best_ratio >= floor - 1e-9);
    CHECK(res.best_ratio <= 1.0);
}

TEST_CASE("certificate floor on random finite laws") {
    Rng rng(19);
    for (int trial = 0; trial < 12; ++trial) {
        const auto d = random_finite(rng, 2, 3);
        const double floor = best_constant(certify_all(d));
        auto c = config(static_cast<std::size_t>(rng.uniform_int(1, 5)), 1500, 3, rng());
        c.d = static_cast<std::size_t>(rng.uniform_int(1, 2));
        c.norm = prodwalk::testing::random_norm(rng);
        const auto res = minimize_ratio(d, c);
        CHECK(res.best_ratio >= floor - 1e-9);
        CHECK(res.best_ratio > 0.0);
        CHECK(res.best_ratio <= 1.0 + 1e-12);
    }
}

TEST_CASE("re-verification matches the search objective") {
    const auto res = minimize_ratio(two_point(), config(4, 3000, 3, 8));
    const double internal = res.trace[res.best_restart].values.back();
    CHECK(std::abs(res.verified_ratio - internal) <= 1e-12);
    CHECK(res.best_ratio == res.verified_ratio);
    CHECK(ratio(two_point(), res.best_coeffs, {}) == res.verified_ratio);
    CHECK(res.best_coeffs.l1_mass() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("Monte Carlo re-verification stays within three standard errors") {
    auto c = config(4, 1500, 3, 21);
    c.oracle = {Method::monte_carlo, 20'000, 0};
    const auto res = minimize_ratio(two_point(), c);
    CHECK(res.method == Method::monte_carlo);
    CHECK(res.verified_std_error > 0.0);
    CHECK(std::abs(res.verified_ratio - res.best_ratio) <= 3.0 * res.verified_std_error);
}

TEST_CASE("search is deterministic and independent of the worker count") {
    const auto c = config(3, 2000, 4, 99);
    const auto a = minimize_ratio(two_point(), c, {1});
    CHECK(same(a, minimize_ratio(two_point(), c, {1})));
    CHECK(same(a, minimize_ratio(two_point(), c, {4})));
    auto mc = c;
    mc.oracle = {Method::monte_carlo, 2000, 0};
    const auto m = minimize_ratio(make_one_plus_cosine(), mc, {1});
    CHECK(same(m, minimize_ratio(make_one_plus_cosine(), mc, {3})));
}

TEST_CASE("traces are monotone and the budget is respected") {
    const auto c = config(5, 1000, 4, 5);
    const auto res = minimize_ratio(two_point(), c);
    REQUIRE(res.trace.size() == 4);
    std::size_t used = 0;
    for (const auto& t : res.trace) {
        CHECK(t.start == "random");
        for (std::size_t s = 1; s < t.values.size(); ++s) CHECK(t.values[s] <= t.values[s - 1]);
        CHECK(t.evaluations <= 250);
        used += t.evaluations;
    }
    CHECK(used == res.evaluations_used);
    CHECK(res.evaluations_used <= c.budget);
    CHECK(res.budget_exhausted);
    CHECK(res.initial_step == kInitialStep);
    CHECK(res.min_step == kMinStep);
}

TEST_CASE("ties keep the earliest restart") {
    // every start has ratio one at n = 0
    const auto res = minimize_ratio(two_point(), config(0, 40, 4, 0));
    CHECK(res.best_restart == 0);
}

TEST_CASE("minimize_ratio errors") {
    CHECK(code_of([] { (void)minimize_ratio(make_one_plus_cosine(), config(2, 100, 2, 0)); }) ==
          ErrorCode::OracleUnavailable);
    CHECK(code_of([] { (void)minimize_ratio(two_point(), config(30, 100, 2, 0)); }) == ErrorCode::OracleUnavailable);
    CHECK(code_of([] { (void)minimize_ratio(two_point(), config(2, 100, 0, 0)); }) == ErrorCode::InvalidArgument);
    CHECK(code_of([] { (void)minimize_ratio(two_point(), config(2, 3, 4, 0)); }) == ErrorCode::InvalidArgument);
    auto c = config(2, 100, 2, 0);
    c.oracle = {Method::monte_carlo, 10, 0};
    CHECK(code_of([&] { (void)minimize_ratio(two_point(), c); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("project_partial_sums enforces both constraints") {
    Rng rng(4);
    for (int trial = 0; trial < 500; ++trial) {
        std::vector<double> a(static_cast<std::size_t>(rng.uniform_int(1, 12)));
        for (auto& x : a) x = rng.uniform(-3.0, 3.0);
        const double C = rng.uniform(1.0, 3.0);
        project_partial_sums(a, C);
        double s = 0.0;
        for (double x : a) {
            CHECK(std::abs(x) <= 1.0);
            s += x;
            CHECK(std::abs(s) <= C + 1e-12);
        }
        auto again = a;
        project_partial_sums(again, C);
        CHECK(again == a);
    }
}

TEST_CASE("mw_probe on the two-point law with the exact oracle") {
    ProbeOptions opt;
    opt.oracle = {Method::exact, 0, 0};
    const auto res = mw_probe(two_point(), 4, 1.0, 2000, 2, opt);
    CHECK(res.best_ratio > 0.0);
    CHECK(res.best_ratio <= 1.0);
    CHECK(res.verified_ratio == doctest::Approx(exact_l1(two_point(), res.best_coeffs).mean / 5.0).epsilon(1e-15));
    double s = 0.0;
    for (double x : res.best_coeffs.data()) {
        CHECK(std::abs(x) <= 1.0);
        s += x;
        CHECK(std::abs(s) <= 1.0 + 1e-12);
    }
    REQUIRE(res.trace.size() == 4);
    CHECK(res.trace[0].start == "constant");
    CHECK(res.trace[1].start == "alternating");
    CHECK(res.trace[2].start == "random");
    for (const auto& t : res.trace) {
        for (std::size_t k = 1; k < t.values.size(); ++k) CHECK(t.values[k] >= t.values[k - 1]);
        for (double v : t.values) CHECK(v <= 1.0 + 1e-12);
    }
}

TEST_CASE("mw_probe on one_plus_cosine with n = 16, C = 2") {
    const auto res = mw_probe(make_one_plus_cosine(), 16, 2.0, 4000, 0);
    CHECK(res.best_ratio > 0.0);
    CHECK(res.best_ratio <= 1.0);
    CHECK(std::isfinite(res.verified_ratio));
    // the ordering holds at the starts; after descent it depends on the seed
    CHECK(res.trace[1].values.front() >= res.trace[0].values.front());
    for (std::uint64_t seed = 1; seed < 6; ++seed) {
        const auto other = mw_probe(make_one_plus_cosine(), 16, 2.0, 400, seed);
        CHECK(other.trace[1].values.front() >= other.trace[0].values.front());
    }
    CHECK(same(res, mw_probe(make_one_plus_cosine(), 16, 2.0, 4000, 0, {}, {1})));
}

TEST_CASE("mw_probe errors") {
    CHECK(code_of([] { (void)mw_probe(two_point(), 4, -1.0, 100, 0); }) == ErrorCode::InfeasibleConstraints);
    CHECK(code_of([] { (void)mw_probe(two_point(), 4, 0.5, 100, 0); }) == ErrorCode::InvalidArgument);
    CHECK(code_of([] { (void)mw_probe(two_point(), 0, 2.0, 100, 0); }) == ErrorCode::InvalidArgument);
}
