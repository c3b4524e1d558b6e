#include "prodwalk/distributions.hpp"
#include "prodwalk/error.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

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

} // namespace

TEST_CASE("make_finite accepts the two-point law") {
    const auto d = two_point();
    REQUIRE(d.support_size() == 2);
    CHECK(d.atoms()[0].value == 0.0);
    CHECK(d.atoms()[1].value == 2.0);
    CHECK_FALSE(d.degenerate());
}

TEST_CASE("make_finite flags the point mass at one") {
    const auto d = make_finite({{1.0, 1.0}});
    CHECK(d.degenerate());
}

TEST_CASE("make_finite accepts a law symmetric about one") {
    const auto d = make_finite({{1.5, 0.5}, {0.5, 0.5}});
    REQUIRE(d.support_size() == 2);
    CHECK(d.atoms()[0].value == 0.5);
    CHECK_FALSE(d.degenerate());
}

TEST_CASE("make_finite merges equal values and sorts") {
    const auto d = make_finite({{2.0, 0.25}, {0.0, 0.5}, {2.0, 0.25}});
    REQUIRE(d.support_size() == 2);
    CHECK(d.atoms()[1].probability == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("make_finite rejects bad tables") {
    CHECK(code_of([] { (void)make_finite({{-0.5, 0.5}, {2.5, 0.5}}); }) == ErrorCode::NegativeValue);
    CHECK(code_of([] { (void)make_finite({{0.0, 0.5}, {2.0, 0.4}}); }) == ErrorCode::ProbabilitySumMismatch);
    CHECK(code_of([] { (void)make_finite({{0.0, 0.5}, {2.1, 0.5}}); }) == ErrorCode::MeanNotOne);
    CHECK(code_of([] { (void)make_finite({{0.0, 0.0}, {1.0, 1.0}}); }) == ErrorCode::NonpositiveProbability);
    CHECK(code_of([] { (void)make_finite({}); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("one_plus_cosine carries its closed-form moments") {
    const auto d = make_one_plus_cosine();
    const auto p = moment_profile(d, 0.02, 2.0);
    CHECK(p.lambda == doctest::Approx(2.0 * std::numbers::sqrt2 / std::numbers::pi).epsilon(1e-15));
    CHECK(p.lambda == doctest::Approx(0.9003163).epsilon(1e-7));
    CHECK(p.mu == doctest::Approx(0.6366198).epsilon(1e-7));
    CHECK(p.tail_A == 0.0);
    CHECK(p.p_eps == doctest::Approx(std::acos(0.98) / std::numbers::pi).epsilon(1e-15));
    CHECK(p.p_eps >= std::sqrt(2.0 * 0.02) / std::numbers::pi);
    CHECK(p.lambda_src.kind == Provenance::analytic);
}

TEST_CASE("one_plus_cosine tail below the endpoint") {
    const auto d = make_one_plus_cosine();
    // E|cos U| 1{cos U >= 1/2} = sqrt(3)/2 / pi
    CHECK(truncated_tail(d, 1.5) == doctest::Approx(std::sqrt(3.0) / 2.0 / std::numbers::pi).epsilon(1e-14));
    CHECK(truncated_tail(d, 1.0) == doctest::Approx(1.0 / std::numbers::pi).epsilon(1e-14));
    // at A below one the indicator also catches part of the lower half
    CHECK(truncated_tail(d, 0.5) > truncated_tail(d, 1.0));
    // below one the excluded mass sits near the zero of 1 + cos
    for (double a : {1e-9, 0.1, 0.5}) {
        const double expected = (2.0 - std::sqrt(1.0 - (1.0 - a) * (1.0 - a))) / std::numbers::pi;
        CHECK(truncated_tail(d, a) == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("validate reports each check") {
    const auto ok = validate(two_point());
    CHECK(ok.ok());
    CHECK(ok.find("nonnegative")->passed);
    CHECK(ok.find("mean_one")->passed);
    CHECK(ok.find("nondegenerate")->passed);

    const auto deg = validate(make_finite({{1.0, 1.0}}));
    CHECK_FALSE(deg.ok());
    CHECK_FALSE(deg.find("nondegenerate")->passed);
    CHECK(deg.find("mean_one")->passed);

    CHECK(validate(make_one_plus_cosine()).ok());
}

TEST_CASE("validate catches a sampler with mean 1.1") {
    const auto d = make_sampler([](Rng& r) { return 1.1 * (1.0 + std::cos(2.0 * std::numbers::pi * r.uniform())); },
                                7, {}, "shifted", 1'000'000);
    const auto rep = validate(d);
    CHECK_FALSE(rep.ok());
    CHECK_FALSE(rep.find("mean_one")->passed);
    CHECK(rep.find("nonnegative")->passed);
}

TEST_CASE("validate accepts a mean-one sampler") {
    const auto d = make_sampler([](Rng& r) { return r.uniform() < 0.5 ? 0.0 : 2.0; }, 3);
    CHECK(validate(d).ok());
}

TEST_CASE("moment_profile on the two-point law") {
    const auto p = moment_profile(two_point(), 1e-3, 2.0);
    CHECK(p.lambda == doctest::Approx(std::sqrt(0.5)).epsilon(1e-15));
    CHECK(p.mu == 1.0);
    CHECK(p.p_eps == 0.5);
    CHECK(p.tail_A == 0.5);
    CHECK(p.lambda_src.kind == Provenance::exact_finite);
}

TEST_CASE("moment_profile errors") {
    CHECK(code_of([] { (void)moment_profile(make_finite({{1.0, 1.0}}), 0.1, 2.0); }) ==
          ErrorCode::DegenerateDistribution);
    CHECK(code_of([] { (void)moment_profile(two_point(), 0.0, 2.0); }) == ErrorCode::InvalidArgument);
    CHECK(code_of([] { (void)moment_profile(two_point(), 0.1, -1.0); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("moment_profile on a sampler records Monte Carlo provenance") {
    const auto d = make_sampler([](Rng& r) { return r.uniform() < 0.5 ? 0.0 : 2.0; }, 11, {}, "coin", 200'000);
    const auto p = moment_profile(d, 1e-3, 3.0);
    CHECK(p.lambda_src.kind == Provenance::monte_carlo);
    CHECK(p.lambda_src.samples == 200'000);
    CHECK(p.mu == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(p.lambda == doctest::Approx(std::sqrt(0.5)).epsilon(1e-2));
    CHECK(p.p_eps == doctest::Approx(0.5).epsilon(1e-2));
    CHECK(p.tail_A == 0.0);

    SamplerMoments known;
    known.lambda = std::sqrt(0.5);
    known.mu = 1.0;
    const auto d2 = make_sampler([](Rng& r) { return r.uniform() < 0.5 ? 0.0 : 2.0; }, 11, known);
    const auto p2 = moment_profile(d2, 1e-3, 3.0);
    CHECK(p2.lambda == std::sqrt(0.5));
    CHECK(p2.lambda_src.kind == Provenance::analytic);
}

TEST_CASE("choose_truncation picks the smallest valid candidate") {
    CHECK(choose_truncation(make_one_plus_cosine(), 2.0 / std::numbers::pi) == 2.0);
    CHECK(choose_truncation(two_point(), 1.0) == 3.0);
    const auto skew = make_finite({{0.0, 0.9}, {10.0, 0.1}});
    const auto p = moment_profile(skew, 0.1, 10.0);
    CHECK(p.mu == doctest::Approx(1.8).epsilon(1e-15));
    CHECK(p.tail_A == doctest::Approx(0.9).epsilon(1e-15));
    CHECK(choose_truncation(skew, p.mu) == 11.0);
    // an interior support point works once the top atom is light
    const auto light = make_finite({{0.0, 11.0 / 30.0}, {1.5, 8.0 / 15.0}, {2.0, 0.1}});
    CHECK(choose_truncation(light, 22.0 / 30.0) == 2.0);
    CHECK(truncated_tail(light, 2.0) == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(choose_truncation(make_finite({{0.5, 0.5}, {1.5, 0.5}}), 0.5) == 2.5);
    CHECK(code_of([] { (void)choose_truncation(two_point(), 0.0); }) == ErrorCode::NonpositiveMu);
}

TEST_CASE("choose_truncation on a sampler probes quantiles") {
    // uniform on [0, 2]: mu = 1/2 and tail(A) = (1 - (A-1)^2)/4 <= 1/8 from A = 1 + 1/sqrt(2)
    const auto u = make_sampler([](Rng& r) { return r.uniform(0.0, 2.0); }, 5, {}, "uniform", 100'000);
    const double A = choose_truncation(u, 0.5);
    CHECK(A > 1.0 + std::sqrt(0.5) - 0.01);
    CHECK(A < 2.0);
    CHECK(truncated_tail(u, A) <= 0.125);

    // a coin on {0, 2} keeps half its deviation at the maximum
    const auto coin = make_sampler([](Rng& r) { return r.uniform() < 0.5 ? 0.0 : 2.0; }, 5, {}, "coin", 10'000);
    CHECK(code_of([&] { (void)choose_truncation(coin, 1.0); }) == ErrorCode::NoFiniteTruncation);
}

TEST_CASE("sample_products with n = 0 gives the unit path") {
    const auto paths = sample_products(make_one_plus_cosine(), 0, 1, 10);
    REQUIRE(paths.size() == 10);
    for (const auto& p : paths) {
        REQUIRE(p.values.size() == 1);
        CHECK(p.values[0] == 1.0);
    }
}

TEST_CASE("sample_products on the two-point law follows the recurrence") {
    const auto paths = sample_products(two_point(), 3, 42, 200);
    bool saw_nonzero_end = false;
    for (const auto& p : paths) {
        REQUIRE(p.n() == 3);
        CHECK(p.values[0] == 1.0);
        for (std::size_t i = 1; i <= 3; ++i) {
            const double r = p.values[i];
            CHECK((r == 0.0 || r == 2.0 || r == 4.0 || r == 8.0));
            const double x = p.values[i] / (p.values[i - 1] == 0.0 ? 1.0 : p.values[i - 1]);
            if (p.values[i - 1] == 0.0) CHECK(r == 0.0);
            else CHECK((x == 0.0 || x == 2.0));
        }
        saw_nonzero_end = saw_nonzero_end || p.values[3] == 8.0;
    }
    CHECK(saw_nonzero_end);
}

TEST_CASE("sample_products is reproducible and keyed by path index") {
    const auto d = make_one_plus_cosine();
    const auto a = sample_products(d, 5, 9, 64);
    const auto b = sample_products(d, 5, 9, 64);
    const auto prefix = sample_products(d, 5, 9, 16);
    for (std::size_t j = 0; j < a.size(); ++j) {
        CHECK(a[j].values == b[j].values);
        CHECK(a[j].seed == subseed(9, j));
    }
    for (std::size_t j = 0; j < prefix.size(); ++j) CHECK(prefix[j].values == a[j].values);
    CHECK(sample_products(d, 5, 10, 1)[0].values != a[0].values);
}

TEST_CASE("one_plus_cosine empirical mean is within 5 standard errors of one") {
    const auto d = make_one_plus_cosine();
    Rng rng(2024);
    const std::size_t N = 1'000'000;
    double sum = 0.0;
    double sq = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        const double x = d.sample(rng);
        CHECK_GE(x, 0.0);
        sum += x;
        sq += x * x;
    }
    const double mean = sum / N;
    const double var = sq / N - mean * mean;
    CHECK(std::abs(mean - 1.0) <= 5.0 * std::sqrt(var / N));
}

TEST_CASE("random finite laws: reverse-order re-summation agrees") {
    Rng rng(17);
    for (int trial = 0; trial < 200; ++trial) {
        const auto d = random_finite(rng, 2, 6);
        const double eps = rng.uniform(0.0, 1.0) + 1e-6;
        const double A = rng.uniform(0.1, 3.0);
        const auto p = moment_profile(d, eps, A);
        double lam = 0.0, mu = 0.0, pe = 0.0, tail = 0.0;
        const auto atoms = d.atoms();
        for (auto it = atoms.rbegin(); it != atoms.rend(); ++it) {
            lam += it->probability * std::sqrt(it->value);
            mu += it->probability * std::abs(it->value - 1.0);
            if (it->value <= eps) pe += it->probability;
            if (it->value >= A) tail += it->probability * std::abs(it->value - 1.0);
        }
        CHECK(p.lambda == doctest::Approx(lam).epsilon(1e-12));
        CHECK(p.mu == doctest::Approx(mu).epsilon(1e-12));
        CHECK(std::abs(p.p_eps - pe) <= 1e-12);
        CHECK(std::abs(p.tail_A - tail) <= 1e-12);
        CHECK(p.lambda < 1.0);
        CHECK(p.mu > 0.0);
        CHECK(p.mu <= 2.0);
        CHECK(p.tail_A <= p.mu + 1e-15);
    }
}

TEST_CASE("p(eps) is nondecreasing and tail(A) nonincreasing on grids") {
    Rng rng(99);
    std::vector<Distribution> laws{make_one_plus_cosine(), two_point()};
    for (int i = 0; i < 50; ++i) laws.push_back(random_finite(rng, 2, 6));
    for (const auto& d : laws) {
        double prev_p = -1.0;
        double prev_tail = 1e300;
        for (int g = 1; g <= 400; ++g) {
            const double x = 0.01 * g;
            const double p = prob_at_most(d, x);
            const double t = truncated_tail(d, x);
            CHECK(p >= prev_p);
            CHECK(t <= prev_tail);
            CHECK(p >= 0.0);
            CHECK(p <= 1.0);
            prev_p = p;
            prev_tail = t;
        }
    }
}
