#include "prodwalk/lemmas.hpp"

#include "prodwalk/error.hpp"
#include "prodwalk/evaluator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace prodwalk {
namespace {

constexpr double kEnumerationCap = 2e4;

double mean_abs_dev(const Distribution& dist) {
    double mu = 0.0;
    for (const auto& a : dist.atoms()) mu += a.probability * std::abs(a.value - 1.0);
    return mu;
}

double mean_sqrt(const Distribution& dist) {
    double lambda = 0.0;
    for (const auto& a : dist.atoms()) lambda += a.probability * std::sqrt(a.value);
    return lambda;
}

void require_finite(const Distribution& dist) {
    PRODWALK_REQUIRE(dist.is_finite(), ErrorCode::NotFiniteSupport, "lemma checks need a finite-support law");
}

// sum_{i in [lo, hi)} v_i r_i into out.
void partial_sum(const CoefficientVector& cv, std::span<const double> r, std::size_t lo, std::size_t hi,
                 std::span<double> out) {
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t i = lo; i < hi; ++i) {
        if (r[i] == 0.0) continue;
        const auto v = cv[i];
        for (std::size_t c = 0; c < out.size(); ++c) out[c] += v[c] * r[i];
    }
}

std::vector<double> random_point(Rng& rng, std::size_t d, double scale) {
    std::vector<double> p(d);
    for (auto& x : p) x = scale * rng.uniform(-1.0, 1.0);
    return p;
}

CoefficientVector random_coeffs(Rng& rng, Norm norm, std::size_t d, std::size_t n, double log_lo, double log_hi) {
    std::vector<double> data;
    data.reserve((n + 1) * d);
    for (std::size_t i = 0; i <= n; ++i) {
        const double scale = std::exp(rng.uniform(log_lo, log_hi));
        // Occasionally zero a coefficient: sparse vectors exercise edge cases.
        const bool zero = rng.uniform() < 0.1;
        for (std::size_t c = 0; c < d; ++c) data.push_back(zero ? 0.0 : scale * rng.uniform(-1.0, 1.0));
    }
    return CoefficientVector(norm, d, std::move(data));
}

void tally(LemmaTally& t, const LemmaCheck& check) {
    ++t.instances;
    if (!check.hypothesis) return;
    ++t.hypothesis_met;
    const double margin = (check.lhs - check.rhs) / std::max(1.0, std::abs(check.rhs));
    if (t.hypothesis_met == 1 || margin < t.worst_margin) t.worst_margin = margin;
    if (check.violated()) ++t.violations;
}

} // namespace

bool LemmaCheck::violated() const noexcept {
    if (!hypothesis) return false;
    const double scale = std::max({1.0, std::abs(lhs), std::abs(rhs)});
    return lhs < rhs - kLemmaTol * scale;
}

LemmaCheck check_single_factor(const Distribution& dist, Norm norm, std::span<const double> u,
                               std::span<const double> v) {
    require_finite(dist);
    std::vector<double> w(u.size());
    CompensatedSum lhs;
    for (const auto& a : dist.atoms()) {
        for (std::size_t c = 0; c < u.size(); ++c) w[c] = u[c] * a.value + v[c];
        lhs.add(a.probability * norm_of(norm, w));
    }
    LemmaCheck check;
    check.lhs = lhs.value();
    check.rhs = 0.5 * mean_abs_dev(dist) * std::max(norm_of(norm, u), norm_of(norm, v));
    return check;
}

LemmaCheck check_small_perturbation(const Distribution& dist, const CoefficientVector& w,
                                    std::span<const double> v) {
    require_finite(dist);
    const std::size_t d = w.dim();
    const double v_norm = norm_of(w.norm(), v);
    std::vector<double> y(d);
    std::vector<double> yv(d);
    CompensatedSum p_large;
    CompensatedSum e_y;
    CompensatedSum e_yv;
    enumerate_paths(dist, w.n(), [&](double prob, std::span<const double> r) {
        partial_sum(w, r, 1, w.size(), y);
        for (std::size_t c = 0; c < d; ++c) yv[c] = y[c] + v[c];
        const double y_norm = norm_of(w.norm(), y);
        if (y_norm > v_norm / 4.0) p_large.add(prob);
        e_y.add(prob * y_norm);
        e_yv.add(prob * norm_of(w.norm(), yv));
    });
    LemmaCheck check;
    check.hypothesis = p_large.value() <= 0.25;
    check.lhs = e_yv.value();
    check.rhs = e_y.value() + v_norm / 8.0;
    return check;
}

LemmaCheck check_sqrt_moment(const Distribution& dist, const CoefficientVector& cv) {
    require_finite(dist);
    const double lambda = mean_sqrt(dist);
    std::vector<double> s(cv.dim());
    CompensatedSum moment;
    enumerate_paths(dist, cv.n(), [&](double prob, std::span<const double> r) {
        partial_sum(cv, r, 0, cv.size(), s);
        moment.add(prob * std::sqrt(norm_of(cv.norm(), s)));
    });
    double bound = 0.0;
    double lambda_pow = 1.0;
    for (std::size_t k = 0; k < cv.size(); ++k) {
        bound += lambda_pow * std::sqrt(cv.norm_of(k));
        lambda_pow *= lambda;
    }
    LemmaCheck check;
    check.lhs = bound;
    check.rhs = moment.value();
    return check;
}

LemmaCheck check_sqrt_tail(const Distribution& dist, const CoefficientVector& cv, double t) {
    require_finite(dist);
    const double lambda = mean_sqrt(dist);
    double weighted = 0.0;
    double lambda_pow = 1.0;
    for (std::size_t k = 0; k < cv.size(); ++k) {
        weighted += lambda_pow * cv.norm_of(k);
        lambda_pow *= lambda;
    }
    const double threshold = t / (1.0 - lambda) * weighted;

    LemmaCheck check;
    check.hypothesis = t >= 1.0 && threshold > 0.0;
    check.lhs = 1.0 / std::sqrt(t);
    if (!check.hypothesis) return check;

    std::vector<double> s(cv.dim());
    CompensatedSum prob_large;
    enumerate_paths(dist, cv.n(), [&](double prob, std::span<const double> r) {
        partial_sum(cv, r, 0, cv.size(), s);
        if (norm_of(cv.norm(), s) >= threshold) prob_large.add(prob);
    });
    check.rhs = prob_large.value();
    return check;
}

LemmaCheck check_truncated_factor(const Distribution& dist, Norm norm, std::span<const double> u,
                                  std::span<const double> v, double A) {
    require_finite(dist);
    const double mu = mean_abs_dev(dist);
    double tail = 0.0;
    for (const auto& a : dist.atoms()) {
        if (a.value > A) tail += a.probability * std::abs(a.value - 1.0);
    }
    std::vector<double> w(u.size());
    CompensatedSum lhs;
    for (const auto& a : dist.atoms()) {
        if (a.value > A) continue;
        for (std::size_t c = 0; c < u.size(); ++c) w[c] = u[c] * a.value + v[c];
        lhs.add(a.probability * norm_of(norm, w));
    }
    LemmaCheck check;
    check.hypothesis = tail <= mu / 4.0;
    check.lhs = lhs.value();
    check.rhs = mu * norm_of(norm, v) / 8.0;
    return check;
}

LemmaCheck check_split_sum(const Distribution& dist, const CoefficientVector& cv, std::size_t split) {
    require_finite(dist);
    PRODWALK_REQUIRE(split <= cv.size(), ErrorCode::InvalidArgument, "split index out of range");
    const std::size_t d = cv.dim();

    struct Outcome {
        double prob, y, z, yz;
    };
    std::vector<Outcome> outcomes;
    std::vector<double> y(d);
    std::vector<double> z(d);
    std::vector<double> yz(d);
    enumerate_paths(dist, cv.n(), [&](double prob, std::span<const double> r) {
        partial_sum(cv, r, 0, split, z);
        partial_sum(cv, r, split, cv.size(), y);
        for (std::size_t c = 0; c < d; ++c) yz[c] = y[c] + z[c];
        outcomes.push_back({prob, norm_of(cv.norm(), y), norm_of(cv.norm(), z), norm_of(cv.norm(), yz)});
    });

    CompensatedSum e_z;
    for (const auto& o : outcomes) e_z.add(o.prob * o.z);
    const double ez = e_z.value();
    CompensatedSum e_z_large;
    CompensatedSum e_y;
    CompensatedSum e_yz;
    for (const auto& o : outcomes) {
        if (o.y > ez / 8.0) e_z_large.add(o.prob * o.z);
        e_y.add(o.prob * o.y);
        e_yz.add(o.prob * o.yz);
    }
    LemmaCheck check;
    check.hypothesis = e_z_large.value() <= ez / 8.0;
    check.lhs = e_yz.value();
    check.rhs = e_y.value() + 0.5 * ez;
    return check;
}

LemmaCheck check_max_coefficient(const Distribution& dist, const CoefficientVector& cv) {
    require_finite(dist);
    const double mu = mean_abs_dev(dist);
    const double lhs = exact_l1(dist, cv).mean;
    double max_norm = 0.0;
    double tail_mass = 0.0;
    for (std::size_t i = 0; i < cv.size(); ++i) {
        max_norm = std::max(max_norm, cv.norm_of(i));
        if (i >= 1) tail_mass += cv.norm_of(i);
    }
    const double rhs_max = 0.25 * mu * mu * max_norm;
    const double rhs_avg = cv.n() >= 1 ? mu * mu * tail_mass / (4.0 * static_cast<double>(cv.n())) : 0.0;
    LemmaCheck check;
    check.lhs = lhs;
    // rhs_avg <= rhs_max always, but both are evaluated and the binding one reported.
    check.rhs = std::max(rhs_max, rhs_avg);
    return check;
}

std::size_t SuiteReport::total_violations() const noexcept {
    std::size_t total = 0;
    for (const auto& l : lemmas) total += l.violations;
    return total;
}

SuiteReport lemma_suite(const Distribution& dist, std::size_t trials, std::uint64_t seed) {
    require_finite(dist);
    PRODWALK_REQUIRE(trials >= 1, ErrorCode::InvalidArgument, "trials must be >= 1");

    SuiteReport report;
    report.trials = trials;
    report.seed = seed;
    for (const char* name : {"single_factor", "small_perturbation", "sqrt_moment", "sqrt_tail", "truncated_factor",
                             "split_sum", "max_coefficient"}) {
        report.lemmas.push_back({name, 0, 0, 0, 0.0});
    }

    const double s = static_cast<double>(dist.support_size());
    std::size_t n_max = 1;
    while (n_max < 6 && std::pow(s, static_cast<double>(n_max + 1)) <= kEnumerationCap) ++n_max;
    constexpr std::array norms{Norm::l1, Norm::l2, Norm::linf};
    const auto atoms = dist.atoms();

    for (std::size_t trial = 0; trial < trials; ++trial) {
        Rng rng(subseed(seed, trial));
        const auto d = static_cast<std::size_t>(rng.uniform_int(1, 3));
        const Norm norm = norms[static_cast<std::size_t>(rng.uniform_int(0, 2))];
        const auto n = static_cast<std::size_t>(rng.uniform_int(1, static_cast<std::int64_t>(n_max)));

        const auto u = random_point(rng, d, std::exp(rng.uniform(-2.0, 2.0)));
        const auto v = random_point(rng, d, std::exp(rng.uniform(-2.0, 2.0)));
        tally(report.lemmas[0], check_single_factor(dist, norm, u, v));

        // Large v against a small tail sum so the hypothesis is met often.
        const auto w = random_coeffs(rng, norm, d, n, -3.0, 0.0);
        const auto big_v = random_point(rng, d, std::exp(rng.uniform(-1.0, 4.0)));
        tally(report.lemmas[1], check_small_perturbation(dist, w, big_v));

        const auto cv = random_coeffs(rng, norm, d, n, -2.0, 2.0);
        tally(report.lemmas[2], check_sqrt_moment(dist, cv));

        const double t = rng.uniform() < 0.2 ? 1.0 : 1.0 + std::exp(rng.uniform(-3.0, 3.0));
        tally(report.lemmas[3], check_sqrt_tail(dist, cv, t));

        double A = 0.0;
        const double pick = rng.uniform();
        if (pick < 0.5) {
            A = atoms[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(atoms.size()) - 1))].value;
        } else if (pick < 0.8) {
            A = rng.uniform(0.0, atoms.back().value + 1.0);
        } else {
            A = atoms.back().value + 1.0;
        }
        tally(report.lemmas[4], check_truncated_factor(dist, norm, u, v, A));

        // Shrink the tail block so the split hypothesis holds in a fair share.
        const auto split = static_cast<std::size_t>(rng.uniform_int(1, static_cast<std::int64_t>(n)));
        auto split_cv = cv;
        const double shrink = std::exp(rng.uniform(-6.0, 0.0));
        auto data = split_cv.mutable_data();
        for (std::size_t i = split * d; i < data.size(); ++i) data[i] *= shrink;
        tally(report.lemmas[5], check_split_sum(dist, split_cv, split));

        tally(report.lemmas[6], check_max_coefficient(dist, cv));
    }
    return report;
}

} // namespace prodwalk
