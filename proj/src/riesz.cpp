#include "prodwalk/riesz.hpp"

#include "prodwalk/coefficients.hpp"
#include "prodwalk/distributions.hpp"
#include "prodwalk/error.hpp"
#include "prodwalk/evaluator.hpp"
#include "prodwalk/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace prodwalk {
namespace {

constexpr std::uint64_t kGridBlock = 1 << 15;

// |sum_i a_i Rbar_i| at t = 2 pi k / N. Frequencies are reduced modulo N in
// integer arithmetic before the cosine so large n_j keep full accuracy.
double abs_integrand_at(std::span<const double> a, std::span<const std::int64_t> terms, std::uint64_t k,
                        std::uint64_t grid) {
    double product = 1.0;
    double total = a[0];
    for (std::size_t i = 1; i < a.size(); ++i) {
        const auto freq = static_cast<std::uint64_t>(terms[i - 1]) % grid;
        const std::uint64_t phase = (freq * k) % grid; // both < 2^28
        product *= 1.0 + std::cos(2.0 * std::numbers::pi * static_cast<double>(phase) / static_cast<double>(grid));
        total += a[i] * product;
    }
    return std::abs(total);
}

// sum over k = first, first + stride, ... < grid of |f(2 pi k / grid)|.
double strided_sum(std::span<const double> a, std::span<const std::int64_t> terms, std::uint64_t grid,
                   std::uint64_t first, std::uint64_t stride, ExecPolicy policy) {
    const std::uint64_t count = (grid - first + stride - 1) / stride;
    const std::uint64_t blocks = (count + kGridBlock - 1) / kGridBlock;
    std::vector<double> partial(blocks, 0.0);
    parallel_for(blocks, policy, [&](std::size_t b) {
        const std::uint64_t lo = b * kGridBlock;
        const std::uint64_t hi = std::min(count, lo + kGridBlock);
        CompensatedSum s;
        for (std::uint64_t idx = lo; idx < hi; ++idx) s.add(abs_integrand_at(a, terms, first + idx * stride, grid));
        partial[b] = s.value();
    });
    CompensatedSum total;
    for (double p : partial) total.add(p);
    return total.value();
}

} // namespace

LacunarySequence validate_lacunary(std::span<const std::int64_t> seq) {
    PRODWALK_REQUIRE(!seq.empty(), ErrorCode::InvalidArgument, "frequency sequence is empty");
    LacunarySequence out;
    out.terms.assign(seq.begin(), seq.end());
    for (std::size_t k = 0; k < seq.size(); ++k) {
        PRODWALK_REQUIRE(seq[k] > 0, ErrorCode::NonpositiveEntry,
                         "entry " + std::to_string(k) + " is " + std::to_string(seq[k]) + " (must be positive)");
    }
    for (std::size_t k = 0; k + 1 < seq.size(); ++k) {
        PRODWALK_REQUIRE(seq[k + 1] > seq[k], ErrorCode::NotIncreasing,
                         "entry " + std::to_string(k + 1) + " does not exceed its predecessor");
        PRODWALK_REQUIRE(seq[k] <= std::numeric_limits<std::int64_t>::max() / 3 && seq[k + 1] >= 3 * seq[k], ErrorCode::RatioTooSmall,
                         "ratio " + std::to_string(seq[k + 1]) + "/" + std::to_string(seq[k]) + " is below 3");
        const double r = static_cast<double>(seq[k + 1]) / static_cast<double>(seq[k]);
        out.ratios.push_back(r);
        out.summability_prefix += 1.0 / r;
    }
    return out;
}

double riesz_combination(std::span<const double> a, const LacunarySequence& seq, double t) {
    PRODWALK_REQUIRE(!a.empty() && a.size() <= seq.terms.size() + 1, ErrorCode::CoefficientLengthMismatch,
                     "need 1 <= len(a) <= len(seq) + 1");
    double product = 1.0;
    double total = a[0];
    for (std::size_t i = 1; i < a.size(); ++i) {
        product *= 1.0 + std::cos(static_cast<double>(seq.terms[i - 1]) * t);
        total += a[i] * product;
    }
    return total;
}

QuadratureResult riesz_l1(std::span<const double> a, const LacunarySequence& seq, double tol, ExecPolicy policy) {
    PRODWALK_REQUIRE(!a.empty() && a.size() <= seq.terms.size() + 1, ErrorCode::CoefficientLengthMismatch,
                     "need 1 <= len(a) <= len(seq) + 1");
    PRODWALK_REQUIRE(tol > 0.0, ErrorCode::InvalidArgument, "tol must be positive");

    std::uint64_t top = 1;
    for (std::size_t j = 0; j + 1 < a.size(); ++j) {
        top += static_cast<std::uint64_t>(seq.terms[j]);
        PRODWALK_REQUIRE(top <= kMaxGrid, ErrorCode::GridOverflow, "frequency sum exceeds the grid limit");
    }
    std::uint64_t grid = kPointsPerHarmonic * top;
    PRODWALK_REQUIRE(grid <= kMaxGrid, ErrorCode::GridOverflow, "initial grid exceeds 2^28 points");

    double mass = 0.0;
    for (double x : a) mass += std::abs(x);
    const std::span<const std::int64_t> terms(seq.terms);

    double sum = strided_sum(a, terms, grid, 0, 1, policy);
    double value = sum / static_cast<double>(grid);
    for (;;) {
        const std::uint64_t fine = 2 * grid;
        PRODWALK_REQUIRE(fine <= kMaxGrid, ErrorCode::GridOverflow,
                         "no convergence before the grid reached 2^28 points");
        // Old nodes are the even nodes of the doubled grid.
        const double odd = strided_sum(a, terms, fine, 1, 2, policy);
        const double fine_sum = sum + odd;
        const double fine_value = fine_sum / static_cast<double>(fine);
        const double delta = std::abs(value - fine_value);
        const double denom = std::max(fine_value, 1e-3 * mass);
        if (denom == 0.0 || delta / denom < tol) {
            return {fine_value, fine, delta, mass, mass > 0.0 ? fine_value / mass : 0.0};
        }
        grid = fine;
        sum = fine_sum;
        value = fine_value;
    }
}

SweepReport riesz_ratio_sweep(const LacunarySequence& seq, std::size_t n, std::size_t trials, std::uint64_t seed,
                              double tol, ExecPolicy policy) {
    PRODWALK_REQUIRE(n <= seq.terms.size(), ErrorCode::CoefficientLengthMismatch, "n exceeds the sequence length");
    PRODWALK_REQUIRE(trials >= 1, ErrorCode::InvalidArgument, "trials must be >= 1");

    SweepReport report;
    report.seed = seed;
    report.tol = tol;
    report.histogram.assign(kHistogramBins, 0);
    report.trials.resize(trials);
    for (std::size_t k = 0; k < trials; ++k) {
        Rng rng(subseed(seed, k));
        std::vector<double> coeffs(n + 1);
        double mass = 0.0;
        do {
            mass = 0.0;
            for (auto& c : coeffs) {
                c = rng.uniform(-1.0, 1.0);
                mass += std::abs(c);
            }
        } while (mass == 0.0);
        for (auto& c : coeffs) c /= mass;

        auto& trial = report.trials[k];
        trial.quadrature = riesz_l1(coeffs, seq, tol, policy);
        trial.ratio = trial.quadrature.ratio;
        trial.coeffs = std::move(coeffs);
    }

    report.min_ratio = report.trials.front().ratio;
    report.max_ratio = report.trials.front().ratio;
    for (std::size_t k = 0; k < trials; ++k) {
        const double r = report.trials[k].ratio;
        if (r < report.min_ratio) {
            report.min_ratio = r;
            report.argmin = k;
        }
        report.max_ratio = std::max(report.max_ratio, r);
        const auto bin = static_cast<std::size_t>(std::clamp(r, 0.0, 1.0) * static_cast<double>(kHistogramBins));
        ++report.histogram[std::min(bin, kHistogramBins - 1)];
    }
    return report;
}

CrossModelCheck cross_model_check(std::span<const double> a, const LacunarySequence& seq, double tol,
                                  std::size_t samples, std::uint64_t seed, ExecPolicy policy) {
    const auto quad = riesz_l1(a, seq, tol, policy);
    const auto cv = CoefficientVector::scalars(std::vector<double>(a.begin(), a.end()));
    const auto est = mc_l1(make_one_plus_cosine(), cv, samples, seed, policy);
    const double mass = cv.l1_mass();
    PRODWALK_REQUIRE(mass > 0.0, ErrorCode::ZeroCoefficients, "all coefficients are zero");

    CrossModelCheck out;
    out.quadrature_ratio = quad.ratio;
    out.model_ratio = est.mean / mass;
    out.model_std_error = est.std_error / mass;
    out.difference = out.quadrature_ratio - out.model_ratio;
    return out;
}

} // namespace prodwalk
