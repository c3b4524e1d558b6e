#include "prodwalk/distributions.hpp"

#include "prodwalk/error.hpp"
#include "prodwalk/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace prodwalk {
namespace {

constexpr double kDegenerateTol = 1e-12;
constexpr std::size_t kSampleBlock = 1 << 14;

std::string describe(double x) {
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

// Sample i of a sampler law comes from Rng(subseed(seed, i)).
std::vector<double> draw_samples(const Distribution& dist, std::size_t count) {
    std::vector<double> out(count);
    const std::size_t blocks = (count + kSampleBlock - 1) / kSampleBlock;
    parallel_for(blocks, {}, [&](std::size_t b) {
        const std::size_t lo = b * kSampleBlock;
        const std::size_t hi = std::min(count, lo + kSampleBlock);
        for (std::size_t i = lo; i < hi; ++i) {
            Rng rng(subseed(dist.sampler_seed(), i));
            out[i] = dist.sample(rng);
        }
    });
    return out;
}

double opc_prob_at_most(double eps) {
    if (eps <= 0.0) return 0.0;
    if (eps >= 2.0) return 1.0;
    return std::acos(1.0 - eps) / std::numbers::pi;
}

// E|cos U| 1{cos U >= A - 1}.
double opc_tail(double A) {
    if (A >= 2.0) return 0.0;
    if (A <= 0.0) return 2.0 / std::numbers::pi;
    const double a = A - 1.0;
    const double s = std::sqrt(std::max(0.0, 1.0 - a * a));
    return (a >= 0.0 ? s : 2.0 - s) / std::numbers::pi;
}

} // namespace

double Distribution::sample(Rng& rng) const {
    switch (kind_) {
    case DistributionKind::finite: {
        const double u = rng.uniform();
        const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
        const auto idx = std::min<std::size_t>(static_cast<std::size_t>(it - cumulative_.begin()), atoms_.size() - 1);
        return atoms_[idx].value;
    }
    case DistributionKind::one_plus_cosine:
        return 1.0 + std::cos(2.0 * std::numbers::pi * rng.uniform());
    case DistributionKind::sampler:
        return (*sampler_)(rng);
    }
    return 0.0;
}

Distribution make_finite(std::vector<Atom> atoms) {
    PRODWALK_REQUIRE(!atoms.empty(), ErrorCode::InvalidArgument, "finite distribution needs at least one atom");
    double total = 0.0;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        const auto& a = atoms[i];
        PRODWALK_REQUIRE(std::isfinite(a.value) && a.value >= 0.0, ErrorCode::NegativeValue,
                         "atom " + std::to_string(i) + " has value " + describe(a.value) + " (must be finite and >= 0)");
        PRODWALK_REQUIRE(std::isfinite(a.probability) && a.probability > 0.0 && a.probability <= 1.0,
                         ErrorCode::NonpositiveProbability,
                         "atom " + std::to_string(i) + " has probability " + describe(a.probability) + " (must be in (0,1])");
        total += a.probability;
    }
    PRODWALK_REQUIRE(std::abs(total - 1.0) <= kProbabilitySumTol, ErrorCode::ProbabilitySumMismatch,
                     "probabilities sum to " + describe(total));

    std::stable_sort(atoms.begin(), atoms.end(), [](const Atom& l, const Atom& r) { return l.value < r.value; });
    std::vector<Atom> merged;
    for (const auto& a : atoms) {
        if (!merged.empty() && merged.back().value == a.value) {
            merged.back().probability += a.probability;
        } else {
            merged.push_back(a);
        }
    }
    double mean = 0.0;
    for (auto& a : merged) {
        a.probability /= total;
        mean += a.value * a.probability;
    }
    PRODWALK_REQUIRE(std::abs(mean - 1.0) <= kMeanTol, ErrorCode::MeanNotOne, "weighted mean is " + describe(mean));

    Distribution d;
    d.kind_ = DistributionKind::finite;
    d.atoms_ = std::move(merged);
    d.cumulative_.reserve(d.atoms_.size());
    double acc = 0.0;
    for (const auto& a : d.atoms_) {
        acc += a.probability;
        d.cumulative_.push_back(acc);
    }
    d.cumulative_.back() = 1.0;
    for (const auto& a : d.atoms_) {
        if (a.value == 1.0 && a.probability >= 1.0 - kDegenerateTol) d.degenerate_ = true;
    }
    d.name_ = "finite";
    return d;
}

Distribution make_one_plus_cosine() {
    Distribution d;
    d.kind_ = DistributionKind::one_plus_cosine;
    d.name_ = "one_plus_cosine";
    return d;
}

Distribution make_sampler(SamplerFn fn, std::uint64_t seed, SamplerMoments moments, std::string name,
                          std::size_t moment_samples) {
    PRODWALK_REQUIRE(static_cast<bool>(fn), ErrorCode::InvalidArgument, "sampler function is empty");
    PRODWALK_REQUIRE(moment_samples >= 2, ErrorCode::InvalidArgument, "sampler needs at least 2 moment samples");
    Distribution d;
    d.kind_ = DistributionKind::sampler;
    d.sampler_ = std::make_shared<const SamplerFn>(std::move(fn));
    d.sampler_seed_ = seed;
    d.sampler_moments_ = moments;
    d.moment_samples_ = moment_samples;
    d.name_ = std::move(name);
    return d;
}

bool ValidationReport::ok() const noexcept {
    return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

const ValidationCheck* ValidationReport::find(std::string_view name) const noexcept {
    for (const auto& c : checks) {
        if (c.name == name) return &c;
    }
    return nullptr;
}

ValidationReport validate(const Distribution& dist) {
    ValidationReport report;
    switch (dist.kind()) {
    case DistributionKind::finite: {
        double mean = 0.0;
        bool nonneg = true;
        for (const auto& a : dist.atoms()) {
            mean += a.value * a.probability;
            nonneg = nonneg && a.value >= 0.0;
        }
        report.checks.push_back({"nonnegative", nonneg, "minimum atom " + describe(dist.atoms().front().value)});
        report.checks.push_back({"mean_one", std::abs(mean - 1.0) <= kMeanTol, "exact mean " + describe(mean)});
        report.checks.push_back({"nondegenerate", !dist.degenerate(),
                                 dist.degenerate() ? "P(X=1)=1" : "P(X=1)<1"});
        break;
    }
    case DistributionKind::one_plus_cosine:
        report.checks.push_back({"nonnegative", true, "support [0,2]"});
        report.checks.push_back({"mean_one", true, "analytic mean 1"});
        report.checks.push_back({"nondegenerate", true, "continuous law"});
        break;
    case DistributionKind::sampler: {
        const auto xs = draw_samples(dist, dist.moment_samples());
        const double n = static_cast<double>(xs.size());
        double mean = 0.0;
        double m2 = 0.0;
        double minimum = xs.front();
        std::size_t ones = 0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            const double delta = xs[i] - mean;
            mean += delta / static_cast<double>(i + 1);
            m2 += delta * (xs[i] - mean);
            minimum = std::min(minimum, xs[i]);
            if (xs[i] == 1.0) ++ones;
        }
        const double se = std::sqrt(m2 / (n - 1.0) / n);
        const double z = se > 0.0 ? std::abs(mean - 1.0) / se : (mean == 1.0 ? 0.0 : INFINITY);
        report.checks.push_back({"nonnegative", minimum >= 0.0, "sample minimum " + describe(minimum)});
        report.checks.push_back({"mean_one", z <= kMeanZThreshold,
                                 "sample mean " + describe(mean) + ", z=" + describe(z) + " over " +
                                     std::to_string(xs.size()) + " samples"});
        report.checks.push_back({"nondegenerate", ones < xs.size(),
                                 "empirical P(X=1)=" + describe(static_cast<double>(ones) / n)});
        break;
    }
    }
    return report;
}

double prob_at_most(const Distribution& dist, double eps) {
    switch (dist.kind()) {
    case DistributionKind::finite: {
        double p = 0.0;
        for (const auto& a : dist.atoms()) {
            if (a.value <= eps) p += a.probability;
        }
        return std::min(p, 1.0);
    }
    case DistributionKind::one_plus_cosine:
        return opc_prob_at_most(eps);
    case DistributionKind::sampler: {
        const auto xs = draw_samples(dist, dist.moment_samples());
        const auto hits = std::count_if(xs.begin(), xs.end(), [eps](double x) { return x <= eps; });
        return static_cast<double>(hits) / static_cast<double>(xs.size());
    }
    }
    return 0.0;
}

double truncated_tail(const Distribution& dist, double A) {
    switch (dist.kind()) {
    case DistributionKind::finite: {
        double t = 0.0;
        for (const auto& a : dist.atoms()) {
            if (a.value >= A) t += a.probability * std::abs(a.value - 1.0);
        }
        return t;
    }
    case DistributionKind::one_plus_cosine:
        return opc_tail(A);
    case DistributionKind::sampler: {
        const auto xs = draw_samples(dist, dist.moment_samples());
        double t = 0.0;
        for (double x : xs) {
            if (x >= A) t += std::abs(x - 1.0);
        }
        return t / static_cast<double>(xs.size());
    }
    }
    return 0.0;
}

MomentProfile moment_profile(const Distribution& dist, double eps, double A) {
    PRODWALK_REQUIRE(eps > 0.0 && std::isfinite(eps), ErrorCode::InvalidArgument, "eps must be positive");
    PRODWALK_REQUIRE(A > 0.0 && std::isfinite(A), ErrorCode::InvalidArgument, "A must be positive");

    MomentProfile mp;
    mp.eps = eps;
    mp.A = A;
    switch (dist.kind()) {
    case DistributionKind::finite: {
        for (const auto& a : dist.atoms()) {
            mp.lambda += a.probability * std::sqrt(a.value);
            mp.mu += a.probability * std::abs(a.value - 1.0);
        }
        mp.p_eps = prob_at_most(dist, eps);
        mp.tail_A = truncated_tail(dist, A);
        mp.lambda_src = mp.mu_src = mp.p_eps_src = mp.tail_src = {Provenance::exact_finite, 0, 0};
        break;
    }
    case DistributionKind::one_plus_cosine:
        mp.lambda = 2.0 * std::numbers::sqrt2 / std::numbers::pi;
        mp.mu = 2.0 / std::numbers::pi;
        mp.p_eps = opc_prob_at_most(eps);
        mp.tail_A = opc_tail(A);
        mp.lambda_src = mp.mu_src = mp.p_eps_src = mp.tail_src = {Provenance::analytic, 0, 0};
        break;
    case DistributionKind::sampler: {
        const auto xs = draw_samples(dist, dist.moment_samples());
        const ProvenanceTag mc{Provenance::monte_carlo, xs.size(), dist.sampler_seed()};
        double sum_sqrt = 0.0;
        double sum_dev = 0.0;
        double sum_tail = 0.0;
        std::size_t hits = 0;
        for (double x : xs) {
            sum_sqrt += std::sqrt(std::max(0.0, x));
            sum_dev += std::abs(x - 1.0);
            if (x >= A) sum_tail += std::abs(x - 1.0);
            if (x <= eps) ++hits;
        }
        const double n = static_cast<double>(xs.size());
        mp.lambda = sum_sqrt / n;
        mp.mu = sum_dev / n;
        mp.p_eps = static_cast<double>(hits) / n;
        mp.tail_A = sum_tail / n;
        mp.lambda_src = mp.mu_src = mp.p_eps_src = mp.tail_src = mc;
        const ProvenanceTag analytic{Provenance::analytic, 0, 0};
        if (dist.sampler_moments().lambda) {
            mp.lambda = *dist.sampler_moments().lambda;
            mp.lambda_src = analytic;
        }
        if (dist.sampler_moments().mu) {
            mp.mu = *dist.sampler_moments().mu;
            mp.mu_src = analytic;
        }
        break;
    }
    }
    PRODWALK_REQUIRE(mp.mu > kDegenerateTol, ErrorCode::DegenerateDistribution,
                     "E|X-1| = " + describe(mp.mu) + " (degenerate law)");
    return mp;
}

double choose_truncation(const Distribution& dist, double mu) {
    PRODWALK_REQUIRE(mu > 0.0, ErrorCode::NonpositiveMu, "mu must be positive");
    const double bound = mu / 4.0;
    switch (dist.kind()) {
    case DistributionKind::finite: {
        for (const auto& a : dist.atoms()) {
            if (truncated_tail(dist, a.value) <= bound) return a.value;
        }
        return dist.atoms().back().value + 1.0;
    }
    case DistributionKind::one_plus_cosine:
        return 2.0;
    case DistributionKind::sampler: {
        auto xs = draw_samples(dist, dist.moment_samples());
        std::sort(xs.begin(), xs.end());
        const std::size_t n = xs.size();
        // suffix[i] = sum_{j >= i} |x_j - 1|
        std::vector<double> suffix(n + 1, 0.0);
        for (std::size_t i = n; i-- > 0;) suffix[i] = suffix[i + 1] + std::abs(xs[i] - 1.0);
        auto tail_at = [&](double A) {
            const auto first = static_cast<std::size_t>(std::lower_bound(xs.begin(), xs.end(), A) - xs.begin());
            return suffix[first] / static_cast<double>(n);
        };
        for (int j = 1; j <= 40; ++j) {
            const double level = 1.0 - std::ldexp(1.0, -j);
            const auto idx = static_cast<std::size_t>(std::ceil(level * static_cast<double>(n)));
            if (idx == 0 || idx > n) break;
            const double A = xs[idx - 1];
            if (A > 0.0 && tail_at(A) <= bound) return A;
            if (idx == n) break;
        }
        if (xs.back() > 0.0 && tail_at(xs.back()) <= bound) return xs.back();
        throw Error(ErrorCode::NoFiniteTruncation, "empirical tail never drops below mu/4 on the quantile grid");
    }
    }
    return 0.0;
}

void draw_factors(const Distribution& dist, std::uint64_t path_seed, std::span<double> factors) {
    Rng rng(path_seed);
    for (auto& f : factors) f = dist.sample(rng);
}

std::vector<ProductPath> sample_products(const Distribution& dist, std::size_t n, std::uint64_t seed,
                                         std::size_t count) {
    PRODWALK_REQUIRE(count >= 1, ErrorCode::InvalidArgument, "count must be >= 1");
    std::vector<ProductPath> paths(count);
    parallel_for(count, {}, [&](std::size_t j) {
        auto& path = paths[j];
        path.seed = subseed(seed, j);
        path.values.assign(n + 1, 0.0);
        std::vector<double> factors(n);
        draw_factors(dist, path.seed, factors);
        path.values[0] = 1.0;
        for (std::size_t i = 1; i <= n; ++i) path.values[i] = path.values[i - 1] * factors[i - 1];
    });
    return paths;
}

} // namespace prodwalk
