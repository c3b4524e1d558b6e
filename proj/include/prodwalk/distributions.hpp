#pragma once

// Nonnegative mean-one factor laws, product-path sampling, and the moment
// functionals (lambda, mu, p(eps), tail(A)) that feed the certificates.

#include "prodwalk/rng.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace prodwalk {

enum class DistributionKind { finite, one_plus_cosine, sampler };

struct Atom {
    double value = 0.0;
    double probability = 0.0;
};

using SamplerFn = std::function<double(Rng&)>;

// Analytic moments a caller may attach to a sampler law. Missing entries are
// estimated by Monte Carlo.
struct SamplerMoments {
    std::optional<double> lambda;
    std::optional<double> mu;
};

inline constexpr double kProbabilitySumTol = 1e-12;
inline constexpr double kMeanTol = 1e-9;
inline constexpr std::size_t kDefaultMomentSamples = 1'000'000;
inline constexpr double kMeanZThreshold = 5.0;

class Distribution {
public:
    [[nodiscard]] DistributionKind kind() const noexcept { return kind_; }
    [[nodiscard]] bool is_finite() const noexcept { return kind_ == DistributionKind::finite; }

    // Sorted ascending by value, merged, probabilities normalised to sum 1.
    [[nodiscard]] std::span<const Atom> atoms() const noexcept { return atoms_; }
    [[nodiscard]] std::size_t support_size() const noexcept { return atoms_.size(); }

    // P(X = 1) = 1.
    [[nodiscard]] bool degenerate() const noexcept { return degenerate_; }

    [[nodiscard]] std::uint64_t sampler_seed() const noexcept { return sampler_seed_; }
    [[nodiscard]] const SamplerMoments& sampler_moments() const noexcept { return sampler_moments_; }
    [[nodiscard]] std::size_t moment_samples() const noexcept { return moment_samples_; }
    [[nodiscard]] const std::string& name() const noexcept { return name_; }

    // One draw of X from `rng`.
    [[nodiscard]] double sample(Rng& rng) const;

    friend Distribution make_finite(std::vector<Atom> atoms);
    friend Distribution make_one_plus_cosine();
    friend Distribution make_sampler(SamplerFn fn, std::uint64_t seed, SamplerMoments moments,
                                     std::string name, std::size_t moment_samples);

private:
    Distribution() = default;

    DistributionKind kind_ = DistributionKind::finite;
    std::vector<Atom> atoms_;
    std::vector<double> cumulative_;
    bool degenerate_ = false;
    std::shared_ptr<const SamplerFn> sampler_;
    std::uint64_t sampler_seed_ = 0;
    SamplerMoments sampler_moments_;
    std::size_t moment_samples_ = kDefaultMomentSamples;
    std::string name_;
};

// Throws NegativeValue, NonpositiveProbability, ProbabilitySumMismatch or
// MeanNotOne. A degenerate law is accepted and flagged.
[[nodiscard]] Distribution make_finite(std::vector<Atom> atoms);

// X = 1 + cos(U) with U uniform on [0, 2pi).
[[nodiscard]] Distribution make_one_plus_cosine();

// Opaque seeded sampler. Mean one is not checked here (validate() does it).
[[nodiscard]] Distribution make_sampler(SamplerFn fn, std::uint64_t seed, SamplerMoments moments = {},
                                        std::string name = "sampler",
                                        std::size_t moment_samples = kDefaultMomentSamples);

struct ValidationCheck {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct ValidationReport {
    std::vector<ValidationCheck> checks;

    [[nodiscard]] bool ok() const noexcept;
    [[nodiscard]] const ValidationCheck* find(std::string_view name) const noexcept;
};

// Checks "nonnegative", "mean_one", "nondegenerate". Sampler laws are tested
// by Monte Carlo with a kMeanZThreshold z-score cut.
[[nodiscard]] ValidationReport validate(const Distribution& dist);

enum class Provenance { analytic, exact_finite, monte_carlo };

struct ProvenanceTag {
    Provenance kind = Provenance::analytic;
    std::size_t samples = 0;
    std::uint64_t seed = 0;
};

struct MomentProfile {
    double lambda = 0.0; // E sqrt(X)
    double mu = 0.0;     // E|X - 1|
    double p_eps = 0.0;  // P(X <= eps)
    double tail_A = 0.0; // E|X - 1| 1{X >= A}
    double eps = 0.0;
    double A = 0.0;
    ProvenanceTag lambda_src;
    ProvenanceTag mu_src;
    ProvenanceTag p_eps_src;
    ProvenanceTag tail_src;
};

// Throws DegenerateDistribution when mu vanishes, InvalidArgument for eps <= 0
// or A <= 0.
[[nodiscard]] MomentProfile moment_profile(const Distribution& dist, double eps, double A);

// P(X <= eps) and E|X-1| 1{X >= A} on their own.
[[nodiscard]] double prob_at_most(const Distribution& dist, double eps);
[[nodiscard]] double truncated_tail(const Distribution& dist, double A);

// Smallest candidate A with tail(A) <= mu/4. Finite laws probe the support
// points and max support + 1; one_plus_cosine uses its right endpoint 2;
// sampler laws probe empirical quantiles at levels 1 - 2^-j.
[[nodiscard]] double choose_truncation(const Distribution& dist, double mu);

struct ProductPath {
    std::vector<double> values; // R_0 .. R_n
    std::uint64_t seed = 0;     // subseed the path was drawn from

    [[nodiscard]] std::size_t n() const noexcept { return values.empty() ? 0 : values.size() - 1; }
};

// Path j is drawn from Rng(subseed(seed, j)).
[[nodiscard]] std::vector<ProductPath> sample_products(const Distribution& dist, std::size_t n,
                                                       std::uint64_t seed, std::size_t count);

// Fills `factors` with X_1..X_m from one path stream; shared with the Monte
// Carlo evaluator so both draw identical paths.
void draw_factors(const Distribution& dist, std::uint64_t path_seed, std::span<double> factors);

} // namespace prodwalk
