#pragma once

// Exact checks of the auxiliary inequalities behind the certificates. Every
// check evaluates its expectations by full enumeration over a finite law, tests
// the hypothesis first, and only then compares the two sides.

#include "prodwalk/coefficients.hpp"
#include "prodwalk/distributions.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace prodwalk {

inline constexpr double kLemmaTol = 1e-12;

struct LemmaCheck {
    bool hypothesis = true;
    double lhs = 0.0; // claimed larger side
    double rhs = 0.0; // claimed smaller side
    // hypothesis && lhs < rhs beyond kLemmaTol (relative).
    [[nodiscard]] bool violated() const noexcept;
};

// E||uX + v|| >= (1/2) E|X-1| max{||u||, ||v||}.
[[nodiscard]] LemmaCheck check_single_factor(const Distribution& dist, Norm norm, std::span<const double> u,
                                             std::span<const double> v);

// Y = sum_{i>=1} w_i R_i. If P(||Y|| > ||v||/4) <= 1/4 then
// E||Y + v|| >= E||Y|| + ||v||/8. `w` holds w_0..w_n; w_0 is ignored.
[[nodiscard]] LemmaCheck check_small_perturbation(const Distribution& dist, const CoefficientVector& w,
                                                  std::span<const double> v);

// E||sum v_k R_k||^(1/2) <= sum lambda^k ||v_k||^(1/2), lambda = E sqrt(X).
// Reported with lhs = right side so that violated() keeps one orientation.
[[nodiscard]] LemmaCheck check_sqrt_moment(const Distribution& dist, const CoefficientVector& cv);

// P(||sum v_k R_k|| >= t/(1-lambda) sum lambda^k ||v_k||) <= t^(-1/2), t >= 1.
// Hypothesis: t >= 1 and the threshold is positive.
[[nodiscard]] LemmaCheck check_sqrt_tail(const Distribution& dist, const CoefficientVector& cv, double t);

// If E|X-1| 1{X > A} <= mu/4 (mu = E|X-1|) then
// E||uX + v|| 1{X <= A} >= mu ||v|| / 8.
[[nodiscard]] LemmaCheck check_truncated_factor(const Distribution& dist, Norm norm, std::span<const double> u,
                                                std::span<const double> v, double A);

// Z = sum_{i<split} v_i R_i, Y = sum_{i>=split} v_i R_i on the same path.
// If E||Z|| 1{||Y|| > E||Z||/8} <= E||Z||/8 then E||Y+Z|| >= E||Y|| + E||Z||/2.
[[nodiscard]] LemmaCheck check_split_sum(const Distribution& dist, const CoefficientVector& cv, std::size_t split);

// E||sum_{i=0}^n v_i R_i|| >= (mu^2/4) max_i ||v_i|| and
// >= mu^2/(4n) sum_{i=1}^n ||v_i||. Reports the tighter of the two margins.
[[nodiscard]] LemmaCheck check_max_coefficient(const Distribution& dist, const CoefficientVector& cv);

struct LemmaTally {
    std::string name;
    std::size_t instances = 0;
    std::size_t hypothesis_met = 0;
    std::size_t violations = 0;
    double worst_margin = 0.0; // min over met instances of (lhs - rhs)/max(1,|rhs|)
};

struct SuiteReport {
    std::vector<LemmaTally> lemmas;
    std::size_t trials = 0;
    std::uint64_t seed = 0;

    [[nodiscard]] std::size_t total_violations() const noexcept;
};

// Per trial, draws (d, norm, n, vectors, t, A, split) from
// Rng(subseed(seed, trial)) and runs every check. Throws NotFiniteSupport.
[[nodiscard]] SuiteReport lemma_suite(const Distribution& dist, std::size_t trials, std::uint64_t seed);

} // namespace prodwalk
