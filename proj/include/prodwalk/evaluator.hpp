#pragma once

// E||sum_i v_i R_i|| by exact enumeration (finite laws) or Monte Carlo.

#include "prodwalk/coefficients.hpp"
#include "prodwalk/distributions.hpp"
#include "prodwalk/error.hpp"
#include "prodwalk/parallel.hpp"

#include <cmath>
#include <cstdint>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace prodwalk {

inline constexpr double kEnumerationBudget = 1e7;
inline constexpr double kZ99 = 2.576;
inline constexpr std::size_t kMinMcSamples = 100;

enum class Method { exact, monte_carlo };

[[nodiscard]] std::string_view to_string(Method m) noexcept;

struct EstimateResult {
    double mean = 0.0;
    double std_error = 0.0;
    std::pair<double, double> ci99{0.0, 0.0};
    std::size_t samples = 0; // leaves enumerated for the exact method
    std::uint64_t seed = 0;
    Method method = Method::exact;
};

struct Oracle {
    Method method = Method::exact;
    std::size_t samples = 100'000;
    std::uint64_t seed = 0;
};

// Neumaier-compensated running sum.
class CompensatedSum {
public:
    void add(double x) noexcept {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
    }
    [[nodiscard]] double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

// Throws NotFiniteSupport or EnumerationTooLarge unless dist is finite and
// s^n <= kEnumerationBudget.
void require_enumerable(const Distribution& dist, std::size_t n);

// Calls visit(probability, R_0..R_n) once per factor assignment. A branch
// that hits R_i = 0 is visited once with the remaining R's set to zero.
template <class Visit>
void enumerate_paths(const Distribution& dist, std::size_t n, Visit&& visit) {
    require_enumerable(dist, n);
    const auto atoms = dist.atoms();
    std::vector<double> r(n + 1, 0.0);
    r[0] = 1.0;
    auto rec = [&](auto&& self, std::size_t depth, double prob) -> void {
        if (depth == n || r[depth] == 0.0) {
            for (std::size_t i = depth + 1; i <= n; ++i) r[i] = 0.0;
            visit(prob, std::span<const double>(r));
            return;
        }
        for (const auto& a : atoms) {
            r[depth + 1] = r[depth] * a.value;
            self(self, depth + 1, prob * a.probability);
        }
    };
    rec(rec, 0, 1.0);
}

[[nodiscard]] EstimateResult exact_l1(const Distribution& dist, const CoefficientVector& cv);

// Path j uses the stream subseed(seed, j); blocks are reduced in index order
// so the result does not depend on policy.workers.
[[nodiscard]] EstimateResult mc_l1(const Distribution& dist, const CoefficientVector& cv, std::size_t samples,
                                   std::uint64_t seed, ExecPolicy policy = {});

[[nodiscard]] EstimateResult estimate_l1(const Distribution& dist, const CoefficientVector& cv,
                                         const Oracle& oracle, ExecPolicy policy = {});

// E||sum v_i R_i|| / sum ||v_i||. Throws ZeroCoefficients.
[[nodiscard]] double ratio(const Distribution& dist, const CoefficientVector& cv, const Oracle& oracle,
                           ExecPolicy policy = {});
[[nodiscard]] double ratio_of(const EstimateResult& estimate, const CoefficientVector& cv);

struct RademacherResult {
    double value_products = 0.0; // E|sum_{i<=n} prod_{k<=i} eps_k|
    double value_plain = 0.0;    // E|sum_{i<=n} eps_i|
    double sqrt_n = 0.0;
};

// Exact for 1 <= n <= 20; throws NTooLarge otherwise.
[[nodiscard]] RademacherResult rademacher_exact(int n);

} // namespace prodwalk
