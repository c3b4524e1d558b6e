#include "prodwalk/evaluator.hpp"

#include <cmath>
#include <cstdint>
#include <string>

namespace prodwalk {
namespace {

constexpr std::size_t kMcBlock = 4096;

struct Moments {
    double count = 0.0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x) noexcept {
        count += 1.0;
        const double delta = x - mean;
        mean += delta / count;
        m2 += delta * (x - mean);
    }

    void merge(const Moments& o) noexcept {
        if (o.count == 0.0) return;
        if (count == 0.0) {
            *this = o;
            return;
        }
        const double total = count + o.count;
        const double delta = o.mean - mean;
        mean += delta * (o.count / total);
        m2 += o.m2 + delta * delta * (count * o.count / total);
        count = total;
    }
};

} // namespace

std::string_view to_string(Method m) noexcept {
    return m == Method::exact ? "exact" : "monte_carlo";
}

void require_enumerable(const Distribution& dist, std::size_t n) {
    PRODWALK_REQUIRE(dist.is_finite(), ErrorCode::NotFiniteSupport, "exact enumeration needs a finite-support law");
    const double leaves = std::pow(static_cast<double>(dist.support_size()), static_cast<double>(n));
    PRODWALK_REQUIRE(leaves <= kEnumerationBudget, ErrorCode::EnumerationTooLarge,
                     "s^n = " + std::to_string(dist.support_size()) + "^" + std::to_string(n) +
                         " exceeds the enumeration budget of 1e7");
}

EstimateResult exact_l1(const Distribution& dist, const CoefficientVector& cv) {
    const std::size_t n = cv.n();
    const std::size_t d = cv.dim();
    require_enumerable(dist, n);

    const auto atoms = dist.atoms();
    // partial[i] = sum_{j <= i} v_j R_j along the current branch
    std::vector<double> partial((n + 1) * d);
    std::vector<double> r(n + 1);
    for (std::size_t c = 0; c < d; ++c) partial[c] = cv[0][c];
    r[0] = 1.0;

    CompensatedSum total;
    std::size_t leaves = 0;
    auto rec = [&](auto&& self, std::size_t depth, double prob) -> void {
        if (depth == n || r[depth] == 0.0) {
            const std::span<const double> s(partial.data() + depth * d, d);
            total.add(prob * norm_of(cv.norm(), s));
            ++leaves;
            return;
        }
        const auto next = cv[depth + 1];
        for (const auto& a : atoms) {
            r[depth + 1] = r[depth] * a.value;
            for (std::size_t c = 0; c < d; ++c) {
                partial[(depth + 1) * d + c] = partial[depth * d + c] + next[c] * r[depth + 1];
            }
            self(self, depth + 1, prob * a.probability);
        }
    };
    rec(rec, 0, 1.0);

    EstimateResult res;
    res.mean = total.value();
    res.ci99 = {res.mean, res.mean};
    res.samples = leaves;
    res.method = Method::exact;
    return res;
}

EstimateResult mc_l1(const Distribution& dist, const CoefficientVector& cv, std::size_t samples,
                     std::uint64_t seed, ExecPolicy policy) {
    PRODWALK_REQUIRE(samples >= kMinMcSamples, ErrorCode::InvalidArgument, "Monte Carlo needs at least 100 samples");
    EstimateResult res;
    res.samples = samples;
    res.seed = seed;
    res.method = Method::monte_carlo;

    const std::size_t n = cv.n();
    const std::size_t d = cv.dim();
    if (n == 0) {
        res.mean = cv.norm_of(0);
        res.ci99 = {res.mean, res.mean};
        return res;
    }

    const std::size_t blocks = (samples + kMcBlock - 1) / kMcBlock;
    std::vector<Moments> block_moments(blocks);
    parallel_for(blocks, policy, [&](std::size_t b) {
        std::vector<double> factors(n);
        std::vector<double> s(d);
        Moments m;
        const std::size_t lo = b * kMcBlock;
        const std::size_t hi = std::min(samples, lo + kMcBlock);
        for (std::size_t j = lo; j < hi; ++j) {
            draw_factors(dist, subseed(seed, j), factors);
            for (std::size_t c = 0; c < d; ++c) s[c] = cv[0][c];
            double r = 1.0;
            for (std::size_t i = 1; i <= n && r != 0.0; ++i) {
                r *= factors[i - 1];
                const auto v = cv[i];
                for (std::size_t c = 0; c < d; ++c) s[c] += v[c] * r;
            }
            m.add(norm_of(cv.norm(), s));
        }
        block_moments[b] = m;
    });

    Moments total;
    for (const auto& m : block_moments) total.merge(m);
    res.mean = total.mean;
    const double var = total.count > 1.0 ? total.m2 / (total.count - 1.0) : 0.0;
    res.std_error = std::sqrt(std::max(0.0, var) / total.count);
    res.ci99 = {res.mean - kZ99 * res.std_error, res.mean + kZ99 * res.std_error};
    return res;
}

EstimateResult estimate_l1(const Distribution& dist, const CoefficientVector& cv, const Oracle& oracle,
                           ExecPolicy policy) {
    if (oracle.method == Method::exact) return exact_l1(dist, cv);
    return mc_l1(dist, cv, oracle.samples, oracle.seed, policy);
}

double ratio_of(const EstimateResult& estimate, const CoefficientVector& cv) {
    const double mass = cv.l1_mass();
    PRODWALK_REQUIRE(mass > 0.0, ErrorCode::ZeroCoefficients, "all coefficients are zero");
    return estimate.mean / mass;
}

double ratio(const Distribution& dist, const CoefficientVector& cv, const Oracle& oracle, ExecPolicy policy) {
    PRODWALK_REQUIRE(cv.l1_mass() > 0.0, ErrorCode::ZeroCoefficients, "all coefficients are zero");
    return ratio_of(estimate_l1(dist, cv, oracle, policy), cv);
}

RademacherResult rademacher_exact(int n) {
    PRODWALK_REQUIRE(n >= 1 && n <= 20, ErrorCode::NTooLarge, "rademacher_exact needs 1 <= n <= 20");
    const std::uint64_t patterns = std::uint64_t{1} << n;

    // Integer totals keep both sides exact.
    std::uint64_t products_total = 0;
    for (std::uint64_t mask = 0; mask < patterns; ++mask) {
        std::int64_t prod = 1;
        std::int64_t s = 0;
        for (int i = 0; i < n; ++i) {
            prod *= ((mask >> i) & 1U) ? -1 : 1;
            s += prod;
        }
        products_total += static_cast<std::uint64_t>(s < 0 ? -s : s);
    }

    // sum_k C(n,k) |2k - n|
    std::uint64_t plain_total = 0;
    std::uint64_t binom = 1;
    for (int k = 0; k <= n; ++k) {
        plain_total += binom * static_cast<std::uint64_t>(std::abs(2 * k - n));
        binom = binom * static_cast<std::uint64_t>(n - k) / static_cast<std::uint64_t>(k + 1);
    }

    RademacherResult res;
    res.value_products = static_cast<double>(products_total) / static_cast<double>(patterns);
    res.value_plain = static_cast<double>(plain_total) / static_cast<double>(patterns);
    res.sqrt_n = std::sqrt(static_cast<double>(n));
    PRODWALK_REQUIRE(res.value_products == res.value_plain, ErrorCode::InvalidArgument,
                     "sign-product and plain Rademacher sums disagree");
    PRODWALK_REQUIRE(res.value_products <= res.sqrt_n, ErrorCode::InvalidArgument, "Rademacher sum exceeds sqrt(n)");
    return res;
}

} // namespace prodwalk
