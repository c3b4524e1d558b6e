#include "prodwalk/adversary.hpp"

#include "prodwalk/error.hpp"
#include "prodwalk/rng.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace prodwalk {
namespace {

using Objective = std::function<double(std::span<const double>)>;
using Projection = std::function<void(std::span<double>)>;

struct Descent {
    std::vector<double> x;
    double value = 0.0;
    RestartTrace trace;
    bool exhausted = false;
};

// Cyclic coordinate descent with step halving. Only strict improvements are
// accepted, so ties keep the incumbent. `report_sign` maps the minimised
// objective to the value recorded in the trace.
Descent coordinate_descent(std::vector<double> x, const Objective& f, const Projection& project, std::size_t budget,
                           std::string start, double report_sign) {
    Descent out;
    out.trace.start = std::move(start);
    project(x);
    double fx = f(x);
    std::size_t evals = 1;
    out.trace.values.push_back(report_sign * fx);

    std::vector<double> cand(x.size());
    double step = kInitialStep;
    while (step >= kMinStep) {
        bool improved = false;
        for (std::size_t c = 0; c < x.size(); ++c) {
            for (const double sign : {1.0, -1.0}) {
                if (evals >= budget) {
                    out.exhausted = true;
                    goto done;
                }
                std::copy(x.begin(), x.end(), cand.begin());
                cand[c] += sign * step;
                project(cand);
                const double fc = f(cand);
                ++evals;
                if (fc < fx) {
                    x.swap(cand);
                    fx = fc;
                    improved = true;
                    out.trace.values.push_back(report_sign * fx);
                    break;
                }
            }
        }
        if (!improved) step /= 2.0;
    }
    out.trace.converged = true;
done:
    out.trace.evaluations = evals;
    out.x = std::move(x);
    out.value = fx;
    return out;
}

std::size_t budget_share(std::size_t budget, std::size_t restarts, std::size_t r) {
    return budget / restarts + (r < budget % restarts ? 1 : 0);
}

void require_oracle(const Distribution& dist, std::size_t n, const Oracle& oracle) {
    if (oracle.method == Method::exact) {
        try {
            require_enumerable(dist, n);
        } catch (const Error& e) {
            throw Error(ErrorCode::OracleUnavailable, std::string("exact oracle unavailable: ") + e.what());
        }
    } else {
        PRODWALK_REQUIRE(oracle.samples >= kMinMcSamples, ErrorCode::InvalidArgument,
                         "Monte Carlo oracle needs at least 100 samples");
    }
}

// Fixed path set for common random numbers: row j holds R_0..R_n of path j.
std::vector<double> common_paths(const Distribution& dist, std::size_t n, std::size_t samples, std::uint64_t seed) {
    std::vector<double> r(samples * (n + 1));
    std::vector<double> factors(n);
    for (std::size_t j = 0; j < samples; ++j) {
        draw_factors(dist, subseed(seed, j), factors);
        double* row = r.data() + j * (n + 1);
        row[0] = 1.0;
        for (std::size_t i = 1; i <= n; ++i) row[i] = row[i - 1] * factors[i - 1];
    }
    return r;
}

// Mean of ||sum v_i R_ji|| over the fixed path rows.
double crn_mean(const std::vector<double>& paths, std::size_t n, const CoefficientVector& cv) {
    const std::size_t d = cv.dim();
    const std::size_t samples = paths.size() / (n + 1);
    std::vector<double> s(d);
    double total = 0.0;
    for (std::size_t j = 0; j < samples; ++j) {
        const double* row = paths.data() + j * (n + 1);
        std::fill(s.begin(), s.end(), 0.0);
        for (std::size_t i = 0; i <= n && row[i] != 0.0; ++i) {
            const auto v = cv[i];
            for (std::size_t c = 0; c < d; ++c) s[c] += v[c] * row[i];
        }
        total += norm_of(cv.norm(), s);
    }
    return total / static_cast<double>(samples);
}

// Picks the best restart (lowest minimised value, earliest index on ties).
std::size_t pick_best(const std::vector<Descent>& runs) {
    std::size_t best = 0;
    for (std::size_t r = 1; r < runs.size(); ++r) {
        if (runs[r].value < runs[best].value) best = r;
    }
    return best;
}

} // namespace

void project_partial_sums(std::span<double> a, double C) noexcept {
    double s = 0.0;
    for (auto& x : a) {
        x = std::clamp(x, -1.0, 1.0);
        if (s + x > C) x = C - s;
        if (s + x < -C) x = -C - s;
        s += x;
    }
}

SearchResult minimize_ratio(const Distribution& dist, const SearchConfig& config, ExecPolicy policy) {
    PRODWALK_REQUIRE(config.restarts >= 1, ErrorCode::InvalidArgument, "restarts must be >= 1");
    PRODWALK_REQUIRE(config.budget >= config.restarts, ErrorCode::InvalidArgument, "budget must be >= restarts");
    PRODWALK_REQUIRE(config.d >= 1, ErrorCode::InvalidArgument, "dimension must be >= 1");
    require_oracle(dist, config.n, config.oracle);

    const std::size_t n = config.n;
    const std::size_t d = config.d;
    const std::size_t dim = (n + 1) * d;

    const Projection normalise = [&](std::span<double> x) {
        const CoefficientVector cv(config.norm, d, std::vector<double>(x.begin(), x.end()));
        const double mass = cv.l1_mass();
        if (mass > 0.0) {
            for (auto& v : x) v /= mass;
        }
    };

    std::vector<Descent> runs(config.restarts);
    parallel_for(config.restarts, policy, [&](std::size_t r) {
        const std::uint64_t restart_seed = subseed(config.seed, r);
        Rng rng(restart_seed);
        std::vector<double> x0(dim);
        for (auto& v : x0) v = rng.uniform(-1.0, 1.0);

        Objective objective;
        std::vector<double> paths;
        if (config.oracle.method == Method::exact) {
            objective = [&](std::span<const double> x) {
                const CoefficientVector cv(config.norm, d, std::vector<double>(x.begin(), x.end()));
                const double mass = cv.l1_mass();
                if (mass == 0.0) return std::numeric_limits<double>::infinity();
                return exact_l1(dist, cv).mean / mass;
            };
        } else {
            paths = common_paths(dist, n, config.oracle.samples, subseed(restart_seed, 1));
            objective = [&](std::span<const double> x) {
                const CoefficientVector cv(config.norm, d, std::vector<double>(x.begin(), x.end()));
                const double mass = cv.l1_mass();
                if (mass == 0.0) return std::numeric_limits<double>::infinity();
                return crn_mean(paths, n, cv) / mass;
            };
        }
        runs[r] = coordinate_descent(std::move(x0), objective, normalise,
                                     budget_share(config.budget, config.restarts, r), "random", 1.0);
    });

    SearchResult result;
    result.method = config.oracle.method;
    for (auto& run : runs) {
        result.evaluations_used += run.trace.evaluations;
        result.budget_exhausted = result.budget_exhausted || run.exhausted;
        result.trace.push_back(run.trace);
    }
    result.best_restart = pick_best(runs);
    const auto& best = runs[result.best_restart];
    result.best_coeffs = CoefficientVector(config.norm, d, best.x);
    result.best_ratio = best.value;

    if (config.oracle.method == Method::exact) {
        result.verified_ratio = ratio(dist, result.best_coeffs, config.oracle);
        result.best_ratio = result.verified_ratio;
    } else {
        const auto est = mc_l1(dist, result.best_coeffs, config.oracle.samples,
                               subseed(config.seed, config.restarts), policy);
        const double mass = result.best_coeffs.l1_mass();
        result.verified_ratio = est.mean / mass;
        result.verified_std_error = est.std_error / mass;
    }
    return result;
}

SearchResult mw_probe(const Distribution& dist, std::size_t n, double C, std::size_t budget, std::uint64_t seed,
                      const ProbeOptions& options, ExecPolicy policy) {
    PRODWALK_REQUIRE(std::isfinite(C) && C >= 0.0, ErrorCode::InfeasibleConstraints,
                     "partial-sum bound C must be nonnegative");
    PRODWALK_REQUIRE(C >= 1.0, ErrorCode::InvalidArgument, "C must be >= 1");
    PRODWALK_REQUIRE(n >= 1, ErrorCode::InvalidArgument, "n must be >= 1");
    PRODWALK_REQUIRE(options.restarts >= 1, ErrorCode::InvalidArgument, "restarts must be >= 1");
    PRODWALK_REQUIRE(budget >= options.restarts, ErrorCode::InvalidArgument, "budget must be >= restarts");
    require_oracle(dist, n, options.oracle);

    const double scale = 1.0 / static_cast<double>(n + 1);
    const Projection project = [C](std::span<double> x) { project_partial_sums(x, C); };

    std::vector<Descent> runs(options.restarts);
    parallel_for(options.restarts, policy, [&](std::size_t r) {
        const std::uint64_t restart_seed = subseed(seed, r);
        std::vector<double> x0(n + 1);
        std::string start;
        if (r == 0) {
            std::fill(x0.begin(), x0.end(), 1.0);
            start = "constant";
        } else if (r == 1) {
            for (std::size_t i = 0; i <= n; ++i) x0[i] = (i % 2 == 0) ? 1.0 : -1.0;
            start = "alternating";
        } else {
            Rng rng(restart_seed);
            for (auto& v : x0) v = rng.uniform(-1.0, 1.0);
            start = "random";
        }

        Objective objective;
        std::vector<double> paths;
        if (options.oracle.method == Method::exact) {
            objective = [&](std::span<const double> x) {
                return -exact_l1(dist, CoefficientVector::scalars(std::vector<double>(x.begin(), x.end()))).mean *
                       scale;
            };
        } else {
            paths = common_paths(dist, n, options.oracle.samples, subseed(restart_seed, 1));
            objective = [&](std::span<const double> x) {
                return -crn_mean(paths, n, CoefficientVector::scalars(std::vector<double>(x.begin(), x.end()))) *
                       scale;
            };
        }
        runs[r] = coordinate_descent(std::move(x0), objective, project, budget_share(budget, options.restarts, r),
                                     std::move(start), -1.0);
    });

    SearchResult result;
    result.method = options.oracle.method;
    for (auto& run : runs) {
        result.evaluations_used += run.trace.evaluations;
        result.budget_exhausted = result.budget_exhausted || run.exhausted;
        result.trace.push_back(run.trace);
    }
    result.best_restart = pick_best(runs);
    const auto& best = runs[result.best_restart];
    result.best_coeffs = CoefficientVector::scalars(best.x);
    result.best_ratio = -best.value;

    if (options.oracle.method == Method::exact) {
        result.verified_ratio = exact_l1(dist, result.best_coeffs).mean * scale;
        result.best_ratio = result.verified_ratio;
    } else {
        const auto est = mc_l1(dist, result.best_coeffs, options.oracle.samples, subseed(seed, options.restarts),
                               policy);
        result.verified_ratio = est.mean * scale;
        result.verified_std_error = est.std_error * scale;
    }
    return result;
}

} // namespace prodwalk
