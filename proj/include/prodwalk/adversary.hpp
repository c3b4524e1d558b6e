#pragma once

// Derivative-free search over coefficient space for small (or, for the
// constrained probe, large) values of E||sum v_i R_i||.

#include "prodwalk/coefficients.hpp"
#include "prodwalk/distributions.hpp"
#include "prodwalk/evaluator.hpp"
#include "prodwalk/parallel.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace prodwalk {

inline constexpr double kInitialStep = 0.25;
inline constexpr double kMinStep = 1e-6;

struct SearchConfig {
    std::size_t n = 1;
    std::size_t d = 1;
    Norm norm = Norm::l1;
    std::size_t budget = 10'000;
    std::size_t restarts = 4;
    std::uint64_t seed = 0;
    Oracle oracle{}; // exact, or monte_carlo with oracle.samples common paths per restart
};

struct RestartTrace {
    std::string start;          // "random", "constant", "alternating"
    std::vector<double> values; // incumbent after each accepted move, starting point first
    std::size_t evaluations = 0;
    bool converged = false;     // step fell below kMinStep
};

struct SearchResult {
    double best_ratio = 0.0;
    CoefficientVector best_coeffs = CoefficientVector::scalars({1.0});
    std::size_t evaluations_used = 0;
    std::vector<RestartTrace> trace;
    std::size_t best_restart = 0;
    bool budget_exhausted = false;
    // Independent re-evaluation of best_coeffs through the evaluator.
    double verified_ratio = 0.0;
    double verified_std_error = 0.0;
    Method method = Method::exact;
    double initial_step = kInitialStep;
    double min_step = kMinStep;
};

// Multi-restart coordinate descent on the unit l1 sphere. Throws
// InvalidArgument for bad configs, OracleUnavailable when an exact oracle is
// requested for a law that cannot be enumerated.
[[nodiscard]] SearchResult minimize_ratio(const Distribution& dist, const SearchConfig& config,
                                          ExecPolicy policy = {});

struct ProbeOptions {
    std::size_t restarts = 4;
    Oracle oracle{Method::monte_carlo, 2000, 0};
};

// Maximises E|sum a_i R_i|/(n+1) over scalar a with |a_i| <= 1 and every
// partial sum |a_0 + ... + a_k| <= C. Restart 0 starts from a = 1, restart 1
// from alternating signs, the rest at random (all projected onto the
// constraints). best_ratio holds the normalised value.
[[nodiscard]] SearchResult mw_probe(const Distribution& dist, std::size_t n, double C, std::size_t budget,
                                    std::uint64_t seed, const ProbeOptions& options = {}, ExecPolicy policy = {});

// Projection used by mw_probe: clip to [-1,1], then pull each partial sum back
// into [-C, C] by shrinking the current entry.
void project_partial_sums(std::span<double> a, double C) noexcept;

} // namespace prodwalk
