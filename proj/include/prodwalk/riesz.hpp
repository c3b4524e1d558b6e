#pragma once

// Riesz products Rbar_i(t) = prod_{j<=i} (1 + cos(n_j t)) over a lacunary
// frequency sequence and the circle average (1/2pi) int |sum a_i Rbar_i(t)| dt.

#include "prodwalk/parallel.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace prodwalk {

inline constexpr std::uint64_t kMaxGrid = std::uint64_t{1} << 28;
inline constexpr std::uint64_t kPointsPerHarmonic = 64;

struct LacunarySequence {
    std::vector<std::int64_t> terms;
    std::vector<double> ratios;      // terms[k+1]/terms[k]
    double summability_prefix = 0.0; // sum_k terms[k]/terms[k+1]; diagnostic only
};

// Throws NonpositiveEntry, NotIncreasing, RatioTooSmall (some ratio < 3).
[[nodiscard]] LacunarySequence validate_lacunary(std::span<const std::int64_t> seq);

struct QuadratureResult {
    double value = 0.0;
    std::uint64_t grid_size = 0;
    double refinement_delta = 0.0; // |value_N - value_2N| at the last doubling
    double l1_mass = 0.0;          // sum |a_i|
    double ratio = 0.0;            // value / l1_mass (0 when all a_i vanish)
};

// Periodic trapezoid rule from N = 64 (1 + sum_{j<=n} n_j), doubling until
// |v_N - v_2N| / max(v_2N, 1e-3 sum|a_i|) < tol. Throws
// CoefficientLengthMismatch, GridOverflow, InvalidArgument (tol <= 0).
[[nodiscard]] QuadratureResult riesz_l1(std::span<const double> a, const LacunarySequence& seq, double tol,
                                        ExecPolicy policy = {});

// Integrand value at t (exposed for tests).
[[nodiscard]] double riesz_combination(std::span<const double> a, const LacunarySequence& seq, double t);

struct SweepTrial {
    std::vector<double> coeffs;
    double ratio = 0.0;
    QuadratureResult quadrature;
};

struct SweepReport {
    std::vector<SweepTrial> trials;
    double min_ratio = 0.0;
    std::size_t argmin = 0;
    double max_ratio = 0.0;
    std::vector<std::size_t> histogram; // kHistogramBins equal bins over [0, 1], last bin closed
    std::uint64_t seed = 0;
    double tol = 0.0;
};

inline constexpr std::size_t kHistogramBins = 20;

// `trials` random unit-l1 vectors of length n+1, each integrated with
// riesz_l1. Trial k draws from Rng(subseed(seed, k)).
[[nodiscard]] SweepReport riesz_ratio_sweep(const LacunarySequence& seq, std::size_t n, std::size_t trials,
                                            std::uint64_t seed, double tol, ExecPolicy policy = {});

struct CrossModelCheck {
    double quadrature_ratio = 0.0;
    double model_ratio = 0.0; // i.i.d. 1 + cos(U) model, Monte Carlo
    double model_std_error = 0.0;
    double difference = 0.0;
};

// Numerical comparison of the circle average with the i.i.d. product model.
// Diagnostic only: no bound is certified.
[[nodiscard]] CrossModelCheck cross_model_check(std::span<const double> a, const LacunarySequence& seq, double tol,
                                                std::size_t samples, std::uint64_t seed, ExecPolicy policy = {});

} // namespace prodwalk
