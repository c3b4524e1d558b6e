#pragma once

// Certified lower-bound constants c with E||sum v_i R_i|| >= c sum ||v_i||.
//
// Two routes are implemented:
//   * small-ball route: needs P(X <= eps) > 0 at eps = (1-lambda)^2 min{mu,1}/256,
//     gives c = min{mu,1} p(eps) / 64;
//   * truncation route: needs E|X-1| 1{X >= A} <= mu/4, gives c = mu^3/(512 k)
//     with k the least positive integer such that
//     2^17 k lambda^(2k-2) A / (1-lambda)^2 <= mu^3.
// Each certificate carries the induction ledger (alpha, beta, c_1..c_n) so the
// positivity of every step can be audited.

#include "prodwalk/distributions.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace prodwalk {

enum class Theorem { thm1, thm3 };

[[nodiscard]] std::string_view to_string(Theorem t) noexcept;

struct Ledger {
    double alpha = 0.0;
    double beta = 0.0;
    std::vector<double> c; // c[i-1] holds c_i, i = 1..n

    // sup over all i >= 1 of c_i (the geometric limit, not just the stored head).
    double c_sup = 0.0;
};

struct CertificateInputs {
    double lambda = 0.0;
    double mu = 0.0;
    double p = 0.0;   // thm1 only
    double eps = 0.0; // thm1 only
    double A = 0.0;   // thm3 only
    long k = 0;       // thm3 only
};

struct Certificate {
    Theorem theorem = Theorem::thm1;
    CertificateInputs inputs;
    Ledger ledger;
    double c = 0.0;
    bool applicable = false;
    std::string reason;
};

inline constexpr long kMaxK = 1'000'000;
inline constexpr std::size_t kDefaultLedgerLength = 16;

// (1-lambda)^2 min{mu,1} / 256. Throws LambdaOutOfRange, NonpositiveMu.
[[nodiscard]] double epsilon_default(double lambda, double mu);

// alpha = p/16, beta = min{alpha/2, mu p/32},
// c_k = 4 p eps/(1-lambda) * (1 - lambda^k)/(1 - lambda).
[[nodiscard]] Ledger ledger_indest(double p, double mu, double lambda, double eps, std::size_t n);

// Least positive k with 2^17 k lambda^(2k-2) A/(1-lambda)^2 <= mu^3.
// Throws LambdaOutOfRange, NonpositiveMu, InvalidArgument (A <= 0), KOverflow.
[[nodiscard]] long find_k(double lambda, double mu, double A);

// alpha = mu/64, beta = mu^2 alpha/(4k); c_i = 0 for i < k,
// c_i = 2^8 A/(1-lambda) * sum_{j=k}^{i} lambda^(j+k-2) otherwise.
[[nodiscard]] Ledger ledger_indest2(double mu, double lambda, double A, long k, std::size_t n);

// Requires profile.eps == epsilon_default(lambda, mu) (ProfileEpsMismatch).
[[nodiscard]] Certificate certify_thm1(const MomentProfile& profile, std::size_t ledger_length = kDefaultLedgerLength);

// Requires tail(A) <= mu/4 (TruncationInvalid).
[[nodiscard]] Certificate certify_noniid2(const MomentProfile& profile,
                                          std::size_t ledger_length = kDefaultLedgerLength);

// Both certificates for a law: thm1 at the default eps, thm3 at
// choose_truncation(). thm3 is omitted if no truncation level exists and is
// marked inapplicable when k would exceed kMaxK.
[[nodiscard]] std::vector<Certificate> certify_all(const Distribution& dist,
                                                   std::size_t ledger_length = kDefaultLedgerLength);

// Largest applicable constant, 0 if none applies.
[[nodiscard]] double best_constant(const std::vector<Certificate>& certs) noexcept;

} // namespace prodwalk
