#include "prodwalk/certificates.hpp"

#include "prodwalk/error.hpp"

#include <algorithm>
#include <cmath>

namespace prodwalk {
namespace {

constexpr double kEpsMatchTol = 1e-12;

void require_lambda(double lambda) {
    PRODWALK_REQUIRE(std::isfinite(lambda) && lambda >= 0.0 && lambda < 1.0, ErrorCode::LambdaOutOfRange,
                     "lambda must lie in [0,1)");
}

// (1 - lambda^m)/(1 - lambda) for m >= 0, without cancellation for lambda near 1.
double geometric_sum(double lambda, double m) {
    if (m <= 0.0) return 0.0;
    return -std::expm1(m * std::log(lambda)) / (1.0 - lambda);
}

// log of the left side of the k inequality minus log of the right side.
long double k_margin(long double log_lambda, long double log_rhs, long k) {
    return std::log(static_cast<long double>(k)) + static_cast<long double>(2 * k - 2) * log_lambda - log_rhs;
}

} // namespace

std::string_view to_string(Theorem t) noexcept {
    return t == Theorem::thm1 ? "thm1" : "thm3";
}

double epsilon_default(double lambda, double mu) {
    require_lambda(lambda);
    PRODWALK_REQUIRE(mu > 0.0, ErrorCode::NonpositiveMu, "mu must be positive");
    const double gap = 1.0 - lambda;
    return gap * gap * std::min(mu, 1.0) / 256.0;
}

Ledger ledger_indest(double p, double mu, double lambda, double eps, std::size_t n) {
    require_lambda(lambda);
    PRODWALK_REQUIRE(eps > 0.0, ErrorCode::InvalidArgument, "eps must be positive");
    PRODWALK_REQUIRE(eps < 0.125, ErrorCode::EpsTooLarge, "eps must be < 1/8");
    PRODWALK_REQUIRE(p > 0.0 && p <= 1.0, ErrorCode::InvalidArgument, "p must lie in (0,1]");

    Ledger ledger;
    ledger.alpha = p / 16.0;
    ledger.beta = std::min(ledger.alpha / 2.0, mu * p / 32.0);
    const double scale = 4.0 * p * eps / (1.0 - lambda);
    ledger.c.reserve(n);
    for (std::size_t k = 1; k <= n; ++k) ledger.c.push_back(scale * geometric_sum(lambda, static_cast<double>(k)));
    ledger.c_sup = scale / (1.0 - lambda);
    return ledger;
}

long find_k(double lambda, double mu, double A) {
    PRODWALK_REQUIRE(std::isfinite(lambda) && lambda > 0.0 && lambda < 1.0, ErrorCode::LambdaOutOfRange,
                     "lambda must lie in (0,1)");
    PRODWALK_REQUIRE(mu > 0.0, ErrorCode::NonpositiveMu, "mu must be positive");
    PRODWALK_REQUIRE(A > 0.0 && std::isfinite(A), ErrorCode::InvalidArgument, "A must be positive");

    const long double gap = 1.0L - static_cast<long double>(lambda);
    const long double log_lambda = std::log(static_cast<long double>(lambda));
    const long double log_rhs = 3.0L * std::log(static_cast<long double>(mu)) + 2.0L * std::log(gap) -
                                17.0L * std::log(2.0L) - std::log(static_cast<long double>(A));

    // The margin rises then falls in k, so the first non-positive entry of a
    // forward scan is the minimum.
    for (long k = 1; k <= kMaxK; ++k) {
        if (k_margin(log_lambda, log_rhs, k) <= 0.0L) {
            // Re-check the straddling pair directly in extended precision when
            // the log-space margin is within rounding of zero.
            const auto direct = [&](long kk) {
                const long double lhs = std::ldexp(1.0L, 17) / (gap * gap) * static_cast<long double>(kk) *
                                        std::pow(static_cast<long double>(lambda), static_cast<long double>(2 * kk - 2)) *
                                        static_cast<long double>(A);
                const long double rhs = std::pow(static_cast<long double>(mu), 3.0L);
                return lhs <= rhs;
            };
            if (k > 1 && std::abs(k_margin(log_lambda, log_rhs, k - 1)) < 1e-15L && direct(k - 1)) return k - 1;
            if (std::abs(k_margin(log_lambda, log_rhs, k)) < 1e-15L && !direct(k)) continue;
            return k;
        }
    }
    throw Error(ErrorCode::KOverflow, "no k <= 10^6 satisfies the truncation inequality");
}

Ledger ledger_indest2(double mu, double lambda, double A, long k, std::size_t n) {
    PRODWALK_REQUIRE(k >= 1, ErrorCode::InvalidK, "k must be >= 1");
    require_lambda(lambda);
    PRODWALK_REQUIRE(mu > 0.0, ErrorCode::NonpositiveMu, "mu must be positive");

    Ledger ledger;
    ledger.alpha = mu / 64.0;
    ledger.beta = mu * mu * ledger.alpha / (4.0 * static_cast<double>(k));
    // sum_{j=k}^{i} lambda^(j+k-2) = lambda^(2k-2) (1 - lambda^(i-k+1))/(1 - lambda)
    const double lead = 256.0 * A / (1.0 - lambda) *
                        (lambda == 0.0 ? (k == 1 ? 1.0 : 0.0) : std::exp(static_cast<double>(2 * k - 2) * std::log(lambda)));
    ledger.c.reserve(n);
    for (std::size_t i = 1; i <= n; ++i) {
        const auto ii = static_cast<long>(i);
        ledger.c.push_back(ii < k ? 0.0 : lead * geometric_sum(lambda, static_cast<double>(ii - k + 1)));
    }
    ledger.c_sup = lead / (1.0 - lambda);
    return ledger;
}

Certificate certify_thm1(const MomentProfile& profile, std::size_t ledger_length) {
    const double eps = epsilon_default(profile.lambda, profile.mu);
    PRODWALK_REQUIRE(std::abs(profile.eps - eps) <= kEpsMatchTol * eps, ErrorCode::ProfileEpsMismatch,
                     "profile eps does not equal (1-lambda)^2 min{mu,1}/256");

    Certificate cert;
    cert.theorem = Theorem::thm1;
    cert.inputs.lambda = profile.lambda;
    cert.inputs.mu = profile.mu;
    cert.inputs.p = profile.p_eps;
    cert.inputs.eps = profile.eps;
    if (profile.p_eps <= 0.0) {
        cert.applicable = false;
        cert.reason = "p(eps)=0";
        cert.c = 0.0;
        return cert;
    }
    cert.ledger = ledger_indest(profile.p_eps, profile.mu, profile.lambda, profile.eps, ledger_length);
    cert.c = std::min(profile.mu, 1.0) * profile.p_eps / 64.0;
    cert.applicable = true;
    cert.reason = "p(eps)>0";
    return cert;
}

Certificate certify_noniid2(const MomentProfile& profile, std::size_t ledger_length) {
    PRODWALK_REQUIRE(profile.mu > 0.0, ErrorCode::NonpositiveMu, "mu must be positive");
    PRODWALK_REQUIRE(profile.tail_A <= profile.mu / 4.0, ErrorCode::TruncationInvalid,
                     "tail(A) exceeds mu/4 at the stored A");

    Certificate cert;
    cert.theorem = Theorem::thm3;
    cert.inputs.lambda = profile.lambda;
    cert.inputs.mu = profile.mu;
    cert.inputs.A = profile.A;
    cert.inputs.k = find_k(profile.lambda, profile.mu, profile.A);
    cert.ledger = ledger_indest2(profile.mu, profile.lambda, profile.A, cert.inputs.k, ledger_length);
    cert.c = profile.mu * profile.mu * profile.mu / (512.0 * static_cast<double>(cert.inputs.k));
    cert.applicable = true;
    cert.reason = "tail(A)<=mu/4";
    return cert;
}

std::vector<Certificate> certify_all(const Distribution& dist, std::size_t ledger_length) {
    // lambda and mu do not depend on (eps, A); a first pass fixes them.
    const MomentProfile base = moment_profile(dist, 1.0, 1.0);
    const double eps = epsilon_default(base.lambda, base.mu);
    std::vector<Certificate> out;
    MomentProfile thm1_profile = moment_profile(dist, eps, 1.0);
    thm1_profile.lambda = base.lambda;
    thm1_profile.mu = base.mu;
    out.push_back(certify_thm1(thm1_profile, ledger_length));
    double A = 0.0;
    try {
        A = choose_truncation(dist, base.mu);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::NoFiniteTruncation) throw;
        return out;
    }
    MomentProfile thm3_profile = moment_profile(dist, eps, A);
    thm3_profile.lambda = base.lambda;
    thm3_profile.mu = base.mu;
    try {
        out.push_back(certify_noniid2(thm3_profile, ledger_length));
    } catch (const Error& e) {
        if (e.code() != ErrorCode::KOverflow) throw;
        // lambda too close to one: report the gate instead of dropping the thm1 result
        Certificate cert;
        cert.theorem = Theorem::thm3;
        cert.inputs.lambda = base.lambda;
        cert.inputs.mu = base.mu;
        cert.inputs.A = A;
        cert.reason = "k>10^6";
        out.push_back(cert);
    }
    return out;
}

double best_constant(const std::vector<Certificate>& certs) noexcept {
    double best = 0.0;
    for (const auto& c : certs) {
        if (c.applicable) best = std::max(best, c.c);
    }
    return best;
}

} // namespace prodwalk
