#include "prodwalk/coefficients.hpp"

#include "prodwalk/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace prodwalk {

std::string_view to_string(Norm n) noexcept {
    switch (n) {
    case Norm::l1: return "l1";
    case Norm::l2: return "l2";
    case Norm::linf: return "linf";
    }
    return "l1";
}

Norm parse_norm(std::string_view s) {
    if (s == "l1") return Norm::l1;
    if (s == "l2") return Norm::l2;
    if (s == "linf") return Norm::linf;
    throw Error(ErrorCode::InvalidArgument, "unknown norm '" + std::string(s) + "' (expected l1, l2 or linf)");
}

double norm_of(Norm norm, std::span<const double> x) noexcept {
    if (x.size() == 1) return std::abs(x[0]);
    switch (norm) {
    case Norm::l1: {
        double s = 0.0;
        for (double v : x) s += std::abs(v);
        return s;
    }
    case Norm::l2: {
        double s = 0.0;
        for (double v : x) s += v * v;
        return std::sqrt(s);
    }
    case Norm::linf: {
        double s = 0.0;
        for (double v : x) s = std::max(s, std::abs(v));
        return s;
    }
    }
    return 0.0;
}

CoefficientVector::CoefficientVector(Norm norm, std::size_t dim, std::vector<double> data)
    : norm_(norm), dim_(dim), data_(std::move(data)) {
    PRODWALK_REQUIRE(dim_ >= 1, ErrorCode::InvalidArgument, "coefficient dimension must be >= 1");
    PRODWALK_REQUIRE(!data_.empty() && data_.size() % dim_ == 0, ErrorCode::InvalidArgument,
                     "coefficient data must hold a whole number of points");
    PRODWALK_REQUIRE(std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); }),
                     ErrorCode::InvalidArgument, "coefficients must be finite");
}

CoefficientVector CoefficientVector::scalars(std::vector<double> a, Norm norm) {
    return CoefficientVector(norm, 1, std::move(a));
}

double CoefficientVector::l1_mass() const noexcept {
    double s = 0.0;
    for (std::size_t i = 0; i < size(); ++i) s += norm_of(i);
    return s;
}

CoefficientVector CoefficientVector::scaled(double t) const {
    std::vector<double> d(data_);
    for (auto& v : d) v *= t;
    return CoefficientVector(norm_, dim_, std::move(d));
}

} // namespace prodwalk
