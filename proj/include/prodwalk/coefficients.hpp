#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace prodwalk {

enum class Norm { l1, l2, linf };

[[nodiscard]] std::string_view to_string(Norm n) noexcept;
[[nodiscard]] Norm parse_norm(std::string_view s); // throws InvalidArgument

[[nodiscard]] double norm_of(Norm norm, std::span<const double> x) noexcept;

// v_0..v_n, each a point of R^d, stored row-major.
class CoefficientVector {
public:
    CoefficientVector(Norm norm, std::size_t dim, std::vector<double> data);

    // Scalar coefficients a_0..a_n under |.|.
    static CoefficientVector scalars(std::vector<double> a, Norm norm = Norm::l1);

    [[nodiscard]] Norm norm() const noexcept { return norm_; }
    [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
    [[nodiscard]] std::size_t size() const noexcept { return data_.size() / dim_; } // n + 1
    [[nodiscard]] std::size_t n() const noexcept { return size() - 1; }

    [[nodiscard]] std::span<const double> operator[](std::size_t i) const noexcept {
        return std::span<const double>(data_).subspan(i * dim_, dim_);
    }
    [[nodiscard]] std::span<const double> data() const noexcept { return data_; }
    [[nodiscard]] std::span<double> mutable_data() noexcept { return data_; }

    [[nodiscard]] double norm_of(std::size_t i) const noexcept { return prodwalk::norm_of(norm_, (*this)[i]); }

    // sum_i ||v_i||
    [[nodiscard]] double l1_mass() const noexcept;

    [[nodiscard]] CoefficientVector scaled(double t) const;

private:
    Norm norm_;
    std::size_t dim_;
    std::vector<double> data_;
};

} // namespace prodwalk
