#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace catscatter {

enum class ErrorKind {
    non_convergence,
    non_finite_integrand,
    unsupported_dimension,
    no_pure_state,
    unsupported,
    invalid_state,
    invalid_cat_separation,
    wide_limit_has_no_density,
    negative_total,
    missing_sigma,
    degenerate_denominator,
    too_few_points,
    flat_distribution,
    input_error,
    validation_failure,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library carries a kind so callers can branch
/// without string matching.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind)
    {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace catscatter
