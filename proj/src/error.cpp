#include "catscatter/error.hpp"

namespace catscatter {

std::string_view to_string(ErrorKind kind)
{
    switch (kind) {
    case ErrorKind::non_convergence: return "NonConvergence";
    case ErrorKind::non_finite_integrand: return "NonFiniteIntegrand";
    case ErrorKind::unsupported_dimension: return "UnsupportedDimension";
    case ErrorKind::no_pure_state: return "NoPureState";
    case ErrorKind::unsupported: return "Unsupported";
    case ErrorKind::invalid_state: return "InvalidState";
    case ErrorKind::invalid_cat_separation: return "InvalidCatSeparation";
    case ErrorKind::wide_limit_has_no_density: return "WideLimitHasNoDensity";
    case ErrorKind::negative_total: return "NegativeTotal";
    case ErrorKind::missing_sigma: return "MissingSigma";
    case ErrorKind::degenerate_denominator: return "DegenerateDenominator";
    case ErrorKind::too_few_points: return "TooFewPoints";
    case ErrorKind::flat_distribution: return "FlatDistribution";
    case ErrorKind::input_error: return "InputError";
    case ErrorKind::validation_failure: return "ValidationFailure";
    }
    return "Unknown";
}

}  // namespace catscatter
