#include "dbench/transversality.hpp"

#include <cmath>
#include <numbers>

namespace dbench {

TransversalityVerdict transversality_summary(int c1, int rank, int genus) {
    if (rank < 1) throw PreconditionError("transversality: rank must be positive");
    if (genus < 0) throw PreconditionError("transversality: genus must be nonnegative");
    constexpr double two_pi = 2.0 * std::numbers::pi;
    TransversalityVerdict v;
    v.euler = 2 - 2 * genus;
    v.euler_term = two_pi * v.euler;
    if (rank > 1) {
        v.reason = "θ_E not determined by c₁ for rank > 1";
        return v;
    }
    v.exact = true;
    v.margin_units = static_cast<long long>(c1) + v.euler;
    v.integral_theta = two_pi * c1;
    v.margin = two_pi * static_cast<double>(v.margin_units);
    v.transversal = v.margin_units > 0;
    v.reason = v.transversal ? "c1 + chi > 0" : "c1 + chi <= 0";
    return v;
}

TransversalityVerdict transversality_sampled(const TorusGeometry& g, const HermitianBundle& b,
                                             std::optional<int> euler) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    const CurvatureData cd = curvature_data(g, b);
    TransversalityVerdict v;
    v.integral_theta = integrate(g, cd.theta);
    v.euler = euler ? *euler : static_cast<int>(std::lround(integrate(g, cd.K) / two_pi));
    v.euler_term = two_pi * v.euler;
    v.margin = v.integral_theta + v.euler_term;
    const double tol = 1e-9 * (std::abs(v.integral_theta) + two_pi);
    v.transversal = v.margin > tol;
    v.reason = v.transversal ? "positive curvature margin" : "margin not positive";
    return v;
}

}  // namespace dbench
