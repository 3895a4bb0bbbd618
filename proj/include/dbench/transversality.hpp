#pragma once

#include "dbench/gauge.hpp"
#include "dbench/geometry.hpp"

#include <optional>
#include <string>

namespace dbench {

/// Curvature-integral criterion: int theta_E + 2 pi chi(M) > 0 is sufficient for
/// automatic transversality. The verdict is never "not transversal".
struct TransversalityVerdict {
    double integral_theta = 0;
    double euler_term = 0;  // 2 pi chi
    double margin = 0;
    int euler = 0;
    bool exact = false;            // summary form: margin = 2 pi (c1 + chi) exactly
    long long margin_units = 0;    // c1 + chi when exact
    bool transversal = false;
    std::string reason;

    std::string verdict() const { return transversal ? "transversal" : "inconclusive"; }
};

/// Integer form for a line bundle: int theta_E = 2 pi c1, chi = 2 - 2 genus.
TransversalityVerdict transversality_summary(int c1, int rank, int genus);

/// Sampled form: theta_E from the bundle curvature, chi from Gauss-Bonnet unless
/// supplied. A margin within 1e-9 (|int theta| + 2 pi) of zero is inconclusive.
TransversalityVerdict transversality_sampled(const TorusGeometry& g, const HermitianBundle& b,
                                             std::optional<int> euler = std::nullopt);

}  // namespace dbench
