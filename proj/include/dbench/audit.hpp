#pragma once

#include "dbench/corpus.hpp"
#include "dbench/l2solve.hpp"
#include "dbench/spectral.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace dbench {

/// Worst case of the weighted inequality over a set of sections. Scaled slack is
/// slack / (h ||s||_phi^2); a violation is a scaled slack below -c_tol.
struct InequalitySummary {
    int tested = 0;
    int violations = 0;
    double worst_scaled_slack = 0;
    std::string worst_kind;
};

struct SolveSummary {
    std::string side;  // "Dplus" or "Dminus"
    std::string rhs_kind;
    EstimateStatus status = EstimateStatus::NotEvaluable;
    double lhs = 0, rhs = 0, residual = 0, obstruction = 0, minimality = 0, denominator_min = 0;
    int cokernel_dim = 0, kernel_dim = 0, iterations = 0;
};

struct AuditOptions {
    double c_tol = 0;
    int sections = 100;
    bool bounds = true;
    bool inequality = true;
    bool solve = true;
    EigenOptions eig;
};

struct AuditRecord {
    std::string label;
    int index = 0;
    int N = 0, c1 = 0, rank = 1;
    double roughness = 0, amplitude = 0, h = 0;
    std::string weight_kind;
    BoundReport bounds;
    InequalitySummary ungraded, graded;
    std::vector<SolveSummary> solves;
    bool pass() const;
};

/// Random test sections: white noise, smooth random, and smooth random times
/// e^{phi}, cycling with j.
GradedSection audit_section(const TorusGeometry& g, int rank, const ScalarField& phi, int j, std::uint64_t seed);
std::string audit_section_kind(int j);

InequalitySummary inequality_suite(const TorusGeometry& g, const HermitianBundle& b, const ScalarField& phi,
                                   int sections, bool graded, double c_tol, std::uint64_t seed);

/// Bound report, weighted inequality suite and graded minimal-norm solves for one
/// corpus instance. Solves use the Poisson weight of lambda_{S-} for D+ and of
/// lambda_{S+} for D-, and run only when the resulting denominator is positive.
AuditRecord audit_instance(const CorpusInstance& ci, const AuditOptions& opt);

/// Calibration of c_tol on the trivial bundle: the largest modulus of the low-mode
/// Bochner quadratic defect divided by h, over curved metrics of amplitude up to
/// 0.3 on the N x N grid, for both gradings and ranks 1 and 2.
double calibrate_c_tol(int N = 24, int metrics = 10, std::uint64_t seed = 500);

}  // namespace dbench
