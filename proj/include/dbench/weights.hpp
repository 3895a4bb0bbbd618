#pragma once

#include "dbench/gauge.hpp"
#include "dbench/geometry.hpp"

#include <string>

namespace dbench {

/// Weight phi with its Laplacian and site-averaged squared gradient.
struct WeightFunction {
    ScalarField phi;
    ScalarField lap;    // Delta phi
    ScalarField grad2;  // |grad phi|^2
};

WeightFunction make_weight(const TorusGeometry& g, const ScalarField& phi);
/// Cylinder weight: reflecting ghost at tau = 0, linear extrapolation at tau = T.
WeightFunction make_weight(const CylinderGrid& c, const ScalarField& phi);

struct PoissonWeight {
    WeightFunction w;
    double residual = 0;  // max |Delta phi + 2 lambda - (2/Vol) int lambda|
    int iterations = 0;
};

/// Solves Delta phi = (2/Vol) int lambda - 2 lambda, area-weighted mean of phi zero.
PoissonWeight poisson_weight(const TorusGeometry& g, const ScalarField& lambdaS, double rtol = 1e-13,
                             int max_iter = 20000);

/// Pointwise Delta phi - (1 - 2/n)(1 + 1/eps)|grad phi|^2 + 2 lambda.
ScalarField positivity_field(const WeightFunction& w, const ScalarField& lambdaS, int n, double eps);
double positivity_margin(const WeightFunction& w, const ScalarField& lambdaS, int n, double eps);

/// C = n / (2(n-1) + (n-2) eps).
double C_constant(int n, double eps);

struct GroundState {
    double mu = 0;
    int layers = 0;     // axial layers of the subproblem (tau <= cut)
    ScalarField eta;    // on the subproblem sites, max eta = 1
    double eta_min = 0; // minimum over the subproblem
};

/// Smallest Dirichlet eigenpair of -Delta on tau <= cut (wall condition at 0).
GroundState dirichlet_ground_state(const CylinderGrid& c, double cut = 3.0);

/// Quintic smoothstep cutoff: 0 for tau <= 1, 1 for tau >= 2.
double cutoff(double tau);
double cutoff_d2_bound();

struct CylinderWeightParams {
    double alpha = 1.0;
    double beta = 0.0;   // measured: max(0, -min_K lambda)
    double gamma = 0.1;
    double eps = 100.0;
    double delta = 0.0;
    int n = 3;
    double mu = 0.0;
    double A = 0.0;      // 1 / ((1 - 2/n)(1 + 1/eps))
    double beta_cap = 0.0;  // gamma mu / (2 - 4/n)
};

struct CylinderWeightResult {
    bool success = false;
    WeightFunction w;
    CylinderWeightParams params;
    ScalarField margin;
    double alpha1 = 0;       // min of the margin
    int worst_site = -1;
    double worst_tau = 0;
    bool worst_in_K = false;
    double worst_lap = 0, worst_grad_term = 0, worst_curv_term = 0;
    std::string diagnosis;   // empty on success
};

/// Blended weight phi = gamma (1 - rho) phihat + rho h with phihat = -A log eta,
/// h = -delta tau. Requires lambda >= alpha outside K; failure is reported, not thrown.
CylinderWeightResult cylinder_weight(const CylinderGrid& c, const ScalarField& lambdaS, double alpha, int n,
                                     double eps, double gamma, double delta);

/// (sum |e^{-phi/2} f|^2 dA)^{1/2}, plus covariant first differences when order = 1.
double weighted_sobolev_norm(const TorusGeometry& g, const HermitianBundle& b, const CVec& f,
                             const ScalarField& phi, int order);
double weighted_sobolev_norm(const CylinderGrid& c, const ScalarField& f, const ScalarField& phi, int order);

}  // namespace dbench
