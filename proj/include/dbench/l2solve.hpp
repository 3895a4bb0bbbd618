#pragma once

#include "dbench/spectral.hpp"
#include "dbench/weights.hpp"

#include <string>

namespace dbench {

enum class EstimateStatus { Pass, Fail, NotEvaluable };

std::string to_string(EstimateStatus s);

struct SolveOptions {
    double tol = 1e-10;          // relative residual target of the normal equations
    int max_iter = 20000;
    int kernel_hint = 2;         // expected cokernel/kernel sizes, enlarged as needed
    bool check_minimality = true;
    EigenOptions eig;
};

struct SolveReport {
    CVec u;
    CVec f;
    ScalarField phi;
    RVec cod_weights;            // area weights of the codomain, per component
    int rank = 1;
    bool solvable = false;
    double obstruction = 0;      // ||P_coker f||_phi / ||f||_phi
    int cokernel_dim = 0;
    int kernel_dim = 0;
    double residual = 0;         // ||D u - f||_phi / ||f||_phi
    double minimality = 0;       // max |<u, k>_phi| / (||u|| ||k||) over kernel elements k
    int iterations = 0;
    double lhs = 0;              // sum |u|^2 e^{-phi} dA
    double rhs = 0;              // sum |f|^2 / denominator e^{-phi} dA
    ScalarField denominator;
    double denominator_min = 0;
    double tol_h = 0;
    bool has_denominator = false;
};

/// Minimal e^{-phi}-weighted-norm solution of D u = f. The normal equations are
/// solved for the conjugated operator e^{-phi/2} D e^{phi/2} in orthonormal
/// coordinates. f is tested against the cokernel first; a component above
/// 1e-8 ||f|| marks the problem as not solvable and no solve is attempted.
SolveReport solve_min_norm(const LinearMap& d, const CVec& f, const ScalarField& phi, int rank,
                           const SolveOptions& opt = {});

/// D v after removing from v its e^{-phi}-orthogonal projection onto the numerical
/// kernel of D (eigenvalues below the kernel threshold). The result lies in the
/// range of D and has no component along the near-null left singular vectors.
CVec image_of(const LinearMap& d, const CVec& v, const ScalarField& phi, int rank, const SolveOptions& opt = {});

/// Records rhs = sum |f|^2 / den e^{-phi} dA and the estimate allowance tol_h.
void attach_denominator(SolveReport& rep, const ScalarField& den, double tol_h);

/// Pass iff lhs <= rhs (1 + tol_h); NotEvaluable without a strictly positive
/// denominator or without a solution.
EstimateStatus verify_estimate(const SolveReport& rep);

}  // namespace dbench
