#pragma once

#include "dbench/gauge.hpp"
#include "dbench/geometry.hpp"
#include "dbench/sparse.hpp"

namespace dbench {

enum class Grading { Plus, Minus };

/// Section of S = E + Lambda^{0,1}E; minus part stored in the unit coframe.
/// Components are site-major: index s * rank + a.
struct GradedSection {
    int rank = 1;
    CVec plus, minus;

    CVec stacked() const;
    static GradedSection unstack(const CVec& v, int rank);
};

/// Links used for sections of the given grading. The minus grading carries the
/// coframe rotation: U^-_x = U_x e^{-i h1 u_y}, U^-_y = U_y e^{i h2 u_x} with the
/// derivatives of u taken at edge midpoints.
HermitianBundle graded_links(const TorusGeometry& g, const HermitianBundle& b, Grading gr);

/// Forward covariant difference along x (dir 0) or y (dir 1), unweighted.
CsrMatrix covariant_difference(const TorusGeometry& g, const HermitianBundle& b, int dir);

/// D+ = e^{-u} (nabla_x + i nabla_y): E -> Lambda^{0,1}E.
LinearMap dplus(const TorusGeometry& g, const HermitianBundle& b);
/// dbar = D+ / sqrt 2.
LinearMap dbar(const TorusGeometry& g, const HermitianBundle& b);
/// D- as the exact weighted adjoint of D+.
LinearMap dminus(const TorusGeometry& g, const HermitianBundle& b);
/// [[0, D-], [D+, 0]] on the stacked (plus, minus) vector.
LinearMap full_dirac(const TorusGeometry& g, const HermitianBundle& b);
/// Grading operator diag(1, -1) on stacked vectors.
LinearMap grading_operator(const TorusGeometry& g, int rank);
/// e^{-2u} sum_j nabla_j^H nabla_j with the links of the given grading.
LinearMap connection_laplacian(const TorusGeometry& g, const HermitianBundle& b, Grading gr);
/// Pointwise curvature endomorphism R+ or R- as a block-diagonal map.
LinearMap curvature_operator(const TorusGeometry& g, const CurvatureData& c, Grading gr);

/// ||(D^2 - nabla*nabla - R) s|| / ||s|| in the area-weighted norm.
double bochner_residual(const TorusGeometry& g, const HermitianBundle& b, const GradedSection& s);
double bochner_residual(const TorusGeometry& g, const HermitianBundle& b, const CurvatureData& c,
                        const GradedSection& s);

/// Clifford multiplication by v given in orthonormal-frame components (v1, v2):
/// plus -> minus: a s+, minus -> plus: -conj(a) s-, a = v1 + i v2.
GradedSection clifford_mul(const TorusGeometry& g, const RVec& v1, const RVec& v2, const GradedSection& s);

/// Orthonormal-frame components of grad phi from forward differences.
void gradient_frame(const TorusGeometry& g, const ScalarField& phi, RVec& v1, RVec& v2);

/// D*_phi s = e^{phi} D (e^{-phi} s): the exact adjoint of D in the e^{-phi} dA product.
GradedSection weighted_adjoint_apply(const TorusGeometry& g, const HermitianBundle& b, const ScalarField& phi,
                                     const GradedSection& s);
/// D s - grad(phi) . s with the Clifford product; agrees with the exact form to O(h).
GradedSection weighted_adjoint_clifford(const TorusGeometry& g, const HermitianBundle& b, const ScalarField& phi,
                                        const GradedSection& s);
/// Exact adjoint of a half operator in the e^{-phi} dA product, as a map.
LinearMap weighted_adjoint(const LinearMap& a, const ScalarField& phi, int rank);

/// Hermitian hopping average (1/4) sum_j (T_j + T_j^H) with the links of E.
/// Expectation ~1 on smooth sections and ~0 on the lattice doubler species.
CsrMatrix taste_operator(const TorusGeometry& g, const HermitianBundle& b);

/// Terms of sum |D*_phi s|^2 e^{-phi} dA >= sum (lap + 2 lambda)|s|^2 e^{-phi} dA.
/// For a section of one grading D*_phi reduces to the adjoint of the half operator
/// into that grading.
struct InequalityTerms {
    double lhs = 0, rhs = 0, norm2 = 0;  // norm2 = ||s||_phi^2
    double slack() const { return lhs - rhs; }
};

InequalityTerms weighted_inequality(const TorusGeometry& g, const HermitianBundle& b, const ScalarField& phi,
                                    const ScalarField& lap_phi, const ScalarField& lambda, const GradedSection& s);

double section_norm2(const TorusGeometry& g, const GradedSection& s);
double weighted_norm2(const TorusGeometry& g, const ScalarField& phi, const CVec& v, int rank);

}  // namespace dbench
