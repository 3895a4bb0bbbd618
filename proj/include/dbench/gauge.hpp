#pragma once

#include "dbench/common.hpp"
#include "dbench/geometry.hpp"

#include <cstdint>

namespace dbench {

/// Lattice gauge field: one r x r unitary per +x and +y edge. Link U_x(s) maps the
/// fibre at s + x to the fibre at s, so the covariant difference is
/// (U_x(s) psi(s + x) - psi(s)) / h1.
struct HermitianBundle {
    int rank = 1;
    int sites = 0;
    CVec ux, uy;  // row-major r x r per site

    cplx* Ux(int s) { return ux.data() + static_cast<std::size_t>(s) * rank * rank; }
    cplx* Uy(int s) { return uy.data() + static_cast<std::size_t>(s) * rank * rank; }
    const cplx* Ux(int s) const { return ux.data() + static_cast<std::size_t>(s) * rank * rank; }
    const cplx* Uy(int s) const { return uy.data() + static_cast<std::size_t>(s) * rank * rank; }
};

struct CurvatureData {
    int rank = 1;
    CVec F;             // per plaquette (base corner index), Hermitian density r x r
    ScalarField theta;  // smallest eigenvalue of the site curvature density
    ScalarField Theta;  // largest
    CVec Rplus;         // per site r x r: -F_site
    CVec Rminus;        // per site r x r: F_site + K
    ScalarField K;
    ScalarField lambdaSplus, lambdaSminus, lambdaS;
};

HermitianBundle trivial_bundle(const TorusGeometry& g, int r = 1);
HermitianBundle constant_curvature_bundle(const TorusGeometry& g, int c1, int r = 1);
HermitianBundle random_bundle(const TorusGeometry& g, int c1, double roughness, std::uint64_t seed, int r = 1);

/// Plaquette holonomy based at corner s, transported around s -> s+x -> s+x+y -> s+y -> s.
void plaquette(const TorusGeometry& g, const HermitianBundle& b, int s, cplx* out);
/// Principal-branch phase of det of every plaquette holonomy.
RVec plaquette_phases(const TorusGeometry& g, const HermitianBundle& b);
int chern_number(const TorusGeometry& g, const HermitianBundle& b);
CurvatureData curvature_data(const TorusGeometry& g, const HermitianBundle& b);

/// Random per-site unitary gauge transformation U_x(s) -> W(s) U_x(s) W(s+x)^H.
HermitianBundle gauge_transform(const TorusGeometry& g, const HermitianBundle& b, const CVec& w);
CVec random_site_unitaries(int sites, int r, std::uint64_t seed);
double max_unitarity_defect(const HermitianBundle& b);

}  // namespace dbench
