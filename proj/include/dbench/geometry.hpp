#pragma once

#include "dbench/common.hpp"
#include "dbench/sparse.hpp"

#include <functional>

namespace dbench {

using ScalarField = RVec;

/// Periodic conformally flat torus, metric e^{2u}(dx^2 + dy^2).
/// Sites are stored row-major: site(ix, iy) = ix * N2 + iy.
struct TorusGeometry {
    double L1 = 0, L2 = 0;
    int N1 = 0, N2 = 0;
    double h1 = 0, h2 = 0;
    ScalarField u;
    ScalarField area;  // e^{2u} h1 h2
    double volume = 0;

    int sites() const { return N1 * N2; }
    int site(int ix, int iy) const {
        ix %= N1;
        iy %= N2;
        if (ix < 0) ix += N1;
        if (iy < 0) iy += N2;
        return ix * N2 + iy;
    }
    int ix(int s) const { return s / N2; }
    int iy(int s) const { return s % N2; }
    int xp(int s) const { return site(ix(s) + 1, iy(s)); }
    int xm(int s) const { return site(ix(s) - 1, iy(s)); }
    int yp(int s) const { return site(ix(s), iy(s) + 1); }
    int ym(int s) const { return site(ix(s), iy(s) - 1); }
    double x(int s) const { return ix(s) * h1; }
    double y(int s) const { return iy(s) * h2; }
    double h() const { return std::max(h1, h2); }
    /// Area weights repeated r times per site.
    RVec weights(int r) const;
};

TorusGeometry build_torus(double L1, double L2, int N1, int N2, const ScalarField& u);
TorusGeometry build_torus(double L1, double L2, int N1, int N2,
                          const std::function<double(double, double)>& u);

/// Flat 5-point Laplacian Delta_0 (unweighted, symmetric).
CsrMatrix flat_laplacian(const TorusGeometry& g);
/// K = -e^{-2u} Delta_0 u.
ScalarField gaussian_curvature(const TorusGeometry& g);
/// Delta = e^{-2u} Delta_0, self-adjoint in the area-weighted product.
LinearMap laplace_beltrami(const TorusGeometry& g);
double integrate(const TorusGeometry& g, const ScalarField& f);
void check_owned(const TorusGeometry& g, const ScalarField& f);

enum class Wall { Reflecting, Dirichlet };

/// Truncated cylinder [0, T] x (flat periodic 2-torus), cell-centred along the
/// axis: tau_k = (k + 1/2) T / N_t. Sites: (k * Nc + a) * Nc + b.
struct CylinderGrid {
    double T = 0;
    int Nt = 0;
    int Nc = 0;
    double Lc = 0;
    double ht = 0, hc = 0;
    RVec delta;             // per-end slope; one end is modelled
    double k_tau = 1.0;     // compact region marker: tau <= k_tau
    Wall wall = Wall::Reflecting;

    int sites() const { return Nt * Nc * Nc; }
    int cross_sites() const { return Nc * Nc; }
    int layer(int s) const { return s / (Nc * Nc); }
    double tau(int s) const { return (layer(s) + 0.5) * ht; }
    double tau_of_layer(int k) const { return (k + 0.5) * ht; }
    bool in_K(int s) const { return tau(s) <= k_tau; }
    double cell_volume() const { return ht * hc * hc; }
};

CylinderGrid build_cylinder(double T, int Nt, int cross_N, const RVec& delta,
                            double cross_L = 2.0 * 3.14159265358979323846, Wall wall = Wall::Reflecting);

/// Flat Laplacian on the first n_layers axial layers, homogeneous Dirichlet at the
/// face tau = n_layers * ht, wall condition at tau = 0.
CsrMatrix cylinder_laplacian(const CylinderGrid& c, int n_layers);
double integrate(const CylinderGrid& c, const ScalarField& f);

}  // namespace dbench
