#include "dbench/geometry.hpp"

#include <cmath>
#include <string>

namespace dbench {

RVec TorusGeometry::weights(int r) const {
    RVec w(static_cast<std::size_t>(sites() * r));
    for (int s = 0; s < sites(); ++s)
        for (int a = 0; a < r; ++a) w[s * r + a] = area[s];
    return w;
}

TorusGeometry build_torus(double L1, double L2, int N1, int N2, const ScalarField& u) {
    if (!(L1 > 0) || !(L2 > 0)) throw PreconditionError("build_torus: side lengths must be positive");
    if (N1 < 8 || N2 < 8) throw PreconditionError("build_torus: grid too coarse (need at least 8 per axis)");
    if (u.size() != static_cast<std::size_t>(N1) * N2)
        throw PreconditionError("build_torus: conformal factor has wrong length");
    TorusGeometry g;
    g.L1 = L1;
    g.L2 = L2;
    g.N1 = N1;
    g.N2 = N2;
    g.h1 = L1 / N1;
    g.h2 = L2 / N2;
    g.u = u;
    g.area.resize(u.size());
    for (std::size_t s = 0; s < u.size(); ++s) {
        if (!std::isfinite(u[s])) throw PreconditionError("build_torus: conformal factor not finite");
        g.area[s] = std::exp(2.0 * u[s]) * g.h1 * g.h2;
    }
    g.volume = par::serial::sum(g.area);
    return g;
}

TorusGeometry build_torus(double L1, double L2, int N1, int N2,
                          const std::function<double(double, double)>& u) {
    if (N1 < 8 || N2 < 8) throw PreconditionError("build_torus: grid too coarse (need at least 8 per axis)");
    ScalarField us(static_cast<std::size_t>(N1) * N2);
    const double h1 = L1 / N1, h2 = L2 / N2;
    for (int i = 0; i < N1; ++i)
        for (int j = 0; j < N2; ++j) us[i * N2 + j] = u(i * h1, j * h2);
    return build_torus(L1, L2, N1, N2, us);
}

CsrMatrix flat_laplacian(const TorusGeometry& g) {
    const double cx = 1.0 / (g.h1 * g.h1), cy = 1.0 / (g.h2 * g.h2);
    CsrBuilder b(g.sites(), g.sites());
    for (int s = 0; s < g.sites(); ++s) {
        b.add(s, g.xp(s), cx);
        b.add(s, g.xm(s), cx);
        b.add(s, g.yp(s), cy);
        b.add(s, g.ym(s), cy);
        b.add(s, s, -2.0 * (cx + cy));
    }
    return b.build();
}

ScalarField gaussian_curvature(const TorusGeometry& g) {
    const double cx = 1.0 / (g.h1 * g.h1), cy = 1.0 / (g.h2 * g.h2);
    ScalarField K(static_cast<std::size_t>(g.sites()));
    const auto& u = g.u;
#pragma omp parallel for schedule(static)
    for (int s = 0; s < g.sites(); ++s) {
        const double lap = cx * (u[g.xp(s)] + u[g.xm(s)] - 2 * u[s]) + cy * (u[g.yp(s)] + u[g.ym(s)] - 2 * u[s]);
        K[s] = -std::exp(-2.0 * u[s]) * lap;
    }
    return K;
}

LinearMap laplace_beltrami(const TorusGeometry& g) {
    CVec inv(static_cast<std::size_t>(g.sites()));
    for (int s = 0; s < g.sites(); ++s) inv[s] = std::exp(-2.0 * g.u[s]);
    LinearMap m;
    m.m = diag_left(inv, flat_laplacian(g));
    m.w_dom = g.area;
    m.w_cod = g.area;
    m.dom_tag = m.cod_tag = "scalar";
    return m;
}

void check_owned(const TorusGeometry& g, const ScalarField& f) {
    if (f.size() != static_cast<std::size_t>(g.sites()))
        throw PreconditionError("scalar field does not belong to this geometry");
}

double integrate(const TorusGeometry& g, const ScalarField& f) {
    check_owned(g, f);
    return par::dot(g.area, f, RVec(f.size(), 1.0));
}

CylinderGrid build_cylinder(double T, int Nt, int cross_N, const RVec& delta, double cross_L, Wall wall) {
    if (!(T >= 4.0)) throw PreconditionError("build_cylinder: T must be at least 4 for the cutoff layout");
    if (Nt < 8 || cross_N < 4) throw PreconditionError("build_cylinder: grid too coarse");
    if (delta.empty()) throw PreconditionError("build_cylinder: need one slope per end");
    for (double d : delta)
        if (!(d >= 0)) throw PreconditionError("build_cylinder: slopes must be nonnegative");
    if (!(cross_L > 0)) throw PreconditionError("build_cylinder: cross-section side must be positive");
    CylinderGrid c;
    c.T = T;
    c.Nt = Nt;
    c.Nc = cross_N;
    c.Lc = cross_L;
    c.ht = T / Nt;
    c.hc = cross_L / cross_N;
    c.delta = delta;
    c.wall = wall;
    if (c.tau_of_layer(0) > c.k_tau) throw PreconditionError("build_cylinder: compact region marker is empty");
    return c;
}

CsrMatrix cylinder_laplacian(const CylinderGrid& c, int n_layers) {
    if (n_layers < 2 || n_layers > c.Nt) throw PreconditionError("cylinder_laplacian: bad layer count");
    const int nc = c.Nc, cs = c.cross_sites();
    const double ct = 1.0 / (c.ht * c.ht), cc = 1.0 / (c.hc * c.hc);
    const int n = n_layers * cs;
    CsrBuilder b(n, n);
    for (int k = 0; k < n_layers; ++k)
        for (int a = 0; a < nc; ++a)
            for (int q = 0; q < nc; ++q) {
                const int s = (k * nc + a) * nc + q;
                double diag = -2.0 * ct - 4.0 * cc;
                b.add(s, (k * nc + (a + 1) % nc) * nc + q, cc);
                b.add(s, (k * nc + (a + nc - 1) % nc) * nc + q, cc);
                b.add(s, (k * nc + a) * nc + (q + 1) % nc, cc);
                b.add(s, (k * nc + a) * nc + (q + nc - 1) % nc, cc);
                if (k + 1 < n_layers) b.add(s, s + cs, ct);
                else diag -= ct;  // antisymmetric ghost at the cut
                if (k > 0) b.add(s, s - cs, ct);
                else diag += (c.wall == Wall::Reflecting ? ct : -ct);
                b.add(s, s, diag);
            }
    return b.build();
}

double integrate(const CylinderGrid& c, const ScalarField& f) {
    if (f.size() != static_cast<std::size_t>(c.sites()))
        throw PreconditionError("scalar field does not belong to this cylinder");
    return par::sum(f) * c.cell_volume();
}

}  // namespace dbench
