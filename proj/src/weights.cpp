#include "dbench/weights.hpp"

#include "dbench/dirac.hpp"
#include "dbench/krylov.hpp"
#include "dbench/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace dbench {

WeightFunction make_weight(const TorusGeometry& g, const ScalarField& phi) {
    check_owned(g, phi);
    WeightFunction w;
    w.phi = phi;
    w.lap.resize(phi.size());
    w.grad2.resize(phi.size());
    const double cx = 1.0 / (g.h1 * g.h1), cy = 1.0 / (g.h2 * g.h2);
#pragma omp parallel for schedule(static)
    for (int s = 0; s < g.sites(); ++s) {
        const double xp = phi[g.xp(s)] - phi[s], xm = phi[s] - phi[g.xm(s)];
        const double yp = phi[g.yp(s)] - phi[s], ym = phi[s] - phi[g.ym(s)];
        const double e = std::exp(-2.0 * g.u[s]);
        w.lap[s] = e * (cx * (xp - xm) + cy * (yp - ym));
        w.grad2[s] = e * 0.5 * (cx * (xp * xp + xm * xm) + cy * (yp * yp + ym * ym));
    }
    return w;
}

WeightFunction make_weight(const CylinderGrid& c, const ScalarField& phi) {
    if (phi.size() != static_cast<std::size_t>(c.sites())) throw PreconditionError("weight does not belong to this cylinder");
    WeightFunction w;
    w.phi = phi;
    w.lap.resize(phi.size());
    w.grad2.resize(phi.size());
    const int nc = c.Nc, cs = c.cross_sites();
    const double ct = 1.0 / (c.ht * c.ht), cc = 1.0 / (c.hc * c.hc);
#pragma omp parallel for schedule(static)
    for (int s = 0; s < c.sites(); ++s) {
        const int k = s / cs, a = (s % cs) / nc, q = s % nc;
        const double up = k + 1 < c.Nt ? phi[s + cs] : 2 * phi[s] - phi[s - cs];
        const double dn = k > 0 ? phi[s - cs] : phi[s];
        const double ap = phi[(k * nc + (a + 1) % nc) * nc + q], am = phi[(k * nc + (a + nc - 1) % nc) * nc + q];
        const double qp = phi[(k * nc + a) * nc + (q + 1) % nc], qm = phi[(k * nc + a) * nc + (q + nc - 1) % nc];
        const double f = phi[s];
        w.lap[s] = ct * (up - 2 * f + dn) + cc * (ap + am + qp + qm - 4 * f);
        w.grad2[s] = 0.5 * (ct * ((up - f) * (up - f) + (f - dn) * (f - dn))
                            + cc * ((ap - f) * (ap - f) + (f - am) * (f - am) + (qp - f) * (qp - f) + (f - qm) * (f - qm)));
    }
    return w;
}

PoissonWeight poisson_weight(const TorusGeometry& g, const ScalarField& lambdaS, double rtol, int max_iter) {
    check_owned(g, lambdaS);
    const int n = g.sites();
    const double mean = 2.0 / g.volume * integrate(g, lambdaS);
    ScalarField rhs(static_cast<std::size_t>(n));
    for (int s = 0; s < n; ++s) rhs[s] = mean - 2.0 * lambdaS[s];
    const CsrMatrix lap0 = flat_laplacian(g);
    CVec b(static_cast<std::size_t>(n));
    for (int s = 0; s < n; ++s) b[s] = -std::exp(2.0 * g.u[s]) * rhs[s];
    const auto project = [](CVec& v) {
        cplx m{};
        for (const auto& z : v) m += z;
        m /= static_cast<double>(v.size());
        for (auto& z : v) z = cplx((z - m).real(), 0.0);
    };
    const Operator op = [&](const CVec& x, CVec& y) {
        lap0.apply(x, y);
        for (auto& z : y) z = -z;
    };
    const CgResult cg = conjugate_gradient(op, b, rtol, max_iter, project);
    ScalarField phi(static_cast<std::size_t>(n));
    for (int s = 0; s < n; ++s) phi[s] = cg.x[s].real();
    const double off = integrate(g, phi) / g.volume;
    for (auto& v : phi) v -= off;
    PoissonWeight out;
    out.w = make_weight(g, phi);
    out.iterations = cg.iterations;
    double scale = 1.0;
    for (int s = 0; s < n; ++s) {
        scale = std::max(scale, std::abs(rhs[s]));
        out.residual = std::max(out.residual, std::abs(out.w.lap[s] - rhs[s]));
    }
    if (!cg.converged || out.residual > 1e-9 * scale)
        throw SolverError("poisson_weight: conjugate gradients did not converge", out.residual);
    return out;
}

ScalarField positivity_field(const WeightFunction& w, const ScalarField& lambdaS, int n, double eps) {
    if (n < 2 || !(eps > 0)) throw PreconditionError("positivity_margin: need n >= 2 and eps > 0");
    if (lambdaS.size() != w.phi.size()) throw PreconditionError("positivity_margin: field size mismatch");
    const double coef = (1.0 - 2.0 / n) * (1.0 + 1.0 / eps);
    ScalarField m(w.phi.size());
    for (std::size_t s = 0; s < m.size(); ++s) m[s] = w.lap[s] - coef * w.grad2[s] + 2.0 * lambdaS[s];
    return m;
}

double positivity_margin(const WeightFunction& w, const ScalarField& lambdaS, int n, double eps) {
    const ScalarField m = positivity_field(w, lambdaS, n, eps);
    return *std::min_element(m.begin(), m.end());
}

double C_constant(int n, double eps) {
    if (n < 2 || !(eps > 0)) throw PreconditionError("C_constant: need n >= 2 and eps > 0");
    return n / (2.0 * (n - 1) + (n - 2) * eps);
}

GroundState dirichlet_ground_state(const CylinderGrid& c, double cut) {
    const int layers = static_cast<int>(std::floor(cut / c.ht + 1e-9));
    if (layers < 2 || layers > c.Nt) throw PreconditionError("dirichlet_ground_state: cut outside the grid");
    LinearMap a;
    a.m = cylinder_laplacian(c, layers);
    for (auto& v : a.m.val) v = -v;
    a.w_dom.assign(static_cast<std::size_t>(a.m.rows), c.cell_volume());
    a.w_cod = a.w_dom;
    EigenOptions opt;
    opt.tol = 1e-10;
    opt.max_iter = 8000;
    const SpectralResult r = smallest_eigenpairs(a, 1, opt);
    GroundState gs;
    gs.mu = r.eigenvalues.front();
    gs.layers = layers;
    const CVec& v = r.eigenvectors.front();
    cplx sum{};
    for (const auto& z : v) sum += z;
    const cplx ph = std::abs(sum) > 0 ? std::conj(sum) / std::abs(sum) : 1.0;
    gs.eta.resize(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) gs.eta[i] = (ph * v[i]).real();
    const double mx = *std::max_element(gs.eta.begin(), gs.eta.end());
    for (auto& e : gs.eta) e /= mx;
    gs.eta_min = *std::min_element(gs.eta.begin(), gs.eta.end());
    if (!(gs.eta_min > 0)) throw SolverError("dirichlet_ground_state: ground state is not sign-definite", gs.eta_min);
    return gs;
}

double cutoff(double tau) {
    if (tau <= 1.0) return 0.0;
    if (tau >= 2.0) return 1.0;
    const double t = tau - 1.0;
    return t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}

double cutoff_d2_bound() { return 10.0 / std::sqrt(3.0); }

CylinderWeightResult cylinder_weight(const CylinderGrid& c, const ScalarField& lambdaS, double alpha, int n,
                                     double eps, double gamma, double delta) {
    if (n < 3) throw PreconditionError("cylinder_weight: formal dimension must be at least 3");
    if (!(eps > 0) || !(gamma > 0 && gamma < 1) || !(delta >= 0) || !(alpha > 0))
        throw PreconditionError("cylinder_weight: need eps > 0, 0 < gamma < 1, delta >= 0, alpha > 0");
    if (c.wall != Wall::Reflecting)
        throw PreconditionError("cylinder_weight: the compact side must be modelled by a reflecting wall");
    if (lambdaS.size() != static_cast<std::size_t>(c.sites())) throw PreconditionError("cylinder_weight: field size mismatch");
    CylinderWeightResult res;
    auto& p = res.params;
    double kmin = INFINITY;
    for (int s = 0; s < c.sites(); ++s) {
        if (c.in_K(s)) kmin = std::min(kmin, lambdaS[s]);
        else if (lambdaS[s] < alpha - 1e-12)
            throw PreconditionError("cylinder_weight: lambda below alpha outside the compact region");
    }
    const GroundState gs = dirichlet_ground_state(c);
    p.alpha = alpha;
    p.beta = std::max(0.0, -kmin);
    p.gamma = gamma;
    p.eps = eps;
    p.delta = delta;
    p.n = n;
    p.mu = gs.mu;
    p.A = 1.0 / ((1.0 - 2.0 / n) * (1.0 + 1.0 / eps));
    p.beta_cap = gamma * gs.mu / (2.0 - 4.0 / n);

    ScalarField phi(static_cast<std::size_t>(c.sites()));
    const int cs = c.cross_sites();
    for (int s = 0; s < c.sites(); ++s) {
        const double tau = c.tau(s), rho = cutoff(tau), hprof = -delta * tau;
        const int k = s / cs;
        double ph = 0.0;
        if (rho < 1.0) {
            if (k >= gs.layers) throw PreconditionError("cylinder_weight: cutoff region exceeds the eigenfunction domain");
            ph = -p.A * std::log(gs.eta[s]);
        }
        phi[s] = gamma * (1.0 - rho) * ph + rho * hprof;
    }
    res.w = make_weight(c, phi);
    res.margin = positivity_field(res.w, lambdaS, n, eps);
    const auto it = std::min_element(res.margin.begin(), res.margin.end());
    res.alpha1 = *it;
    res.worst_site = static_cast<int>(it - res.margin.begin());
    res.worst_tau = c.tau(res.worst_site);
    res.worst_in_K = c.in_K(res.worst_site);
    const double coef = (1.0 - 2.0 / n) * (1.0 + 1.0 / eps);
    res.worst_lap = res.w.lap[res.worst_site];
    res.worst_grad_term = -coef * res.w.grad2[res.worst_site];
    res.worst_curv_term = 2.0 * lambdaS[res.worst_site];
    res.success = res.alpha1 > 0;
    if (!res.success) {
        std::ostringstream os;
        if (res.worst_in_K && res.worst_curv_term < 0)
            os << "beta too negative: margin " << res.alpha1 << " at tau = " << res.worst_tau << " in K (beta = " << p.beta
               << ", cap = " << p.beta_cap << ")";
        else
            os << "gamma/delta too large: margin " << res.alpha1 << " at tau = " << res.worst_tau << " outside K";
        res.diagnosis = os.str();
    }
    return res;
}

double weighted_sobolev_norm(const TorusGeometry& g, const HermitianBundle& b, const CVec& f, const ScalarField& phi,
                             int order) {
    check_owned(g, phi);
    const int r = b.rank;
    if (f.size() != static_cast<std::size_t>(g.sites() * r)) throw PreconditionError("weighted_sobolev_norm: size mismatch");
    if (order != 0 && order != 1) throw PreconditionError("weighted_sobolev_norm: order must be 0 or 1");
    CVec gf = f;
    for (std::size_t i = 0; i < gf.size(); ++i) gf[i] *= std::exp(-0.5 * phi[i / r]);
    double total = norm2(g.weights(r), gf);
    if (order == 1) {
        const RVec flat(gf.size(), g.h1 * g.h2);
        for (int dir = 0; dir < 2; ++dir) {
            CVec d;
            covariant_difference(g, b, dir).apply(gf, d);
            total += norm2(flat, d);
        }
    }
    return std::sqrt(total);
}

double weighted_sobolev_norm(const CylinderGrid& c, const ScalarField& f, const ScalarField& phi, int order) {
    if (f.size() != static_cast<std::size_t>(c.sites()) || phi.size() != f.size())
        throw PreconditionError("weighted_sobolev_norm: size mismatch");
    if (order != 0 && order != 1) throw PreconditionError("weighted_sobolev_norm: order must be 0 or 1");
    RVec gf(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) gf[i] = std::exp(-0.5 * phi[i]) * f[i];
    double total = 0;
    for (double v : gf) total += v * v;
    if (order == 1) {
        const int nc = c.Nc, cs = c.cross_sites();
        for (int s = 0; s < c.sites(); ++s) {
            const int k = s / cs, a = (s % cs) / nc, q = s % nc;
            if (k + 1 < c.Nt) total += std::pow((gf[s + cs] - gf[s]) / c.ht, 2);
            total += std::pow((gf[(k * nc + (a + 1) % nc) * nc + q] - gf[s]) / c.hc, 2);
            total += std::pow((gf[(k * nc + a) * nc + (q + 1) % nc] - gf[s]) / c.hc, 2);
        }
    }
    return std::sqrt(total * c.cell_volume());
}

}  // namespace dbench
