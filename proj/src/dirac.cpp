#include "dbench/dirac.hpp"

#include <cmath>

namespace dbench {

namespace {

CVec expand_sites(const TorusGeometry& g, int r, const auto& f) {
    CVec d(static_cast<std::size_t>(g.sites()) * r);
    for (int s = 0; s < g.sites(); ++s)
        for (int a = 0; a < r; ++a) d[s * r + a] = f(s);
    return d;
}

// Hopping T_dir psi(s) = U_dir(s) psi(s + e_dir).
CsrMatrix hopping(const TorusGeometry& g, const HermitianBundle& b, int dir) {
    const int r = b.rank, n = g.sites() * r;
    CsrBuilder m(n, n);
    for (int s = 0; s < g.sites(); ++s) {
        const int t = dir == 0 ? g.xp(s) : g.yp(s);
        const cplx* u = dir == 0 ? b.Ux(s) : b.Uy(s);
        for (int a = 0; a < r; ++a)
            for (int c = 0; c < r; ++c) m.add(s * r + a, t * r + c, u[a * r + c]);
    }
    return m.build();
}

CsrMatrix add_csr(const CsrMatrix& a, const CsrMatrix& b, cplx beta) {
    LinearMap la, lb;
    la.m = a;
    lb.m = b;
    return add(la, lb, beta).m;
}

CsrMatrix mul_csr(const CsrMatrix& a, const CsrMatrix& b) {
    LinearMap la, lb;
    la.m = a;
    lb.m = b;
    return compose(la, lb).m;
}

}  // namespace

CVec GradedSection::stacked() const {
    CVec v = plus;
    v.insert(v.end(), minus.begin(), minus.end());
    return v;
}

GradedSection GradedSection::unstack(const CVec& v, int rank) {
    GradedSection s;
    s.rank = rank;
    const auto half = static_cast<std::ptrdiff_t>(v.size() / 2);
    s.plus.assign(v.begin(), v.begin() + half);
    s.minus.assign(v.begin() + half, v.end());
    return s;
}

HermitianBundle graded_links(const TorusGeometry& g, const HermitianBundle& b, Grading gr) {
    if (gr == Grading::Plus) return b;
    HermitianBundle m = b;
    const int rr = b.rank * b.rank;
    const auto& u = g.u;
    for (int s = 0; s < g.sites(); ++s) {
        const int sx = g.xp(s), sy = g.yp(s);
        // u_y at the midpoint of the x-edge (s, s+x), u_x at the midpoint of the y-edge (s, s+y).
        const double uy = 0.25 * (u[g.yp(s)] - u[g.ym(s)] + u[g.yp(sx)] - u[g.ym(sx)]) / g.h2;
        const double ux = 0.25 * (u[g.xp(s)] - u[g.xm(s)] + u[g.xp(sy)] - u[g.xm(sy)]) / g.h1;
        const cplx px = std::polar(1.0, -g.h1 * uy), py = std::polar(1.0, g.h2 * ux);
        for (int k = 0; k < rr; ++k) {
            m.Ux(s)[k] *= px;
            m.Uy(s)[k] *= py;
        }
    }
    return m;
}

CsrMatrix covariant_difference(const TorusGeometry& g, const HermitianBundle& b, int dir) {
    const int r = b.rank, n = g.sites() * r;
    const double inv = 1.0 / (dir == 0 ? g.h1 : g.h2);
    CsrBuilder m(n, n);
    for (int s = 0; s < g.sites(); ++s) {
        const int t = dir == 0 ? g.xp(s) : g.yp(s);
        const cplx* u = dir == 0 ? b.Ux(s) : b.Uy(s);
        for (int a = 0; a < r; ++a) {
            m.add(s * r + a, s * r + a, -inv);
            for (int c = 0; c < r; ++c) m.add(s * r + a, t * r + c, inv * u[a * r + c]);
        }
    }
    return m.build();
}

LinearMap dplus(const TorusGeometry& g, const HermitianBundle& b) {
    const int r = b.rank;
    const CsrMatrix dx = covariant_difference(g, b, 0), dy = covariant_difference(g, b, 1);
    const CVec eu = expand_sites(g, r, [&](int s) { return cplx(std::exp(-g.u[s])); });
    LinearMap m;
    m.m = diag_left(eu, add_csr(dx, dy, cplx(0, 1)));
    m.w_dom = g.weights(r);
    m.w_cod = m.w_dom;
    m.dom_tag = "plus";
    m.cod_tag = "minus";
    return m;
}

LinearMap dbar(const TorusGeometry& g, const HermitianBundle& b) { return scaled(dplus(g, b), 1.0 / std::sqrt(2.0)); }

LinearMap dminus(const TorusGeometry& g, const HermitianBundle& b) { return adjoint(dplus(g, b)); }

LinearMap full_dirac(const TorusGeometry& g, const HermitianBundle& b) {
    const LinearMap dp = dplus(g, b), dm = adjoint(dp);
    const int n = dp.m.rows;
    CsrBuilder m(2 * n, 2 * n);
    for (int i = 0; i < n; ++i) {
        for (int k = dm.m.ptr[i]; k < dm.m.ptr[i + 1]; ++k) m.add(i, n + dm.m.idx[k], dm.m.val[k]);
        for (int k = dp.m.ptr[i]; k < dp.m.ptr[i + 1]; ++k) m.add(n + i, dp.m.idx[k], dp.m.val[k]);
    }
    LinearMap d;
    d.m = m.build();
    d.w_dom = dp.w_dom;
    d.w_dom.insert(d.w_dom.end(), dp.w_cod.begin(), dp.w_cod.end());
    d.w_cod = d.w_dom;
    d.dom_tag = d.cod_tag = "graded";
    return d;
}

LinearMap grading_operator(const TorusGeometry& g, int rank) {
    const int n = g.sites() * rank;
    CsrBuilder m(2 * n, 2 * n);
    for (int i = 0; i < n; ++i) {
        m.add(i, i, 1.0);
        m.add(n + i, n + i, -1.0);
    }
    LinearMap d;
    d.m = m.build();
    d.w_dom = g.weights(rank);
    d.w_dom.insert(d.w_dom.end(), d.w_dom.begin(), d.w_dom.end());
    d.w_cod = d.w_dom;
    d.dom_tag = d.cod_tag = "graded";
    return d;
}

LinearMap connection_laplacian(const TorusGeometry& g, const HermitianBundle& b, Grading gr) {
    const HermitianBundle l = graded_links(g, b, gr);
    const int r = b.rank;
    const CsrMatrix dx = covariant_difference(g, l, 0), dy = covariant_difference(g, l, 1);
    const CsrMatrix flat = add_csr(mul_csr(transpose_conj(dx), dx), mul_csr(transpose_conj(dy), dy), 1.0);
    LinearMap m;
    m.m = diag_left(expand_sites(g, r, [&](int s) { return cplx(std::exp(-2.0 * g.u[s])); }), flat);
    m.w_dom = g.weights(r);
    m.w_cod = m.w_dom;
    m.dom_tag = m.cod_tag = (gr == Grading::Plus ? "plus" : "minus");
    return m;
}

LinearMap curvature_operator(const TorusGeometry& g, const CurvatureData& c, Grading gr) {
    const int r = c.rank, rr = r * r;
    const CVec& R = gr == Grading::Plus ? c.Rplus : c.Rminus;
    CsrBuilder m(g.sites() * r, g.sites() * r);
    for (int s = 0; s < g.sites(); ++s)
        for (int a = 0; a < r; ++a)
            for (int q = 0; q < r; ++q) m.add(s * r + a, s * r + q, R[s * rr + a * r + q]);
    LinearMap l;
    l.m = m.build();
    l.w_dom = g.weights(r);
    l.w_cod = l.w_dom;
    l.dom_tag = l.cod_tag = (gr == Grading::Plus ? "plus" : "minus");
    return l;
}

double bochner_residual(const TorusGeometry& g, const HermitianBundle& b, const GradedSection& s) {
    return bochner_residual(g, b, curvature_data(g, b), s);
}

double bochner_residual(const TorusGeometry& g, const HermitianBundle& b, const CurvatureData& c,
                        const GradedSection& s) {
    const double n0 = section_norm2(g, s);
    if (!(n0 > 0)) throw PreconditionError("bochner_residual: zero section");
    const LinearMap d = full_dirac(g, b);
    const CVec d2 = d(d(s.stacked()));
    GradedSection res = GradedSection::unstack(d2, s.rank);
    const CVec lp = connection_laplacian(g, b, Grading::Plus)(s.plus);
    const CVec lm = connection_laplacian(g, b, Grading::Minus)(s.minus);
    const CVec rp = curvature_operator(g, c, Grading::Plus)(s.plus);
    const CVec rm = curvature_operator(g, c, Grading::Minus)(s.minus);
    for (std::size_t i = 0; i < res.plus.size(); ++i) {
        res.plus[i] -= lp[i] + rp[i];
        res.minus[i] -= lm[i] + rm[i];
    }
    return std::sqrt(section_norm2(g, res) / n0);
}

GradedSection clifford_mul(const TorusGeometry& g, const RVec& v1, const RVec& v2, const GradedSection& s) {
    check_owned(g, v1);
    check_owned(g, v2);
    const int r = s.rank;
    GradedSection out;
    out.rank = r;
    out.plus.resize(s.plus.size());
    out.minus.resize(s.minus.size());
    for (int x = 0; x < g.sites(); ++x) {
        const cplx a(v1[x], v2[x]);
        for (int k = 0; k < r; ++k) {
            out.minus[x * r + k] = a * s.plus[x * r + k];
            out.plus[x * r + k] = -std::conj(a) * s.minus[x * r + k];
        }
    }
    return out;
}

void gradient_frame(const TorusGeometry& g, const ScalarField& phi, RVec& v1, RVec& v2) {
    check_owned(g, phi);
    v1.resize(phi.size());
    v2.resize(phi.size());
    for (int s = 0; s < g.sites(); ++s) {
        const double eu = std::exp(-g.u[s]);
        v1[s] = eu * (phi[g.xp(s)] - phi[s]) / g.h1;
        v2[s] = eu * (phi[g.yp(s)] - phi[s]) / g.h2;
    }
}

GradedSection weighted_adjoint_apply(const TorusGeometry& g, const HermitianBundle& b, const ScalarField& phi,
                                     const GradedSection& s) {
    check_owned(g, phi);
    const int r = s.rank;
    CVec v = s.stacked();
    const int n = g.sites() * r;
    for (int i = 0; i < n; ++i) {
        const double w = std::exp(-phi[i / r]);
        v[i] *= w;
        v[n + i] *= w;
    }
    CVec dv = full_dirac(g, b)(v);
    for (int i = 0; i < n; ++i) {
        const double w = std::exp(phi[i / r]);
        dv[i] *= w;
        dv[n + i] *= w;
    }
    return GradedSection::unstack(dv, r);
}

GradedSection weighted_adjoint_clifford(const TorusGeometry& g, const HermitianBundle& b, const ScalarField& phi,
                                        const GradedSection& s) {
    RVec v1, v2;
    gradient_frame(g, phi, v1, v2);
    GradedSection ds = GradedSection::unstack(full_dirac(g, b)(s.stacked()), s.rank);
    const GradedSection c = clifford_mul(g, v1, v2, s);
    for (std::size_t i = 0; i < ds.plus.size(); ++i) {
        ds.plus[i] -= c.plus[i];
        ds.minus[i] -= c.minus[i];
    }
    return ds;
}

LinearMap weighted_adjoint(const LinearMap& a, const ScalarField& phi, int rank) {
    LinearMap w = a;
    for (std::size_t i = 0; i < w.w_dom.size(); ++i) w.w_dom[i] *= std::exp(-phi[i / rank]);
    for (std::size_t i = 0; i < w.w_cod.size(); ++i) w.w_cod[i] *= std::exp(-phi[i / rank]);
    return adjoint(w);
}

CsrMatrix taste_operator(const TorusGeometry& g, const HermitianBundle& b) {
    const CsrMatrix tx = hopping(g, b, 0), ty = hopping(g, b, 1);
    CsrMatrix h = add_csr(add_csr(tx, transpose_conj(tx), 1.0), add_csr(ty, transpose_conj(ty), 1.0), 1.0);
    for (auto& v : h.val) v *= 0.25;
    return h;
}

InequalityTerms weighted_inequality(const TorusGeometry& g, const HermitianBundle& b, const ScalarField& phi,
                                    const ScalarField& lap_phi, const ScalarField& lambda, const GradedSection& s) {
    check_owned(g, lap_phi);
    check_owned(g, lambda);
    const GradedSection ds = weighted_adjoint_apply(g, b, phi, s);
    const int r = s.rank;
    RVec w = g.weights(r), wr = w;
    for (std::size_t i = 0; i < w.size(); ++i) {
        const int site = static_cast<int>(i) / r;
        w[i] *= std::exp(-phi[site]);
        wr[i] = w[i] * (lap_phi[site] + 2.0 * lambda[site]);
    }
    InequalityTerms t;
    t.lhs = norm2(w, ds.plus) + norm2(w, ds.minus);
    t.rhs = norm2(wr, s.plus) + norm2(wr, s.minus);
    t.norm2 = norm2(w, s.plus) + norm2(w, s.minus);
    return t;
}

double section_norm2(const TorusGeometry& g, const GradedSection& s) {
    const RVec w = g.weights(s.rank);
    return norm2(w, s.plus) + norm2(w, s.minus);
}

double weighted_norm2(const TorusGeometry& g, const ScalarField& phi, const CVec& v, int rank) {
    RVec w = g.weights(rank);
    for (std::size_t i = 0; i < w.size(); ++i) w[i] *= std::exp(-phi[i / rank]);
    return norm2(w, v);
}

}  // namespace dbench
