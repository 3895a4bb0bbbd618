#include "dbench/l2solve.hpp"

#include "dbench/krylov.hpp"

#include <algorithm>
#include <cmath>

namespace dbench {

std::string to_string(EstimateStatus s) {
    switch (s) {
        case EstimateStatus::Pass: return "pass";
        case EstimateStatus::Fail: return "fail";
        case EstimateStatus::NotEvaluable: return "not_evaluable";
    }
    return "unknown";
}

namespace {

RVec expand(const ScalarField& phi, int rank) {
    RVec out(phi.size() * static_cast<std::size_t>(rank));
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = phi[i / rank];
    return out;
}

LinearMap unweighted(CsrMatrix m) {
    LinearMap a;
    a.w_dom.assign(static_cast<std::size_t>(m.cols), 1.0);
    a.w_cod.assign(static_cast<std::size_t>(m.rows), 1.0);
    a.m = std::move(m);
    return a;
}

double plain_norm(const CVec& v) {
    return std::sqrt(norm2(RVec(v.size(), 1.0), v));
}

struct Conjugated {
    CVec sdom, scod;
    LinearMap mt, mh;
};

// e^{-phi/2}-conjugated operator in orthonormal coordinates of both spaces.
Conjugated conjugate(const LinearMap& d, const ScalarField& phi, int rank) {
    const int nd = d.dim_dom(), nc = d.dim_cod();
    if (phi.size() * static_cast<std::size_t>(rank) != static_cast<std::size_t>(nd) || nd != nc)
        throw PreconditionError("solve_min_norm: weight does not match the operator");
    const RVec ph = expand(phi, rank);
    Conjugated c;
    c.sdom.resize(static_cast<std::size_t>(nd));
    c.scod.resize(static_cast<std::size_t>(nc));
    for (int i = 0; i < nd; ++i) c.sdom[i] = std::sqrt(std::exp(ph[i]) / d.w_dom[i]);
    for (int i = 0; i < nc; ++i) c.scod[i] = std::sqrt(std::exp(-ph[i]) * d.w_cod[i]);
    c.mt = unweighted(diag_left(c.scod, diag_right(d.m, c.sdom)));
    c.mh = adjoint(c.mt);
    return c;
}

}  // namespace

CVec image_of(const LinearMap& d, const CVec& v, const ScalarField& phi, int rank, const SolveOptions& opt) {
    if (v.size() != static_cast<std::size_t>(d.dim_dom())) throw PreconditionError("image_of: v does not match the domain");
    const Conjugated c = conjugate(d, phi, rank);
    CVec vt(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) vt[i] = v[i] / c.sdom[i];
    const KernelInfo ker = kernel_dimension(compose(c.mh, c.mt), opt.kernel_hint, opt.eig);
    const RVec ones(v.size(), 1.0);
    for (int pass = 0; pass < 2; ++pass)
        for (const auto& k : ker.basis) par::axpy(-inner(ones, k, vt), k, vt);
    for (std::size_t i = 0; i < v.size(); ++i) vt[i] *= c.sdom[i];
    return d(vt);
}

SolveReport solve_min_norm(const LinearMap& d, const CVec& f, const ScalarField& phi, int rank,
                           const SolveOptions& opt) {
    const int nd = d.dim_dom(), nc = d.dim_cod();
    if (f.size() != static_cast<std::size_t>(nc)) throw PreconditionError("solve_min_norm: f does not match the codomain");
    const Conjugated c = conjugate(d, phi, rank);
    SolveReport rep;
    rep.f = f;
    rep.phi = phi;
    rep.rank = rank;
    rep.cod_weights = d.w_cod;
    const RVec ph = expand(phi, rank);
    const CVec& sdom = c.sdom;
    const CVec& scod = c.scod;
    const LinearMap& mt = c.mt;
    const LinearMap& mh = c.mh;
    const LinearMap normal = compose(mt, mh);

    CVec g(static_cast<std::size_t>(nc));
    for (int i = 0; i < nc; ++i) g[i] = scod[i] * f[i];
    const double gn = plain_norm(g);
    if (!(gn > 0)) throw PreconditionError("solve_min_norm: zero right-hand side");

    const KernelInfo coker = kernel_dimension(normal, opt.kernel_hint, opt.eig);
    rep.cokernel_dim = coker.dim;
    const RVec ones(g.size(), 1.0);
    const auto project = [&](CVec& v) {
        for (const auto& k : coker.basis) par::axpy(-inner(ones, k, v), k, v);
    };
    {
        CVec pg(g.size(), cplx{});
        for (const auto& k : coker.basis) par::axpy(inner(ones, k, g), k, pg);
        rep.obstruction = plain_norm(pg) / gn;
    }
    rep.solvable = rep.obstruction <= 1e-8;
    if (!rep.solvable) return rep;

    const Operator op = [&](const CVec& x, CVec& y) { normal.apply(x, y); };
    const CgResult cg = conjugate_gradient(op, g, opt.tol, opt.max_iter, project);
    rep.iterations = cg.iterations;
    const CVec ut = mh(cg.x);
    rep.u.resize(static_cast<std::size_t>(nd));
    for (int i = 0; i < nd; ++i) rep.u[i] = sdom[i] * ut[i];
    {
        CVec r = mt(ut);
        for (int i = 0; i < nc; ++i) r[i] -= g[i];
        rep.residual = plain_norm(r) / gn;
    }
    if (!cg.converged) throw SolverError("solve_min_norm: conjugate gradients did not converge", cg.rel_residual);
    const RVec wphi = [&] {
        RVec w(static_cast<std::size_t>(nd));
        for (int i = 0; i < nd; ++i) w[i] = std::exp(-ph[i]) * d.w_dom[i];
        return w;
    }();
    rep.lhs = norm2(wphi, rep.u);
    if (opt.check_minimality) {
        const KernelInfo ker = kernel_dimension(compose(mh, mt), opt.kernel_hint, opt.eig);
        rep.kernel_dim = ker.dim;
        const double un = plain_norm(ut);
        for (const auto& k : ker.basis)
            rep.minimality = std::max(rep.minimality, std::abs(inner(ones, k, ut)) / (un * plain_norm(k)));
    }
    return rep;
}

void attach_denominator(SolveReport& rep, const ScalarField& den, double tol_h) {
    if (den.size() != rep.phi.size()) throw PreconditionError("attach_denominator: field size mismatch");
    rep.denominator = den;
    rep.denominator_min = *std::min_element(den.begin(), den.end());
    rep.tol_h = tol_h;
    rep.has_denominator = true;
    rep.rhs = 0;
    if (rep.denominator_min <= 0) return;
    const std::size_t r = static_cast<std::size_t>(rep.rank);
    for (std::size_t i = 0; i < rep.f.size(); ++i)
        rep.rhs += std::norm(rep.f[i]) * std::exp(-rep.phi[i / r]) / den[i / r] * rep.cod_weights[i];
}

EstimateStatus verify_estimate(const SolveReport& rep) {
    if (!rep.solvable || !rep.has_denominator || !(rep.denominator_min > 0)) return EstimateStatus::NotEvaluable;
    return rep.lhs <= rep.rhs * (1.0 + rep.tol_h) ? EstimateStatus::Pass : EstimateStatus::Fail;
}

}  // namespace dbench
