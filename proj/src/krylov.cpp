#include "dbench/krylov.hpp"

#include <cmath>

namespace dbench {

namespace {

double pnorm2(const CVec& v) {
    double s = 0;
    for (const auto& z : v) s += std::norm(z);
    return s;
}

cplx pdot(const CVec& a, const CVec& b) {
    cplx s{};
    for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
    return s;
}

}  // namespace

CgResult conjugate_gradient(const Operator& op, const CVec& b0, double rtol, int max_iter,
                            const std::function<void(CVec&)>& project) {
    CgResult res;
    CVec b = b0;
    if (project) project(b);
    const double bn = std::sqrt(pnorm2(b));
    res.x.assign(b.size(), cplx{});
    if (bn == 0.0) {
        res.converged = true;
        return res;
    }
    CVec ap, r, p;
    // Restarts recompute the true residual so the reported value is never the
    // drifting recurrence.
    for (int restart = 0; restart < 4 && res.iterations < max_iter; ++restart) {
        op(res.x, ap);
        r = b;
        par::axpy(-1.0, ap, r);
        if (project) project(r);
        res.rel_residual = std::sqrt(pnorm2(r)) / bn;
        if (res.rel_residual <= rtol) break;
        p = r;
        double rr = pnorm2(r);
        while (res.iterations < max_iter) {
            op(p, ap);
            if (project) project(ap);
            const double pap = pdot(p, ap).real();
            if (!(pap > 0)) break;
            const double alpha = rr / pap;
            par::axpy(alpha, p, res.x);
            par::axpy(-alpha, ap, r);
            const double rr_new = pnorm2(r);
            ++res.iterations;
            if (std::sqrt(rr_new) / bn <= 0.5 * rtol) break;
            const double beta = rr_new / rr;
            rr = rr_new;
            for (std::size_t i = 0; i < p.size(); ++i) p[i] = r[i] + beta * p[i];
            if (project) project(p);
        }
    }
    op(res.x, ap);
    r = b;
    par::axpy(-1.0, ap, r);
    if (project) project(r);
    res.rel_residual = std::sqrt(pnorm2(r)) / bn;
    res.converged = res.rel_residual <= rtol;
    return res;
}

}  // namespace dbench
