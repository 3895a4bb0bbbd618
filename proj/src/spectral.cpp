#include "dbench/spectral.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace dbench {

namespace {

using Eigen::MatrixXcd;
using Block = Eigen::MatrixXcd;

CVec random_vector(std::mt19937_64& rng, int n) {
    std::normal_distribution<double> normal(0.0, 1.0);
    CVec v(static_cast<std::size_t>(n));
    for (auto& z : v) {
        const double re = normal(rng);
        z = cplx(re, normal(rng));
    }
    return v;
}

Block apply_block(const CsrMatrix& a, const Block& x) {
    Block y(a.rows, x.cols());
    const int nc = static_cast<int>(x.cols());
#pragma omp parallel for schedule(static)
    for (int i = 0; i < a.rows; ++i)
        for (int j = 0; j < nc; ++j) {
            cplx acc{};
            for (int q = a.ptr[i]; q < a.ptr[i + 1]; ++q) acc += a.val[q] * x(a.idx[q], j);
            y(i, j) = acc;
        }
    return y;
}

// <a, b>_W for blocks.
MatrixXcd gram(const Eigen::VectorXd& w, const Block& a, const Block& b) {
    return a.adjoint() * (w.asDiagonal() * b);
}

void project_out(const Eigen::VectorXd& w, const Block& x, Block& q) {
    if (x.cols() == 0 || q.cols() == 0) return;
    q -= x * gram(w, x, q);
}

// W-orthonormal basis of span(q), dropping numerically dependent directions.
Block orthonormalize(const Eigen::VectorXd& w, const Block& q) {
    if (q.cols() == 0) return q;
    MatrixXcd g = gram(w, q, q);
    g = 0.5 * (g + g.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(g);
    const Eigen::VectorXd ev = es.eigenvalues();
    const double top = ev.size() ? ev(ev.size() - 1) : 0.0;
    std::vector<int> keep;
    for (int j = 0; j < ev.size(); ++j)
        if (ev(j) > 1e-20 * top && ev(j) > 0) keep.push_back(j);
    MatrixXcd c(q.cols(), static_cast<int>(keep.size()));
    for (std::size_t j = 0; j < keep.size(); ++j)
        c.col(static_cast<int>(j)) = es.eigenvectors().col(keep[j]) / std::sqrt(ev(keep[j]));
    return q * c;
}

Block orthonormalize_against(const Eigen::VectorXd& w, const Block& x, Block q) {
    for (int pass = 0; pass < 2; ++pass) {
        project_out(w, x, q);
        q = orthonormalize(w, q);
    }
    return q;
}

Block to_block(const std::vector<CVec>& v, int n) {
    Block b(n, static_cast<int>(v.size()));
    for (std::size_t j = 0; j < v.size(); ++j)
        for (int i = 0; i < n; ++i) b(i, static_cast<int>(j)) = v[j][i];
    return b;
}

CVec column(const Block& b, int j) {
    CVec v(static_cast<std::size_t>(b.rows()));
    for (int i = 0; i < b.rows(); ++i) v[i] = b(i, j);
    return v;
}

SpectralResult dense_small(const LinearMap& a, int k) {
    const int n = a.dim_dom();
    Eigen::VectorXd sw(n);
    for (int i = 0; i < n; ++i) sw(i) = std::sqrt(a.w_dom[i]);
    MatrixXcd m = MatrixXcd::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int q = a.m.ptr[i]; q < a.m.ptr[i + 1]; ++q) m(i, a.m.idx[q]) += sw(i) * a.m.val[q] / sw(a.m.idx[q]);
    m = 0.5 * (m + m.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(m);
    SpectralResult r;
    for (int j = 0; j < k; ++j) {
        CVec v(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) v[i] = es.eigenvectors()(i, j) / sw(i);
        CVec av = a(v);
        par::axpy(-es.eigenvalues()(j), v, av);
        r.eigenvalues.push_back(es.eigenvalues()(j));
        r.eigenvectors.push_back(std::move(v));
        r.residuals.push_back(std::sqrt(norm2(a.w_dom, av)));
    }
    return r;
}

}  // namespace

SpectralResult smallest_eigenpairs(const LinearMap& a, int k, const EigenOptions& opt) {
    const int n = a.dim_dom();
    if (k < 1) throw PreconditionError("smallest_eigenpairs: k must be positive");
    if (a.dim_cod() != n) throw PreconditionError("smallest_eigenpairs: map is not square");
    if (k > n) throw PreconditionError("smallest_eigenpairs: k exceeds the dimension");
    const int m = std::min(n, k + std::max(0, opt.guard));
    if (4 * m >= n) {
        SpectralResult r = dense_small(a, k);
        r.tol = opt.tol;
        return r;
    }
    const Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(a.w_dom.data(), n);
    Eigen::VectorXd prec(n);
    {
        const CVec d = a.m.diagonal();
        double dmax = 0;
        for (const auto& z : d) dmax = std::max(dmax, z.real());
        for (int i = 0; i < n; ++i) prec(i) = d[i].real() > 1e-12 * dmax ? 1.0 / d[i].real() : 1.0;
    }
    const auto precondition = [&](const Block& r) {
        if (!opt.preconditioner) return Block(prec.asDiagonal() * r);
        Block z(n, r.cols());
        CVec in(static_cast<std::size_t>(n)), out;
        for (int j = 0; j < r.cols(); ++j) {
            for (int i = 0; i < n; ++i) in[i] = r(i, j);
            opt.preconditioner(in, out);
            for (int i = 0; i < n; ++i) z(i, j) = out[i];
        }
        return z;
    };

    std::mt19937_64 rng(opt.seed);
    Block x(n, 0);
    while (x.cols() < m) {
        std::vector<CVec> fresh;
        for (int j = static_cast<int>(x.cols()); j < m; ++j) fresh.push_back(random_vector(rng, n));
        Block q = orthonormalize_against(w, x, to_block(fresh, n));
        Block nx(n, x.cols() + q.cols());
        nx << x, q;
        x = std::move(nx);
    }
    Block ax = apply_block(a.m, x);
    Eigen::VectorXd lam;
    {
        MatrixXcd g = gram(w, x, ax);
        g = 0.5 * (g + g.adjoint()).eval();
        Eigen::SelfAdjointEigenSolver<MatrixXcd> es(g);
        lam = es.eigenvalues();
        x = x * es.eigenvectors();
        ax = ax * es.eigenvectors();
    }
    Block p(n, 0);

    double best = INFINITY;
    for (int it = 1; it <= opt.max_iter; ++it) {
        const Block res = ax - x * lam.asDiagonal();
        RVec rn(static_cast<std::size_t>(m));
        std::vector<int> active;
        bool done = true;
        double worst = 0;
        for (int j = 0; j < m; ++j) {
            rn[j] = std::sqrt(std::max(0.0, gram(w, res.col(j), res.col(j))(0, 0).real()));
            const double rel = rn[j] / std::max(1.0, std::abs(lam(j)));
            if (rel > opt.tol) active.push_back(j);
            if (j < k) {
                done = done && rel <= opt.tol;
                worst = std::max(worst, rel);
            }
        }
        best = std::min(best, worst);
        if (done) {
            SpectralResult r;
            for (int j = 0; j < k; ++j) {
                r.eigenvalues.push_back(lam(j));
                r.eigenvectors.push_back(column(x, j));
                r.residuals.push_back(rn[j]);
            }
            r.iterations = it;
            r.tol = opt.tol;
            return r;
        }
        Block ra(n, static_cast<int>(active.size()));
        for (std::size_t j = 0; j < active.size(); ++j) ra.col(static_cast<int>(j)) = res.col(active[j]);
        Block zq(n, ra.cols() + p.cols());
        zq << precondition(ra), p;
        const Block q = orthonormalize_against(w, x, zq);
        const Block aq = apply_block(a.m, q);
        Block s(n, m + q.cols()), as(n, m + q.cols());
        s << x, q;
        as << ax, aq;
        MatrixXcd g = gram(w, s, as);
        g = 0.5 * (g + g.adjoint()).eval();
        Eigen::SelfAdjointEigenSolver<MatrixXcd> es(g);
        const MatrixXcd c = es.eigenvectors().leftCols(m);
        lam = es.eigenvalues().head(m);
        x = s * c;
        ax = as * c;
        p = q * c.bottomRows(q.cols());
    }
    throw SolverError("smallest_eigenpairs: no convergence within max_iter", best);
}

double spectral_scale(const LinearMap& a, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    CVec x = random_vector(rng, a.dim_dom()), y;
    double est = 0;
    for (int i = 0; i < 10; ++i) {
        par::scale(1.0 / std::sqrt(norm2(a.w_dom, x)), x);
        a.apply(x, y);
        est = std::sqrt(norm2(a.w_dom, y));
        x.swap(y);
    }
    return est;
}

KernelInfo kernel_dimension(const LinearMap& a, int hint, const EigenOptions& opt) {
    KernelInfo info;
    info.scale = spectral_scale(a);
    info.threshold = 1e-8 * info.scale;
    int k = std::max(hint + 2, 4);
    for (;;) {
        k = std::min(k, a.dim_dom());
        const SpectralResult r = smallest_eigenpairs(a, k, opt);
        info.eigenvalues = r.eigenvalues;
        info.dim = static_cast<int>(std::count_if(r.eigenvalues.begin(), r.eigenvalues.end(),
                                                  [&](double l) { return l < info.threshold; }));
        info.basis.assign(r.eigenvectors.begin(), r.eigenvectors.begin() + info.dim);
        if (info.dim < k || k == a.dim_dom()) return info;
        k *= 2;
    }
}

SpeciesSpectrum species_spectrum(const LinearMap& a, const CsrMatrix& taste, int hint, const EigenOptions& opt) {
    SpeciesSpectrum out;
    out.scale = spectral_scale(a);
    out.threshold = 1e-8 * out.scale;
    int k = std::max(2 * hint + 4, 6);
    for (;;) {
        k = std::min(k, a.dim_dom());
        const SpectralResult r = smallest_eigenpairs(a, k, opt);
        const int nk = static_cast<int>(r.eigenvalues.size());
        std::vector<CVec> hv(static_cast<std::size_t>(nk));
        for (int j = 0; j < nk; ++j) taste.apply(r.eigenvectors[j], hv[j]);
        MatrixXcd mh(nk, nk), mg(nk, nk);
        for (int i = 0; i < nk; ++i)
            for (int j = 0; j < nk; ++j) {
                cplx sh{}, sg{};
                for (std::size_t q = 0; q < hv[j].size(); ++q) {
                    sh += std::conj(r.eigenvectors[i][q]) * hv[j][q];
                    sg += std::conj(r.eigenvectors[i][q]) * r.eigenvectors[j][q];
                }
                mh(i, j) = sh;
                mg(i, j) = sg;
            }
        mh = 0.5 * (mh + mh.adjoint()).eval();
        mg = 0.5 * (mg + mg.adjoint()).eval();
        Eigen::GeneralizedSelfAdjointEigenSolver<MatrixXcd> ges(mh, mg);
        const Eigen::VectorXd tau = ges.eigenvalues();
        const MatrixXcd cv = ges.eigenvectors();
        Eigen::MatrixXcd lamd = Eigen::MatrixXcd::Zero(nk, nk);
        for (int j = 0; j < nk; ++j) lamd(j, j) = r.eigenvalues[j];
        const auto ritz = [&](bool phys) {
            std::vector<int> cols;
            for (int j = 0; j < nk; ++j)
                if ((tau(j) > 0.5) == phys) cols.push_back(j);
            RVec vals;
            if (cols.empty()) return vals;
            MatrixXcd cp(nk, static_cast<int>(cols.size()));
            for (std::size_t j = 0; j < cols.size(); ++j) cp.col(static_cast<int>(j)) = cv.col(cols[j]);
            MatrixXcd ap = cp.adjoint() * lamd * cp, bp = cp.adjoint() * cp;
            ap = 0.5 * (ap + ap.adjoint()).eval();
            bp = 0.5 * (bp + bp.adjoint()).eval();
            Eigen::GeneralizedSelfAdjointEigenSolver<MatrixXcd> g2(ap, bp, Eigen::EigenvaluesOnly);
            for (int j = 0; j < g2.eigenvalues().size(); ++j) vals.push_back(g2.eigenvalues()(j));
            return vals;
        };
        out.raw = r.eigenvalues;
        out.physical = ritz(true);
        out.doubler = ritz(false);
        out.tastes.assign(tau.data(), tau.data() + tau.size());
        out.raw_kernel = static_cast<int>(std::count_if(out.raw.begin(), out.raw.end(),
                                                        [&](double l) { return l < out.threshold; }));
        out.physical_kernel = static_cast<int>(std::count_if(out.physical.begin(), out.physical.end(),
                                                             [&](double l) { return l < out.threshold; }));
        // The block must reach past the kernel and contain a physical vector whose
        // Ritz value is not the top of the computed window.
        const bool enough = !out.physical.empty() && out.raw_kernel < nk && out.physical.front() < out.raw.back();
        if (enough || k == a.dim_dom()) return out;
        k *= 2;
    }
}

double schrodinger_coefficient(int n) {
    if (n < 2) throw PreconditionError("schrodinger_L: dimension must be at least 2");
    return n == 2 ? 0.5 : static_cast<double>(n - 1) / (n - 2);
}

LinearMap schrodinger_L(const TorusGeometry& g, const ScalarField& lambdaS, int n) {
    check_owned(g, lambdaS);
    const double c = schrodinger_coefficient(n);
    LinearMap lap = scaled(laplace_beltrami(g), -c);
    CsrBuilder d(g.sites(), g.sites());
    for (int s = 0; s < g.sites(); ++s) d.add(s, s, lambdaS[s]);
    LinearMap pot = lap;
    pot.m = d.build();
    return add(lap, pot);
}

LowModeDefect bochner_lowmode_defect(const TorusGeometry& g, const HermitianBundle& b, Grading gr, int k,
                                     const EigenOptions& opt) {
    if (k < 1) throw PreconditionError("bochner_lowmode_defect: k must be positive");
    EigenOptions o = opt;
    if (!o.preconditioner) o.preconditioner = fourier_preconditioner(g, b.rank, Symbol::Laplacian, 4.0);
    const LinearMap lap = connection_laplacian(g, b, gr);
    const LinearMap curv = curvature_operator(g, curvature_data(g, b), gr);
    const LinearMap dp = dplus(g, b), dm = adjoint(dp);
    const LinearMap sq = gr == Grading::Plus ? compose(dm, dp) : compose(dp, dm);
    const LinearMap defect = add(sq, add(lap, curv), -1.0);

    const SpectralResult low = smallest_eigenpairs(lap, k, o);
    const int n = lap.dim_dom();
    const Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(lap.w_dom.data(), n);
    const Block v = to_block(low.eigenvectors, n);
    const Block bv = apply_block(defect.m, v);
    const MatrixXcd gram_res = gram(w, bv, bv);
    const MatrixXcd q = gram(w, v, bv);
    const Eigen::SelfAdjointEigenSolver<MatrixXcd> es_res(gram_res, Eigen::EigenvaluesOnly);
    const Eigen::SelfAdjointEigenSolver<MatrixXcd> es_q(0.5 * (q + q.adjoint()), Eigen::EigenvaluesOnly);
    LowModeDefect out;
    out.residual = std::sqrt(std::max(0.0, es_res.eigenvalues().maxCoeff()));
    out.quadratic = es_q.eigenvalues().cwiseAbs().maxCoeff();
    out.laplacian_eigenvalues = low.eigenvalues;
    return out;
}

bool BoundReport::all_pass() const {
    return std::all_of(records.begin(), records.end(), [](const BoundRecord& r) { return r.pass; });
}

BoundReport bound_report(const TorusGeometry& g, const HermitianBundle& b, double c_tol, const EigenOptions& opt) {
    constexpr double pi = std::numbers::pi;
    const double shift = 16.0 * pi * pi / g.volume;
    EigenOptions dopt = opt, lopt = opt;
    if (!dopt.preconditioner) dopt.preconditioner = fourier_preconditioner(g, b.rank, Symbol::Dirac, shift);
    if (!lopt.preconditioner) lopt.preconditioner = fourier_preconditioner(g, 1, Symbol::Laplacian, shift);
    BoundReport rep;
    const CurvatureData cd = curvature_data(g, b);
    rep.h = g.h();
    rep.volume = g.volume;
    rep.chern = chern_number(g, b);
    rep.euler = static_cast<int>(std::lround(integrate(g, cd.K) / (2.0 * pi)));
    rep.int_lambdaS = integrate(g, cd.lambdaS);
    rep.int_lambdaSplus = integrate(g, cd.lambdaSplus);
    rep.int_lambdaSminus = integrate(g, cd.lambdaSminus);
    rep.int_theta = integrate(g, cd.theta);
    rep.int_Theta = integrate(g, cd.Theta);

    const LinearMap dp = dplus(g, b), dm = adjoint(dp);
    const CsrMatrix taste = taste_operator(g, b);
    const int hint = (std::abs(rep.chern) + 1) * b.rank;
    rep.spec_DmDp = species_spectrum(compose(dm, dp), taste, hint, dopt);
    rep.spec_DpDm = species_spectrum(compose(dp, dm), taste, hint, dopt);
    rep.lambda_min_DmDp = rep.spec_DmDp.physical.front();
    rep.lambda_min_DpDm = rep.spec_DpDm.physical.front();
    rep.raw_lambda_min_DmDp = rep.spec_DmDp.raw.front();
    rep.raw_lambda_min_DpDm = rep.spec_DpDm.raw.front();
    rep.lambda_min_D2 = std::min(rep.lambda_min_DmDp, rep.lambda_min_DpDm);

    const auto lmin = [&](const ScalarField& pot) {
        return smallest_eigenpairs(schrodinger_L(g, pot, 2), 1, lopt).eigenvalues.front();
    };
    rep.lambda_min_L = lmin(cd.lambdaS);
    rep.lambda_min_Lplus = lmin(cd.lambdaSplus);
    rep.lambda_min_Lminus = lmin(cd.lambdaSminus);

    const double tol = c_tol * rep.h, vol = g.volume;
    const auto rec = [&](const std::string& name, double lhs, double rhs) {
        BoundRecord r{name, lhs, rhs, lhs - rhs, tol, lhs >= rhs - tol};
        rep.records.push_back(r);
    };
    const double dbar_min = 0.5 * rep.lambda_min_DmDp, dbar_adj_min = 0.5 * rep.lambda_min_DpDm;
    rec("D2_curvature_integral", rep.lambda_min_D2, 2.0 / vol * rep.int_lambdaS);
    rec("DmDp_curvature_integral_plus", rep.lambda_min_DmDp, 2.0 / vol * rep.int_lambdaSplus);
    rec("DpDm_curvature_integral_minus", rep.lambda_min_DpDm, 2.0 / vol * rep.int_lambdaSminus);
    rec("D2_graded_curvature_integral", rep.lambda_min_D2,
        2.0 / vol * std::min(rep.int_lambdaSplus, rep.int_lambdaSminus));
    rec("dbar_Theta", dbar_min, -rep.int_Theta / vol);
    rec("dbar_adjoint_theta_euler", dbar_adj_min, (rep.int_theta + 2.0 * pi * rep.euler) / vol);
    if (b.rank == 1) {
        rec("line_dbar_chern", dbar_min, -2.0 * pi * rep.chern / vol);
        rec("line_dbar_adjoint_chern_euler", dbar_adj_min, 2.0 * pi * (rep.chern + rep.euler) / vol);
    }
    rec("D2_schrodinger", rep.lambda_min_D2, 2.0 * rep.lambda_min_L);
    rec("D2_graded_schrodinger", rep.lambda_min_D2, 2.0 * std::min(rep.lambda_min_Lplus, rep.lambda_min_Lminus));
    rec("schrodinger_dominates_integral", 2.0 * rep.lambda_min_L, 2.0 / vol * rep.int_lambdaS);
    rec("graded_schrodinger_improvement", 2.0 * std::min(rep.lambda_min_Lplus, rep.lambda_min_Lminus),
        2.0 * rep.lambda_min_L);
    return rep;
}

}  // namespace dbench
