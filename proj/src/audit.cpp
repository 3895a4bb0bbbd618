#include "dbench/audit.hpp"

#include "dbench/weights.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace dbench {

bool AuditRecord::pass() const {
    if (!bounds.all_pass()) return false;
    if (ungraded.violations > 0 || graded.violations > 0) return false;
    for (const auto& s : solves)
        if (s.status == EstimateStatus::Fail) return false;
    return true;
}

std::string audit_section_kind(int j) {
    switch (j % 3) {
        case 0: return "white";
        case 1: return "smooth";
        default: return "smooth_exp_phi";
    }
}

GradedSection audit_section(const TorusGeometry& g, int rank, const ScalarField& phi, int j, std::uint64_t seed) {
    std::mt19937_64 rng(seed + 7919ULL * static_cast<std::uint64_t>(j));
    std::normal_distribution<double> normal(0.0, 1.0);
    const int n = g.sites() * rank;
    GradedSection s;
    s.rank = rank;
    s.plus.resize(static_cast<std::size_t>(n));
    s.minus.resize(static_cast<std::size_t>(n));
    const int kind = j % 3;
    if (kind == 0) {
        for (auto& z : s.plus) z = cplx(normal(rng), normal(rng));
        for (auto& z : s.minus) z = cplx(normal(rng), normal(rng));
        return s;
    }
    for (int a = 0; a < 2 * rank; ++a) {
        const ScalarField re = random_smooth_field(g, 1.0, rng());
        const ScalarField im = random_smooth_field(g, 1.0, rng());
        const cplx c0(normal(rng), normal(rng));
        for (int site = 0; site < g.sites(); ++site) {
            cplx v = c0 + cplx(re[site], im[site]);
            if (kind == 2) v *= std::exp(phi[site]);
            (a < rank ? s.plus[site * rank + a] : s.minus[site * rank + a - rank]) = v;
        }
    }
    return s;
}

InequalitySummary inequality_suite(const TorusGeometry& g, const HermitianBundle& b, const ScalarField& phi,
                                   int sections, bool graded, double c_tol, std::uint64_t seed) {
    const CurvatureData cd = curvature_data(g, b);
    const WeightFunction w = make_weight(g, phi);
    InequalitySummary out;
    out.worst_scaled_slack = std::numeric_limits<double>::infinity();
    const double h = g.h();
    const auto record = [&](const InequalityTerms& t, const std::string& kind) {
        const double scaled = t.slack() / (h * t.norm2);
        ++out.tested;
        if (scaled < -c_tol) ++out.violations;
        if (scaled < out.worst_scaled_slack) {
            out.worst_scaled_slack = scaled;
            out.worst_kind = kind;
        }
    };
    for (int j = 0; j < sections; ++j) {
        const GradedSection s = audit_section(g, b.rank, phi, j, seed);
        const std::string kind = audit_section_kind(j);
        if (!graded) {
            record(weighted_inequality(g, b, phi, w.lap, cd.lambdaS, s), kind);
            continue;
        }
        GradedSection sm = s, sp = s;
        std::fill(sm.plus.begin(), sm.plus.end(), cplx{});
        std::fill(sp.minus.begin(), sp.minus.end(), cplx{});
        record(weighted_inequality(g, b, phi, w.lap, cd.lambdaSminus, sm), kind + "_minus");
        record(weighted_inequality(g, b, phi, w.lap, cd.lambdaSplus, sp), kind + "_plus");
    }
    return out;
}

namespace {

CVec rhs_source(const TorusGeometry& g, int rank, bool smooth, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    CVec v(static_cast<std::size_t>(g.sites()) * rank);
    if (!smooth) {
        for (auto& z : v) z = cplx(normal(rng), normal(rng));
        return v;
    }
    for (int a = 0; a < rank; ++a) {
        const ScalarField re = random_smooth_field(g, 1.0, rng());
        const ScalarField im = random_smooth_field(g, 1.0, rng());
        for (int s = 0; s < g.sites(); ++s) v[s * rank + a] = cplx(re[s], im[s]);
    }
    return v;
}

}  // namespace

AuditRecord audit_instance(const CorpusInstance& ci, const AuditOptions& opt) {
    const TorusGeometry& g = ci.geometry;
    const HermitianBundle& b = ci.bundle;
    AuditRecord rec;
    rec.label = ci.label();
    rec.index = ci.index;
    rec.N = ci.N;
    rec.c1 = ci.c1;
    rec.rank = ci.rank;
    rec.roughness = ci.roughness;
    rec.amplitude = ci.amplitude;
    rec.h = g.h();
    const CurvatureData cd = curvature_data(g, b);

    if (opt.bounds) rec.bounds = bound_report(g, b, opt.c_tol, opt.eig);

    if (opt.inequality) {
        ScalarField phi;
        if (ci.index % 2 == 0) {
            rec.weight_kind = "random_smooth";
            phi = random_smooth_field(g, 0.25 + 0.75 * ci.amplitude / 0.3, ci.seed + 11);
        } else {
            rec.weight_kind = "poisson_lambdaS";
            phi = poisson_weight(g, cd.lambdaS).w.phi;
        }
        rec.ungraded = inequality_suite(g, b, phi, opt.sections, false, opt.c_tol, ci.seed + 13);
        rec.graded = inequality_suite(g, b, phi, opt.sections, true, opt.c_tol, ci.seed + 17);
    }

    if (opt.solve) {
        const LinearMap dp = dplus(g, b), dm = adjoint(dp);
        SolveOptions so;
        so.kernel_hint = (std::abs(ci.c1) + 1) * b.rank;
        so.eig = opt.eig;
        if (!so.eig.preconditioner)
            so.eig.preconditioner = fourier_preconditioner(g, b.rank, Symbol::Dirac, 16.0 * std::numbers::pi *
                                                                                         std::numbers::pi / g.volume);
        for (int side = 0; side < 2; ++side) {
            const ScalarField& lam = side == 0 ? cd.lambdaSminus : cd.lambdaSplus;
            const PoissonWeight pw = poisson_weight(g, lam);
            ScalarField den(static_cast<std::size_t>(g.sites()));
            for (int i = 0; i < g.sites(); ++i) den[i] = pw.w.lap[i] + 2.0 * lam[i];
            const double den_min = *std::min_element(den.begin(), den.end());
            for (int kind = 0; kind < 2; ++kind) {
                SolveSummary sum;
                sum.side = side == 0 ? "Dplus" : "Dminus";
                sum.rhs_kind = kind == 0 ? "image_of_white" : "image_of_smooth";
                sum.denominator_min = den_min;
                if (den_min > 0) {
                    const LinearMap& d = side == 0 ? dp : dm;
                    const CVec v = rhs_source(g, b.rank, kind == 1, ci.seed + 100 + 10 * side + kind);
                    const CVec f = image_of(d, v, pw.w.phi, b.rank, so);
                    SolveReport rep = solve_min_norm(d, f, pw.w.phi, b.rank, so);
                    attach_denominator(rep, den, opt.c_tol * g.h());
                    sum.status = verify_estimate(rep);
                    sum.lhs = rep.lhs;
                    sum.rhs = rep.rhs;
                    sum.residual = rep.residual;
                    sum.obstruction = rep.obstruction;
                    sum.minimality = rep.minimality;
                    sum.cokernel_dim = rep.cokernel_dim;
                    sum.kernel_dim = rep.kernel_dim;
                    sum.iterations = rep.iterations;
                }
                rec.solves.push_back(sum);
            }
        }
    }
    return rec;
}

double calibrate_c_tol(int N, int metrics, std::uint64_t seed) {
    constexpr double L = 2.0 * std::numbers::pi;
    double worst = 0;
    for (int m = 0; m < metrics; ++m) {
        const double amp = 0.3 * (m + 1) / metrics;
        const TorusGeometry g = build_torus(L, L, N, N, random_smooth_field(N, N, L, L, amp, seed + m));
        for (int r : {1, 2}) {
            const HermitianBundle b = trivial_bundle(g, r);
            for (Grading gr : {Grading::Plus, Grading::Minus}) {
                const LowModeDefect d = bochner_lowmode_defect(g, b, gr, 6 * r);
                worst = std::max(worst, d.quadratic / g.h());
            }
        }
    }
    return worst;
}

}  // namespace dbench
