#include "dbench/corpus.hpp"
#include "dbench/dirac.hpp"

#include "oracle.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

using namespace dbench;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

TorusGeometry flat(int N) { return build_torus(kTwoPi, kTwoPi, N, N, [](double, double) { return 0.0; }); }

TorusGeometry curved(int N, double a = 0.2) {
    return build_torus(kTwoPi, kTwoPi, N, N,
                       [a](double x, double y) { return a * (std::cos(x) * std::sin(y) + 0.5 * std::sin(x)); });
}

GradedSection random_section(const TorusGeometry& g, int r, unsigned seed) {
    GradedSection s;
    s.rank = r;
    s.plus = oracle::random_vector(static_cast<std::size_t>(g.sites()) * r, seed);
    s.minus = oracle::random_vector(static_cast<std::size_t>(g.sites()) * r, seed + 1);
    return s;
}

GradedSection smooth_section(const TorusGeometry& g, int r) {
    GradedSection s;
    s.rank = r;
    s.plus.resize(static_cast<std::size_t>(g.sites()) * r);
    s.minus.resize(s.plus.size());
    for (int x = 0; x < g.sites(); ++x)
        for (int a = 0; a < r; ++a) {
            const double px = g.x(x), py = g.y(x);
            s.plus[x * r + a] = cplx(std::cos(px + a), std::sin(py)) + 0.5;
            s.minus[x * r + a] = cplx(std::sin(px) * std::cos(py), 0.3 * std::cos(2 * py + a));
        }
    return s;
}

double rel_diff(const CVec& a, const CVec& b) {
    double d = 0, n = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        d = std::max(d, std::abs(a[i] - b[i]));
        n = std::max(n, std::abs(a[i]));
    }
    return d / n;
}

}  // namespace

TEST(Dirac, ConstantsAreHolomorphic) {
    const auto g = curved(16);
    const auto b = trivial_bundle(g, 2);
    const CVec c(static_cast<std::size_t>(g.sites()) * 2, cplx(0.3, -1.2));
    for (const cplx& z : dbar(g, b)(c)) EXPECT_LT(std::abs(z), 1e-12);
}

TEST(Dirac, PlaneWaveSymbol) {
    const int N = 16;
    const auto g = flat(N);
    const auto d = dplus(g, trivial_bundle(g));
    const int k = 1, l = 2;
    CVec s(static_cast<std::size_t>(g.sites()));
    for (int x = 0; x < g.sites(); ++x) s[x] = std::polar(1.0, k * g.x(x) + l * g.y(x));
    const double h = g.h1;
    const cplx sym = (std::polar(1.0, k * h) - 1.0) / h + cplx(0, 1) * (std::polar(1.0, l * h) - 1.0) / h;
    const CVec ds = d(s);
    for (int x = 0; x < g.sites(); ++x) EXPECT_NEAR(std::abs(ds[x] - sym * s[x]), 0.0, 1e-12);
    const CVec db = dbar(g, trivial_bundle(g))(s);
    EXPECT_NEAR(std::abs(db[5] * std::sqrt(2.0) - ds[5]), 0.0, 1e-13);
}

TEST(Dirac, GradedAdjointness) {
    const auto g = curved(16);
    for (int r : {1, 2}) {
        const auto b = random_bundle(g, -2, 0.4, 3, r);
        const auto dp = dplus(g, b), dm = dminus(g, b);
        const auto s = oracle::random_vector(static_cast<std::size_t>(g.sites()) * r, 1);
        const auto t = oracle::random_vector(static_cast<std::size_t>(g.sites()) * r, 2);
        const RVec w = g.weights(r);
        const cplx lhs = inner(w, dp(s), t), rhs = inner(w, s, dm(t));
        EXPECT_LT(std::abs(lhs - rhs), 1e-12 * std::abs(lhs));
        EXPECT_EQ(dp.dom_tag, "plus");
        EXPECT_EQ(dp.cod_tag, "minus");
        EXPECT_EQ(dm.dom_tag, "minus");
        EXPECT_EQ(dm.cod_tag, "plus");
    }
}

TEST(Dirac, FullOperatorSelfAdjointAndOdd) {
    const auto g = curved(12);
    const auto b = random_bundle(g, 1, 0.3, 8, 2);
    const auto d = full_dirac(g, b);
    const auto eps = grading_operator(g, 2);
    const auto s = oracle::random_vector(static_cast<std::size_t>(d.dim_dom()), 11);
    const auto t = oracle::random_vector(static_cast<std::size_t>(d.dim_dom()), 12);
    const cplx lhs = inner(d.w_dom, d(s), t), rhs = inner(d.w_dom, s, d(t));
    EXPECT_LT(std::abs(lhs - rhs), 1e-12 * std::abs(lhs));
    // D anticommutes with the grading.
    const CVec a = d(eps(s)), c = eps(d(s));
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(std::abs(a[i] + c[i]), 0.0, 1e-12);
}

TEST(Dirac, SpectrumSymmetricDenseOracle) {
    const auto g = curved(8, 0.25);
    const auto d = full_dirac(g, random_bundle(g, -1, 0.3, 21, 2));
    const Eigen::VectorXd ev = oracle::eigenvalues(d);
    const int n = static_cast<int>(ev.size());
    const double scale = ev.cwiseAbs().maxCoeff();
    for (int i = 0; i < n; ++i) EXPECT_NEAR(ev[i] + ev[n - 1 - i], 0.0, 1e-12 * scale);
}

TEST(Dirac, HalfOperatorsIsospectralDenseOracle) {
    const auto g = curved(8, 0.2);
    const auto b = random_bundle(g, 2, 0.2, 4);
    const auto dp = dplus(g, b), dm = dminus(g, b);
    const Eigen::VectorXd a = oracle::eigenvalues(compose(dm, dp)), c = oracle::eigenvalues(compose(dp, dm));
    for (int i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], c[i], 1e-10 * a.maxCoeff());
    EXPECT_GT(a.minCoeff(), -1e-10 * a.maxCoeff());
}

TEST(Dirac, KernelCountsDenseOracle) {
    const auto g = flat(16);
    for (int c1 : {1, 2, 3}) {
        const auto b = constant_curvature_bundle(g, c1);
        const Eigen::VectorXd ev = oracle::eigenvalues(compose(dminus(g, b), dplus(g, b)));
        const double thr = 1e-8 * ev.maxCoeff();
        EXPECT_EQ((ev.array() < thr).count(), c1) << c1;
    }
    for (int c1 : {-1, -2, -3}) {
        const auto b = constant_curvature_bundle(g, c1);
        const Eigen::VectorXd ev = oracle::eigenvalues(compose(dplus(g, b), dminus(g, b)));
        const double thr = 1e-8 * ev.maxCoeff();
        EXPECT_EQ((ev.array() < thr).count(), -c1) << c1;
    }
}

TEST(Dirac, CliffordIdentities) {
    const auto g = curved(16);
    const auto s = random_section(g, 2, 5);
    const RVec v1 = oracle::random_real(static_cast<std::size_t>(g.sites()), 6);
    const RVec v2 = oracle::random_real(static_cast<std::size_t>(g.sites()), 7);
    const auto cs = clifford_mul(g, v1, v2, s);
    const auto ccs = clifford_mul(g, v1, v2, cs);
    for (int x = 0; x < g.sites(); ++x) {
        const double v2n = v1[x] * v1[x] + v2[x] * v2[x];
        double sn = 0, cn = 0;
        cplx re = 0;
        for (int a = 0; a < 2; ++a) {
            const int i = x * 2 + a;
            sn += std::norm(s.plus[i]) + std::norm(s.minus[i]);
            cn += std::norm(cs.plus[i]) + std::norm(cs.minus[i]);
            re += std::conj(s.plus[i]) * cs.plus[i] + std::conj(s.minus[i]) * cs.minus[i];
            EXPECT_NEAR(std::abs(ccs.plus[i] + v2n * s.plus[i]), 0.0, 1e-12 * (1 + v2n));
            EXPECT_NEAR(std::abs(ccs.minus[i] + v2n * s.minus[i]), 0.0, 1e-12 * (1 + v2n));
        }
        EXPECT_NEAR(cn, v2n * sn, 1e-12 * (1 + v2n * sn));
        EXPECT_NEAR(re.real(), 0.0, 1e-12 * (1 + v2n * sn));
    }
}

TEST(Dirac, CliffordUnitVectorIsIsometry) {
    const auto g = flat(8);
    RVec v1(64), v2(64);
    for (int x = 0; x < 64; ++x) {
        v1[x] = std::cos(0.1 * x);
        v2[x] = std::sin(0.1 * x);
    }
    const auto s = random_section(g, 1, 3);
    EXPECT_NEAR(section_norm2(g, clifford_mul(g, v1, v2, s)), section_norm2(g, s), 1e-12 * section_norm2(g, s));
}

TEST(Dirac, WeightedAdjointConstantWeight) {
    const auto g = curved(16);
    const auto b = random_bundle(g, 1, 0.2, 2);
    const auto s = random_section(g, 1, 9);
    const ScalarField phi(static_cast<std::size_t>(g.sites()), 0.7);
    const auto a = weighted_adjoint_apply(g, b, phi, s);
    const CVec d = full_dirac(g, b)(s.stacked());
    EXPECT_LT(rel_diff(d, a.stacked()), 1e-14);
    const auto c = weighted_adjoint_clifford(g, b, phi, s);
    EXPECT_LT(rel_diff(d, c.stacked()), 1e-15);
}

TEST(Dirac, WeightedAdjointIsExactAdjoint) {
    const auto g = curved(16);
    const auto b = random_bundle(g, -1, 0.3, 2, 2);
    const ScalarField phi = random_smooth_field(g, 0.8, 4);
    const auto s = random_section(g, 2, 1), t = random_section(g, 2, 3);
    RVec w = g.weights(2);
    for (std::size_t i = 0; i < w.size(); ++i) w[i] *= std::exp(-phi[i / 2]);
    RVec ww = w;
    ww.insert(ww.end(), w.begin(), w.end());
    const cplx lhs = inner(ww, weighted_adjoint_apply(g, b, phi, s).stacked(), t.stacked());
    const cplx rhs = inner(ww, s.stacked(), full_dirac(g, b)(t.stacked()));
    EXPECT_LT(std::abs(lhs - rhs), 1e-12 * std::abs(lhs));

    const auto dp = dplus(g, b);
    const auto adj = weighted_adjoint(dp, phi, 2);
    const cplx l2 = inner(w, dp(s.plus), t.minus), r2 = inner(w, s.plus, adj(t.minus));
    EXPECT_LT(std::abs(l2 - r2), 1e-12 * std::abs(l2));
}

TEST(Dirac, WeightedAdjointFormulasAgreeToFirstOrder) {
    double err[3];
    const int grids[3] = {16, 32, 64};
    for (int k = 0; k < 3; ++k) {
        const auto g = curved(grids[k]);
        const auto b = trivial_bundle(g, 1);
        ScalarField phi(static_cast<std::size_t>(g.sites()));
        for (int x = 0; x < g.sites(); ++x) phi[x] = 0.5 * std::sin(g.x(x)) + 0.3 * std::cos(g.y(x));
        const auto s = smooth_section(g, 1);
        const auto a = weighted_adjoint_apply(g, b, phi, s);
        auto c = weighted_adjoint_clifford(g, b, phi, s);
        for (std::size_t i = 0; i < c.plus.size(); ++i) {
            c.plus[i] -= a.plus[i];
            c.minus[i] -= a.minus[i];
        }
        err[k] = std::sqrt(section_norm2(g, c) / section_norm2(g, s));
    }
    EXPECT_LT(err[0], 0.5);
    EXPECT_GT(std::log2(err[0] / err[1]), 0.9);
    EXPECT_GT(std::log2(err[1] / err[2]), 0.9);
}

TEST(Dirac, ConnectionLaplacianFlatTrivialIsFivePoint) {
    const auto g = flat(16);
    const auto lap = connection_laplacian(g, trivial_bundle(g, 1), Grading::Plus);
    const auto ref = flat_laplacian(g);
    const auto s = oracle::random_vector(static_cast<std::size_t>(g.sites()), 4);
    CVec r(s.size());
    ref.apply(s, r);
    const CVec l = lap(s);
    for (std::size_t i = 0; i < s.size(); ++i) EXPECT_NEAR(std::abs(l[i] + r[i]), 0.0, 1e-10);
}

TEST(Dirac, ConnectionLaplacianPositiveSemidefinite) {
    const auto g = curved(8, 0.3);
    const auto b = random_bundle(g, 2, 0.4, 6, 2);
    for (Grading gr : {Grading::Plus, Grading::Minus}) {
        const Eigen::VectorXd ev = oracle::eigenvalues(connection_laplacian(g, b, gr));
        EXPECT_GT(ev.minCoeff(), -1e-10 * ev.maxCoeff());
    }
}

TEST(Dirac, MagneticGroundLevel) {
    const auto g = flat(16);
    const auto b = constant_curvature_bundle(g, -1);
    const Eigen::VectorXd ev = oracle::eigenvalues(connection_laplacian(g, b, Grading::Plus));
    // Lowest Landau level |2 pi c1 / Vol| = 1 / (2 pi), approached from below on the lattice.
    EXPECT_NEAR(ev[0], 1.0 / kTwoPi, 0.02 / kTwoPi);
}

TEST(Dirac, BochnerExactForSeparatedModesOnFlatTrivial) {
    const auto g = flat(16);
    const auto b = trivial_bundle(g, 2);
    GradedSection s;
    s.rank = 2;
    s.plus.resize(512);
    s.minus.resize(512);
    for (int x = 0; x < g.sites(); ++x)
        for (int a = 0; a < 2; ++a) {
            s.plus[x * 2 + a] = cplx(std::cos(g.x(x) + a), std::sin(2 * g.x(x)));
            s.minus[x * 2 + a] = std::polar(1.0, 3.0 * g.x(x));
        }
    EXPECT_LE(bochner_residual(g, b, s), 1e-12);
    for (int x = 0; x < g.sites(); ++x)
        for (int a = 0; a < 2; ++a) s.plus[x * 2 + a] = s.minus[x * 2 + a] = std::polar(1.0, 2.0 * g.y(x));
    EXPECT_LE(bochner_residual(g, b, s), 1e-12);
}

TEST(Dirac, BochnerConstantSectionOnCurvedMetricIsFirstOrder) {
    double res[3];
    const int grids[3] = {16, 32, 64};
    for (int k = 0; k < 3; ++k) {
        const auto g = curved(grids[k]);
        GradedSection s;
        s.rank = 1;
        s.plus.assign(static_cast<std::size_t>(g.sites()), 1.0);
        s.minus.assign(static_cast<std::size_t>(g.sites()), cplx(0, 1));
        res[k] = bochner_residual(g, trivial_bundle(g, 1), s);
    }
    EXPECT_GT(res[0], res[1]);
    EXPECT_GT(res[1], res[2]);
    EXPECT_LT(res[2] / (kTwoPi / 64), 1.1 * res[0] / (kTwoPi / 16));
}

TEST(Dirac, BochnerRejectsZeroSection) {
    const auto g = flat(8);
    GradedSection s;
    s.plus.assign(64, 0.0);
    s.minus.assign(64, 0.0);
    EXPECT_THROW(bochner_residual(g, trivial_bundle(g), s), PreconditionError);
}

TEST(Dirac, TasteSeparatesSpecies) {
    const auto g = flat(16);
    const auto taste = taste_operator(g, trivial_bundle(g));
    const RVec w = g.weights(1);
    CVec smooth(256), doubler(256), y(256);
    for (int x = 0; x < 256; ++x) {
        smooth[x] = 1.0;
        doubler[x] = ((g.ix(x) + g.iy(x)) % 2 == 0) ? 1.0 : -1.0;
    }
    taste.apply(smooth, y);
    EXPECT_NEAR(inner(w, smooth, y).real() / norm2(w, smooth), 1.0, 1e-14);
    taste.apply(doubler, y);
    EXPECT_NEAR(inner(w, doubler, y).real() / norm2(w, doubler), -1.0, 1e-14);
    // Second zero of the forward symbol sits at lattice momentum (pi/2, -pi/2).
    for (int x = 0; x < 256; ++x) doubler[x] = std::polar(1.0, 0.5 * std::numbers::pi * (g.ix(x) - g.iy(x)));
    taste.apply(doubler, y);
    EXPECT_NEAR(inner(w, doubler, y).real() / norm2(w, doubler), 0.0, 1e-14);
    const CVec dd = dplus(g, trivial_bundle(g))(doubler);
    EXPECT_LT(norm2(w, dd), 1e-24);
}

TEST(Dirac, ParallelApplyMatchesSerial) {
    const auto g = curved(32);
    const auto d = full_dirac(g, random_bundle(g, 3, 0.3, 1, 2));
    const auto s = oracle::random_vector(static_cast<std::size_t>(d.dim_dom()), 8);
    CVec a(s.size()), c(s.size());
    d.apply(s, a);
    d.apply_serial(s, c);
    for (std::size_t i = 0; i < s.size(); ++i) EXPECT_EQ(a[i], c[i]);
}
