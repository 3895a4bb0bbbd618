#include "dbench/corpus.hpp"
#include "dbench/l2solve.hpp"

#include "oracle.hpp"

#include <gtest/gtest.h>

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

SolveOptions quiet_options(const TorusGeometry& g, int rank, int hint) {
    SolveOptions o;
    o.kernel_hint = hint;
    o.eig.preconditioner = fourier_preconditioner(g, rank, Symbol::Dirac, 1.0);
    return o;
}

}  // namespace

TEST(L2Solve, RecoversMinimalRepresentative) {
    const auto g = flat(16);
    const auto b = trivial_bundle(g);
    const auto d = dplus(g, b);
    CVec u0(static_cast<std::size_t>(g.sites()));
    for (int s = 0; s < g.sites(); ++s) u0[s] = cplx(std::sin(g.x(s)), std::cos(2 * g.y(s))) + 3.0;
    const ScalarField zero(u0.size(), 0.0);
    const auto rep = solve_min_norm(d, d(u0), zero, 1, quiet_options(g, 1, 2));
    ASSERT_TRUE(rep.solvable);
    EXPECT_LE(rep.residual, 1e-10);
    // Kernel of D+ here: constants and the doubler mode; u0 minus 3 is orthogonal to both.
    for (int s = 0; s < g.sites(); ++s) EXPECT_NEAR(std::abs(rep.u[s] - (u0[s] - 3.0)), 0.0, 1e-8);
    EXPECT_LE(rep.minimality, 1e-8);
    EXPECT_EQ(rep.kernel_dim, 2);
}

TEST(L2Solve, MinimalityInWeightedProduct) {
    const auto g = curved(16);
    const auto b = random_bundle(g, 1, 0.3, 2);
    const auto d = dplus(g, b);
    const ScalarField phi = random_smooth_field(g, 0.6, 7);
    const auto o = quiet_options(g, 1, 3);
    const CVec f = image_of(d, oracle::random_vector(static_cast<std::size_t>(g.sites()), 5), phi, 1, o);
    const auto rep = solve_min_norm(d, f, phi, 1, o);
    ASSERT_TRUE(rep.solvable);
    EXPECT_LE(rep.residual, 1e-8);
    EXPECT_LE(rep.minimality, 1e-8);
    EXPECT_GE(rep.kernel_dim, 1);
}

TEST(L2Solve, GradedLandauSolveMeetsBound) {
    const auto g = flat(32);
    const auto b = constant_curvature_bundle(g, -1);
    const auto cd = curvature_data(g, b);
    const auto pw = poisson_weight(g, cd.lambdaSplus);
    const auto d = dminus(g, b);
    const auto o = quiet_options(g, 1, 2);
    const CVec f = image_of(d, oracle::random_vector(static_cast<std::size_t>(g.sites()), 11), pw.w.phi, 1, o);
    auto rep = solve_min_norm(d, f, pw.w.phi, 1, o);
    ASSERT_TRUE(rep.solvable);
    EXPECT_LE(rep.residual, 1e-8);
    ScalarField den(pw.w.phi.size());
    for (std::size_t s = 0; s < den.size(); ++s) den[s] = pw.w.lap[s] + 2.0 * cd.lambdaSplus[s];
    attach_denominator(rep, den, 0.5 * g.h());
    const double fnorm = weighted_norm2(g, pw.w.phi, f, 1);
    EXPECT_NEAR(rep.rhs, g.volume / (2.0 * integrate(g, cd.lambdaSplus)) * fnorm, 1e-9 * rep.rhs);
    EXPECT_EQ(verify_estimate(rep), EstimateStatus::Pass);
    EXPECT_LT(rep.lhs, rep.rhs);
}

TEST(L2Solve, HolomorphicSectionIsObstruction) {
    const auto g = flat(24);
    const auto b = constant_curvature_bundle(g, 1);
    const auto dp = dplus(g, b);
    const auto sp = species_spectrum(compose(dminus(g, b), dp), taste_operator(g, b), 3);
    ASSERT_EQ(sp.physical_kernel, 1);
    const auto k = kernel_dimension(compose(dminus(g, b), dp), 2);
    // Physical kernel element: largest taste inside the numerical kernel.
    const auto taste = taste_operator(g, b);
    CVec f;
    double best = -2;
    for (const auto& v : k.basis) {
        CVec tv(v.size());
        taste.apply(v, tv);
        const double t = inner(dp.w_dom, v, tv).real() / norm2(dp.w_dom, v);
        if (t > best) best = t, f = v;
    }
    ASSERT_GT(best, 0.5);
    const ScalarField zero(f.size(), 0.0);
    const auto rep = solve_min_norm(dminus(g, b), f, zero, 1, quiet_options(g, 1, 3));
    EXPECT_FALSE(rep.solvable);
    EXPECT_NEAR(rep.obstruction, 1.0, 1e-6);
    EXPECT_EQ(verify_estimate(rep), EstimateStatus::NotEvaluable);
}

TEST(L2Solve, ConstantDenominatorClassicalCase) {
    const auto g = flat(16);
    const auto b = trivial_bundle(g);
    const auto d = dplus(g, b);
    const ScalarField zero(static_cast<std::size_t>(g.sites()), 0.0);
    const auto o = quiet_options(g, 1, 2);
    const CVec f = image_of(d, oracle::random_vector(zero.size(), 2), zero, 1, o);
    auto rep = solve_min_norm(d, f, zero, 1, o);
    const double lam = 0.8;
    attach_denominator(rep, ScalarField(zero.size(), 2.0 * lam), 0.0);
    EXPECT_NEAR(rep.rhs, norm2(g.weights(1), f) / (2.0 * lam), 1e-12 * rep.rhs);
}

TEST(L2Solve, NonPositiveDenominatorNotEvaluable) {
    const auto g = flat(16);
    const auto b = trivial_bundle(g);
    const auto d = dplus(g, b);
    const ScalarField zero(static_cast<std::size_t>(g.sites()), 0.0);
    const auto o = quiet_options(g, 1, 2);
    auto rep = solve_min_norm(d, image_of(d, oracle::random_vector(zero.size(), 4), zero, 1, o), zero, 1, o);
    ASSERT_TRUE(rep.solvable);
    ScalarField den(zero.size(), 1.0);
    den[17] = 0.0;
    attach_denominator(rep, den, 0.1);
    EXPECT_EQ(verify_estimate(rep), EstimateStatus::NotEvaluable);
    EXPECT_EQ(to_string(EstimateStatus::NotEvaluable), "not_evaluable");
    SolveReport bare = rep;
    bare.has_denominator = false;
    EXPECT_EQ(verify_estimate(bare), EstimateStatus::NotEvaluable);
}

TEST(L2Solve, ImageOfLiesInRange) {
    const auto g = flat(16);
    const auto b = constant_curvature_bundle(g, 2);
    const auto d = dplus(g, b);
    const ScalarField zero(static_cast<std::size_t>(g.sites()), 0.0);
    const auto o = quiet_options(g, 1, 3);
    const auto rep = solve_min_norm(d, image_of(d, oracle::random_vector(zero.size(), 9), zero, 1, o), zero, 1, o);
    EXPECT_TRUE(rep.solvable);
    EXPECT_LT(rep.obstruction, 1e-8);
    EXPECT_LE(rep.residual, 1e-8);
}
