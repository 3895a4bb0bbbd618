#include "dbench/gauge.hpp"

#include "dbench/small_eigen.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace dbench {

namespace {

constexpr double kPi = std::numbers::pi;

void identity(int r, cplx* m) {
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j) m[i * r + j] = (i == j) ? 1.0 : 0.0;
}

void check_rank(int r) {
    if (r < 1 || r > 4) throw PreconditionError("bundle rank must be between 1 and 4");
}

void check_flux_range(const TorusGeometry& g, int c1) {
    const double per = 2.0 * kPi * std::abs(c1) / (static_cast<double>(g.N1) * g.N2);
    if (4 * static_cast<long>(std::abs(c1)) > static_cast<long>(g.N1) * g.N2 || per >= kPi)
        throw GaugeError("flux too concentrated: |c1| exceeds N1*N2/4");
}

// Multiply every link of b in place by exp(i psi) (rank 1 factor on all components).
void twist(HermitianBundle& b, int s, double psi_x, double psi_y) {
    const int r = b.rank;
    const cplx ex = std::polar(1.0, psi_x), ey = std::polar(1.0, psi_y);
    for (int k = 0; k < r * r; ++k) {
        b.Ux(s)[k] *= ex;
        b.Uy(s)[k] *= ey;
    }
}

}  // namespace

HermitianBundle trivial_bundle(const TorusGeometry& g, int r) {
    check_rank(r);
    HermitianBundle b;
    b.rank = r;
    b.sites = g.sites();
    b.ux.assign(static_cast<std::size_t>(g.sites()) * r * r, 0.0);
    b.uy = b.ux;
    for (int s = 0; s < g.sites(); ++s) {
        identity(r, b.Ux(s));
        identity(r, b.Uy(s));
    }
    return b;
}

HermitianBundle constant_curvature_bundle(const TorusGeometry& g, int c1, int r) {
    if (r != 1) throw PreconditionError("constant_curvature_bundle: constant-flux construction needs rank 1");
    check_flux_range(g, c1);
    HermitianBundle b = trivial_bundle(g, 1);
    const double phi = 2.0 * kPi * c1 / (static_cast<double>(g.N1) * g.N2);
    for (int s = 0; s < g.sites(); ++s) {
        const int ix = g.ix(s), iy = g.iy(s);
        b.Uy(s)[0] = std::polar(1.0, -phi * ix);
        if (ix == g.N1 - 1) b.Ux(s)[0] = std::polar(1.0, phi * g.N1 * iy);
    }
    return b;
}

HermitianBundle random_bundle(const TorusGeometry& g, int c1, double roughness, std::uint64_t seed, int r) {
    if (!(roughness >= 0)) throw PreconditionError("random_bundle: roughness must be nonnegative");
    check_rank(r);
    check_flux_range(g, c1);
    HermitianBundle line = constant_curvature_bundle(g, c1, 1);
    HermitianBundle b = trivial_bundle(g, r);
    for (int s = 0; s < g.sites(); ++s) {
        b.Ux(s)[0] = line.Ux(s)[0];
        b.Uy(s)[0] = line.Uy(s)[0];
    }
    if (roughness == 0.0) return b;

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * kPi);

    // Mean-zero abelian flux perturbation with density roughness * g, g a random
    // combination of low Fourier modes normalised to max |g| = 1. The stream
    // function chi is obtained mode by mode from the discrete symbol so that the
    // plaquette flux is exactly h1 h2 Delta_0 chi.
    struct Mode { int k, l; double a, ph; };
    std::vector<Mode> modes;
    for (int k = -2; k <= 2; ++k)
        for (int l = -2; l <= 2; ++l)
            if (k != 0 || l != 0) modes.push_back({k, l, normal(rng), phase(rng)});
    const int n = g.sites();
    RVec gs(static_cast<std::size_t>(n), 0.0), chi(static_cast<std::size_t>(n), 0.0);
    for (const auto& m : modes) {
        const double sym = -4.0 / (g.h1 * g.h1) * std::pow(std::sin(kPi * m.k / g.N1), 2)
                           - 4.0 / (g.h2 * g.h2) * std::pow(std::sin(kPi * m.l / g.N2), 2);
        for (int s = 0; s < n; ++s) {
            const double arg = 2.0 * kPi * (m.k * g.ix(s) / static_cast<double>(g.N1)
                                            + m.l * g.iy(s) / static_cast<double>(g.N2)) + m.ph;
            gs[s] += m.a * std::cos(arg);
            chi[s] += m.a * std::cos(arg) / sym;
        }
    }
    double gmax = 0;
    for (double v : gs) gmax = std::max(gmax, std::abs(v));
    const double amp = roughness / gmax;
    const double rx = g.h1 / g.h2, ry = g.h2 / g.h1;
    for (int s = 0; s < n; ++s) {
        const double psi_x = amp * rx * (chi[s] - chi[g.ym(s)]);
        const double psi_y = -amp * ry * (chi[s] - chi[g.xm(s)]);
        twist(b, s, psi_x, psi_y);
    }

    if (r > 1) {
        // Traceless Hermitian smooth perturbation of every link; determinants and
        // hence the Chern number are unchanged.
        struct Field { int k, l; double ph; std::vector<cplx> m[2]; };
        std::vector<Field> fields;
        for (int k = 0; k <= 1; ++k)
            for (int l = -1; l <= 1; ++l) {
                Field f{k, l, phase(rng), {}};
                for (auto& m : f.m) {
                    m.assign(static_cast<std::size_t>(r * r), cplx{});
                    for (int p = 0; p < r; ++p)
                        for (int q = p; q < r; ++q) {
                            if (p == q) m[p * r + p] = normal(rng);
                            else {
                                const cplx z(normal(rng), normal(rng));
                                m[p * r + q] = z;
                                m[q * r + p] = std::conj(z);
                            }
                        }
                    cplx tr{};
                    for (int p = 0; p < r; ++p) tr += m[p * r + p];
                    for (int p = 0; p < r; ++p) m[p * r + p] -= tr / static_cast<double>(r);
                }
                fields.push_back(std::move(f));
            }
        std::vector<cplx> h(static_cast<std::size_t>(r * r)), e(static_cast<std::size_t>(r * r)),
            tmp(static_cast<std::size_t>(r * r));
        for (int s = 0; s < n; ++s)
            for (int dir = 0; dir < 2; ++dir) {
                std::fill(h.begin(), h.end(), cplx{});
                for (const auto& f : fields) {
                    const double w = std::cos(2.0 * kPi * (f.k * g.ix(s) / static_cast<double>(g.N1)
                                                           + f.l * g.iy(s) / static_cast<double>(g.N2)) + f.ph);
                    for (int k = 0; k < r * r; ++k) h[k] += w * f.m[dir][k];
                }
                herm_expi(r, h.data(), roughness * (dir == 0 ? g.h1 : g.h2), e.data());
                cplx* u = dir == 0 ? b.Ux(s) : b.Uy(s);
                matmul(r, u, e.data(), tmp.data());
                std::copy(tmp.begin(), tmp.end(), u);
            }
    }
    // Branch-cut safety of the result.
    for (double p : plaquette_phases(g, b))
        if (std::abs(p) >= kPi - 1e-9) throw GaugeError("flux too concentrated: plaquette phase on the branch cut");
    return b;
}

void plaquette(const TorusGeometry& g, const HermitianBundle& b, int s, cplx* out) {
    const int r = b.rank;
    std::vector<cplx> t1(static_cast<std::size_t>(r * r)), t2(static_cast<std::size_t>(r * r));
    // U_y(s) U_x(s+y) U_y(s+x)^H U_x(s)^H
    matmul(r, b.Uy(s), b.Ux(g.yp(s)), t1.data());
    matmul_bh(r, t1.data(), b.Uy(g.xp(s)), t2.data());
    matmul_bh(r, t2.data(), b.Ux(s), out);
}

RVec plaquette_phases(const TorusGeometry& g, const HermitianBundle& b) {
    const int r = b.rank;
    RVec ph(static_cast<std::size_t>(g.sites()));
#pragma omp parallel
    {
        std::vector<cplx> p(static_cast<std::size_t>(r * r));
#pragma omp for schedule(static)
        for (int s = 0; s < g.sites(); ++s) {
            plaquette(g, b, s, p.data());
            ph[s] = std::arg(det(r, p.data()));
        }
    }
    return ph;
}

int chern_number(const TorusGeometry& g, const HermitianBundle& b) {
    const RVec ph = plaquette_phases(g, b);
    for (double p : ph)
        if (std::abs(p) >= kPi - 1e-9) throw GaugeError("flux too concentrated: plaquette phase on the branch cut");
    const double raw = par::serial::sum(ph) / (2.0 * kPi);
    const double k = std::round(raw);
    if (std::abs(raw - k) > 1e-6) throw GaugeError("chern_number: flux sum is not an integer multiple of 2 pi");
    return static_cast<int>(k);
}

CurvatureData curvature_data(const TorusGeometry& g, const HermitianBundle& b) {
    const int r = b.rank, rr = r * r, n = g.sites();
    CurvatureData c;
    c.rank = r;
    c.K = gaussian_curvature(g);
    // Plaquette angle matrices A_p = -i log P, still based at the corner.
    CVec ang(static_cast<std::size_t>(n) * rr);
    bool branch = false;
#pragma omp parallel
    {
        std::vector<cplx> p(static_cast<std::size_t>(rr));
#pragma omp for schedule(static)
        for (int s = 0; s < n; ++s) {
            plaquette(g, b, s, p.data());
            if (!unitary_log(r, p.data(), ang.data() + static_cast<std::size_t>(s) * rr)) branch = true;
        }
    }
    if (branch) throw GaugeError("flux too concentrated: plaquette holonomy on the branch cut");

    c.F.resize(ang.size());
    for (int s = 0; s < n; ++s) {
        const double e2u = 0.25 * (std::exp(2 * g.u[s]) + std::exp(2 * g.u[g.xp(s)]) + std::exp(2 * g.u[g.yp(s)])
                                   + std::exp(2 * g.u[g.xp(g.yp(s))]));
        for (int k = 0; k < rr; ++k) c.F[s * rr + k] = ang[s * rr + k] / (e2u * g.h1 * g.h2);
    }

    c.theta.resize(n);
    c.Theta.resize(n);
    c.lambdaSplus.resize(n);
    c.lambdaSminus.resize(n);
    c.lambdaS.resize(n);
    c.Rplus.resize(static_cast<std::size_t>(n) * rr);
    c.Rminus.resize(static_cast<std::size_t>(n) * rr);
#pragma omp parallel
    {
        std::vector<cplx> acc(rr), v(rr), t1(rr), t2(rr);
        std::vector<double> lam(r), lamm(r);
#pragma omp for schedule(static)
        for (int s = 0; s < n; ++s) {
            // Average of the four incident plaquettes, transported to s.
            const int a = g.xm(s), bq = g.ym(s), d = g.xm(g.ym(s));
            std::copy(ang.begin() + static_cast<std::ptrdiff_t>(s) * rr,
                      ang.begin() + static_cast<std::ptrdiff_t>(s + 1) * rr, acc.begin());
            const auto conj_add = [&](const cplx* trans, int base) {
                // trans maps the fibre at s to the fibre at base: add trans^H A trans.
                matmul_ah(r, trans, ang.data() + static_cast<std::size_t>(base) * rr, t1.data());
                matmul(r, t1.data(), trans, t2.data());
                for (int k = 0; k < rr; ++k) acc[k] += t2[k];
            };
            conj_add(b.Ux(a), a);
            conj_add(b.Uy(bq), bq);
            matmul(r, b.Ux(d), b.Uy(g.xp(d)), v.data());
            conj_add(v.data(), d);
            const double inv = 0.25 / (g.area[s]);
            for (int k = 0; k < rr; ++k) {
                acc[k] *= inv;
                c.Rplus[s * rr + k] = -acc[k];
                c.Rminus[s * rr + k] = acc[k];
            }
            for (int i = 0; i < r; ++i) c.Rminus[s * rr + i * r + i] += c.K[s];
            herm_eigvals(r, acc.data(), lam.data());
            c.theta[s] = lam[0];
            c.Theta[s] = lam[r - 1];
            c.lambdaSplus[s] = -lam[r - 1];
            c.lambdaSminus[s] = lam[0] + c.K[s];
            c.lambdaS[s] = std::min(c.lambdaSplus[s], c.lambdaSminus[s]);
        }
    }
    return c;
}

CVec random_site_unitaries(int sites, int r, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    CVec w(static_cast<std::size_t>(sites) * r * r);
    std::vector<cplx> h(static_cast<std::size_t>(r * r));
    for (int s = 0; s < sites; ++s) {
        for (int i = 0; i < r; ++i)
            for (int j = i; j < r; ++j) {
                if (i == j) h[i * r + i] = normal(rng);
                else {
                    const cplx z(normal(rng), normal(rng));
                    h[i * r + j] = z;
                    h[j * r + i] = std::conj(z);
                }
            }
        herm_expi(r, h.data(), 2.0, w.data() + static_cast<std::size_t>(s) * r * r);
    }
    return w;
}

HermitianBundle gauge_transform(const TorusGeometry& g, const HermitianBundle& b, const CVec& w) {
    const int r = b.rank, rr = r * r;
    HermitianBundle out = b;
    std::vector<cplx> t(rr);
    for (int s = 0; s < g.sites(); ++s) {
        const cplx* ws = w.data() + static_cast<std::size_t>(s) * rr;
        matmul(r, ws, b.Ux(s), t.data());
        matmul_bh(r, t.data(), w.data() + static_cast<std::size_t>(g.xp(s)) * rr, out.Ux(s));
        matmul(r, ws, b.Uy(s), t.data());
        matmul_bh(r, t.data(), w.data() + static_cast<std::size_t>(g.yp(s)) * rr, out.Uy(s));
    }
    return out;
}

double max_unitarity_defect(const HermitianBundle& b) {
    const int r = b.rank, rr = r * r;
    std::vector<cplx> t(rr);
    double worst = 0;
    for (int s = 0; s < b.sites; ++s)
        for (int dir = 0; dir < 2; ++dir) {
            const cplx* u = dir == 0 ? b.Ux(s) : b.Uy(s);
            matmul_ah(r, u, u, t.data());
            for (int i = 0; i < r; ++i)
                for (int j = 0; j < r; ++j) worst = std::max(worst, std::abs(t[i * r + j] - (i == j ? 1.0 : 0.0)));
        }
    return worst;
}

}  // namespace dbench
