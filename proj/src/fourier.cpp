#include "dbench/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <memory>
#include <mutex>
#include <numbers>

namespace dbench {

namespace {

std::mutex planner_mutex;

struct Plan {
    int n1 = 0, n2 = 0;
    fftw_plan fwd = nullptr, bwd = nullptr;
    RVec inv_symbol;
    RVec metric;
    Plan(int a, int b) : n1(a), n2(b) {
        auto* buf = fftw_alloc_complex(static_cast<std::size_t>(a) * b);
        std::lock_guard<std::mutex> lock(planner_mutex);
        fwd = fftw_plan_dft_2d(a, b, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
        bwd = fftw_plan_dft_2d(a, b, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
        fftw_free(buf);
    }
    ~Plan() {
        std::lock_guard<std::mutex> lock(planner_mutex);
        fftw_destroy_plan(fwd);
        fftw_destroy_plan(bwd);
    }
    Plan(const Plan&) = delete;
    Plan& operator=(const Plan&) = delete;
};

}  // namespace

Operator fourier_preconditioner(const TorusGeometry& g, int components, Symbol sym, double shift) {
    if (components < 1) throw PreconditionError("fourier_preconditioner: components must be positive");
    if (!(shift > 0)) throw PreconditionError("fourier_preconditioner: shift must be positive");
    constexpr double pi = std::numbers::pi;
    auto plan = std::make_shared<Plan>(g.N1, g.N2);
    plan->inv_symbol.resize(static_cast<std::size_t>(g.sites()));
    for (int k = 0; k < g.N1; ++k)
        for (int l = 0; l < g.N2; ++l) {
            const cplx a = (std::polar(1.0, 2 * pi * k / g.N1) - 1.0) / g.h1;
            const cplx b = (std::polar(1.0, 2 * pi * l / g.N2) - 1.0) / g.h2;
            const double s = sym == Symbol::Dirac ? std::norm(a + cplx(0, 1) * b) : std::norm(a) + std::norm(b);
            plan->inv_symbol[k * g.N2 + l] = 1.0 / ((s + shift) * g.sites());
        }
    plan->metric.resize(static_cast<std::size_t>(g.sites()));
    for (int s = 0; s < g.sites(); ++s) plan->metric[s] = std::exp(2.0 * g.u[s]);
    const int n = g.sites();
    return [plan, components, n](const CVec& x, CVec& y) {
        if (x.size() != static_cast<std::size_t>(n) * components)
            throw PreconditionError("fourier_preconditioner: vector size mismatch");
        y.resize(x.size());
        auto* buf = fftw_alloc_complex(static_cast<std::size_t>(n));
        for (int c = 0; c < components; ++c) {
            for (int s = 0; s < n; ++s) {
                const cplx v = x[static_cast<std::size_t>(s) * components + c] * plan->metric[s];
                buf[s][0] = v.real();
                buf[s][1] = v.imag();
            }
            fftw_execute_dft(plan->fwd, buf, buf);
            for (int s = 0; s < n; ++s) {
                buf[s][0] *= plan->inv_symbol[s];
                buf[s][1] *= plan->inv_symbol[s];
            }
            fftw_execute_dft(plan->bwd, buf, buf);
            for (int s = 0; s < n; ++s) y[static_cast<std::size_t>(s) * components + c] = cplx(buf[s][0], buf[s][1]);
        }
        fftw_free(buf);
    };
}

}  // namespace dbench
