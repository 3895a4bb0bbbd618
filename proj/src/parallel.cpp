#include "dbench/common.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace dbench::par {

void set_threads_from_env() {
#ifdef _OPENMP
    if (const char* s = std::getenv("DIRAC_BENCH_THREADS")) {
        const int n = std::atoi(s);
        if (n > 0) omp_set_num_threads(n);
    }
#endif
}

int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

namespace {

// Blocked reduction: each block summed serially, blocks combined in order.
template <class T, class F>
T blocked(std::size_t n, F&& term) {
    const std::size_t nb = (n + kBlock - 1) / kBlock;
    std::vector<T> part(nb, T{});
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(nb); ++b) {
        const std::size_t lo = static_cast<std::size_t>(b) * kBlock;
        const std::size_t hi = std::min(n, lo + kBlock);
        T acc{};
        for (std::size_t i = lo; i < hi; ++i) acc += term(i);
        part[static_cast<std::size_t>(b)] = acc;
    }
    T total{};
    for (const T& p : part) total += p;
    return total;
}

template <class T, class F>
T blocked_serial(std::size_t n, F&& term) {
    T total{};
    for (std::size_t lo = 0; lo < n; lo += kBlock) {
        const std::size_t hi = std::min(n, lo + kBlock);
        T acc{};
        for (std::size_t i = lo; i < hi; ++i) acc += term(i);
        total += acc;
    }
    return total;
}

}  // namespace

double sum(const RVec& v) {
    return blocked<double>(v.size(), [&](std::size_t i) { return v[i]; });
}

double dot(const RVec& w, const RVec& a, const RVec& b) {
    return blocked<double>(a.size(), [&](std::size_t i) { return w[i] * a[i] * b[i]; });
}

cplx wdot(const RVec& w, const CVec& a, const CVec& b, int r) {
    const auto ru = static_cast<std::size_t>(r);
    return blocked<cplx>(a.size(), [&](std::size_t i) { return w[i / ru] * std::conj(a[i]) * b[i]; });
}

double wnorm2(const RVec& w, const CVec& a, int r) {
    const auto ru = static_cast<std::size_t>(r);
    return blocked<double>(a.size(), [&](std::size_t i) { return w[i / ru] * std::norm(a[i]); });
}

void axpy(cplx alpha, const CVec& x, CVec& y) {
    const auto n = static_cast<std::ptrdiff_t>(x.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void scale(cplx alpha, CVec& x) {
    const auto n = static_cast<std::ptrdiff_t>(x.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) x[i] *= alpha;
}

namespace serial {

double sum(const RVec& v) {
    return blocked_serial<double>(v.size(), [&](std::size_t i) { return v[i]; });
}

cplx wdot(const RVec& w, const CVec& a, const CVec& b, int r) {
    const auto ru = static_cast<std::size_t>(r);
    return blocked_serial<cplx>(a.size(), [&](std::size_t i) { return w[i / ru] * std::conj(a[i]) * b[i]; });
}

double wnorm2(const RVec& w, const CVec& a, int r) {
    const auto ru = static_cast<std::size_t>(r);
    return blocked_serial<double>(a.size(), [&](std::size_t i) { return w[i / ru] * std::norm(a[i]); });
}

}  // namespace serial
}  // namespace dbench::par
