#include "dbench/small_eigen.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

namespace dbench {

namespace {

constexpr int kMax = 8;

// Cyclic Jacobi for a real symmetric n x n matrix, n <= kMax.
void jacobi(int n, std::array<double, kMax * kMax>& a, std::array<double, kMax * kMax>& v) {
    v.fill(0.0);
    for (int i = 0; i < n; ++i) v[i * n + i] = 1.0;
    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = 0.0, tot = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                tot += a[i * n + j] * a[i * n + j];
                if (i != j) off += a[i * n + j] * a[i * n + j];
            }
        if (off <= 1e-32 * std::max(tot, 1e-300)) return;
        for (int p = 0; p < n - 1; ++p)
            for (int q = p + 1; q < n; ++q) {
                const double apq = a[p * n + q];
                if (std::abs(apq) < 1e-300) continue;
                const double theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
                for (int k = 0; k < n; ++k) {
                    const double akp = a[k * n + p], akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const double apk = a[p * n + k], aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                for (int k = 0; k < n; ++k) {
                    const double vkp = v[k * n + p], vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
    }
}

}  // namespace

void herm_eigvals(int r, const cplx* a, double* evals) {
    if (r == 1) {
        evals[0] = a[0].real();
        return;
    }
    if (r == 2) {
        const double p = a[0].real(), q = a[3].real();
        const double m = 0.5 * (p + q), d = std::hypot(0.5 * (p - q), std::abs(a[1]));
        evals[0] = m - d;
        evals[1] = m + d;
        return;
    }
    std::vector<cplx> tmp(static_cast<std::size_t>(r * r));
    herm_eig(r, a, evals, tmp.data());
}

void herm_eig(int r, const cplx* a, double* evals, cplx* evecs) {
    if (r < 1 || r > 4) throw PreconditionError("herm_eig: rank must be 1..4");
    if (r == 1) {
        evals[0] = a[0].real();
        evecs[0] = 1.0;
        return;
    }
    const int n = 2 * r;
    std::array<double, kMax * kMax> m{}, v{};
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j) {
            const cplx z = 0.5 * (a[i * r + j] + std::conj(a[j * r + i]));
            m[i * n + j] = z.real();
            m[(i + r) * n + (j + r)] = z.real();
            m[i * n + (j + r)] = -z.imag();
            m[(i + r) * n + j] = z.imag();
        }
    jacobi(n, m, v);
    std::array<int, kMax> order{};
    std::iota(order.begin(), order.begin() + n, 0);
    std::sort(order.begin(), order.begin() + n, [&](int x, int y) { return m[x * n + x] < m[y * n + y]; });
    int found = 0;
    std::vector<cplx> acc(static_cast<std::size_t>(r * r));
    for (int t = 0; t < n && found < r; ++t) {
        const int k = order[t];
        std::vector<cplx> z(static_cast<std::size_t>(r));
        for (int i = 0; i < r; ++i) z[i] = cplx(v[i * n + k], v[(i + r) * n + k]);
        for (int pass = 0; pass < 2; ++pass)
            for (int f = 0; f < found; ++f) {
                cplx ip{};
                for (int i = 0; i < r; ++i) ip += std::conj(acc[i * r + f]) * z[i];
                for (int i = 0; i < r; ++i) z[i] -= ip * acc[i * r + f];
            }
        double nz = 0;
        for (int i = 0; i < r; ++i) nz += std::norm(z[i]);
        nz = std::sqrt(nz);
        if (nz < 0.5) continue;
        for (int i = 0; i < r; ++i) acc[i * r + found] = z[i] / nz;
        ++found;
    }
    // Rayleigh quotients give eigenvalues consistent with the returned vectors.
    std::vector<double> lam(static_cast<std::size_t>(r));
    for (int f = 0; f < r; ++f) {
        cplx q{};
        for (int i = 0; i < r; ++i)
            for (int j = 0; j < r; ++j) q += std::conj(acc[i * r + f]) * a[i * r + j] * acc[j * r + f];
        lam[f] = q.real();
    }
    std::vector<int> ord(static_cast<std::size_t>(r));
    std::iota(ord.begin(), ord.end(), 0);
    std::sort(ord.begin(), ord.end(), [&](int x, int y) { return lam[x] < lam[y]; });
    for (int f = 0; f < r; ++f) {
        evals[f] = lam[ord[f]];
        for (int i = 0; i < r; ++i) evecs[i * r + f] = acc[i * r + ord[f]];
    }
}

void herm_expi(int r, const cplx* h, double t, cplx* out) {
    std::vector<double> lam(static_cast<std::size_t>(r));
    std::vector<cplx> v(static_cast<std::size_t>(r * r));
    herm_eig(r, h, lam.data(), v.data());
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j) {
            cplx s{};
            for (int k = 0; k < r; ++k) s += v[i * r + k] * std::polar(1.0, t * lam[k]) * std::conj(v[j * r + k]);
            out[i * r + j] = s;
        }
}

bool unitary_log(int r, const cplx* p, cplx* f) {
    if (r == 1) {
        if (std::abs(p[0] + 1.0) < 1e-12) return false;
        f[0] = std::arg(p[0]);
        return true;
    }
    // X = i (I - P)(I + P)^{-1} is Hermitian with eigenvalues tan(phi/2).
    std::vector<cplx> ip(static_cast<std::size_t>(r * r)), im(static_cast<std::size_t>(r * r)),
        inv(static_cast<std::size_t>(r * r)), x(static_cast<std::size_t>(r * r));
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j) {
            const cplx id = (i == j) ? 1.0 : 0.0;
            ip[i * r + j] = id + p[i * r + j];
            im[i * r + j] = cplx(0, 1) * (id - p[i * r + j]);
        }
    if (!invert(r, ip.data(), inv.data())) return false;
    matmul(r, im.data(), inv.data(), x.data());
    std::vector<double> lam(static_cast<std::size_t>(r));
    std::vector<cplx> v(static_cast<std::size_t>(r * r));
    herm_eig(r, x.data(), lam.data(), v.data());
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j) {
            cplx s{};
            for (int k = 0; k < r; ++k) s += v[i * r + k] * (2.0 * std::atan(lam[k])) * std::conj(v[j * r + k]);
            f[i * r + j] = s;
        }
    return true;
}

void matmul(int r, const cplx* a, const cplx* b, cplx* out) {
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j) {
            cplx s{};
            for (int k = 0; k < r; ++k) s += a[i * r + k] * b[k * r + j];
            out[i * r + j] = s;
        }
}

void matmul_ah(int r, const cplx* a, const cplx* b, cplx* out) {
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j) {
            cplx s{};
            for (int k = 0; k < r; ++k) s += std::conj(a[k * r + i]) * b[k * r + j];
            out[i * r + j] = s;
        }
}

void matmul_bh(int r, const cplx* a, const cplx* b, cplx* out) {
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j) {
            cplx s{};
            for (int k = 0; k < r; ++k) s += a[i * r + k] * std::conj(b[j * r + k]);
            out[i * r + j] = s;
        }
}

cplx det(int r, const cplx* a) {
    std::vector<cplx> m(a, a + r * r);
    cplx d = 1.0;
    for (int c = 0; c < r; ++c) {
        int piv = c;
        for (int i = c + 1; i < r; ++i)
            if (std::abs(m[i * r + c]) > std::abs(m[piv * r + c])) piv = i;
        if (std::abs(m[piv * r + c]) == 0.0) return 0.0;
        if (piv != c) {
            for (int j = 0; j < r; ++j) std::swap(m[c * r + j], m[piv * r + j]);
            d = -d;
        }
        d *= m[c * r + c];
        for (int i = c + 1; i < r; ++i) {
            const cplx f = m[i * r + c] / m[c * r + c];
            for (int j = c; j < r; ++j) m[i * r + j] -= f * m[c * r + j];
        }
    }
    return d;
}

bool invert(int r, const cplx* a, cplx* out) {
    std::vector<cplx> m(a, a + r * r);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j) out[i * r + j] = (i == j) ? 1.0 : 0.0;
    for (int c = 0; c < r; ++c) {
        int piv = c;
        for (int i = c + 1; i < r; ++i)
            if (std::abs(m[i * r + c]) > std::abs(m[piv * r + c])) piv = i;
        if (std::abs(m[piv * r + c]) < 1e-14) return false;
        for (int j = 0; j < r; ++j) {
            std::swap(m[c * r + j], m[piv * r + j]);
            std::swap(out[c * r + j], out[piv * r + j]);
        }
        const cplx inv = 1.0 / m[c * r + c];
        for (int j = 0; j < r; ++j) {
            m[c * r + j] *= inv;
            out[c * r + j] *= inv;
        }
        for (int i = 0; i < r; ++i) {
            if (i == c) continue;
            const cplx f = m[i * r + c];
            for (int j = 0; j < r; ++j) {
                m[i * r + j] -= f * m[c * r + j];
                out[i * r + j] -= f * out[c * r + j];
            }
        }
    }
    return true;
}

}  // namespace dbench
