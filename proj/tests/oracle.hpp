#pragma once

// Dense reference computations shared by the unit tests.

#include "dbench/sparse.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <random>

namespace oracle {

inline Eigen::MatrixXcd dense(const dbench::CsrMatrix& a) {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(a.rows, a.cols);
    for (int i = 0; i < a.rows; ++i)
        for (int k = a.ptr[i]; k < a.ptr[i + 1]; ++k) m(i, a.idx[k]) += a.val[k];
    return m;
}

/// Eigenvalues of a map that is self-adjoint in its domain weights, via the
/// similarity W^{1/2} A W^{-1/2}.
inline Eigen::VectorXd eigenvalues(const dbench::LinearMap& a) {
    Eigen::MatrixXcd m = dense(a.m);
    const int n = a.dim_dom();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) *= std::sqrt(a.w_cod[i] / a.w_dom[j]);
    Eigen::MatrixXcd h = 0.5 * (m + m.adjoint());
    return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(h, Eigen::EigenvaluesOnly).eigenvalues();
}

inline dbench::CVec random_vector(std::size_t n, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> d(0.0, 1.0);
    dbench::CVec v(n);
    for (auto& z : v) z = {d(rng), d(rng)};
    return v;
}

inline dbench::RVec random_real(std::size_t n, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> d(0.0, 1.0);
    dbench::RVec v(n);
    for (auto& x : v) x = d(rng);
    return v;
}

}  // namespace oracle
