#pragma once

#include "dbench/common.hpp"

#include <string>
#include <vector>

namespace dbench {

/// Compressed-row complex matrix.
struct CsrMatrix {
    int rows = 0;
    int cols = 0;
    std::vector<int> ptr{0};
    std::vector<int> idx;
    CVec val;

    void apply(const CVec& x, CVec& y) const;         // OpenMP over rows
    void apply_serial(const CVec& x, CVec& y) const;  // reference
    CVec diagonal() const;
};

/// Row-by-row builder; duplicate column entries within a row are merged.
class CsrBuilder {
public:
    CsrBuilder(int rows, int cols);
    void add(int row, int col, cplx v);
    CsrMatrix build() const;

private:
    int rows_, cols_;
    std::vector<std::vector<std::pair<int, cplx>>> entries_;
};

/// Sparse operator between weighted spaces. The weights are the diagonal of the
/// Gram matrix of each space (one entry per vector component).
struct LinearMap {
    CsrMatrix m;
    RVec w_dom;
    RVec w_cod;
    std::string dom_tag;
    std::string cod_tag;

    int dim_dom() const { return m.cols; }
    int dim_cod() const { return m.rows; }
    CVec operator()(const CVec& x) const;
    void apply(const CVec& x, CVec& y) const { m.apply(x, y); }
    void apply_serial(const CVec& x, CVec& y) const { m.apply_serial(x, y); }
};

/// Exact adjoint with respect to the weighted inner products: W_dom^{-1} A^H W_cod.
LinearMap adjoint(const LinearMap& a);
/// a ∘ b.
LinearMap compose(const LinearMap& a, const LinearMap& b);
LinearMap add(const LinearMap& a, const LinearMap& b, cplx beta = 1.0);  // a + beta b
LinearMap scaled(const LinearMap& a, cplx alpha);
/// Multiplication by a per-component diagonal on the left / right.
CsrMatrix diag_left(const CVec& d, const CsrMatrix& a);
CsrMatrix diag_right(const CsrMatrix& a, const CVec& d);
CsrMatrix transpose_conj(const CsrMatrix& a);

/// Weighted inner product <a, b>_w = sum w conj(a) b.
cplx inner(const RVec& w, const CVec& a, const CVec& b);
double norm2(const RVec& w, const CVec& a);

}  // namespace dbench
