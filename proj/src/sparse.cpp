#include "dbench/sparse.hpp"

#include <algorithm>
#include <map>

namespace dbench {

void CsrMatrix::apply(const CVec& x, CVec& y) const {
    y.assign(static_cast<std::size_t>(rows), cplx{});
#pragma omp parallel for schedule(static)
    for (int i = 0; i < rows; ++i) {
        cplx acc{};
        for (int k = ptr[i]; k < ptr[i + 1]; ++k) acc += val[k] * x[idx[k]];
        y[i] = acc;
    }
}

void CsrMatrix::apply_serial(const CVec& x, CVec& y) const {
    y.assign(static_cast<std::size_t>(rows), cplx{});
    for (int i = 0; i < rows; ++i) {
        cplx acc{};
        for (int k = ptr[i]; k < ptr[i + 1]; ++k) acc += val[k] * x[idx[k]];
        y[i] = acc;
    }
}

CVec CsrMatrix::diagonal() const {
    CVec d(static_cast<std::size_t>(std::min(rows, cols)), cplx{});
    for (int i = 0; i < static_cast<int>(d.size()); ++i)
        for (int k = ptr[i]; k < ptr[i + 1]; ++k)
            if (idx[k] == i) d[i] += val[k];
    return d;
}

CsrBuilder::CsrBuilder(int rows, int cols) : rows_(rows), cols_(cols), entries_(rows) {}

void CsrBuilder::add(int row, int col, cplx v) { entries_[row].emplace_back(col, v); }

CsrMatrix CsrBuilder::build() const {
    CsrMatrix m;
    m.rows = rows_;
    m.cols = cols_;
    m.ptr.assign(1, 0);
    for (const auto& row : entries_) {
        std::map<int, cplx> merged;
        for (const auto& [c, v] : row) merged[c] += v;
        for (const auto& [c, v] : merged) {
            m.idx.push_back(c);
            m.val.push_back(v);
        }
        m.ptr.push_back(static_cast<int>(m.idx.size()));
    }
    return m;
}

CVec LinearMap::operator()(const CVec& x) const {
    CVec y;
    m.apply(x, y);
    return y;
}

CsrMatrix transpose_conj(const CsrMatrix& a) {
    CsrBuilder b(a.cols, a.rows);
    for (int i = 0; i < a.rows; ++i)
        for (int k = a.ptr[i]; k < a.ptr[i + 1]; ++k) b.add(a.idx[k], i, std::conj(a.val[k]));
    return b.build();
}

CsrMatrix diag_left(const CVec& d, const CsrMatrix& a) {
    CsrMatrix m = a;
    for (int i = 0; i < m.rows; ++i)
        for (int k = m.ptr[i]; k < m.ptr[i + 1]; ++k) m.val[k] *= d[i];
    return m;
}

CsrMatrix diag_right(const CsrMatrix& a, const CVec& d) {
    CsrMatrix m = a;
    for (std::size_t k = 0; k < m.val.size(); ++k) m.val[k] *= d[m.idx[k]];
    return m;
}

LinearMap adjoint(const LinearMap& a) {
    CVec inv_dom(a.w_dom.size()), cod(a.w_cod.size());
    for (std::size_t i = 0; i < inv_dom.size(); ++i) inv_dom[i] = 1.0 / a.w_dom[i];
    for (std::size_t i = 0; i < cod.size(); ++i) cod[i] = a.w_cod[i];
    LinearMap r;
    r.m = diag_right(diag_left(inv_dom, transpose_conj(a.m)), cod);
    r.w_dom = a.w_cod;
    r.w_cod = a.w_dom;
    r.dom_tag = a.cod_tag;
    r.cod_tag = a.dom_tag;
    return r;
}

LinearMap compose(const LinearMap& a, const LinearMap& b) {
    if (a.m.cols != b.m.rows) throw PreconditionError("compose: dimension mismatch");
    CsrBuilder out(a.m.rows, b.m.cols);
    for (int i = 0; i < a.m.rows; ++i)
        for (int k = a.m.ptr[i]; k < a.m.ptr[i + 1]; ++k) {
            const int j = a.m.idx[k];
            for (int l = b.m.ptr[j]; l < b.m.ptr[j + 1]; ++l) out.add(i, b.m.idx[l], a.m.val[k] * b.m.val[l]);
        }
    LinearMap r;
    r.m = out.build();
    r.w_dom = b.w_dom;
    r.w_cod = a.w_cod;
    r.dom_tag = b.dom_tag;
    r.cod_tag = a.cod_tag;
    return r;
}

LinearMap add(const LinearMap& a, const LinearMap& b, cplx beta) {
    if (a.m.rows != b.m.rows || a.m.cols != b.m.cols) throw PreconditionError("add: dimension mismatch");
    CsrBuilder out(a.m.rows, a.m.cols);
    for (int i = 0; i < a.m.rows; ++i) {
        for (int k = a.m.ptr[i]; k < a.m.ptr[i + 1]; ++k) out.add(i, a.m.idx[k], a.m.val[k]);
        for (int k = b.m.ptr[i]; k < b.m.ptr[i + 1]; ++k) out.add(i, b.m.idx[k], beta * b.m.val[k]);
    }
    LinearMap r = a;
    r.m = out.build();
    return r;
}

LinearMap scaled(const LinearMap& a, cplx alpha) {
    LinearMap r = a;
    for (auto& v : r.m.val) v *= alpha;
    return r;
}

cplx inner(const RVec& w, const CVec& a, const CVec& b) { return par::wdot(w, a, b, 1); }

double norm2(const RVec& w, const CVec& a) { return par::wnorm2(w, a, 1); }

}  // namespace dbench
