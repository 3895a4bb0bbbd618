#pragma once

#include "dbench/common.hpp"

namespace dbench {

/// Dense r x r Hermitian eigensolver for r <= 4 (row-major input).
/// Eigenvalues ascending; eigenvector k is column k of evecs (row-major r x r).
/// r = 1, 2 use closed forms for eigenvalues; vectors and r > 2 use cyclic Jacobi
/// on the real 2r x 2r embedding.
void herm_eig(int r, const cplx* a, double* evals, cplx* evecs);
void herm_eigvals(int r, const cplx* a, double* evals);

/// exp(i t H) for Hermitian H.
void herm_expi(int r, const cplx* h, double t, cplx* out);

/// Principal logarithm angles of a unitary P: Hermitian F with P = exp(iF) and
/// spectrum in (-pi, pi), via the Cayley transform. Returns false when P has an
/// eigenvalue at -1 (branch cut).
bool unitary_log(int r, const cplx* p, cplx* f);

void matmul(int r, const cplx* a, const cplx* b, cplx* out);
void matmul_ah(int r, const cplx* a, const cplx* b, cplx* out);  // a^H b
void matmul_bh(int r, const cplx* a, const cplx* b, cplx* out);  // a b^H
cplx det(int r, const cplx* a);
bool invert(int r, const cplx* a, cplx* out);

}  // namespace dbench
