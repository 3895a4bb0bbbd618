#pragma once

#include "dbench/common.hpp"

#include <functional>

namespace dbench {

using Operator = std::function<void(const CVec&, CVec&)>;

struct CgResult {
    CVec x;
    double rel_residual = 0;
    int iterations = 0;
    bool converged = false;
};

/// Conjugate gradients for a Hermitian positive semidefinite operator in the
/// plain inner product. `project` (optional) is applied to the right-hand side
/// and every search direction, e.g. to stay in a mean-zero subspace.
CgResult conjugate_gradient(const Operator& op, const CVec& b, double rtol, int max_iter,
                            const std::function<void(CVec&)>& project = {});

}  // namespace dbench
