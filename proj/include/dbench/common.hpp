#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace dbench {

using cplx = std::complex<double>;
using CVec = std::vector<cplx>;
using RVec = std::vector<double>;

/// Invalid arguments or violated preconditions of an operation.
class PreconditionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Lattice gauge field outside the branch-cut-safe regime.
class GaugeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Iterative solver did not reach its tolerance.
class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& what, double best_residual)
        : std::runtime_error(what), best_residual_(best_residual) {}
    double best_residual() const noexcept { return best_residual_; }

private:
    double best_residual_;
};

namespace par {

/// Fixed reduction block; partial sums are combined in block order so results
/// do not depend on the thread count.
inline constexpr std::size_t kBlock = 2048;

void set_threads_from_env();
int max_threads();

double sum(const RVec& v);
double dot(const RVec& w, const RVec& a, const RVec& b);          // sum w a b
cplx wdot(const RVec& w, const CVec& a, const CVec& b, int r);    // sum w conj(a) b
double wnorm2(const RVec& w, const CVec& a, int r);               // sum w |a|^2

namespace serial {
double sum(const RVec& v);
cplx wdot(const RVec& w, const CVec& a, const CVec& b, int r);
double wnorm2(const RVec& w, const CVec& a, int r);
}  // namespace serial

void axpy(cplx alpha, const CVec& x, CVec& y);  // y += alpha x
void scale(cplx alpha, CVec& x);

}  // namespace par
}  // namespace dbench
