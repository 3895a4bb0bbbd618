#pragma once

#include "dbench/dirac.hpp"
#include "dbench/gauge.hpp"
#include "dbench/geometry.hpp"
#include "dbench/krylov.hpp"
#include "dbench/sparse.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace dbench {

struct EigenOptions {
    double tol = 1e-9;
    int max_iter = 4000;
    int guard = 4;  // extra block vectors beyond the k requested
    std::uint64_t seed = 12345;
    Operator preconditioner;  // residual -> correction; diagonal scaling when empty
};

enum class Symbol { Dirac, Laplacian };

/// Shifted inverse of a flat constant-coefficient symbol, applied by FFT to each
/// of the `components` interleaved fields per site. Dirac uses |a + i b|^2 (zero
/// at both lattice species), Laplacian uses |a|^2 + |b|^2, where a, b are the
/// forward-difference symbols.
Operator fourier_preconditioner(const TorusGeometry& g, int components, Symbol sym, double shift = 1.0);

struct SpectralResult {
    RVec eigenvalues;               // ascending
    std::vector<CVec> eigenvectors; // orthonormal in the map's weighted product
    RVec residuals;                 // ||A v - lambda v||
    int iterations = 0;
    double tol = 0;
};

/// k smallest eigenpairs of a map that is Hermitian in its domain weights
/// (locally optimal block preconditioned CG, diagonal preconditioner, full
/// re-orthogonalisation). Throws SolverError when the residual target is missed.
SpectralResult smallest_eigenpairs(const LinearMap& a, int k, const EigenOptions& opt = {});

/// Largest-eigenvalue estimate from 10 power iterations.
double spectral_scale(const LinearMap& a, std::uint64_t seed = 777);

struct KernelInfo {
    int dim = 0;
    double threshold = 0;
    double scale = 0;
    RVec eigenvalues;
    std::vector<CVec> basis;  // eigenvectors below the threshold
};

/// Count of eigenvalues below 1e-8 * spectral_scale, enlarging the block until a
/// computed eigenvalue clears the threshold.
KernelInfo kernel_dimension(const LinearMap& a, int hint, const EigenOptions& opt = {});

/// Low spectrum of a graded block split by lattice species. Eigenvectors are
/// re-diagonalised against the taste operator inside the computed subspace;
/// vectors with taste above 1/2 are physical (smooth), the rest belong to the
/// forward-difference doubler. Physical eigenvalues are Ritz values of the map
/// on the physical subspace.
struct SpeciesSpectrum {
    RVec raw;        // all computed eigenvalues
    RVec physical;   // ascending Ritz values on the physical subspace
    RVec doubler;    // ascending Ritz values on the doubler subspace
    RVec tastes;     // taste values of the re-diagonalised vectors, ascending
    double scale = 0;
    double threshold = 0;
    int physical_kernel = 0;
    int raw_kernel = 0;
};

SpeciesSpectrum species_spectrum(const LinearMap& a, const CsrMatrix& taste, int hint,
                                 const EigenOptions& opt = {});

/// L = -c Delta + lambda_S with c = 1/2 for n = 2 and (n-1)/(n-2) for n >= 3.
LinearMap schrodinger_L(const TorusGeometry& g, const ScalarField& lambdaS, int n);
double schrodinger_coefficient(int n);

/// Bochner defect B = D^2 - nabla*nabla - R on one grading, restricted to the span
/// of the k lowest eigenvectors of nabla*nabla: operator norm of B on that span
/// and the largest modulus of its compressed quadratic form.
struct LowModeDefect {
    double residual = 0;   // max ||B s|| / ||s||
    double quadratic = 0;  // max |<B s, s>| / ||s||^2
    RVec laplacian_eigenvalues;
};

LowModeDefect bochner_lowmode_defect(const TorusGeometry& g, const HermitianBundle& b, Grading gr, int k,
                                     const EigenOptions& opt = {});

struct BoundRecord {
    std::string name;
    double lhs = 0, rhs = 0, slack = 0, tol = 0;
    bool pass = false;
};

struct BoundReport {
    double h = 0;
    double volume = 0;
    int chern = 0;
    int euler = 0;
    double lambda_min_D2 = 0, lambda_min_DpDm = 0, lambda_min_DmDp = 0;
    double raw_lambda_min_DpDm = 0, raw_lambda_min_DmDp = 0;
    double int_lambdaS = 0, int_lambdaSplus = 0, int_lambdaSminus = 0, int_theta = 0, int_Theta = 0;
    double lambda_min_L = 0, lambda_min_Lplus = 0, lambda_min_Lminus = 0;
    SpeciesSpectrum spec_DmDp, spec_DpDm;
    std::vector<BoundRecord> records;
    bool all_pass() const;
};

/// Evaluates the eigenvalue lower bounds; tol_h = c_tol * h on every flag.
BoundReport bound_report(const TorusGeometry& g, const HermitianBundle& b, double c_tol,
                         const EigenOptions& opt = {});

}  // namespace dbench
