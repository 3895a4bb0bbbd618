#pragma once

#include "dbench/gauge.hpp"
#include "dbench/geometry.hpp"

#include <cstdint>
#include <string>

namespace dbench {

/// Smooth random field: sum of Fourier modes with |k|, |l| <= 2 on the torus,
/// scaled so that its maximum modulus over the sites equals `amplitude`.
ScalarField random_smooth_field(const TorusGeometry& g, double amplitude, std::uint64_t seed);
ScalarField random_smooth_field(int N1, int N2, double L1, double L2, double amplitude, std::uint64_t seed);

/// One member of the randomized corpus: 2 pi x 2 pi torus with a random smooth
/// conformal factor (amplitude <= 0.3) and a random bundle (|c1| <= 4,
/// roughness <= 0.5, rank 1 or 2).
struct CorpusInstance {
    int index = 0;
    std::uint64_t seed = 0;
    int N = 0;
    int c1 = 0;
    int rank = 1;
    double roughness = 0;
    double amplitude = 0;
    TorusGeometry geometry;
    HermitianBundle bundle;
    std::string label() const;
};

CorpusInstance corpus_instance(std::uint64_t seed, int index, int N = 24);

}  // namespace dbench
