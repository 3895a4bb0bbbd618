#include "dbench/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace dbench {

ScalarField random_smooth_field(int N1, int N2, double L1, double L2, double amplitude, std::uint64_t seed) {
    constexpr double pi = std::numbers::pi;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * pi);
    struct Mode {
        int k, l;
        double a, p;
    };
    std::vector<Mode> modes;
    for (int k = -2; k <= 2; ++k)
        for (int l = 0; l <= 2; ++l) {
            if (l == 0 && k <= 0) continue;
            const double a = normal(rng);
            modes.push_back({k, l, a, phase(rng)});
        }
    ScalarField f(static_cast<std::size_t>(N1) * N2, 0.0);
    for (int i = 0; i < N1; ++i)
        for (int j = 0; j < N2; ++j) {
            const double x = 2 * pi * i / N1, y = 2 * pi * j / N2;
            double v = 0;
            for (const auto& m : modes) v += m.a * std::cos(m.k * x + m.l * y + m.p);
            f[i * N2 + j] = v;
        }
    (void)L1;
    (void)L2;
    double mx = 0;
    for (double v : f) mx = std::max(mx, std::abs(v));
    if (mx > 0)
        for (auto& v : f) v *= amplitude / mx;
    return f;
}

ScalarField random_smooth_field(const TorusGeometry& g, double amplitude, std::uint64_t seed) {
    return random_smooth_field(g.N1, g.N2, g.L1, g.L2, amplitude, seed);
}

std::string CorpusInstance::label() const {
    std::ostringstream os;
    os << "#" << index << " N=" << N << " c1=" << c1 << " r=" << rank << " rough=" << roughness
       << " amp=" << amplitude;
    return os.str();
}

CorpusInstance corpus_instance(std::uint64_t seed, int index, int N) {
    constexpr double L = 2.0 * std::numbers::pi;
    std::mt19937_64 rng(seed ^ (0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(index + 1)));
    std::uniform_int_distribution<int> chern(-4, 4);
    std::uniform_int_distribution<int> rank(1, 2);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    CorpusInstance c;
    c.index = index;
    c.seed = rng();
    c.N = N;
    c.c1 = chern(rng);
    c.rank = rank(rng);
    c.roughness = 0.5 * unit(rng);
    c.amplitude = 0.3 * unit(rng);
    c.geometry = build_torus(L, L, N, N, random_smooth_field(N, N, L, L, c.amplitude, c.seed));
    c.bundle = c.roughness > 0 || c.rank > 1 ? random_bundle(c.geometry, c.c1, c.roughness, c.seed + 1, c.rank)
                                             : constant_curvature_bundle(c.geometry, c.c1);
    return c;
}

}  // namespace dbench
