#pragma once

#include <random>

#include "kmlift/grassmannian.hpp"
#include "kmlift/lattice.hpp"

namespace testsupport {

using namespace kmlift;

inline LatticeVector vec(std::initializer_list<const char*> xs) {
    LatticeVector v;
    for (auto x : xs) v.push_back(parse_rational(x));
    return v;
}

/// extra (+) U with u, u' the standard generators of U (last two coordinates).
struct SplitLattice {
    GramLattice lattice;
    SplitData split;
};

inline SplitLattice with_hyperbolic_plane(const IntMatrix& extra, Int scale = 1) {
    const std::size_t k = extra.size();
    IntMatrix g(k + 2, std::vector<Int>(k + 2, 0));
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) g[i][j] = extra[i][j];
    g[k][k + 1] = g[k + 1][k] = scale;
    const GramLattice l = build_lattice(g);
    LatticeVector u(k + 2, Rational(0));
    u[k] = 1;
    std::optional<LatticeVector> up;
    if (scale == 1) {
        LatticeVector v(k + 2, Rational(0));
        v[k + 1] = 1;
        up = v;
    }
    return {l, split_data(l, u, up)};
}

inline const IntMatrix kA1 = {{2}};
inline const IntMatrix kU = {{0, 1}, {1, 0}};
inline const IntMatrix kA1A1 = {{2, 0}, {0, 2}};
inline const IntMatrix kUA1 = {{0, 1, 0}, {1, 0, 0}, {0, 0, 2}};
inline const IntMatrix kA1neg = {{-2}};

inline Isometry<Rational> random_exact_isometry(const SplitData& sd, std::mt19937_64& rng, int steps = 3) {
    return random_eichler_isometry(sd, rng, steps);
}

}  // namespace testsupport
