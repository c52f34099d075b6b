#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "kmlift/decompose.hpp"
#include "support.hpp"

using namespace kmlift;
using namespace testsupport;

namespace {

HalfPowerPoly x_power(int nvars, int var, int k, const HalfPower& c) {
    Monomial m(nvars, 0);
    m[var] = k;
    return HalfPowerPoly::term(m, c);
}

}  // namespace

TEST_CASE("Hermite polynomials") {
    CHECK(hermite(0) == HalfPowerPoly::constant(1, HalfPower(1)));
    CHECK(hermite(2) == x_power(1, 0, 2, HalfPower(4)) - HalfPowerPoly::constant(1, HalfPower(2)));
    CHECK(hermite(3) == x_power(1, 0, 3, HalfPower(8)) - x_power(1, 0, 1, HalfPower(12)));
    const HalfPowerPoly x = HalfPowerPoly::variable(1, 0);
    for (int n = 1; n <= 12; ++n) {
        // three-term recurrence and the derivative form
        CHECK(hermite(n + 1) == x.scaled(HalfPower(2)) * hermite(n) - hermite(n - 1).scaled(HalfPower(2 * n)));
        CHECK(hermite(n + 1) == x.scaled(HalfPower(2)) * hermite(n) - hermite(n).derivative(0));
    }
}

TEST_CASE("one-variable Gaussian identity for Hermite functions") {
    // (x - (2 pi)^{-1} d/dx) (P e^{-pi x^2}) = (2 x P - P' / (2 pi)) e^{-pi x^2}, iterated on plain coefficients
    const double pi = std::numbers::pi;
    std::vector<double> lhs{1.0};
    for (int q = 0; q <= 6; ++q) {
        const RealPoly hq = to_real(hermite(q));
        for (double x : {-2.0, -1.0, 0.0, 0.5, 3.0}) {
            double left = 0, right = 0;
            for (std::size_t k = 0; k < lhs.size(); ++k) left += lhs[k] * std::pow(x, k);
            for (const auto& [m, c] : hq.terms()) right += c * std::pow(std::sqrt(2 * pi) * x, m[0]);
            left *= std::exp(-pi * x * x);
            right *= std::exp(-pi * x * x) / std::pow(2 * pi, q / 2.0);
            CHECK(std::abs(left - right) <= 1e-12 * std::max(1.0, std::abs(right)));
        }
        std::vector<double> next(lhs.size() + 1, 0.0);
        for (std::size_t k = 0; k < lhs.size(); ++k) {
            next[k + 1] += 2 * lhs[k];
            if (k > 0) next[k - 1] -= k * lhs[k] / (2 * pi);
        }
        lhs = next;
    }
}

TEST_CASE("Kudla-Millson polynomials") {
    const HalfPower sqrt2 = HalfPower::sqrt2_power(1);
    CHECK(km_poly({1}, KMMode::P) == x_power(1, 0, 1, sqrt2));
    CHECK(km_poly({1}, KMMode::Q) == x_power(1, 0, 1, sqrt2));
    // (4 pi)^{-1} (4 * 2 pi x^2 - 2) = 2 x^2 - 1/(2 pi)
    CHECK(km_poly({2}, KMMode::Q) ==
          x_power(1, 0, 2, HalfPower(2)) - HalfPowerPoly::constant(1, HalfPower::monomial(Rational(1, 2), 0, -2, 0)));
    CHECK(km_poly({0, 0}, KMMode::Q) == HalfPowerPoly::constant(2, HalfPower(1)));
    CHECK(km_poly({1, 0}, KMMode::P, 3).bidegree(2) == std::make_pair(1, 0));
}

TEST_CASE("exp Laplacian") {
    const HalfPowerPoly x1 = HalfPowerPoly::variable(2, 0), x2 = HalfPowerPoly::variable(2, 1);
    CHECK(exp_laplacian(x1) == x1);
    CHECK(exp_laplacian(x1 * x2) == x1 * x2);
    CHECK(exp_laplacian(x1 * x1) ==
          x1 * x1 - HalfPowerPoly::constant(2, HalfPower::monomial(Rational(1, 4), 0, -2, -2)));
    for (int p = 1; p <= 3; ++p)
        for (int q = 0; q <= 4; ++q)
            for (const auto& c : count_vectors(p, q)) {
                CHECK(km_scaling_identity(c));
                bool harmonic = true;
                for (int v : c) harmonic = harmonic && v <= 1;
                if (harmonic) CHECK(exp_laplacian(km_poly(c, KMMode::P)) == km_poly(c, KMMode::P));
            }
}

TEST_CASE("twisted polynomials") {
    const auto t0 = twist_poly({1, 0}, {0, 0});
    CHECK(t0.gamma == CountVector{1, 0});
    CHECK(t0.q_poly == km_poly({1, 0}, KMMode::Q));
    CHECK(twist_poly({1, 0}, {1, 0}).gamma == CountVector{2, 0});
    const auto t2 = twist_poly({1, 0}, {0, 1});
    CHECK(t2.gamma == CountVector{1, 1});
    CHECK(t2.q_poly == km_poly({1, 1}, KMMode::Q));
}

TEST_CASE("u-decomposition: closed form against the symbolic oracle") {
    std::mt19937_64 rng(2024);
    int frames = 0;
    for (const auto& extra : {kA1, kU, kA1A1, kUA1}) {
        const auto sl = with_hyperbolic_plane(extra);
        const auto base = make_base_frame<QSqrt2>(sl.lattice, &sl.split);
        const int p = base.p, n = sl.lattice.rank();
        for (int trial = 0; trial < 6; ++trial, ++frames) {
            const auto g = convert_isometry<QSqrt2>(random_exact_isometry(sl.split, rng, 2 + trial % 3));
            const auto sf = make_split_frame(sl.split, base, g);
            for (int q = 1; q <= 2; ++q)
                for (const auto& c : count_vectors(p, q)) {
                    const auto P = km_poly(c, KMMode::P, n);
                    const auto closed = u_decompose(P, sf, DecomposeMethod::ClosedForm);
                    const auto oracle = u_decompose(P, sf, DecomposeMethod::Oracle);
                    CHECK(closed == oracle);
                    // resummation: sum_h a^h p_h(s) equals P at v = a u_perp/u_perp^2 + sum s_i kappa_i
                    const auto composed = P.compose_linear(decomposition_coordinates(sf));
                    HalfPowerPoly resummed(composed.nvars());
                    for (const auto& [h, poly] : closed)
                        for (const auto& [m, coef] : poly.terms()) {
                            Monomial e(2, 0);
                            e[0] = h.first;
                            e[1] = h.second;
                            e.insert(e.end(), m.begin(), m.end());
                            resummed.add_term(e, coef);
                        }
                    CHECK(resummed == composed);
                }
        }
    }
    CHECK(frames >= 20);
}

TEST_CASE("u-decomposition errors and trivial cases") {
    const auto sl = with_hyperbolic_plane(kA1);
    const auto base = make_base_frame<QSqrt2>(sl.lattice, &sl.split);
    const auto sf = make_split_frame(sl.split, base, Isometry<QSqrt2>{Matrix<QSqrt2>::identity(3)});
    // x_1 is orthogonal to u in the base frame: p_{0,0} = P restricted, no h = 1 part
    const auto d = u_decompose(km_poly({1, 0}, KMMode::P, 3), sf, DecomposeMethod::ClosedForm);
    CHECK(d.size() == 1);
    CHECK(d.count({0, 0}) == 1);
    HalfPowerPoly mixed = HalfPowerPoly::variable(3, 0) + HalfPowerPoly::variable(3, 2);
    CHECK_THROWS_AS(u_decompose(mixed, sf, DecomposeMethod::ClosedForm), Error);
    HalfPowerPoly inhom = HalfPowerPoly::variable(3, 0) + HalfPowerPoly::constant(3, HalfPower(1));
    CHECK_THROWS_AS(u_decompose(inhom, sf, DecomposeMethod::ClosedForm), Error);
}
