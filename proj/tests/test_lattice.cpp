#include <doctest.h>

#include "kmlift/lattice.hpp"

using namespace kmlift;

namespace {

GramLattice hyperbolic_plus(const IntMatrix& extra) {
    const std::size_t k = extra.size();
    IntMatrix g(k + 2, std::vector<Int>(k + 2, 0));
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) g[i][j] = extra[i][j];
    g[k][k + 1] = g[k + 1][k] = 1;
    return build_lattice(g);
}

LatticeVector vec(std::initializer_list<const char*> xs) {
    LatticeVector v;
    for (auto x : xs) v.push_back(parse_rational(x));
    return v;
}

}  // namespace

TEST_CASE("build_lattice validates input") {
    const auto u = build_lattice({{0, 1}, {1, 0}});
    CHECK(u.rank() == 2);
    CHECK(u.signature() == Signature{1, 1});
    CHECK(build_lattice({{2}}).signature() == Signature{1, 0});
    CHECK_THROWS_AS(build_lattice({{1}}), Error);
    CHECK_THROWS_AS(build_lattice({{0, 1}, {2, 0}}), Error);
    CHECK_THROWS_AS(build_lattice({{2, 2}, {2, 2}}), Error);
    CHECK(build_lattice({{2, -1}, {-1, 2}}).signature() == Signature{2, 0});
    CHECK(build_lattice({{0, 1, 0, 0}, {1, 0, 0, 0}, {0, 0, 0, 1}, {0, 0, 1, 0}}).signature() == Signature{2, 2});
}

TEST_CASE("discriminant groups") {
    DiscriminantGroup du(build_lattice({{0, 1}, {1, 0}}));
    CHECK(du.order() == 1);

    DiscriminantGroup da(build_lattice({{2}}));
    REQUIRE(da.order() == 2);
    CHECK(da.q_mod1(1) == Rational(1, 4));
    CHECK(da.representative(1) == vec({"1/2"}));

    DiscriminantGroup du2(build_lattice({{0, 2}, {2, 0}}));
    REQUIRE(du2.order() == 4);
    for (std::size_t i = 0; i < 4; ++i) {
        const auto r = du2.representative(i);
        // oracle: q((a/2, b/2)) = ab/2 mod 1 with (a,b) = 2 * coords
        const Rational a = r[0] * 2, b = r[1] * 2;
        CHECK(du2.q_mod1(i) == frac(Rational(a * b / 2)));
    }

    const std::vector<IntMatrix> corpus = {
        {{2}}, {{0, 2}, {2, 0}}, {{2, -1}, {-1, 2}}, {{4, 1}, {1, 2}}, {{0, 3}, {3, 0}},
        {{2, 0, 0}, {0, 0, 1}, {0, 1, 0}}, {{2, 0, 0, 0}, {0, 2, 0, 0}, {0, 0, 0, 2}, {0, 0, 2, 0}},
        {{6, 2, 0}, {2, 4, 0}, {0, 0, -2}},
    };
    for (const auto& g : corpus) {
        const auto l = build_lattice(g);
        DiscriminantGroup d(l);
        CHECK(static_cast<Int>(d.order()) == std::llabs(l.determinant()));
        for (std::size_t i = 0; i < d.order(); ++i) {
            CHECK(d.index_of(d.representative(i)) == i);
            CHECK(d.q_mod1(d.negate(i)) == d.q_mod1(i));
            for (std::size_t j = 0; j < d.order(); ++j) {
                const Rational b = frac(Rational(d.q_mod1(d.add(i, j)) - d.q_mod1(i) - d.q_mod1(j)));
                CHECK(b == d.b_mod1(i, j));
                for (std::size_t k = 0; k < d.order(); ++k)
                    CHECK(d.b_mod1(i, d.add(j, k)) == frac(Rational(d.b_mod1(i, j) + d.b_mod1(i, k))));
            }
        }
    }
}

TEST_CASE("split data") {
    SUBCASE("A1 + U") {
        const auto l = hyperbolic_plus({{2}});
        const auto sd = split_data(l, vec({"0", "1", "0"}), vec({"0", "0", "1"}));
        CHECK(sd.N == 1);
        CHECK(sd.K.gram() == IntMatrix{{2}});
        CHECK(sd.L0_cosets.size() == 2);
        DiscriminantGroup dk(sd.K);
        for (auto idx : sd.L0_cosets) CHECK(dk.q_mod1(sd.projection.at(idx)) == DiscriminantGroup(l).q_mod1(idx));
    }
    SUBCASE("U") {
        const auto sd = split_data(build_lattice({{0, 1}, {1, 0}}), vec({"1", "0"}), vec({"0", "1"}));
        CHECK(sd.N == 1);
        CHECK(sd.K.rank() == 0);
    }
    SUBCASE("U(2)") {
        const auto sd = split_data(build_lattice({{0, 2}, {2, 0}}), vec({"1", "0"}), std::nullopt);
        CHECK(sd.N == 2);
        CHECK(sd.K.rank() == 0);
        CHECK(sd.lattice.pairing(sd.u, sd.u_prime) == 1);
        CHECK(sd.L0_cosets.size() == 2);  // |L0'/L| = N |K'/K|
    }
    SUBCASE("errors") {
        const auto l = hyperbolic_plus({{2}});
        CHECK_THROWS_AS(split_data(l, vec({"1", "0", "0"}), std::nullopt), Error);
        CHECK_THROWS_AS(split_data(l, vec({"0", "2", "0"}), std::nullopt), Error);
        CHECK_THROWS_AS(split_data(l, vec({"0", "1", "0"}), vec({"0", "0", "2"})), Error);
    }
    SUBCASE("order identity on a non-orthogonal split") {
        // U(2) + U with u mixing both planes
        const auto l = build_lattice({{0, 2, 0, 0}, {2, 0, 0, 0}, {0, 0, 0, 1}, {0, 0, 1, 0}});
        for (const auto& u : {vec({"1", "0", "0", "0"}), vec({"1", "0", "1", "0"}), vec({"0", "0", "1", "0"}),
                              vec({"1", "0", "2", "0"})}) {
            const auto sd = split_data(l, u, std::nullopt);
            CHECK(DiscriminantGroup(l).order() == static_cast<std::size_t>(sd.N * sd.N) * DiscriminantGroup(sd.K).order());
            CHECK(sd.lattice.pairing(sd.zeta, sd.u) == sd.N);
        }
    }
}

TEST_CASE("coset enumeration") {
    const auto a1 = build_lattice({{2}});
    Matrix<double> id1 = Matrix<double>::identity(1);
    const auto v = enumerate_coset(a1, vec({"1/2"}), id1, 2.0);
    CHECK(v == std::vector<LatticeVector>{vec({"-3/2"}), vec({"-1/2"}), vec({"1/2"}), vec({"3/2"})});

    const auto u = build_lattice({{0, 1}, {1, 0}});
    CHECK(enumerate_coset(u, vec({"0", "0"}), Matrix<double>::identity(2), 1.5).size() == 9);
    CHECK(enumerate_coset(u, vec({"0", "0"}), Matrix<double>::identity(2), 0.5).size() == 1);

    Matrix<double> bad(1, 1);
    bad(0, 0) = -1;
    CHECK_THROWS_AS(enumerate_coset(a1, vec({"0"}), bad, 1.0), Error);

    // agreement with the box scan on skewed majorants
    Matrix<double> q(3, 3);
    const double entries[3][3] = {{2.0, 0.7, -0.3}, {0.7, 1.1, 0.2}, {-0.3, 0.2, 0.6}};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) q(i, j) = entries[i][j];
    for (double b : {0.3, 2.0, 7.5, 20.0}) {
        const std::vector<double> shift = {0.25, -1.0 / 3.0, 0.5};
        CHECK(short_vectors(q, shift, b) == short_vectors_box(q, shift, b));
    }
}
