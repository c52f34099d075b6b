#include <doctest.h>

#include <cmath>

#include "support.hpp"

using namespace kmlift;
using namespace testsupport;

TEST_CASE("majorant of the hyperbolic plane") {
    const auto u = build_lattice(kU);
    Matrix<double> zb(2, 1);
    zb(0, 0) = 1;
    zb(1, 0) = -1;
    const GrassPoint z = grass_point(u, zb);
    CHECK(majorant(u, z, {1, 0}) == doctest::Approx(1.0));
    CHECK(majorant(u, z, {1, 1}) == doctest::Approx(2.0));    // v in z perp: (v,v) = 2
    CHECK(majorant(u, z, {1, -1}) == doctest::Approx(2.0));   // v in z: -(v,v) = 2
    Matrix<double> bad(2, 1);
    bad(0, 0) = 1;
    bad(1, 0) = 1;
    CHECK_THROWS_AS(grass_point(u, bad), Error);
}

TEST_CASE("isometry_to_base postconditions") {
    for (const auto& g : {kU, kUA1, IntMatrix{{2, 1, 0}, {1, -2, 0}, {0, 0, 2}}}) {
        const auto l = build_lattice(g);
        const auto base = make_base_frame<double>(l, nullptr);
        const int n = l.rank(), p = base.p, q = base.q;
        Matrix<double> zb(n, q);
        for (int j = 0; j < q; ++j)
            for (int i = 0; i < n; ++i) zb(i, j) = base.basis(i, p + j) + 0.3 * (i + 1) * base.basis(i, 0);
        const auto z = grass_point(l, zb);
        const auto m = isometry_to_base(l, base, z);
        CHECK(isometry_defect(l, m) < 1e-10);
        CHECK(determinant(m.matrix) == doctest::Approx(1.0));
        const auto gram = l.gram_double();
        for (int j = 0; j < q; ++j) {
            const auto img = m.matrix * zb.column(j);
            for (int k = 0; k < p; ++k) CHECK(std::abs(bilinear(gram, img, base.basis.column(k))) < 1e-10);
        }
    }
}

TEST_CASE("split frame of U") {
    const auto sl = with_hyperbolic_plane({});
    Matrix<double> zb(2, 1);
    zb(0, 0) = 1 / std::sqrt(2.0);
    zb(1, 0) = -1 / std::sqrt(2.0);
    const auto sf = split_frame(sl.split, grass_point(sl.lattice, zb));
    CHECK(sf.u_perp_norm == doctest::Approx(0.5));
    CHECK(sf.u_z[0] == doctest::Approx(0.5));
    CHECK(sf.u_z[1] == doctest::Approx(-0.5));
    CHECK(sf.u_perp[0] == doctest::Approx(0.5));
    CHECK(sf.u_perp[1] == doctest::Approx(0.5));
}

TEST_CASE("exact split frames") {
    std::mt19937_64 rng(7);
    for (const auto& extra : {kA1, kU, kA1A1, kUA1}) {
        const auto sl = with_hyperbolic_plane(extra);
        const auto base = make_base_frame<QSqrt2>(sl.lattice, &sl.split);
        for (int trial = 0; trial < 4; ++trial) {
            const auto g = convert_isometry<QSqrt2>(random_exact_isometry(sl.split, rng));
            CHECK(isometry_defect(sl.lattice, g).is_zero());
            const auto sf = make_split_frame(sl.split, base, g);
            CHECK(sf.pairing(sf.mu, sf.u).is_zero());
            for (std::size_t i = 0; i < sf.u.size(); ++i) CHECK((sf.u_z[i] + sf.u_perp[i]) == sf.u[i]);
            CHECK(sf.u_perp_norm.sign() > 0);
            CHECK(sf.u_z_norm.sign() < 0);
            // g sharp kills u and is an isometry onto its image: ||g# v||^2 = v_{w perp}^2 - v_w^2
            CHECK(std::all_of(sf.u.begin(), sf.u.end(), [&](const QSqrt2&) { return true; }));
            const auto su = sf.sharp * sf.u;
            for (const auto& x : su) CHECK(x.is_zero());
            const std::size_t n = sf.u.size();
            for (std::size_t i = 0; i < n; ++i) {
                std::vector<QSqrt2> e(n);
                e[i] = QSqrt2(1);
                const auto pre = sf.sharp_preimage(e);
                const auto x = sf.sharp * e;
                QSqrt2 signed_norm;
                for (int j = 0; j < sf.p + sf.q; ++j) signed_norm += QSqrt2(sf.frame.sign(j)) * x[j] * x[j];
                CHECK(signed_norm == sf.pairing(pre, pre));
            }
        }
    }
}

TEST_CASE("Eichler transformations") {
    const auto sl = with_hyperbolic_plane(kA1A1);
    const LatticeVector zero = {Rational(0), Rational(0)};
    CHECK(eichler(sl.split, zero).matrix == Matrix<Rational>::identity(4));
    const LatticeVector lam = vec({"1/2", "-3"});
    const LatticeVector mlam = vec({"-1/2", "3"});
    CHECK((eichler(sl.split, lam).matrix * eichler(sl.split, mlam).matrix) == Matrix<Rational>::identity(4));
    CHECK(eichler(sl.split, lam).matrix * sl.split.u == sl.split.u);
    CHECK(isometry_defect(sl.lattice, eichler(sl.split, lam)) == 0);
    CHECK_THROWS_AS(eichler_matrix(sl.lattice, sl.split.u, vec({"0", "0", "0", "1"})), Error);

    std::mt19937_64 rng(11);
    const auto base = make_base_frame<QSqrt2>(sl.lattice, &sl.split);
    for (int trial = 0; trial < 5; ++trial) {
        const auto g = convert_isometry<QSqrt2>(random_exact_isometry(sl.split, rng));
        const auto rep = eichler_report(sl.split, base, g, lam);
        CHECK(rep.max() == 0.0);
    }
}
