#include <doctest.h>

#include <cmath>
#include <numbers>

#include "kmlift/theta.hpp"
#include "support.hpp"

using namespace kmlift;
using namespace testsupport;

namespace {

constexpr double kPi = std::numbers::pi;

struct Setup {
    SplitLattice sl;
    BaseFrame<double> base;
    SplitFrame<double> frame;
};

Setup make_setup(const IntMatrix& extra, int eichler_steps = 0, unsigned seed = 1) {
    Setup s{with_hyperbolic_plane(extra), {}, {}};
    s.base = make_base_frame<double>(s.sl.lattice, &s.sl.split);
    Isometry<double> g{Matrix<double>::identity(s.sl.lattice.rank())};
    if (eichler_steps > 0) {
        std::mt19937_64 rng(seed);
        g = convert_isometry<double>(random_exact_isometry(s.sl.split, rng, eichler_steps));
    }
    s.frame = make_split_frame(s.sl.split, s.base, g);
    return s;
}

double sup_diff(const std::vector<Complex>& a, const std::vector<Complex>& b) {
    double d = 0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

}  // namespace

TEST_CASE("Siegel theta of U against the brute-force sum") {
    const Setup s = make_setup({}, 0);
    const auto& l = s.sl.lattice;
    const ThetaGeometry geom = lattice_geometry(l, s.frame.frame);
    const DiscriminantGroup disc(l);
    const HalfPowerPoly one = HalfPowerPoly::constant(2, HalfPower(1));
    ThetaOptions opt;
    opt.radius = 6;
    opt.tail_target = 1e-10;
    const std::vector<double> zero(2, 0.0);
    const ThetaValue v = siegel_theta(geom, disc, Complex(0, 2), zero, zero, theta_poly(one, geom, 0, 0), opt);
    const auto oracle = theta_box_sum(l, s.frame.frame, Complex(0, 2), zero, zero, one, 0);
    CHECK(v.components.size() == 1);
    CHECK(sup_diff(v.components, oracle) < 1e-10);
    CHECK(v.tail_bound < 1e-10);

    const ThetaValue z = siegel_theta(geom, disc, Complex(0, 2), zero, zero, theta_poly(HalfPowerPoly(2), geom, 0, 0), opt);
    CHECK(std::abs(z.components[0]) == 0.0);
}

TEST_CASE("Siegel theta with shifts and polynomial weights on A1+U") {
    for (unsigned seed : {1u, 2u, 3u}) {
        const Setup s = make_setup(kA1, 2, seed);
        const auto& l = s.sl.lattice;
        const ThetaGeometry geom = lattice_geometry(l, s.frame.frame);
        const DiscriminantGroup disc(l);
        const std::vector<double> delta{0.3, -0.2, 0.7}, nu{0.1, 0.25, -0.4};
        for (const auto& alpha : count_vectors(2, 2)) {
            const HalfPowerPoly P = km_poly(alpha, KMMode::P, 3);
            ThetaOptions opt;
            opt.tail_target = 1e-11;
            const Complex tau(0.3, 1.1);
            const ThetaValue v = siegel_theta(geom, disc, tau, delta, nu, theta_poly(P, geom, 2, 0), opt);
            const auto oracle = theta_box_sum(l, s.frame.frame, tau, delta, nu, P, 0);
            CAPTURE(seed);
            CHECK(sup_diff(v.components, oracle) <= v.tail_bound + 1e-12);
            // certification honesty: a larger radius moves the value by less than the reported bound
            ThetaOptions wider = opt;
            wider.radius = radius_for_target(geom, theta_poly(P, geom, 2, 0), tau.imag(), opt.tail_target) * 1.5;
            const ThetaValue w = siegel_theta(geom, disc, tau, delta, nu, theta_poly(P, geom, 2, 0), wider);
            CHECK(sup_diff(v.components, w.components) <= v.tail_bound);
        }
    }
}

TEST_CASE("origin-only theta sums") {
    const Setup s = make_setup(kA1, 0);
    const auto& l = s.sl.lattice;
    const ThetaGeometry geom = lattice_geometry(l, s.frame.frame);
    const DiscriminantGroup disc(l);
    const std::vector<double> zero(3, 0.0);
    const Complex tau(0.2, 3.0);
    // radius below the shortest majorant length keeps only lambda = 0
    ThetaOptions opt;
    opt.radius = 0.5 * geom.min_length;
    opt.tail_target = 1e300;
    const HalfPowerPoly P = km_poly({2, 0}, KMMode::P, 3);
    const ThetaValue v = siegel_theta(geom, disc, tau, zero, zero, theta_poly(P, geom, 2, 0), opt);
    const double expected = std::pow(tau.imag(), 0.5) * to_real(exp_laplacian(P), tau.imag()).terms().begin()->second;
    CHECK(to_real(exp_laplacian(P), tau.imag()).terms().begin()->first == Monomial{0, 0, 0});
    CHECK(std::abs(v.components[0] - expected) < 1e-14);
    CHECK(std::abs(v.components[1]) == 0.0);
    const auto comps = km_theta_components(l, disc, s.frame.frame, tau, opt);
    CHECK(comps.size() == 2);
    for (const auto& [alpha, value] : comps) CHECK(std::abs(value.components[0]) < 1e-15);
}

TEST_CASE("modularity of Siegel theta functions") {
    struct Case {
        IntMatrix extra;
        CountVector alpha;
        Complex tau;
    };
    const std::vector<Case> cases = {
        {{}, {0}, Complex(0, 1)},
        {kA1, {1, 0}, Complex(0.1, 1.3)},
        {kA1, {0, 1}, Complex(-0.4, 0.9)},
        {kU, {1, 0}, Complex(0.3, 1.1)},
        {kA1A1, {1, 1, 0}, Complex(0.1, 1.2)},
    };
    for (const auto& cs : cases) {
        const Setup s = make_setup(cs.extra, 1, 7);
        const auto& l = s.sl.lattice;
        const ThetaGeometry geom = lattice_geometry(l, s.frame.frame);
        const WeilRep rep = weil_generators(l);
        const int q = std::accumulate(cs.alpha.begin(), cs.alpha.end(), 0);
        const HalfPowerPoly P = q == 0 ? HalfPowerPoly::constant(l.rank(), HalfPower(1)) : km_poly(cs.alpha, KMMode::P, l.rank());
        const ThetaPoly tp = theta_poly(P, geom, q, 0);
        const auto t = modularity_defect(geom, rep, tp, Generator::T, cs.tau, 1e-10);
        const auto sdef = modularity_defect(geom, rep, tp, Generator::S, cs.tau, 1e-8);
        CAPTURE(l.rank());
        CHECK(t.defect < 1e-8);
        CHECK(sdef.defect < 1e-6);
    }
}

TEST_CASE("pairing identity for the sublattice form") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> nd;
    for (Int scale : {Int(2), Int(1), Int(3)}) {
        for (const auto& extra : {IntMatrix{}, kU, kA1}) {
            const SplitLattice sl = with_hyperbolic_plane(extra, scale);
            const DiscriminantGroup disc_L(sl.lattice), disc_K(sl.split.K);
            CuspFormData f;
            f.weight = Rational(sl.lattice.rank(), 2);
            for (std::size_t c = 0; c < disc_L.order(); ++c)
                for (int k = 0; k < 3; ++k) {
                    Rational n = disc_L.q_mod1(c) + k;
                    if (n <= 0) continue;
                    f.coeffs[{c, n}] = Complex(nd(rng), nd(rng));
                }
            f.validate(disc_L);
            CVector g(disc_K.order());
            for (Eigen::Index i = 0; i < g.size(); ++i) g(i) = Complex(nd(rng), nd(rng));
            for (Int r : {Int(0), Int(1), Int(2), Int(-3)}) {
                const auto [lhs, rhs] = pairing_identity_sides(f, sl.split, disc_L, g, r, Complex(0.2, 0.7));
                CHECK(std::abs(lhs - rhs) < 1e-12);
            }
        }
    }
}

TEST_CASE("F_K on an orthogonal split with N = 1 re-indexes f") {
    const SplitLattice sl = with_hyperbolic_plane(kA1);
    const DiscriminantGroup disc_L(sl.lattice), disc_K(sl.split.K);
    CHECK(disc_L.order() == disc_K.order());
    CuspFormData f;
    f.coeffs[{1, Rational(1, 4)}] = Complex(2, 0);
    f.coeffs[{0, Rational(1)}] = Complex(0, 1);
    const CuspFormData fk = f_to_FK(f, sl.split, disc_L, 0, 0);
    CHECK(fk.coeffs.size() == 2);
    for (const auto& [key, c] : f.coeffs) {
        const std::size_t k = sl.split.projection.at(key.first);
        CHECK(std::abs(fk.coeffs.at({k, key.second}) - c) == 0.0);
    }
    CHECK(f_to_FK(CuspFormData{}, sl.split, disc_L, 1, 0).coeffs.empty());
}

TEST_CASE("splitting of the theta function along u") {
    for (const auto& extra : {kA1, kU}) {
        for (int steps : {0, 1}) {
            const Setup s = make_setup(extra, steps);
            for (const Complex tau : {Complex(0, 3), Complex(0.2, 2.5)}) {
                for (const auto& alpha : count_vectors(s.frame.p, s.frame.q)) {
                    SplitThetaOptions opt;
                    const auto sides = split_theta_sides(s.sl.split, s.frame, tau, alpha, opt);
                    CAPTURE(tau);
                    CAPTURE(steps);
                    CAPTURE(count_label(alpha));
                    CHECK(sides.cutoff_weight < 1e-12);
                    CHECK(sides.difference() < 1e-4);
                    CHECK(sides.difference() < 1e-9);
                }
            }
        }
    }
}

TEST_CASE("splitting needs both signs of c") {
    const Setup s = make_setup(kU, 0);
    SplitThetaOptions opt;
    opt.cosets = CosetRange::NonnegativeC;
    const auto half = split_theta_sides(s.sl.split, s.frame, Complex(0, 2), {2, 0}, opt);
    CHECK(half.difference() > 1e-3);
    opt.cosets = CosetRange::AllSigns;
    CHECK(split_theta_sides(s.sl.split, s.frame, Complex(0, 2), {2, 0}, opt).difference() < 1e-10);
}
