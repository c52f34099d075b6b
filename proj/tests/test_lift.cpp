#include <doctest.h>

#include <cmath>
#include <numbers>

#include "kmlift/errors.hpp"
#include "kmlift/lift.hpp"
#include "support.hpp"

using namespace kmlift;
using namespace testsupport;

namespace {

constexpr double kPi = std::numbers::pi;

CuspFormData synthetic_form(const GramLattice& lattice, Rational weight, int n_max, unsigned seed = 5) {
    return synthetic_cusp_form(lattice, weight, n_max, seed);
}

CuspFormData single_coefficient(std::size_t coset, Rational n, Rational weight) {
    CuspFormData f;
    f.weight = weight;
    f.n_max = n;
    f.coeffs[{coset, n}] = 1;
    return f;
}

LiftRequest base_request(const SplitLattice& sl, const CuspFormData& f, const CountVector& alpha,
                         const Isometry<double>* g = nullptr) {
    LiftRequest req;
    req.f = f;
    req.alpha = alpha;
    req.sd = sl.split;
    const auto base = make_base_frame<double>(sl.lattice, &sl.split);
    req.frame = make_split_frame(sl.split, base,
                                 g ? *g : Isometry<double>{Matrix<double>::identity(sl.lattice.rank())});
    return req;
}

}  // namespace

TEST_CASE("y-integral: closed form against quadrature") {
    CHECK(std::abs(y_integral(-1, 1, 1, YIntegralMethod::Quadrature) - 2 * std::cyl_bessel_k(0.0, 2.0)) < 1e-10);
    CHECK(std::abs(y_integral(-1, 1, 1, YIntegralMethod::Bessel) - 2 * std::cyl_bessel_k(0.0, 2.0)) < 1e-10);
    const double corpus[][3] = {{-1, 1, 1},    {-0.5, 2, 0.3}, {0.5, 6.3, 0.8}, {2.5, 0.3, 4},  {-3, 1.5, 2},
                                {1, 40, 0.05}, {-2.5, 0.2, 9}, {4, 12, 1.6},    {0, 0.7, 0.7},  {-1.5, 3, 0.01}};
    for (const auto& [s, A, B] : corpus) {
        const double bessel = y_integral(s, A, B, YIntegralMethod::Bessel);
        const double quad = y_integral(s, A, B, YIntegralMethod::Quadrature);
        CHECK(std::abs(bessel - quad) < 1e-9 * std::max(1.0, std::abs(bessel)));
    }
    CHECK(std::abs(y_integral(1.5, 2, 0, YIntegralMethod::Bessel) - std::tgamma(2.5) / std::pow(2, 2.5)) < 1e-12);
    CHECK_THROWS_AS(y_integral(0.5, 0, 1, YIntegralMethod::Bessel), Error);
    CHECK_THROWS_AS(y_integral(-2, 1, 0, YIntegralMethod::Quadrature), Error);
    CHECK(parse_method("bessel") == YIntegralMethod::Bessel);
    CHECK_THROWS_AS(parse_method("simpson"), Error);
}

TEST_CASE("request validation") {
    const auto sl = with_hyperbolic_plane(kA1);
    const auto f = synthetic_form(sl.lattice, Rational(3, 2), 2);
    auto req = base_request(sl, f, {1, 0});
    CHECK_NOTHROW(req.validate());
    req.alpha = {1, 1};
    CHECK_THROWS_AS(req.validate(), Error);
    req.alpha = {1, 0};
    req.f.weight = 2;
    CHECK_THROWS_AS(req.validate(), Error);
    req.f.weight = Rational(3, 2);
    req.f.coeffs[{0, Rational(1, 4)}] = 1;
    CHECK_THROWS_AS(req.validate(), Error);
}

TEST_CASE("Poincare kernel: two evaluation paths") {
    const auto sl = with_hyperbolic_plane(kA1);
    const Complex tau(0, 2);
    for (const CountVector& alpha : {CountVector{1, 0}, CountVector{0, 1}}) {
        const auto zero = base_request(sl, CuspFormData{Rational(3, 2), {}, 0}, alpha);
        CHECK(std::abs(h_alpha(zero, tau)) == 0.0);
        CHECK(std::abs(h_alpha_termwise(zero, tau)) == 0.0);

        std::mt19937_64 rng(9);
        const auto g = convert_isometry<double>(random_exact_isometry(sl.split, rng, 2));
        auto req = base_request(sl, single_coefficient(0, 1, Rational(3, 2)), alpha, &g);
        for (const Complex t : {tau, Complex(0.31, 1.2)}) {
            const Complex a = h_alpha(req, t), b = h_alpha_termwise(req, t);
            CHECK(std::abs(a - b) < 1e-10 * std::max(1.0, std::abs(a)));
        }
        const Complex coarse = h_alpha(req, tau, 3), fine = h_alpha(req, tau, 6);
        CHECK(std::abs(coarse - fine) < 1e-10);

        req.f = synthetic_form(sl.lattice, Rational(3, 2), 3);
        CHECK(std::abs(h_alpha(req, tau) - h_alpha_termwise(req, tau)) < 1e-10);
    }
}

TEST_CASE("formal split check") {
    const auto sl = with_hyperbolic_plane(kU, 2);
    const auto f = synthetic_form(sl.lattice, 2, 2);
    auto req = base_request(sl, f, {1, 1});
    const auto rep = integrand_split_check(req, Complex(0, 3), 5, SplitCheckMode::Formal);
    CHECK(rep.pairing_residual < 1e-12);
    CHECK(rep.splitting_residual < 1e-4);
    CHECK_THROWS_AS(integrand_split_check(req, Complex(0, 3), 5, SplitCheckMode::Modular), Error);

    const auto sl2 = with_hyperbolic_plane(kA1);
    auto zero = base_request(sl2, CuspFormData{Rational(3, 2), {}, 0}, {1, 0});
    zero.modular = true;
    const auto zrep = integrand_split_check(zero, Complex(0, 3), 2, SplitCheckMode::Modular);
    CHECK(zrep.modular_residual == 0.0);
    CHECK(zrep.pairing_residual == 0.0);
}

TEST_CASE("Fourier coefficients: trivial cases, linearity, gauge prediction") {
    const auto sl = with_hyperbolic_plane(kA1);
    const Rational weight(3, 2);
    const auto f1 = synthetic_form(sl.lattice, weight, 3, 1);
    const auto f2 = synthetic_form(sl.lattice, weight, 3, 2);
    CuspFormData sum = f1;
    for (const auto& [k, c] : f2.coeffs) sum.coeffs[k] += c;

    // lambda = 1/2 has norm 1/4; a table without n = 1/4 gives 0
    auto req = base_request(sl, single_coefficient(0, 1, weight), {0, 1});
    CHECK(fourier_coefficient(req, vec({"1/2"}), YIntegralMethod::Bessel).value == Complex(0, 0));
    CHECK_THROWS_AS(fourier_coefficient(req, vec({"0"}), YIntegralMethod::Bessel), Error);
    CHECK_THROWS_AS(fourier_coefficient(req, vec({"1/3"}), YIntegralMethod::Bessel), Error);

    for (const auto& lam : {vec({"1/2"}), vec({"1"}), vec({"3/2"})}) {
        const auto a = fourier_coefficient(base_request(sl, f1, {0, 1}), lam, YIntegralMethod::Bessel);
        const auto b = fourier_coefficient(base_request(sl, f2, {0, 1}), lam, YIntegralMethod::Bessel);
        const auto c = fourier_coefficient(base_request(sl, sum, {0, 1}), lam, YIntegralMethod::Bessel);
        CHECK(std::abs(a.value + b.value - c.value) < 1e-10);
        Complex pieces = 0;
        for (const auto& piece : c.pieces) pieces += piece.value;
        CHECK(std::abs(pieces - c.value) < 1e-15);
    }

    // primitive lambda at the gauge frame: one t = 1 term with polynomial 2^q
    LiftRequest gauge = base_request(sl, single_coefficient(1, Rational(1, 4), weight), {1, 0});
    gauge.frame = gauge_frame(sl.split, 0);
    const LatticeVector lam = vec({"1/2"});
    const auto res = fourier_coefficient(gauge, lam, YIntegralMethod::Bessel);
    const double u = std::sqrt(gauge.frame.u_perp_norm);
    const double A = 2 * kPi * gauge.frame.w_perp_norm_K({0.5});
    const double B = kPi / (2 * u * u);
    const Complex phase = std::exp(Complex(0, 2 * kPi) * (sl.split.lattice.pairing(
                                                               DiscriminantGroup(sl.lattice).representative(1),
                                                               sl.split.u_prime))
                                                              .get_d());
    const Complex predicted = std::sqrt(2.0) / u * Complex(0, -1) * phase * y_integral(-0.5, A, B, YIntegralMethod::Bessel);
    CHECK(res.pieces.size() == 1);
    CHECK(std::abs(res.value - predicted) < 1e-12);
}

TEST_CASE("negative norm coefficients vanish") {
    const auto sl = with_hyperbolic_plane(kA1neg);
    const auto f = synthetic_form(sl.lattice, Rational(3, 2), 3);
    const auto req = base_request(sl, f, {2});
    const auto res = fourier_coefficient(req, vec({"1/2"}), YIntegralMethod::Bessel);
    CHECK(res.negative_norm);
    CHECK(res.value == Complex(0, 0));
}

TEST_CASE("strip integral against the Fourier expansion") {
    const auto sl = with_hyperbolic_plane(kA1);
    const Rational weight(3, 2);
    std::mt19937_64 rng(4);
    const auto g = convert_isometry<double>(random_exact_isometry(sl.split, rng, 2));
    const auto f = synthetic_form(sl.lattice, weight, 3);
    int pairs = 0;
    for (const CountVector& alpha : {CountVector{1, 0}, CountVector{0, 1}})
        for (const auto& lam : {vec({"1/2"}), vec({"1"}), vec({"3/2"}), vec({"-1/2"})}) {
            for (auto method : {YIntegralMethod::Bessel, YIntegralMethod::Quadrature}) {
                const auto chk = strip_integral_check(base_request(sl, f, alpha, &g), lam, method);
                CHECK(chk.residual < 1e-6 * std::max(1.0, std::abs(chk.series_value)));
                CHECK(std::abs(chk.series_value) > 0);
            }
            ++pairs;
        }
    CHECK(pairs >= 6);

    const auto single = base_request(sl, single_coefficient(1, Rational(1, 4), weight), {1, 0}, &g);
    const auto chk = strip_integral_check(single, vec({"1/2"}), YIntegralMethod::Bessel);
    CHECK(std::abs(chk.series_value) > 0);
    CHECK(chk.residual < 1e-6);

    const auto zero = strip_integral_check(base_request(sl, CuspFormData{weight, {}, 0}, {1, 0}), vec({"1/2"}),
                                           YIntegralMethod::Bessel);
    CHECK(zero.series_value == Complex(0, 0));
    CHECK(zero.quadrature_value == Complex(0, 0));

    const auto missing = strip_integral_check(base_request(sl, single_coefficient(0, 2, weight), {1, 0}, &g),
                                              vec({"1/2"}), YIntegralMethod::Bessel);
    CHECK(std::abs(missing.series_value) < 1e-10);
    CHECK(std::abs(missing.quadrature_value) < 1e-10);
}

TEST_CASE("direct lift integral plumbing") {
    const auto sl = with_hyperbolic_plane(kA1);
    const Rational weight(3, 2);
    auto zero = base_request(sl, CuspFormData{weight, {}, 0}, {1, 0});
    CHECK(direct_lift_integral(zero, {}).value == Complex(0, 0));

    std::mt19937_64 rng(2);
    const auto g = convert_isometry<double>(random_exact_isometry(sl.split, rng, 2));
    const auto f = synthetic_form(sl.lattice, weight, 2);
    const DiscriminantGroup disc(sl.lattice);
    const Complex rho(-0.5, std::sqrt(3.0) / 2);
    for (const Complex tau : {rho, rho + 1.0, Complex(0, 1)}) {
        ThetaOptions opt;
        opt.tail_target = 1e-13;
        const auto comps = km_theta_components(sl.lattice, disc, make_split_frame(sl.split,
                                                   make_base_frame<double>(sl.lattice, &sl.split), g).frame, tau, opt);
        for (const CountVector& alpha : {CountVector{1, 0}, CountVector{0, 1}}) {
            const auto req = base_request(sl, f, alpha, &g);
            CVector th(disc.order());
            for (std::size_t i = 0; i < disc.order(); ++i) th(i) = comps.at(alpha).components[i];
            const Complex expected = std::pow(tau.imag(), 1.5) * hermitian_pairing(f.evaluate(tau, disc.order()), th);
            CHECK(std::abs(direct_lift_integrand(req, tau) - expected) < 1e-11);
        }
    }

    const auto req = base_request(sl, f, {1, 0}, &g);
    DirectLiftOptions lo;
    lo.y_max = 3;
    const auto a = direct_lift_integral(req, lo);
    lo.y_max = 6;
    const auto b = direct_lift_integral(req, lo);
    CHECK(b.tail_bound < a.tail_bound);
    CHECK(std::abs(a.value - b.value) <= a.tail_bound + a.error_estimate + b.error_estimate + 1e-9);
}

TEST_CASE("gauge isometry") {
    for (const auto& extra : {kA1, kA1A1, kUA1}) {
        const auto sl = with_hyperbolic_plane(extra);
        const Signature sig = sl.lattice.signature();
        for (int a = 0; a <= sig.p - 2; ++a) {
            const auto rep = gauge_isometry(sl.split, a);
            CHECK(rep.ok());
            REQUIRE(rep.parts.size() == 1);
            CHECK(rep.parts.begin()->first.first == sig.q);
        }
    }
    const auto twisted = gauge_isometry(with_hyperbolic_plane(kA1).split, 0, 1);
    CHECK(twisted.ok());
    CHECK(twisted.parts.begin()->first.first == 2);
    CHECK_THROWS_AS(gauge_isometry(with_hyperbolic_plane(kA1neg).split, 0), Error);
    CHECK_THROWS_AS(gauge_isometry(with_hyperbolic_plane(kA1).split, 1), Error);
}

TEST_CASE("elimination round trip") {
    const auto sl = with_hyperbolic_plane(kUA1);
    const Rational weight(5, 2);
    const auto f = synthetic_form(sl.lattice, weight, 3);
    const auto tables = gauge_tables(f, sl.split, 3, 4, YIntegralMethod::Bessel);
    const auto res = eliminate_coefficients(tables, sl.split);
    CHECK(res.unresolved.empty());
    CHECK(res.recovered.size() == f.coeffs.size());
    for (const auto& [key, c] : f.coeffs) {
        REQUIRE(res.recovered.count(key));
        CHECK(std::abs(res.recovered.at(key) - c) < 1e-8);
    }

    GaugeTables zero = tables;
    for (auto& e : zero.entries) e.value = 0;
    for (const auto& [key, c] : eliminate_coefficients(zero, sl.split).recovered) CHECK(c == Complex(0, 0));

    const auto doubled = eliminate_coefficients(gauge_tables(f.scaled(2), sl.split, 3, 4, YIntegralMethod::Bessel),
                                                sl.split);
    for (const auto& [key, c] : res.recovered) CHECK(std::abs(doubled.recovered.at(key) - 2.0 * c) < 1e-10);

    GaugeTables broken = tables;
    broken.entries.back().value *= 1.5;
    CHECK_THROWS_AS(eliminate_coefficients(broken, sl.split), Error);

    // A1 + U: K = A1 only represents squares
    const auto sl2 = with_hyperbolic_plane(kA1);
    const auto f2 = synthetic_form(sl2.lattice, Rational(3, 2), 3);
    const auto res2 = eliminate_coefficients(gauge_tables(f2, sl2.split, 3, 10, YIntegralMethod::Bessel), sl2.split);
    CHECK(res2.recovered.size() == 3);
    CHECK(res2.unresolved.size() == 3);
    for (const auto& [key, c] : res2.recovered) CHECK(std::abs(c - f2.coeffs.at(key)) < 1e-8);

    const auto scaled = with_hyperbolic_plane(kA1, 2);
    CHECK_THROWS_AS(eliminate_coefficients(GaugeTables{}, scaled.split), Error);
}

TEST_CASE("Eichler phase law on Fourier coefficients") {
    const auto sl = with_hyperbolic_plane(kA1);
    const auto f = synthetic_form(sl.lattice, Rational(3, 2), 3);
    std::mt19937_64 rng(3);
    const auto g = convert_isometry<double>(random_exact_isometry(sl.split, rng, 2));
    for (const auto& v : {vec({"1/3"}), vec({"-5/7"})}) {
        const auto ge = compose(g, convert_isometry<double>(eichler(sl.split, v)));
        for (const CountVector& alpha : {CountVector{1, 0}, CountVector{0, 1}})
            for (const auto& lam : {vec({"1/2"}), vec({"1"})}) {
                const auto a = fourier_coefficient(base_request(sl, f, alpha, &g), lam, YIntegralMethod::Bessel);
                const auto b = fourier_coefficient(base_request(sl, f, alpha, &ge), lam, YIntegralMethod::Bessel);
                const Complex law = std::exp(Complex(0, 2 * kPi) * sl.split.K.pairing(lam, v).get_d());
                CHECK(std::abs(b.value * b.phase - law * a.value * a.phase) < 1e-8 * std::abs(a.value));
            }
    }
}

TEST_CASE("frame choice: rotating the positive plane relabels the coefficients") {
    const auto sl = with_hyperbolic_plane(kA1);
    const auto f = synthetic_form(sl.lattice, Rational(3, 2), 3);
    const auto base = make_base_frame<double>(sl.lattice, &sl.split);
    std::mt19937_64 rng(3);
    const auto g = convert_isometry<double>(random_exact_isometry(sl.split, rng, 2));
    const double angle = 0.7;
    Matrix<double> rot = Matrix<double>::identity(3);
    rot(0, 0) = rot(1, 1) = std::cos(angle);
    rot(0, 1) = -std::sin(angle);
    rot(1, 0) = std::sin(angle);
    Matrix<double> inv(3, 3);
    for (int i = 0; i < 3; ++i)
        for (int k = 0; k < 3; ++k) inv(i, k) = base.sign(i) * base.basis(k, i);
    const auto kg = compose(Isometry<double>{base.basis * rot * inv * sl.lattice.gram_double()}, g);
    for (const auto& lam : {vec({"1/2"}), vec({"1"})}) {
        Complex before[2], after[2];
        for (int i = 0; i < 2; ++i) {
            const CountVector alpha = i == 0 ? CountVector{1, 0} : CountVector{0, 1};
            const auto a = fourier_coefficient(base_request(sl, f, alpha, &g), lam, YIntegralMethod::Bessel);
            const auto b = fourier_coefficient(base_request(sl, f, alpha, &kg), lam, YIntegralMethod::Bessel);
            before[i] = a.value * a.phase;
            after[i] = b.value * b.phase;
        }
        const double scale = std::abs(before[0]) + std::abs(before[1]);
        for (int i = 0; i < 2; ++i)
            CHECK(std::abs(after[i] - rot(i, 0) * before[0] - rot(i, 1) * before[1]) < 1e-8 * scale);
        CHECK(std::abs(std::hypot(std::abs(after[0]), std::abs(after[1])) -
                       std::hypot(std::abs(before[0]), std::abs(before[1]))) < 1e-8 * scale);
    }
}

TEST_CASE("p = 1: every coefficient vanishes") {
    const auto sl = with_hyperbolic_plane(kA1neg);
    const auto f = synthetic_form(sl.lattice, Rational(3, 2), 3, 17);
    const auto req = base_request(sl, f, {2});
    for (int k = 1; k <= 6; ++k) {
        const auto res = fourier_coefficient(req, {Rational(k, 2)}, YIntegralMethod::Bessel);
        CHECK(std::abs(res.value) < 1e-10);
    }
    const auto parts = u_decompose(to_real(km_poly({2}, KMMode::P, 3)), req.frame, DecomposeMethod::ClosedForm);
    for (const auto& [h, poly] : parts)
        if (h.first == 0) CHECK(poly.is_zero());
}

TEST_CASE("twisted splitting") {
    const auto sl = with_hyperbolic_plane(kA1);
    const auto base = make_base_frame<double>(sl.lattice, &sl.split);
    const auto frame = make_split_frame(sl.split, base, Isometry<double>{Matrix<double>::identity(3)});
    for (const auto& alpha : count_vectors(2, 2)) {
        const auto sides = split_theta_sides(sl.split, frame, Complex(0.2, 2.5), alpha, {});
        CHECK(sides.difference() < 1e-4);
    }
    // twisted strip check at weight 5/2
    std::mt19937_64 rng(4);
    const auto g = convert_isometry<double>(random_exact_isometry(sl.split, rng, 2));
    auto req = base_request(sl, synthetic_form(sl.lattice, Rational(5, 2), 3), {1, 1}, &g);
    req.ell = 1;
    const auto chk = strip_integral_check(req, vec({"1/2"}), YIntegralMethod::Quadrature);
    CHECK(chk.residual < 1e-6 * std::max(1.0, std::abs(chk.series_value)));
}
