#include "kmlift/lift.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "kmlift/errors.hpp"
#include "kmlift/quadrature.hpp"

namespace kmlift {

namespace {

constexpr double kPi = std::numbers::pi;

/// Integral over (0, inf) with the t = log y window located by a coarse scan, normalized so the trapezoid
/// tolerance is relative.
template <class V, class F>
QuadratureResult<V> half_line(F&& f, double tol) {
    constexpr double t_min = -60, t_max = 60, step = 0.25;
    std::vector<double> mags;
    double peak = 0;
    for (double t = t_min; t <= t_max; t += step) {
        const double y = std::exp(t);
        mags.push_back(std::abs(f(y)) * y);
        peak = std::max(peak, mags.back());
    }
    QuadratureResult<V> out;
    if (!(peak > 0)) return out;
    std::size_t first = 0, last = mags.size() - 1;
    while (first < mags.size() && mags[first] < 1e-20 * peak) ++first;
    while (last > first && mags[last] < 1e-20 * peak) --last;
    const double lo = t_min + step * (first == 0 ? 0.0 : double(first) - 4);
    const double hi = t_min + step * (double(last) + 4);
    auto scaled = [&](double y) { return f(y) / peak; };
    out = integrate_half_line<V>(scaled, tol, lo, hi);
    out.value = out.value * peak;
    out.error_estimate *= peak;
    return out;
}

std::vector<double> k_coords_double(const LatticeVector& v) { return to_double(v); }

double quadratic_double(const GramLattice& lattice, const std::vector<double>& v) {
    return bilinear(lattice.gram_double(), v, v) / 2;
}

/// Shared precomputation for one request.
struct Context {
    const LiftRequest& req;
    DiscriminantGroup disc_L;
    DiscriminantGroup disc_K;
    ThetaGeometry geom_K;
    int p = 0, q = 0, degree = 0;
    double weight = 0;
    double u_norm = 0;  // |u_{z perp}|^2
    std::map<int, RealPoly> parts;
    std::map<int, ThetaPoly> k_polys;
    std::vector<double> mu_K;

    explicit Context(const LiftRequest& r)
        : req(r), disc_L(r.sd.lattice), disc_K(r.sd.K), geom_K(sublattice_geometry(r.sd, r.frame)) {
        r.validate();
        p = r.frame.p;
        q = r.frame.q;
        degree = q + r.ell;
        weight = (p + q) / 2.0 + r.ell;
        u_norm = r.frame.u_perp_norm;
        const int n = r.sd.lattice.rank();
        const RealPoly P = to_real(km_poly(r.alpha, KMMode::P, n));
        for (const auto& [h, poly] : u_decompose(P, r.frame, DecomposeMethod::ClosedForm)) {
            if (h.second != 0) continue;
            parts.emplace(h.first, poly);
            k_polys.emplace(h.first, theta_poly(poly, geom_K, degree - h.first, 0));
        }
        const std::size_t nk = r.sd.K.rank();
        mu_K.assign(nk, 0.0);
        if (nk > 0)
            mu_K = solve(to_double(r.sd.K.gram_rational()), Matrix<double>::from_columns({r.frame.mu_pairings}, nk))
                       .column(0);
    }

    double pre() const { return 1 / (std::sqrt(2.0) * std::sqrt(u_norm)); }

    double mu_pairing(const std::vector<double>& kappa) const {
        double s = 0;
        for (std::size_t i = 0; i < kappa.size(); ++i) s += kappa[i] * req.frame.mu_pairings[i];
        return s;
    }

    double majorant_K(const std::vector<double>& kappa) const {
        return bilinear(req.frame.k_majorant, kappa, kappa);
    }

    /// exp(-Delta/8 pi y) p_h at kappa.
    double poly_value(int h, const std::vector<double>& kappa, double y) const {
        const auto it = k_polys.find(h);
        if (it == k_polys.end()) return 0;
        double s = 0, ypow = 1;
        for (const auto& e : it->second.series) {
            s += ypow * evaluate(e, kappa);
            ypow /= y;
        }
        return s;
    }

    /// Cosets of L0'/L lying over a coset of K'/K.
    std::vector<std::size_t> fiber(std::size_t k_coset) const {
        std::vector<std::size_t> out;
        for (std::size_t idx : req.sd.L0_cosets)
            if (req.sd.projection.at(idx) == k_coset) out.push_back(idx);
        return out;
    }

    /// e(r (lambda2, u')) for the canonical representative of an L0 coset.
    Complex fiber_phase(std::size_t idx, Int r) const {
        return e_phase(Rational(r) * req.sd.lattice.pairing(disc_L.representative(idx), req.sd.u_prime));
    }

    Int r_cutoff(double y) const {
        for (Int r = 1;; ++r) {
            const double gauss = std::exp(-kPi * double(r * r) / (2 * y * u_norm));
            if (gauss * std::pow(double(r), degree) < req.numerics.r_tail) return r - 1;
            if (r > 100000) throw Error(ErrorKind::NonconvergentRequest, "r-sum does not decay");
        }
    }
};

Complex inverse_two_i_power(double r, int h) { return std::pow(Complex(0, -r / 2), h); }

/// Positive integers t with lam / t in K'.
std::vector<Int> dual_divisors(const DiscriminantGroup& disc_K, const LatticeVector& lam) {
    const auto& divs = disc_K.elementary_divisors();
    const Int exponent = divs.empty() ? 1 : divs.back();
    mpz_class g = 0;
    for (const auto& c : lam) {
        const Rational scaled = c * Rational(exponent);
        if (!is_integer(scaled)) throw Error(ErrorKind::IndexMismatch, "vector is not in K'");
        g = gcd(g, scaled.get_num());
    }
    std::vector<Int> out;
    if (g == 0) return out;
    const Int bound = g.get_si();
    for (Int t = 1; t <= bound; ++t) {
        if (bound % t != 0) continue;
        LatticeVector kappa = lam;
        for (auto& c : kappa) c /= Rational(t);
        if (disc_K.contains_dual(kappa)) out.push_back(t);
    }
    return out;
}

LatticeVector divided(const LatticeVector& lam, Int t) {
    LatticeVector out = lam;
    for (auto& c : out) c /= Rational(t);
    return out;
}

Complex coefficient(const CuspFormData& f, std::size_t coset, const Rational& n) {
    const auto it = f.coeffs.find({coset, n});
    return it == f.coeffs.end() ? Complex(0, 0) : it->second;
}

bool is_zero_vector(const LatticeVector& v) {
    return std::all_of(v.begin(), v.end(), [](const Rational& c) { return c == 0; });
}

}  // namespace

const char* method_name(YIntegralMethod method) {
    return method == YIntegralMethod::Bessel ? "bessel" : "quadrature";
}

YIntegralMethod parse_method(const std::string& name) {
    if (name == "bessel") return YIntegralMethod::Bessel;
    if (name == "quadrature") return YIntegralMethod::Quadrature;
    throw Error(ErrorKind::ParseError, "unknown y-integral method '" + name + "'");
}

double y_integral(double s, double A, double B, YIntegralMethod method, double tol) {
    if (A < 0 || B < 0 || (A == 0 && s >= -1) || (B == 0 && s <= -1) || (A == 0 && B == 0))
        throw Error(ErrorKind::DivergentIntegral, "y-integral diverges for s = " + std::to_string(s) +
                                                      ", A = " + std::to_string(A) + ", B = " + std::to_string(B));
    if (method == YIntegralMethod::Bessel) {
        if (A == 0) return std::pow(B, s + 1) * std::tgamma(-s - 1);
        if (B == 0) return std::tgamma(s + 1) / std::pow(A, s + 1);
        return 2 * std::pow(B / A, (s + 1) / 2) * std::cyl_bessel_k(std::abs(s + 1), 2 * std::sqrt(A * B));
    }
    auto f = [&](double y) { return std::pow(y, s) * std::exp(-A * y - B / y); };
    return half_line<double>(f, tol).value;
}

CuspFormData synthetic_cusp_form(const GramLattice& lattice, const Rational& weight, int n_max, unsigned seed) {
    const DiscriminantGroup disc(lattice);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(-1, 1);
    CuspFormData f;
    f.weight = weight;
    f.n_max = n_max;
    for (std::size_t c = 0; c < disc.order(); ++c)
        for (Rational n = disc.q_mod1(c) == 0 ? Rational(1) : disc.q_mod1(c); n <= n_max; n += 1) {
            const double re = uni(rng), im = uni(rng);
            f.coeffs[{c, n}] = std::exp(-n.get_d()) * Complex(re, im);
        }
    return f;
}

void LiftRequest::validate() const {
    const Signature sig = sd.lattice.signature();
    if (frame.p != sig.p || frame.q != sig.q) throw Error(ErrorKind::DimensionMismatch, "frame and lattice disagree");
    if (ell < 0) throw Error(ErrorKind::DegreeMismatch, "negative twist degree");
    if (static_cast<int>(alpha.size()) != sig.p)
        throw Error(ErrorKind::DimensionMismatch, "count vector length must be p");
    if (std::accumulate(alpha.begin(), alpha.end(), 0) != sig.q + ell)
        throw Error(ErrorKind::DegreeMismatch, "count vector must have total q + ell");
    Rational weight(sig.p + sig.q, 2);
    weight.canonicalize();
    if (f.weight != weight + Rational(ell))
        throw Error(ErrorKind::WeightMismatch, "cusp form weight must be (p+q)/2 + ell");
    f.validate(DiscriminantGroup(sd.lattice));
}

Complex h_alpha(const LiftRequest& req, Complex tau, Int r_cutoff) {
    const Context ctx(req);
    const double y = tau.imag();
    if (!(y > 0)) throw Error(ErrorKind::NonconvergentRequest, "tau must lie in the upper half-plane");
    if (r_cutoff <= 0) r_cutoff = ctx.r_cutoff(y);
    const std::size_t nk = req.sd.K.rank();
    const std::vector<double> zero(nk, 0.0);
    ThetaOptions opt;
    opt.tail_target = req.numerics.theta_tail;
    Complex total = 0;
    for (Int r = 1; r <= r_cutoff; ++r) {
        const double gauss = std::exp(-kPi * double(r * r) / (2 * y * ctx.u_norm));
        const CVector fk = f_to_FK(req.f, req.sd, ctx.disc_L, -r, 0).evaluate(tau, ctx.disc_K.order());
        std::vector<double> delta(nk);
        for (std::size_t i = 0; i < nk; ++i) delta[i] = double(r) * ctx.mu_K[i];
        for (const auto& [h, tp] : ctx.k_polys) {
            const ThetaValue th = siegel_theta(ctx.geom_K, ctx.disc_K, tau, delta, zero, tp, opt);
            CVector tv(th.components.size());
            for (std::size_t i = 0; i < th.components.size(); ++i) tv(i) = th.components[i];
            total += inverse_two_i_power(double(r), h) * std::pow(y, ctx.weight - h) * gauss *
                     hermitian_pairing(fk, tv);
        }
    }
    return ctx.pre() * total;
}

Complex h_alpha_termwise(const LiftRequest& req, Complex tau, Int r_cutoff) {
    const Context ctx(req);
    const double x = tau.real(), y = tau.imag();
    if (!(y > 0)) throw Error(ErrorKind::NonconvergentRequest, "tau must lie in the upper half-plane");
    if (r_cutoff <= 0) r_cutoff = ctx.r_cutoff(y);
    const double radius = std::sqrt((45.0 + 3 * ctx.degree) / (kPi * y));
    const double theta_pre = std::pow(y, (ctx.q - 1) / 2.0);
    const CVector f_tau = req.f.evaluate(tau, ctx.disc_L.order());

    // lattice vectors of K' once, grouped by coset
    std::vector<std::vector<std::vector<double>>> vectors(ctx.disc_K.order());
    for (std::size_t c = 0; c < ctx.disc_K.order(); ++c)
        for (const auto& v : enumerate_coset(req.sd.K, ctx.disc_K.representative(c), req.frame.k_majorant, radius))
            vectors[c].push_back(k_coords_double(v));

    Complex total = 0;
    for (Int r = 1; r <= r_cutoff; ++r) {
        const double gauss = std::exp(-kPi * double(r * r) / (2 * y * ctx.u_norm));
        for (std::size_t c = 0; c < ctx.disc_K.order(); ++c) {
            Complex f_part = 0;
            for (std::size_t idx : ctx.fiber(c)) f_part += ctx.fiber_phase(idx, r) * f_tau(idx);
            if (f_part == Complex(0, 0)) continue;
            for (const auto& kappa : vectors[c]) {
                const double qk = quadratic_double(req.sd.K, kappa);
                const Complex phase = e_phase(x * qk - double(r) * ctx.mu_pairing(kappa));
                const double envelope = theta_pre * std::exp(-kPi * y * ctx.majorant_K(kappa));
                for (const auto& [h, poly] : ctx.parts) {
                    const Complex theta_term = envelope * ctx.poly_value(h, kappa, y) * phase;
                    total += inverse_two_i_power(double(r), h) * std::pow(y, ctx.weight - h) * gauss * f_part *
                             std::conj(theta_term);
                }
            }
        }
    }
    return ctx.pre() * total;
}

double SplitCheckReport::max() const { return std::max({pairing_residual, splitting_residual, modular_residual}); }

SplitCheckReport integrand_split_check(const LiftRequest& req, Complex tau, Int coset_cutoff, SplitCheckMode mode) {
    if (mode == SplitCheckMode::Modular && !req.modular)
        throw Error(ErrorKind::ModeMismatch, "the modular check needs a genuine modular form; use formal mode");
    const Context ctx(req);
    SplitCheckReport rep;
    rep.mode = mode;

    std::mt19937_64 rng(20240611);
    std::normal_distribution<double> gauss;
    for (Int r = -2; r <= 2; ++r) {
        CVector g(ctx.disc_K.order());
        for (Eigen::Index i = 0; i < g.size(); ++i) g(i) = Complex(gauss(rng), gauss(rng));
        const auto [lhs, rhs] = pairing_identity_sides(req.f, req.sd, ctx.disc_L, g, r, tau);
        rep.pairing_residual = std::max(rep.pairing_residual, std::abs(lhs - rhs));
    }
    SplitThetaOptions sopt;
    sopt.coset_cutoff = coset_cutoff;
    rep.splitting_residual = split_theta_sides(req.sd, req.frame, tau, req.alpha, sopt).difference();

    if (mode == SplitCheckMode::Modular) {
        const double y = tau.imag();
        const Complex direct = direct_lift_integrand(req, tau);
        Complex constant = 0;
        if (auto it = ctx.k_polys.find(0); it != ctx.k_polys.end()) {
            const std::vector<double> zero(req.sd.K.rank(), 0.0);
            ThetaOptions opt;
            opt.tail_target = req.numerics.theta_tail;
            const ThetaValue th = siegel_theta(ctx.geom_K, ctx.disc_K, tau, zero, zero, it->second, opt);
            CVector tv(th.components.size());
            for (std::size_t i = 0; i < th.components.size(); ++i) tv(i) = th.components[i];
            const CVector fk = f_to_FK(req.f, req.sd, ctx.disc_L, 0, 0).evaluate(tau, ctx.disc_K.order());
            constant = std::pow(y, ctx.weight) * ctx.pre() * hermitian_pairing(fk, tv);
        }
        Complex poincare = 2.0 * h_alpha(req, tau);  // (0, 1) and (0, -1)
        for (Int c = -coset_cutoff; c <= coset_cutoff; ++c) {
            if (c == 0) continue;
            const Int center = static_cast<Int>(std::llround(-double(c) * tau.real()));
            for (Int step = 0;; ++step) {
                bool any = false;
                for (int side = 0; side < (step == 0 ? 1 : 2); ++side) {
                    const Int d = side == 0 ? center + step : center - step;
                    const Complex denom = double(c) * tau + double(d);
                    const double im = y / std::norm(denom);
                    if (kPi / (2 * im * ctx.u_norm) > 40) continue;
                    any = true;
                    if (std::gcd(c, d) != 1) continue;
                    const GeneratorWord w = word_for_bottom_row(c, d);
                    poincare += h_alpha(req, mobius(word_matrix(w), tau));
                }
                if (!any && step > 0) break;
            }
        }
        rep.modular_residual = std::abs(direct - constant - poincare);
    }
    return rep;
}

FourierResult fourier_coefficient(const LiftRequest& req, const LatticeVector& lam, YIntegralMethod method) {
    const Context ctx(req);
    if (lam.size() != static_cast<std::size_t>(req.sd.K.rank()))
        throw Error(ErrorKind::DimensionMismatch, "lambda must be given in K-coordinates");
    if (is_zero_vector(lam))
        throw Error(ErrorKind::IndexMismatch, "lambda = 0 is the constant term; use direct_lift_integral");
    if (!ctx.disc_K.contains_dual(lam)) throw Error(ErrorKind::IndexMismatch, "lambda is not in K'");
    FourierResult res;
    res.lam = lam;
    res.method = method;
    const std::vector<double> lam_d = k_coords_double(lam);
    res.phase = e_phase(ctx.mu_pairing(lam_d));
    const Rational norm = req.sd.K.quadratic(lam);
    if (norm < 0) {
        res.negative_norm = true;
        return res;
    }
    if (norm == 0) return res;

    const double sqrt2_over_u = std::sqrt(2.0) / std::sqrt(ctx.u_norm);
    const double shift = ctx.degree + (ctx.p - 5) / 2.0;
    for (Int t : dual_divisors(ctx.disc_K, lam)) {
        const LatticeVector kappa = divided(lam, t);
        const Rational n = norm / Rational(t * t);
        Complex fiber_sum = 0;
        for (std::size_t idx : ctx.fiber(ctx.disc_K.index_of(kappa)))
            fiber_sum += ctx.fiber_phase(idx, t) * coefficient(req.f, idx, n);
        if (fiber_sum == Complex(0, 0)) continue;
        const std::vector<double> kd = k_coords_double(kappa);
        const double A = 2 * kPi * req.frame.w_perp_norm_K(kd);
        const double B = kPi * double(t * t) / (2 * ctx.u_norm);
        for (const auto& [h, tp] : ctx.k_polys) {
            double integral = 0;
            for (std::size_t m = 0; m < tp.series.size(); ++m) {
                const double e = evaluate(tp.series[m], kd);
                if (e == 0) continue;
                integral += e * y_integral(shift - h - double(m), A, B, method);
            }
            FourierPiece piece;
            piece.t = t;
            piece.h = h;
            piece.value = sqrt2_over_u * inverse_two_i_power(double(t), h) * fiber_sum * integral;
            res.value += piece.value;
            res.pieces.push_back(piece);
        }
    }
    return res;
}

StripCheck strip_integral_check(const LiftRequest& req, const LatticeVector& lam, YIntegralMethod method) {
    const Context ctx(req);
    StripCheck out;
    const FourierResult series = fourier_coefficient(req, lam, method);
    out.series_value = series.value * series.phase;

    struct Term {
        Int r;
        std::vector<double> kappa;
        double qk, majorant, mu;
        std::vector<std::pair<Complex, std::vector<std::pair<double, Complex>>>> fiber;  // phase, (n, c)
    };
    std::vector<Term> terms;
    double span = 1;
    for (Int r : dual_divisors(ctx.disc_K, lam)) {
        const LatticeVector kappa = divided(lam, r);
        Term term{r, k_coords_double(kappa), req.sd.K.quadratic(kappa).get_d(), 0, 0, {}};
        term.majorant = ctx.majorant_K(term.kappa);
        term.mu = ctx.mu_pairing(term.kappa);
        for (std::size_t idx : ctx.fiber(ctx.disc_K.index_of(kappa))) {
            std::vector<std::pair<double, Complex>> cs;
            for (const auto& [key, c] : req.f.coeffs)
                if (key.first == idx) {
                    cs.push_back({key.second.get_d(), c});
                    span = std::max(span, std::abs(key.second.get_d() - term.qk) + 1);
                }
            if (!cs.empty()) term.fiber.push_back({ctx.fiber_phase(idx, r), cs});
        }
        if (!term.fiber.empty()) terms.push_back(term);
    }
    if (terms.empty()) return out;

    const double theta_exp = (ctx.q - 1) / 2.0;
    auto kernel = [&](double x, double y) {
        Complex sum = 0;
        for (const auto& term : terms) {
            Complex f_part = 0;
            for (const auto& [phase, cs] : term.fiber)
                for (const auto& [n, c] : cs) f_part += phase * c * std::exp(-2 * kPi * n * y) * e_phase(n * x);
            const double gauss = std::exp(-kPi * double(term.r * term.r) / (2 * y * ctx.u_norm));
            const Complex conj_phase = e_phase(-x * term.qk + double(term.r) * term.mu);
            const double envelope = std::pow(y, theta_exp) * std::exp(-kPi * y * term.majorant);
            for (const auto& [h, poly] : ctx.parts)
                sum += inverse_two_i_power(double(term.r), h) * std::pow(y, ctx.weight - h) * gauss * f_part *
                       envelope * ctx.poly_value(h, term.kappa, y) * conj_phase;
        }
        return ctx.pre() * sum;
    };
    const int panels = static_cast<int>(std::ceil(span));
    auto y_integrand = [&](double y) {
        auto fx = [&](double x) { return kernel(x, y); };
        return 2.0 * integrate_panels<Complex>(fx, 0.0, 1.0, panels, req.numerics.x_order) / (y * y);
    };
    const auto res = half_line<Complex>(y_integrand, req.numerics.y_tol);
    out.quadrature_value = res.value;
    out.quadrature_error = res.error_estimate;
    out.residual = std::abs(out.series_value - out.quadrature_value);
    return out;
}

namespace {

struct DirectIntegrand {
    const LiftRequest& req;
    DiscriminantGroup disc_L;
    ThetaGeometry geom_L;
    ThetaPoly poly;
    double weight;
    int degree;

    explicit DirectIntegrand(const LiftRequest& r)
        : req(r), disc_L(r.sd.lattice), geom_L(lattice_geometry(r.sd.lattice, r.frame.frame)) {
        r.validate();
        degree = std::accumulate(r.alpha.begin(), r.alpha.end(), 0);
        poly = theta_poly(km_poly(r.alpha, KMMode::P, r.sd.lattice.rank()), geom_L, degree, 0);
        weight = (r.frame.p + r.frame.q) / 2.0 + r.ell;
    }

    Complex operator()(Complex tau) const {
        const std::vector<double> zero(req.sd.lattice.rank(), 0.0);
        ThetaOptions opt;
        opt.tail_target = req.numerics.theta_tail;
        const ThetaValue th = siegel_theta(geom_L, disc_L, tau, zero, zero, poly, opt);
        CVector tv(th.components.size());
        for (std::size_t i = 0; i < th.components.size(); ++i) tv(i) = th.components[i];
        return std::pow(tau.imag(), weight) * hermitian_pairing(req.f.evaluate(tau, disc_L.order()), tv);
    }
};

}  // namespace

Complex direct_lift_integrand(const LiftRequest& req, Complex tau) { return DirectIntegrand(req)(tau); }

DirectLiftResult direct_lift_integral(const LiftRequest& req, const DirectLiftOptions& options) {
    const DirectIntegrand integrand(req);
    DirectLiftResult out;
    if (options.y_max <= 1) throw Error(ErrorKind::NonconvergentRequest, "y_max must exceed 1");
    if (req.f.coeffs.empty()) return out;
    double err = 0;
    auto fx = [&](double x) {
        auto fy = [&](double y) { return integrand(Complex(x, y)) / (y * y); };
        const auto r = integrate_adaptive<Complex>(fy, std::sqrt(1 - x * x), options.y_max, options.y_tol);
        err += r.error_estimate;
        return r.value;
    };
    out.value = integrate_panels<Complex>(fx, -0.5, 0.5, options.x_panels);
    out.error_estimate = err / (20.0 * options.x_panels);

    // above y_max: |<f, Theta>| <= sum |c| e^{-2 pi n y} * (y / Y)^a * envelope(Y)
    const double Y = options.y_max;
    const double a = req.frame.q / 2.0;
    const double env = theta_envelope(integrand.geom_L, integrand.disc_L, Y, integrand.poly, req.numerics.theta_tail);
    const double b = integrand.weight - 2 + a;
    double tail = 0;
    for (const auto& [key, c] : req.f.coeffs) {
        const double n = key.second.get_d();
        const double length = (80 + 4 * std::abs(b)) / (2 * kPi * n);
        auto g = [&](double y) { return std::pow(y, b) * std::exp(-2 * kPi * n * y); };
        const auto r = integrate_adaptive<double>(g, Y, Y + length, 1e-8 * g(Y) + 1e-300);
        tail += std::abs(c) * (r.value + r.error_estimate);
    }
    out.tail_bound = 1.01 * env * std::pow(Y, -a) * tail;
    return out;
}

namespace {

/// B P J B^T G: the isometry acting on the base frame by the signed permutation perm (column j -> sign * e_perm).
template <class T>
Matrix<T> frame_permutation(const BaseFrame<T>& base, const Matrix<T>& gram, const std::vector<int>& target,
                            const std::vector<int>& sign) {
    const std::size_t n = base.basis.rows();
    Matrix<T> perm(n, n);
    for (std::size_t j = 0; j < n; ++j) perm(target[j], j) = T(sign[j]);
    Matrix<T> j_bt(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k) j_bt(i, k) = T(base.sign(static_cast<int>(i))) * base.basis(k, i);
    return base.basis * perm * j_bt * gram;
}

void gauge_permutation(int p, int n, int alpha1, std::vector<int>& target, std::vector<int>& sign) {
    target.resize(n);
    sign.assign(n, 1);
    std::iota(target.begin(), target.end(), 0);
    std::swap(target[alpha1], target[p - 1]);
    sign[p] = -1;
}

void check_gauge_index(const Signature& sig, int alpha1) {
    if (sig.p <= 1) throw Error(ErrorKind::BadSignature, "the gauge needs p > 1");
    if (alpha1 < 0 || alpha1 > sig.p - 2) throw Error(ErrorKind::BadSignature, "alpha1 must lie in [0, p-2]");
}

}  // namespace

GaugeReport gauge_isometry(const SplitData& sd, int alpha1, int ell) {
    const Signature sig = sd.lattice.signature();
    check_gauge_index(sig, alpha1);
    if (ell < 0) throw Error(ErrorKind::DegreeMismatch, "negative twist degree");
    const int n = sd.lattice.rank();
    const BaseFrame<QSqrt2> base = make_base_frame<QSqrt2>(sd.lattice, &sd);
    const Matrix<QSqrt2> gram = sd.lattice.gram_rational().map<QSqrt2>([](const Rational& r) { return QSqrt2(r); });
    std::vector<int> target, sign;
    gauge_permutation(sig.p, n, alpha1, target, sign);

    GaugeReport rep;
    rep.alpha1 = alpha1;
    rep.exact = Isometry<QSqrt2>{frame_permutation(base, gram, target, sign)};
    rep.numeric = Isometry<double>{rep.exact.matrix.map<double>([](const QSqrt2& v) { return v.to_double(); })};
    rep.isometry = isometry_defect<QSqrt2>(sd.lattice, rep.exact).is_zero();
    rep.determinant_one = determinant(rep.exact.matrix) == QSqrt2(1);

    // g maps the negative base vectors into their span
    const Matrix<QSqrt2> coords = inverse(base.basis) * rep.exact.matrix * base.basis;
    rep.fixes_base_point = true;
    for (int j = sig.p; j < n; ++j)
        for (int i = 0; i < sig.p; ++i)
            if (!coords(i, j).is_zero()) rep.fixes_base_point = false;

    CountVector alpha(sig.p, 0);
    alpha[alpha1] = sig.q + ell;
    const SplitFrame<QSqrt2> frame = make_split_frame<QSqrt2>(sd, base, rep.exact);
    rep.parts = u_decompose<QSqrt2>(km_poly(alpha, KMMode::P, n), frame, DecomposeMethod::ClosedForm);
    const int top = sig.q + ell;
    rep.top_degree_only = false;
    if (rep.parts.size() == 1 && rep.parts.begin()->first == std::make_pair(top, 0)) {
        const HalfPowerPoly& poly = rep.parts.begin()->second;
        const HalfPowerPoly expected =
            HalfPowerPoly::constant(poly.nvars(), HalfPower(Rational(mpz_class(1) << top)));
        rep.top_degree_only = poly == expected && exp_laplacian(poly) == expected;
    }
    return rep;
}

SplitFrame<double> gauge_frame(const SplitData& sd, int alpha1) {
    const Signature sig = sd.lattice.signature();
    check_gauge_index(sig, alpha1);
    const BaseFrame<double> base = make_base_frame<double>(sd.lattice, &sd);
    std::vector<int> target, sign;
    gauge_permutation(sig.p, sd.lattice.rank(), alpha1, target, sign);
    const Isometry<double> g{frame_permutation(base, sd.lattice.gram_double(), target, sign)};
    return make_split_frame<double>(sd, base, g);
}

std::vector<LatticeVector> positive_vectors(const SplitData& sd, const Rational& norm_cutoff, double radius) {
    const int n = sd.lattice.rank();
    const BaseFrame<double> base = make_base_frame<double>(sd.lattice, &sd);
    const SplitFrame<double> frame =
        make_split_frame<double>(sd, base, Isometry<double>{Matrix<double>::identity(n)});
    const DiscriminantGroup disc_K(sd.K);
    std::vector<LatticeVector> out;
    for (std::size_t c = 0; c < disc_K.order(); ++c)
        for (auto& v : enumerate_coset(sd.K, disc_K.representative(c), frame.k_majorant, radius)) {
            const Rational qv = sd.K.quadratic(v);
            if (qv > 0 && qv <= norm_cutoff) out.push_back(std::move(v));
        }
    std::stable_sort(out.begin(), out.end(), [&](const LatticeVector& a, const LatticeVector& b) {
        const Rational qa = sd.K.quadratic(a), qb = sd.K.quadratic(b);
        if (qa != qb) return qa < qb;
        return a < b;
    });
    return out;
}

GaugeTables gauge_tables(const CuspFormData& f, const SplitData& sd, const Rational& norm_cutoff, double radius,
                         YIntegralMethod method, int ell) {
    const Signature sig = sd.lattice.signature();
    if (sig.p <= 1) throw Error(ErrorKind::BadSignature, "gauge tables need p > 1");
    GaugeTables tables;
    tables.ell = ell;
    tables.norm_cutoff = norm_cutoff;
    const std::vector<LatticeVector> lams = positive_vectors(sd, norm_cutoff, radius);
    for (int a = 0; a <= sig.p - 2; ++a) {
        LiftRequest req;
        req.f = f;
        req.alpha.assign(sig.p, 0);
        req.alpha[a] = sig.q + ell;
        req.sd = sd;
        req.frame = gauge_frame(sd, a);
        req.ell = ell;
        for (const auto& lam : lams) tables.entries.push_back({a, lam, fourier_coefficient(req, lam, method).value});
    }
    return tables;
}

EliminationResult eliminate_coefficients(const GaugeTables& tables, const SplitData& sd) {
    if (sd.N != 1) throw Error(ErrorKind::IndexMismatch, "elimination needs N = 1");
    const Signature sig = sd.lattice.signature();
    const DiscriminantGroup disc_L(sd.lattice), disc_K(sd.K);
    const int top = sig.q + tables.ell;
    const double s = (sig.p - 5) / 2.0;

    std::map<int, SplitFrame<double>> frames;
    for (const auto& e : tables.entries)
        if (!frames.count(e.alpha1)) frames.emplace(e.alpha1, gauge_frame(sd, e.alpha1));

    auto l_coset = [&](const LatticeVector& kappa) {
        const std::size_t k = disc_K.index_of(kappa);
        for (std::size_t idx : sd.L0_cosets)
            if (sd.projection.at(idx) == k) return idx;
        throw Error(ErrorKind::IndexMismatch, "no coset of L0'/L over this coset of K'/K");
    };
    // weight of c(f_{lambda/t}, q(lambda)/t^2) in the gauge coefficient
    auto weight = [&](const SplitFrame<double>& frame, const LatticeVector& kappa, Int t) {
        const double A = 2 * kPi * frame.w_perp_norm_K(to_double(kappa));
        const double B = kPi * double(t * t) / (2 * frame.u_perp_norm);
        const Complex phase =
            e_phase(Rational(t) * sd.lattice.pairing(disc_L.representative(l_coset(kappa)), sd.u_prime));
        return std::sqrt(2.0) / std::sqrt(frame.u_perp_norm) * std::pow(Complex(0, -double(t)), top) * phase *
               y_integral(s, A, B, YIntegralMethod::Bessel);
    };

    std::vector<const GaugeTableEntry*> order;
    for (const auto& e : tables.entries) order.push_back(&e);
    std::stable_sort(order.begin(), order.end(), [&](const GaugeTableEntry* a, const GaugeTableEntry* b) {
        return sd.K.quadratic(a->lam) < sd.K.quadratic(b->lam);
    });

    std::map<std::pair<std::size_t, Rational>, std::vector<Complex>> determinations;
    EliminationResult out;
    Rational current_norm = -1;
    for (const GaugeTableEntry* e : order) {
        const Rational norm = sd.K.quadratic(e->lam);
        if (norm != current_norm) {
            // every determination of smaller norm is final: fold them into the recovered table
            for (const auto& [key, vals] : determinations) {
                if (out.recovered.count(key)) continue;
                Complex mean = 0;
                for (const Complex& v : vals) mean += v;
                mean /= double(vals.size());
                out.recovered[key] = mean;
            }
            current_norm = norm;
        }
        const SplitFrame<double>& frame = frames.at(e->alpha1);
        Complex rest = e->value;
        bool complete = true;
        for (Int t : dual_divisors(disc_K, e->lam)) {
            if (t == 1) continue;
            const LatticeVector kappa = divided(e->lam, t);
            const auto it = out.recovered.find({l_coset(kappa), norm / Rational(t * t)});
            if (it == out.recovered.end()) {
                complete = false;
                break;
            }
            rest -= weight(frame, kappa, t) * it->second;
        }
        if (!complete) continue;
        determinations[{l_coset(e->lam), norm}].push_back(rest / weight(frame, e->lam, 1));
    }
    for (const auto& [key, vals] : determinations) {
        Complex mean = 0;
        for (const Complex& v : vals) mean += v;
        mean /= double(vals.size());
        out.recovered[key] = mean;
        for (const Complex& v : vals) {
            const double spread = std::abs(v - vals.front());
            out.max_spread = std::max(out.max_spread, spread);
            if (spread > 1e-6 * std::max(1.0, std::abs(vals.front())))
                throw Error(ErrorKind::InconsistentTables, "two determinations of one coefficient disagree");
        }
    }
    for (std::size_t idx = 0; idx < disc_L.order(); ++idx) {
        Rational n = disc_L.q_mod1(idx);
        if (n == 0) n = 1;
        for (; n <= tables.norm_cutoff; n += 1)
            if (!out.recovered.count({idx, n})) out.unresolved.insert({idx, n});
    }
    return out;
}

}  // namespace kmlift
