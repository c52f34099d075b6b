#include "kmlift/theta.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "kmlift/errors.hpp"
#include "kmlift/quadrature.hpp"

namespace kmlift {

namespace {

constexpr double kPi = std::numbers::pi;

Eigen::MatrixXd to_eigen(const Matrix<double>& m) {
    Eigen::MatrixXd out(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = m(i, j);
    return out;
}

/// Neumaier summation of complex terms.
struct CompensatedSum {
    double re = 0, im = 0, cre = 0, cim = 0;
    static void add(double& s, double& c, double v) {
        const double t = s + v;
        if (std::abs(s) >= std::abs(v)) c += (s - t) + v;
        else c += (v - t) + s;
        s = t;
    }
    void add(Complex v) {
        add(re, cre, v.real());
        add(im, cim, v.imag());
    }
    Complex value() const { return {re + cre, im + cim}; }
};

double shortest_length(const Matrix<double>& majorant) {
    const std::size_t n = majorant.rows();
    if (n == 0) return 0;
    double bound = majorant(0, 0);
    for (std::size_t i = 1; i < n; ++i) bound = std::min(bound, majorant(i, i));
    double best = bound;
    for (const auto& x : short_vectors(majorant, std::vector<double>(n, 0.0), bound)) {
        bool zero = true;
        for (Int v : x) zero = zero && v == 0;
        if (zero) continue;
        double norm = 0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) norm += majorant(i, j) * static_cast<double>(x[i] * x[j]);
        best = std::min(best, norm);
    }
    return std::sqrt(best);
}

}  // namespace

void finish_geometry(ThetaGeometry& geom) {
    geom.majorant = geom.xmap.transpose() * geom.xmap;
    geom.gram = to_double(geom.lattice.gram_rational());
    const std::size_t n = geom.lattice.rank();
    if (n == 0) return;
    geom.min_length = shortest_length(geom.majorant);
    const Eigen::MatrixXd m = to_eigen(geom.majorant);
    const Eigen::MatrixXd y = to_eigen(geom.poly_map);
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(y.transpose() * y, m);
    geom.poly_map_norm = std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

ThetaGeometry lattice_geometry(const GramLattice& lattice, const Frame<double>& frame) {
    ThetaGeometry g;
    g.lattice = lattice;
    g.xmap = frame.coordinate_map();
    g.positive_rows = frame.p;
    g.poly_map = g.xmap;
    g.laplacian_metric = Matrix<double>::identity(lattice.rank());
    finish_geometry(g);
    return g;
}

ThetaGeometry sublattice_geometry(const SplitData& sd, const SplitFrame<double>& frame) {
    ThetaGeometry g;
    g.lattice = sd.K;
    g.xmap = frame.k_images;
    g.positive_rows = frame.p;
    const std::size_t n = sd.K.rank();
    g.poly_map = Matrix<double>::identity(n);
    g.laplacian_metric = n == 0 ? Matrix<double>(0, 0) : inverse(frame.k_majorant);
    finish_geometry(g);
    return g;
}

ThetaPoly theta_poly(const RealPoly& poly, const ThetaGeometry& geom, int m_plus, int m_minus) {
    ThetaPoly t;
    t.m_plus = m_plus;
    t.m_minus = m_minus;
    t.zero = poly.is_zero();
    if (t.zero) return t;
    if (poly.nvars() != static_cast<int>(geom.poly_map.rows()))
        throw Error(ErrorKind::DimensionMismatch, "polynomial variables differ from the geometry");
    t.series = laplacian_series(poly, geom.laplacian_metric);
    return t;
}

ThetaPoly theta_poly(const HalfPowerPoly& poly, const ThetaGeometry& geom, int m_plus, int m_minus) {
    for (const auto& [m, c] : poly.terms())
        if (c.has_y()) throw Error(ErrorKind::DegreeMismatch, "polynomial depends on y");
    return theta_poly(to_real(poly), geom, m_plus, m_minus);
}

namespace {

/// sum_m y^{-m} sum_terms |c| (k r)^deg
double growth_bound(const ThetaPoly& poly, double y, double k, double r) {
    double sum = 0, ypow = 1;
    for (const auto& e : poly.series) {
        for (const auto& [m, c] : e.terms()) {
            const int deg = std::accumulate(m.begin(), m.end(), 0);
            sum += std::abs(c) * std::pow(k * r, deg) * ypow;
        }
        ypow /= y;
    }
    return sum;
}

double prefactor(const ThetaGeometry& geom, const ThetaPoly& poly, double y) {
    return std::pow(y, geom.lattice.signature().q / 2.0 + poly.m_minus);
}

}  // namespace

double theta_tail_bound(const ThetaGeometry& geom, const ThetaPoly& poly, double y, double radius) {
    const int n = geom.lattice.rank();
    if (n == 0 || poly.zero) return 0;
    const double rho = geom.min_length;
    auto integrand = [&](double r) {
        return std::pow(1 + 2 * r / rho, n) * 2 * kPi * y * r * growth_bound(poly, y, geom.poly_map_norm, r) *
               std::exp(-kPi * y * r * r);
    };
    const double r_max = std::sqrt(radius * radius + 200 / (kPi * y));
    const auto res = integrate_adaptive<double>(integrand, radius, r_max, 1e-6 * integrand(radius) + 1e-300);
    return 1.01 * (res.value + res.error_estimate) * prefactor(geom, poly, y);
}

double radius_for_target(const ThetaGeometry& geom, const ThetaPoly& poly, double y, double target) {
    if (geom.lattice.rank() == 0 || poly.zero) return 1.0;
    int degree = 0;
    if (!poly.series.empty())
        for (const auto& [m, c] : poly.series.front().terms())
            degree = std::max(degree, std::accumulate(m.begin(), m.end(), 0));
    double r = std::max(0.5, std::sqrt((degree + 1) / (2 * kPi * y)));
    for (int iter = 0; iter < 200; ++iter, r *= 1.08)
        if (theta_tail_bound(geom, poly, y, r) <= target) return r;
    throw Error(ErrorKind::NonconvergentRequest, "no radius reaches the tail target");
}

ThetaValue siegel_theta(const ThetaGeometry& geom, const DiscriminantGroup& disc, Complex tau,
                        const std::vector<double>& delta, const std::vector<double>& nu, const ThetaPoly& poly,
                        const ThetaOptions& options) {
    const double x = tau.real(), y = tau.imag();
    if (!(y > 0)) throw Error(ErrorKind::NonconvergentRequest, "tau must lie in the upper half-plane");
    const std::size_t n = geom.lattice.rank();
    if (delta.size() != n || nu.size() != n) throw Error(ErrorKind::DimensionMismatch, "delta/nu length");
    ThetaValue out;
    out.components.assign(disc.order(), Complex(0, 0));
    if (poly.zero) return out;
    double radius = options.radius;
    if (radius <= 0) radius = radius_for_target(geom, poly, y, options.tail_target);
    out.tail_bound = theta_tail_bound(geom, poly, y, radius);
    if (options.radius > 0 && out.tail_bound > options.tail_target)
        throw Error(ErrorKind::NonconvergentRequest, "radius too small for the tail target");

    const double pre = prefactor(geom, poly, y);
    const std::vector<double> gd = geom.gram * delta;
    const std::size_t rows = geom.xmap.rows();
    struct Term {
        double norm;
        Complex value;
    };
    for (std::size_t c = 0; c < disc.order(); ++c) {
        const std::vector<double> rep = to_double(disc.representative(c));
        std::vector<double> shift(n);
        for (std::size_t i = 0; i < n; ++i) shift[i] = rep[i] + nu[i];
        std::vector<Term> terms;
        for (const auto& ix : short_vectors(geom.majorant, shift, radius * radius)) {
            std::vector<double> v(n);
            for (std::size_t i = 0; i < n; ++i) v[i] = static_cast<double>(ix[i]) + shift[i];
            const std::vector<double> xs = geom.xmap * v;
            double pos = 0, neg = 0;
            for (std::size_t j = 0; j < rows; ++j) (static_cast<int>(j) < geom.positive_rows ? pos : neg) += xs[j] * xs[j];
            // (lambda + nu/2, delta) = (v - nu/2, delta)
            double pair = 0;
            for (std::size_t i = 0; i < n; ++i) pair += (v[i] - nu[i] / 2) * gd[i];
            const std::vector<double> pv = geom.poly_map * v;
            double pval = 0, ypow = 1;
            for (const auto& e : poly.series) {
                pval += ypow * evaluate(e, pv);
                ypow /= y;
            }
            const double arg = 2 * kPi * (x * (pos - neg) / 2 - pair);
            terms.push_back({pos + neg, pval * std::exp(-kPi * y * (pos + neg)) * std::polar(1.0, arg)});
        }
        std::stable_sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) { return a.norm < b.norm; });
        CompensatedSum sum;
        double abs_sum = 0;
        for (const auto& t : terms) {
            sum.add(t.value);
            abs_sum += std::abs(t.value);
        }
        out.components[c] = pre * sum.value();
        out.abs_sum = std::max(out.abs_sum, pre * abs_sum);
        out.terms += terms.size();
    }
    return out;
}

double theta_envelope(const ThetaGeometry& geom, const DiscriminantGroup& disc, double y, const ThetaPoly& poly,
                      double tail_target) {
    if (poly.zero) return 0;
    const std::size_t n = geom.lattice.rank();
    const double radius = radius_for_target(geom, poly, y, tail_target);
    double best = 0;
    for (std::size_t c = 0; c < disc.order(); ++c) {
        const std::vector<double> shift = to_double(disc.representative(c));
        double sum = 0;
        for (const auto& ix : short_vectors(geom.majorant, shift, radius * radius)) {
            std::vector<double> v(n);
            for (std::size_t i = 0; i < n; ++i) v[i] = static_cast<double>(ix[i]) + shift[i];
            const std::vector<double> pv = geom.poly_map * v;
            double pabs = 0, ypow = 1;
            for (const auto& e : poly.series) {
                pabs += ypow * std::abs(evaluate(e, pv));
                ypow /= y;
            }
            sum += pabs * std::exp(-kPi * y * bilinear(geom.majorant, v, v));
        }
        best = std::max(best, sum);
    }
    return prefactor(geom, poly, y) * best + theta_tail_bound(geom, poly, y, radius);
}

std::map<CountVector, ThetaValue> km_theta_components(const GramLattice& lattice, const DiscriminantGroup& disc,
                                                      const Frame<double>& frame, Complex tau,
                                                      const ThetaOptions& options) {
    const ThetaGeometry geom = lattice_geometry(lattice, frame);
    const int n = lattice.rank();
    const std::vector<double> zero(n, 0.0);
    std::map<CountVector, ThetaValue> out;
    for (const auto& alpha : count_vectors(frame.p, frame.q)) {
        const ThetaPoly tp = theta_poly(km_poly(alpha, KMMode::P, n), geom, frame.q, 0);
        out.emplace(alpha, siegel_theta(geom, disc, tau, zero, zero, tp, options));
    }
    return out;
}

ModularityResult modularity_defect(const ThetaGeometry& geom, const WeilRep& rep, const ThetaPoly& poly,
                                   Generator generator, Complex tau, double tail_target) {
    const std::size_t n = geom.lattice.rank();
    const std::vector<double> zero(n, 0.0);
    ThetaOptions opt;
    opt.tail_target = tail_target / 4;
    const GeneratorWord word{generator == Generator::S ? "S" : "T"};
    const Complex image = mobius(word_matrix(word), tau);
    const ThetaValue lhs = siegel_theta(geom, rep.disc, image, zero, zero, poly, opt);
    const ThetaValue rhs = siegel_theta(geom, rep.disc, tau, zero, zero, poly, opt);
    CVector v(rhs.components.size());
    for (std::size_t i = 0; i < rhs.components.size(); ++i) v(i) = rhs.components[i];
    const Signature sig = geom.lattice.signature();
    const int exponent = sig.p - sig.q + 2 * (poly.m_plus - poly.m_minus);
    const Complex factor = std::pow(word_sqrt_factor(word, tau), exponent);
    const CVector transformed = factor * weil_apply(rep, word, v);
    ModularityResult res;
    for (std::size_t i = 0; i < lhs.components.size(); ++i)
        res.defect = std::max(res.defect, std::abs(lhs.components[i] - transformed(i)));
    res.tail_bound = lhs.tail_bound + std::abs(factor) * std::sqrt(static_cast<double>(v.size())) * rhs.tail_bound;
    return res;
}

double SplitThetaSides::difference() const {
    double d = 0;
    for (std::size_t i = 0; i < lhs.components.size(); ++i)
        d = std::max(d, std::abs(lhs.components[i] - rhs.components[i]));
    return d;
}

CVector lift_from_K(const SplitData& sd, const DiscriminantGroup& disc_L, const CVector& g, Int r) {
    CVector out = CVector::Zero(disc_L.order());
    for (std::size_t idx : sd.L0_cosets) {
        const Rational pair = sd.lattice.pairing(disc_L.representative(idx), sd.u_prime);
        out(idx) = e_phase(Rational(-r) * pair) * g(sd.projection.at(idx));
    }
    return out;
}

namespace {

CVector to_cvector(const std::vector<Complex>& v) {
    CVector out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out(i) = v[i];
    return out;
}

}  // namespace

SplitThetaSides split_theta_sides(const SplitData& sd, const SplitFrame<double>& frame, Complex tau,
                                  const CountVector& alpha, const SplitThetaOptions& options) {
    const int n = sd.lattice.rank();
    const int p = frame.p, q = frame.q;
    const double target = options.tail_target;
    const WeilRep rep = weil_generators(sd.lattice);
    const DiscriminantGroup disc_K(sd.K);
    const ThetaGeometry geom_L = lattice_geometry(sd.lattice, frame.frame);
    const ThetaGeometry geom_K = sublattice_geometry(sd, frame);
    const RealPoly P = to_real(km_poly(alpha, KMMode::P, n));
    const int degree = std::accumulate(alpha.begin(), alpha.end(), 0);

    SplitThetaSides out;
    ThetaOptions opt;
    opt.tail_target = target;
    const std::vector<double> zero_L(n, 0.0);
    out.lhs = siegel_theta(geom_L, rep.disc, tau, zero_L, zero_L, theta_poly(P, geom_L, degree, 0), opt);

    const auto parts = u_decompose(P, frame, DecomposeMethod::ClosedForm);
    std::map<int, ThetaPoly> k_polys;
    for (const auto& [h, poly] : parts) k_polys.emplace(h.first, theta_poly(poly, geom_K, degree - h.first, 0));

    const std::size_t nk = sd.K.rank();
    const std::vector<double> zero_K(nk, 0.0);
    std::vector<double> mu_K(nk, 0.0);
    if (nk > 0) mu_K = solve(to_double(sd.K.gram_rational()), Matrix<double>::from_columns({frame.mu_pairings}, nk)).column(0);
    const double u_len = std::sqrt(frame.u_perp_norm);
    const double pre = 1 / (std::sqrt(2.0) * u_len);
    const double root_dim = std::sqrt(static_cast<double>(rep.disc.order()));

    CVector rhs = CVector::Zero(rep.disc.order());
    double rhs_tail = 0;
    if (auto it = k_polys.find(0); it != k_polys.end()) {
        const ThetaValue t0 = siegel_theta(geom_K, disc_K, tau, zero_K, zero_K, it->second, opt);
        rhs += pre * lift_from_K(sd, rep.disc, to_cvector(t0.components), 0);
        rhs_tail += pre * t0.tail_bound;
    }

    // coprime (c, d) ordered by c then outward in d
    std::vector<std::pair<Int, Int>> pairs;
    const Int c_lo = options.cosets == CosetRange::AllSigns ? -options.coset_cutoff : 0;
    const double y = tau.imag();
    for (Int c = c_lo; c <= options.coset_cutoff; ++c) {
        if (c == 0) {
            pairs.push_back({0, 1});
            if (options.cosets == CosetRange::AllSigns) pairs.push_back({0, -1});
            continue;
        }
        const Int center = static_cast<Int>(std::llround(-static_cast<double>(c) * tau.real()));
        for (Int step = 0;; ++step) {
            bool any = false;
            for (int side = 0; side < (step == 0 ? 1 : 2); ++side) {
                const Int d = side == 0 ? center + step : center - step;
                const double im = y / std::norm(static_cast<double>(c) * tau + static_cast<double>(d));
                if (kPi / (2 * im * frame.u_perp_norm) > 92) continue;
                any = true;
                if (std::gcd(c, d) == 1) pairs.push_back({c, d});
            }
            if (!any && step > 0) break;
        }
    }

    for (const auto& [c, d] : pairs) {
        const GeneratorWord w = word_for_bottom_row(c, d);
        const Complex image = mobius(word_matrix(w), tau);
        const double im = image.imag();
        const Complex phi = word_sqrt_factor(w, tau);
        const Complex phi_factor = std::pow(phi, q - p - 2 * degree);
        CVector acc = CVector::Zero(rep.disc.order());
        double acc_tail = 0;
        bool used = false;
        for (const auto& [h, tp] : k_polys) {
            const Complex coef_h = std::pow(Complex(0, -2), -h) * std::pow(im, -h);
            double size_estimate = -1;
            for (Int r = 1;; ++r) {
                const double gauss = std::exp(-kPi * double(r * r) / (2 * im * frame.u_perp_norm));
                const double scale = pre * gauss * std::pow(double(r), h) * std::pow(im, -h) * std::abs(phi_factor);
                if (size_estimate >= 0 && scale * size_estimate * root_dim < target * 1e-3) break;
                if (gauss < 1e-40) break;
                std::vector<double> delta(nk);
                for (std::size_t i = 0; i < nk; ++i) delta[i] = static_cast<double>(r) * mu_K[i];
                const ThetaValue tk = siegel_theta(geom_K, disc_K, image, delta, zero_K, tp, opt);
                size_estimate = tk.abs_sum + tk.tail_bound;
                const Complex coef = pre * coef_h * std::pow(double(r), h) * gauss * phi_factor;
                acc += coef * lift_from_K(sd, rep.disc, to_cvector(tk.components), r);
                acc_tail += std::abs(coef) * tk.tail_bound;
                out.max_r = std::max(out.max_r, r);
                used = true;
            }
        }
        if (!used) continue;
        ++out.cosets_used;
        rhs += weil_apply(rep, inverse_word(w), acc);
        rhs_tail += root_dim * acc_tail;
    }
    const double next_c = static_cast<double>(options.coset_cutoff + 1);
    out.cutoff_weight = std::exp(-kPi * next_c * next_c * y / (2 * frame.u_perp_norm));
    out.rhs.components.assign(rhs.data(), rhs.data() + rhs.size());
    out.rhs.tail_bound = rhs_tail;
    return out;
}

CVector CuspFormData::evaluate(Complex tau, std::size_t order) const {
    CVector v = CVector::Zero(order);
    for (const auto& [key, c] : coeffs) {
        if (key.first >= order) throw Error(ErrorKind::IndexMismatch, "coefficient coset outside the group");
        v(key.first) += c * std::exp(Complex(0, 2 * kPi) * key.second.get_d() * tau);
    }
    return v;
}

void CuspFormData::validate(const DiscriminantGroup& disc) const {
    for (const auto& [key, c] : coeffs) {
        if (key.first >= disc.order()) throw Error(ErrorKind::IndexMismatch, "coefficient coset outside the group");
        if (key.second <= 0) throw Error(ErrorKind::IndexMismatch, "cusp form coefficient at n <= 0");
        if (!is_integer(key.second - disc.q_mod1(key.first)))
            throw Error(ErrorKind::IndexMismatch, "coefficient index n is not in q(gamma) + Z");
    }
}

CuspFormData CuspFormData::scaled(Complex factor) const {
    CuspFormData out = *this;
    for (auto& [key, c] : out.coeffs) c *= factor;
    return out;
}

CuspFormData f_to_FK(const CuspFormData& f, const SplitData& sd, const DiscriminantGroup& disc_L, Int r, Int t) {
    CuspFormData out;
    out.weight = f.weight;
    out.n_max = f.n_max;
    const Rational qup = sd.lattice.quadratic(sd.u_prime);
    for (std::size_t idx : sd.L0_cosets) {
        LatticeVector shifted = disc_L.representative(idx);
        for (std::size_t i = 0; i < shifted.size(); ++i) shifted[i] += Rational(t) * sd.u_prime[i];
        const std::size_t source = disc_L.index_of(shifted);
        const Rational arg = -Rational(r) * sd.lattice.pairing(disc_L.representative(idx), sd.u_prime) -
                             Rational(r * t) * qup;
        const Complex phase = e_phase(arg);
        const std::size_t target = sd.projection.at(idx);
        for (const auto& [key, c] : f.coeffs)
            if (key.first == source) out.coeffs[{target, key.second}] += phase * c;
    }
    return out;
}

Complex hermitian_pairing(const CVector& a, const CVector& b) {
    if (a.size() != b.size()) throw Error(ErrorKind::DimensionMismatch, "pairing of vectors of different size");
    Complex s = 0;
    for (Eigen::Index i = 0; i < a.size(); ++i) s += a(i) * std::conj(b(i));
    return s;
}

std::pair<Complex, Complex> pairing_identity_sides(const CuspFormData& f, const SplitData& sd,
                                                   const DiscriminantGroup& disc_L, const CVector& g, Int r,
                                                   Complex tau) {
    const DiscriminantGroup disc_K(sd.K);
    const Complex lhs = hermitian_pairing(f.evaluate(tau, disc_L.order()), lift_from_K(sd, disc_L, g, r));
    const Complex rhs = hermitian_pairing(f_to_FK(f, sd, disc_L, -r, 0).evaluate(tau, disc_K.order()), g);
    return {lhs, rhs};
}

std::vector<Complex> theta_box_sum(const GramLattice& lattice, const Frame<double>& frame, Complex tau,
                                       const std::vector<double>& delta, const std::vector<double>& nu,
                                       const HalfPowerPoly& poly, int m_minus) {
    const DiscriminantGroup disc(lattice);
    const int n = lattice.rank();
    const Matrix<double> gram = to_double(lattice.gram_rational());
    // bounding box of the ellipsoid majorant norm^2 <= 40 / (pi y), where exp(-pi y |v|^2) < 1e-17
    Eigen::MatrixXd maj = Eigen::MatrixXd::Zero(n, n);
    for (int j = 0; j < n; ++j) {
        Eigen::VectorXd row(n);
        for (int i = 0; i < n; ++i) {
            std::vector<double> e(n, 0.0);
            e[i] = 1;
            row(i) = bilinear(gram, e, frame.vectors.column(j));
        }
        maj += row * row.transpose();
    }
    const Eigen::MatrixXd maj_inv = maj.inverse();
    std::vector<Int> box(n);
    for (int i = 0; i < n; ++i)
        box[i] = static_cast<Int>(std::ceil(std::sqrt(40 / (kPi * tau.imag()) * maj_inv(i, i)))) + 2;
    const RealPoly evaluated = to_real(exp_laplacian(poly), tau.imag());
    std::vector<Complex> out(disc.order());
    for (std::size_t c = 0; c < disc.order(); ++c) {
        const std::vector<double> rep = to_double(disc.representative(c));
        std::vector<Int> x(n);
        for (int i = 0; i < n; ++i) x[i] = -box[i];
        while (true) {
            std::vector<double> v(n), lam(n);
            for (int i = 0; i < n; ++i) {
                lam[i] = rep[i] + static_cast<double>(x[i]);
                v[i] = lam[i] + nu[i];
            }
            std::vector<double> xs(n);
            double qpos = 0, qneg = 0;
            for (int j = 0; j < n; ++j) {
                xs[j] = frame.sign(j) * bilinear(gram, v, frame.vectors.column(j));
                (j < frame.p ? qpos : qneg) += xs[j] * xs[j] / 2;
            }
            double pval = 0;
            for (const auto& [m, coef] : evaluated.terms()) {
                double t = coef;
                for (int i = 0; i < n; ++i) t *= std::pow(xs[i], m[i]);
                pval += t;
            }
            std::vector<double> half(n);
            for (int i = 0; i < n; ++i) half[i] = lam[i] + nu[i] / 2;
            const Complex arg = tau * qpos - std::conj(tau) * qneg - bilinear(gram, half, delta);
            out[c] += pval * std::exp(Complex(0, 2 * kPi) * arg);
            int k = 0;
            while (k < n && x[k] == box[k]) {
                x[k] = -box[k];
                ++k;
            }
            if (k == n) break;
            ++x[k];
        }
        out[c] *= std::pow(tau.imag(), lattice.signature().q / 2.0 + m_minus);
    }
    return out;
}

}  // namespace kmlift
