#include "kmlift/polynomial.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>

namespace kmlift {

HalfPower::HalfPower(const Rational& r) {
    if (r != 0) terms_[{0, 0, 0}] = r;
}

HalfPower::HalfPower(const QSqrt2& v) {
    add_term({0, 0, 0}, v.rational_part());
    add_term({1, 0, 0}, v.sqrt2_part());
}

HalfPower HalfPower::monomial(const Rational& r, int a, int b, int d) {
    HalfPower h;
    h.add_term({a, b, d}, r);
    return h;
}

void HalfPower::add_term(Key key, const Rational& r) {
    if (r == 0) return;
    // fold even powers of sqrt 2 into the rational factor
    const int a = key[0];
    const int rem = ((a % 2) + 2) % 2;
    const int k = (a - rem) / 2;
    Rational scaled = r;
    if (k > 0) scaled *= Rational(mpz_class(1) << k);
    if (k < 0) scaled /= Rational(mpz_class(1) << (-k));
    key[0] = rem;
    auto it = terms_.find(key);
    if (it == terms_.end()) {
        terms_.emplace(key, scaled);
    } else {
        it->second += scaled;
        if (it->second == 0) terms_.erase(it);
    }
}

bool HalfPower::has_y() const {
    for (const auto& [k, r] : terms_)
        if (k[2] != 0) return true;
    return false;
}

double HalfPower::evaluate(double y) const {
    double s = 0;
    for (const auto& [k, r] : terms_)
        s += r.get_d() * std::pow(2.0, 0.5 * k[0]) * std::pow(std::numbers::pi, 0.5 * k[1]) * std::pow(y, 0.5 * k[2]);
    return s;
}

HalfPower& HalfPower::operator+=(const HalfPower& o) {
    for (const auto& [k, r] : o.terms_) add_term(k, r);
    return *this;
}

HalfPower& HalfPower::operator-=(const HalfPower& o) {
    for (const auto& [k, r] : o.terms_) add_term(k, Rational(-r));
    return *this;
}

HalfPower& HalfPower::operator*=(const HalfPower& o) {
    HalfPower out;
    for (const auto& [k1, r1] : terms_)
        for (const auto& [k2, r2] : o.terms_) out.add_term({k1[0] + k2[0], k1[1] + k2[1], k1[2] + k2[2]}, Rational(r1 * r2));
    *this = std::move(out);
    return *this;
}

std::string HalfPower::str() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [k, r] : terms_) {
        if (!first) os << " + ";
        first = false;
        os << r.get_str() << " * 2^(" << k[0] << "/2) * pi^(" << k[1] << "/2) * y^(" << k[2] << "/2)";
    }
    return os.str();
}

double RingTraits<double>::pi_half_power(int b) { return std::pow(std::numbers::pi, 0.5 * b); }
double RingTraits<double>::sqrt2_power(int a) { return std::pow(2.0, 0.5 * a); }

template <class R>
Polynomial<R> Polynomial<R>::constant(int nvars, const R& c) {
    Polynomial p(nvars);
    p.add_term(Monomial(nvars, 0), c);
    return p;
}

template <class R>
Polynomial<R> Polynomial<R>::variable(int nvars, int index) {
    Polynomial p(nvars);
    Monomial m(nvars, 0);
    m.at(index) = 1;
    p.add_term(m, RingTraits<R>::one());
    return p;
}

template <class R>
Polynomial<R> Polynomial<R>::term(const Monomial& exps, const R& c) {
    Polynomial p(static_cast<int>(exps.size()));
    p.add_term(exps, c);
    return p;
}

template <class R>
void Polynomial<R>::add_term(const Monomial& exps, const R& c) {
    if (static_cast<int>(exps.size()) != nvars_) throw Error(ErrorKind::DimensionMismatch, "monomial length");
    if (RingTraits<R>::is_zero(c)) return;
    auto it = terms_.find(exps);
    if (it == terms_.end()) {
        terms_.emplace(exps, c);
    } else {
        it->second += c;
        if (RingTraits<R>::is_zero(it->second)) terms_.erase(it);
    }
}

template <class R>
Polynomial<R>& Polynomial<R>::operator+=(const Polynomial& o) {
    if (o.nvars_ != nvars_) throw Error(ErrorKind::DimensionMismatch, "polynomial variable count");
    for (const auto& [m, c] : o.terms_) add_term(m, c);
    return *this;
}

template <class R>
Polynomial<R>& Polynomial<R>::operator-=(const Polynomial& o) {
    if (o.nvars_ != nvars_) throw Error(ErrorKind::DimensionMismatch, "polynomial variable count");
    for (const auto& [m, c] : o.terms_) add_term(m, RingTraits<R>::zero() - c);
    return *this;
}

template <class R>
Polynomial<R>& Polynomial<R>::operator*=(const Polynomial& o) {
    if (o.nvars_ != nvars_) throw Error(ErrorKind::DimensionMismatch, "polynomial variable count");
    Polynomial out(nvars_);
    Monomial m(nvars_);
    for (const auto& [m1, c1] : terms_)
        for (const auto& [m2, c2] : o.terms_) {
            for (int i = 0; i < nvars_; ++i) m[i] = m1[i] + m2[i];
            out.add_term(m, c1 * c2);
        }
    *this = std::move(out);
    return *this;
}

template <class R>
Polynomial<R> Polynomial<R>::scaled(const R& c) const {
    Polynomial out(nvars_);
    for (const auto& [m, v] : terms_) out.add_term(m, v * c);
    return out;
}

template <class R>
Polynomial<R> Polynomial<R>::power(int k) const {
    Polynomial out = constant(nvars_, RingTraits<R>::one());
    for (int i = 0; i < k; ++i) out *= *this;
    return out;
}

template <class R>
Polynomial<R> Polynomial<R>::derivative(int var) const {
    Polynomial out(nvars_);
    for (const auto& [m, c] : terms_) {
        if (m[var] == 0) continue;
        Monomial d = m;
        d[var] -= 1;
        out.add_term(d, c * RingTraits<R>::from_rational(Rational(m[var])));
    }
    return out;
}

template <class R>
Polynomial<R> Polynomial<R>::laplacian(const Matrix<R>& metric) const {
    if (static_cast<int>(metric.rows()) != nvars_) throw Error(ErrorKind::DimensionMismatch, "metric size");
    Polynomial out(nvars_);
    for (int i = 0; i < nvars_; ++i) {
        const Polynomial di = derivative(i);
        if (di.is_zero()) continue;
        for (int j = 0; j < nvars_; ++j) {
            if (RingTraits<R>::is_zero(metric(i, j))) continue;
            out += di.derivative(j).scaled(metric(i, j));
        }
    }
    return out;
}

template <class R>
Polynomial<R> Polynomial<R>::laplacian() const {
    Polynomial out(nvars_);
    for (int i = 0; i < nvars_; ++i) out += derivative(i).derivative(i);
    return out;
}

template <class R>
Polynomial<R> Polynomial<R>::compose_linear(const Matrix<R>& map) const {
    if (static_cast<int>(map.rows()) != nvars_) throw Error(ErrorKind::DimensionMismatch, "linear map rows");
    const int m = static_cast<int>(map.cols());
    std::vector<Polynomial> forms;
    for (int j = 0; j < nvars_; ++j) {
        Polynomial f(m);
        for (int i = 0; i < m; ++i) {
            Monomial e(m, 0);
            e[i] = 1;
            f.add_term(e, map(j, i));
        }
        forms.push_back(std::move(f));
    }
    std::map<std::pair<int, int>, Polynomial> powers;
    auto power_of = [&](int j, int k) -> const Polynomial& {
        auto key = std::make_pair(j, k);
        auto it = powers.find(key);
        if (it != powers.end()) return it->second;
        Polynomial v = k == 0 ? constant(m, RingTraits<R>::one()) : forms[j].power(k);
        return powers.emplace(key, std::move(v)).first->second;
    };
    Polynomial out(m);
    for (const auto& [mono, c] : terms_) {
        Polynomial t = constant(m, c);
        for (int j = 0; j < nvars_; ++j)
            if (mono[j] > 0) t *= power_of(j, mono[j]);
        out += t;
    }
    return out;
}

template <class R>
std::pair<int, int> Polynomial<R>::bidegree(int p) const {
    bool first = true;
    std::pair<int, int> deg{0, 0};
    for (const auto& [m, c] : terms_) {
        int a = 0, b = 0;
        for (int i = 0; i < nvars_; ++i) (i < p ? a : b) += m[i];
        if (first) {
            deg = {a, b};
            first = false;
        } else if (deg != std::make_pair(a, b)) {
            throw Error(ErrorKind::NotHomogeneous, "polynomial is not bihomogeneous");
        }
    }
    return deg;
}

template <class R>
int Polynomial<R>::total_degree() const {
    int d = 0;
    for (const auto& [m, c] : terms_) {
        int k = 0;
        for (int e : m) k += e;
        d = std::max(d, k);
    }
    return d;
}

namespace {
std::string coef_str(const HalfPower& c) {
    if (c.terms().size() == 1) return c.str();
    return "(" + c.str() + ")";
}
std::string coef_str(double c) {
    std::ostringstream os;
    os.precision(17);
    os << c;
    return os.str();
}
}  // namespace

template <class R>
std::string Polynomial<R>::str(const std::vector<std::string>& names) const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
        if (!first) os << " + ";
        first = false;
        os << coef_str(it->second);
        for (int i = 0; i < nvars_; ++i) {
            if (it->first[i] == 0) continue;
            os << " * " << (i < static_cast<int>(names.size()) ? names[i] : "x" + std::to_string(i + 1));
            if (it->first[i] > 1) os << "^" << it->first[i];
        }
    }
    return os.str();
}

template class Polynomial<HalfPower>;
template class Polynomial<double>;

HalfPowerPoly hermite(int n) {
    if (n < 0) throw Error(ErrorKind::DegreeMismatch, "negative Hermite index");
    // H_n(x) = n! sum_l (-1)^l (2x)^{n-2l} / (l! (n-2l)!)
    HalfPowerPoly h(1);
    mpz_class nf;
    mpz_fac_ui(nf.get_mpz_t(), static_cast<unsigned long>(n));
    for (int l = 0; 2 * l <= n; ++l) {
        mpz_class lf, rf;
        mpz_fac_ui(lf.get_mpz_t(), static_cast<unsigned long>(l));
        mpz_fac_ui(rf.get_mpz_t(), static_cast<unsigned long>(n - 2 * l));
        Rational c(nf * (mpz_class(1) << (n - 2 * l)), lf * rf);
        c.canonicalize();
        if (l % 2 == 1) c = -c;
        h.add_term({n - 2 * l}, HalfPower(c));
    }
    return h;
}

HalfPowerPoly km_poly(const CountVector& count, KMMode mode, int nvars) {
    const int p = static_cast<int>(count.size());
    if (nvars < 0) nvars = p;
    if (nvars < p) throw Error(ErrorKind::DimensionMismatch, "too few variables for the count vector");
    int q = 0;
    for (int c : count) {
        if (c < 0) throw Error(ErrorKind::DegreeMismatch, "negative count");
        q += c;
    }
    if (mode == KMMode::P) {
        Monomial m(nvars, 0);
        for (int j = 0; j < p; ++j) m[j] = count[j];
        return HalfPowerPoly::term(m, HalfPower::sqrt2_power(q));
    }
    // (4 pi)^{-q/2} = 2^{-q} pi^{-q/2}
    HalfPowerPoly out = HalfPowerPoly::constant(nvars, HalfPower::monomial(Rational(1, 1) / Rational(mpz_class(1) << q), 0, -q, 0));
    for (int j = 0; j < p; ++j) {
        if (count[j] == 0) continue;
        HalfPowerPoly factor(nvars);
        const HalfPowerPoly h = hermite(count[j]);
        for (const auto& [m, c] : h.terms()) {
            const int k = m[0];
            Monomial e(nvars, 0);
            e[j] = k;
            // (sqrt(2 pi) x)^k = 2^{k/2} pi^{k/2} x^k
            factor.add_term(e, c * HalfPower::monomial(Rational(1), k, k, 0));
        }
        out *= factor;
    }
    return out;
}

template <class R>
std::vector<Polynomial<R>> laplacian_series(const Polynomial<R>& poly, const Matrix<R>& metric) {
    std::vector<Polynomial<R>> out;
    Polynomial<R> d = poly;
    mpz_class denom = 1;
    for (int m = 0; !d.is_zero(); ++m) {
        if (m > 0) {
            d = d.laplacian(metric);
            denom *= 8 * m;
            if (d.is_zero()) break;
        }
        Rational c(1);
        c /= Rational(denom);
        if (m % 2 == 1) c = -c;
        out.push_back(d.scaled(RingTraits<R>::from_rational(c) * RingTraits<R>::pi_half_power(-2 * m)));
    }
    if (out.empty()) out.push_back(Polynomial<R>(poly.nvars()));
    return out;
}

template std::vector<Polynomial<HalfPower>> laplacian_series(const Polynomial<HalfPower>&, const Matrix<HalfPower>&);
template std::vector<Polynomial<double>> laplacian_series(const Polynomial<double>&, const Matrix<double>&);

HalfPowerPoly exp_laplacian(const HalfPowerPoly& poly) {
    const int n = poly.nvars();
    Matrix<HalfPower> id(n, n);
    for (int i = 0; i < n; ++i) id(i, i) = HalfPower(1);
    const auto series = laplacian_series(poly, id);
    HalfPowerPoly out(n);
    for (std::size_t m = 0; m < series.size(); ++m)
        out += series[m].scaled(HalfPower::y_half_power(-2 * static_cast<int>(m)));
    return out;
}

bool km_scaling_identity(const CountVector& count) {
    int q = 0;
    for (int c : count) q += c;
    const HalfPowerPoly qpoly = km_poly(count, KMMode::Q);
    const HalfPowerPoly lhs =
        qpoly.rescale_by_degree([&](int k) { return HalfPower::y_half_power(k - q); });
    const HalfPowerPoly rhs = exp_laplacian(km_poly(count, KMMode::P));
    return lhs == rhs;
}

std::vector<CountVector> count_vectors(int p, int total) {
    std::vector<CountVector> out;
    if (p <= 0) {
        if (total == 0) out.push_back({});
        return out;
    }
    CountVector cur(p, 0);
    std::function<void(int, int)> rec = [&](int j, int left) {
        if (j == p - 1) {
            cur[j] = left;
            out.push_back(cur);
            return;
        }
        for (int v = left; v >= 0; --v) {
            cur[j] = v;
            rec(j + 1, left - v);
        }
    };
    rec(0, total);
    return out;
}

std::string count_label(const CountVector& c) {
    std::string s = "(";
    for (std::size_t i = 0; i < c.size(); ++i) s += (i ? "," : "") + std::to_string(c[i]);
    return s + ")";
}

TwistResult twist_poly(const CountVector& alpha, const CountVector& beta) {
    if (alpha.size() != beta.size()) throw Error(ErrorKind::DimensionMismatch, "count vectors over different p");
    TwistResult r;
    for (std::size_t i = 0; i < alpha.size(); ++i) r.gamma.push_back(alpha[i] + beta[i]);
    r.q_poly = km_poly(r.gamma, KMMode::Q);
    r.label = "b^" + count_label(r.gamma);
    return r;
}

RealPoly to_real(const HalfPowerPoly& poly, double y) {
    RealPoly out(poly.nvars());
    for (const auto& [m, c] : poly.terms()) out.add_term(m, c.evaluate(y));
    return out;
}

double evaluate(const RealPoly& poly, const std::vector<double>& x) {
    double sum = 0;
    for (const auto& [m, c] : poly.terms()) {
        double t = c;
        for (std::size_t i = 0; i < m.size(); ++i)
            for (int k = 0; k < m[i]; ++k) t *= x[i];
        sum += t;
    }
    return sum;
}

long double binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    long double r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

}  // namespace kmlift
