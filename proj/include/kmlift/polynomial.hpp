#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "kmlift/matrix.hpp"
#include "kmlift/rational.hpp"

namespace kmlift {

/// Exact scalar sum_k r_k * 2^(a_k/2) * pi^(b_k/2) * y^(d_k/2) with a_k in {0,1}.
class HalfPower {
public:
    using Key = std::array<int, 3>;  // (a, b, d)

    HalfPower() = default;
    HalfPower(int v) : HalfPower(Rational(v)) {}
    HalfPower(const Rational& r);
    HalfPower(const QSqrt2& v);

    static HalfPower monomial(const Rational& r, int a, int b, int d);
    static HalfPower sqrt2_power(int a) { return monomial(Rational(1), a, 0, 0); }
    static HalfPower pi_half_power(int b) { return monomial(Rational(1), 0, b, 0); }
    static HalfPower y_half_power(int d) { return monomial(Rational(1), 0, 0, d); }

    const std::map<Key, Rational>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    bool has_y() const;
    /// Numeric value with y substituted.
    double evaluate(double y = 1.0) const;

    HalfPower& operator+=(const HalfPower& o);
    HalfPower& operator-=(const HalfPower& o);
    HalfPower& operator*=(const HalfPower& o);
    friend HalfPower operator+(HalfPower a, const HalfPower& b) { return a += b; }
    friend HalfPower operator-(HalfPower a, const HalfPower& b) { return a -= b; }
    friend HalfPower operator*(HalfPower a, const HalfPower& b) { return a *= b; }
    friend HalfPower operator-(const HalfPower& a) { return HalfPower() - a; }
    friend bool operator==(const HalfPower& a, const HalfPower& b) { return a.terms_ == b.terms_; }
    friend bool operator!=(const HalfPower& a, const HalfPower& b) { return !(a == b); }

    std::string str() const;

private:
    void add_term(Key key, const Rational& r);
    std::map<Key, Rational> terms_;
};

template <>
struct FieldTraits<HalfPower> {
    static constexpr bool exact = true;
    static HalfPower zero() { return HalfPower(); }
    static HalfPower one() { return HalfPower(1); }
    static bool is_zero(const HalfPower& v) { return v.is_zero(); }
};

/// Coefficient-ring operations used by the polynomial engine.
template <class R>
struct RingTraits;

template <>
struct RingTraits<HalfPower> {
    static HalfPower zero() { return HalfPower(); }
    static HalfPower one() { return HalfPower(1); }
    static bool is_zero(const HalfPower& v) { return v.is_zero(); }
    static HalfPower from_rational(const Rational& r) { return HalfPower(r); }
    static HalfPower from_field(const QSqrt2& v) { return HalfPower(v); }
    static HalfPower pi_half_power(int b) { return HalfPower::pi_half_power(b); }
    static HalfPower sqrt2_power(int a) { return HalfPower::sqrt2_power(a); }
    static double to_double(const HalfPower& v) { return v.evaluate(); }
};

template <>
struct RingTraits<double> {
    static double zero() { return 0.0; }
    static double one() { return 1.0; }
    static bool is_zero(double v) { return v == 0.0; }
    static double from_rational(const Rational& r) { return r.get_d(); }
    static double from_field(double v) { return v; }
    static double pi_half_power(int b);
    static double sqrt2_power(int a);
    static double to_double(double v) { return v; }
};

using Monomial = std::vector<int>;

/// Sparse multivariate polynomial with coefficients in R.
template <class R>
class Polynomial {
public:
    Polynomial() = default;
    explicit Polynomial(int nvars) : nvars_(nvars) {}

    static Polynomial constant(int nvars, const R& c);
    static Polynomial variable(int nvars, int index);
    static Polynomial term(const Monomial& exps, const R& c);

    int nvars() const { return nvars_; }
    const std::map<Monomial, R>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    void add_term(const Monomial& exps, const R& c);

    Polynomial& operator+=(const Polynomial& o);
    Polynomial& operator-=(const Polynomial& o);
    Polynomial& operator*=(const Polynomial& o);
    friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
    friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
    friend Polynomial operator*(Polynomial a, const Polynomial& b) { return a *= b; }
    Polynomial scaled(const R& c) const;
    Polynomial power(int k) const;
    friend bool operator==(const Polynomial& a, const Polynomial& b) {
        return a.nvars_ == b.nvars_ && a.terms_ == b.terms_;
    }
    friend bool operator!=(const Polynomial& a, const Polynomial& b) { return !(a == b); }

    Polynomial derivative(int var) const;
    /// sum_{ij} metric(i,j) d_i d_j
    Polynomial laplacian(const Matrix<R>& metric) const;
    /// Standard Laplacian sum_i d_i^2.
    Polynomial laplacian() const;
    /// Substitutes x_j = sum_i map(j, i) y_i; the result has map.cols() variables.
    Polynomial compose_linear(const Matrix<R>& map) const;
    /// Multiplies each monomial of total degree k by factor(k).
    template <class F>
    Polynomial rescale_by_degree(F factor) const {
        Polynomial out(nvars_);
        for (const auto& [m, c] : terms_) {
            int k = 0;
            for (int e : m) k += e;
            out.add_term(m, c * factor(k));
        }
        return out;
    }

    /// Total degrees in the first p and the remaining variables; throws NotHomogeneous if not bihomogeneous.
    std::pair<int, int> bidegree(int p) const;
    int total_degree() const;

    std::string str(const std::vector<std::string>& names = {}) const;

private:
    int nvars_ = 0;
    std::map<Monomial, R> terms_;
};

using HalfPowerPoly = Polynomial<HalfPower>;
using RealPoly = Polynomial<double>;
using CountVector = std::vector<int>;

/// H_n with integer coefficients, one variable.
HalfPowerPoly hermite(int n);

enum class KMMode { Q, P };
/// Q: (4 pi)^{-q/2} prod_j H_{q_j}(sqrt(2 pi) x_j); P: 2^{q/2} prod_j x_j^{q_j}; nvars >= count.size().
HalfPowerPoly km_poly(const CountVector& count, KMMode mode, int nvars = -1);

/// sum_m (-1)^m / (m! (8 pi y)^m) Delta^m P with formal y.
HalfPowerPoly exp_laplacian(const HalfPowerPoly& poly);
/// The y-free parts E_m = (-1)^m / (m! (8 pi)^m) Delta_metric^m P, so that exp(-Delta/8 pi y) P = sum_m y^{-m} E_m.
template <class R>
std::vector<Polynomial<R>> laplacian_series(const Polynomial<R>& poly, const Matrix<R>& metric);

/// Exact check of y^{-q/2} Q(sqrt(y) x) = exp(-Delta/8 pi y) P for the polynomials attached to count.
bool km_scaling_identity(const CountVector& count);

struct TwistResult {
    CountVector gamma;
    HalfPowerPoly q_poly;
    std::string label;
};
TwistResult twist_poly(const CountVector& alpha, const CountVector& beta);

/// Enumerates all count vectors of length p and sum total, lexicographically descending.
std::vector<CountVector> count_vectors(int p, int total);
std::string count_label(const CountVector& c);

RealPoly to_real(const HalfPowerPoly& poly, double y = 1.0);
double evaluate(const RealPoly& poly, const std::vector<double>& x);

long double binomial(int n, int k);

}  // namespace kmlift
