#pragma once

#include <gmpxx.h>

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace kmlift {

using Rational = mpq_class;
using RationalVector = std::vector<Rational>;

/// Parses "a", "-a" or "a/b" into a canonical rational.
Rational parse_rational(std::string_view text);
std::string to_string(const Rational& r);

inline double to_double(const Rational& r) { return r.get_d(); }

bool is_integer(const Rational& r);
Rational floor_rational(const Rational& r);
/// Representative of r modulo 1 in [0,1).
Rational frac(const Rational& r);

/// Returns s with s*s == r if r is a rational square.
std::optional<Rational> rational_sqrt(const Rational& r);

/// Exact element a + b*sqrt(2) of the field Q(sqrt 2).
class QSqrt2 {
public:
    QSqrt2() = default;
    QSqrt2(long v) : a_(v) {}
    QSqrt2(int v) : a_(v) {}
    QSqrt2(Rational a) : a_(std::move(a)) {}
    QSqrt2(Rational a, Rational b) : a_(std::move(a)), b_(std::move(b)) {}

    static QSqrt2 sqrt2() { return QSqrt2(Rational(0), Rational(1)); }

    const Rational& rational_part() const { return a_; }
    const Rational& sqrt2_part() const { return b_; }

    bool is_zero() const { return a_ == 0 && b_ == 0; }
    /// Exact sign: -1, 0 or +1.
    int sign() const;
    double to_double() const;

    QSqrt2 conjugate() const { return QSqrt2(a_, -b_); }
    /// Field norm a^2 - 2 b^2.
    Rational norm() const { return a_ * a_ - 2 * b_ * b_; }
    QSqrt2 inverse() const;

    QSqrt2& operator+=(const QSqrt2& o);
    QSqrt2& operator-=(const QSqrt2& o);
    QSqrt2& operator*=(const QSqrt2& o);
    QSqrt2& operator/=(const QSqrt2& o);

    friend QSqrt2 operator+(QSqrt2 x, const QSqrt2& y) { return x += y; }
    friend QSqrt2 operator-(QSqrt2 x, const QSqrt2& y) { return x -= y; }
    friend QSqrt2 operator*(QSqrt2 x, const QSqrt2& y) { return x *= y; }
    friend QSqrt2 operator/(QSqrt2 x, const QSqrt2& y) { return x /= y; }
    friend QSqrt2 operator-(const QSqrt2& x) { return QSqrt2(-x.a_, -x.b_); }
    friend bool operator==(const QSqrt2& x, const QSqrt2& y) { return x.a_ == y.a_ && x.b_ == y.b_; }
    friend bool operator!=(const QSqrt2& x, const QSqrt2& y) { return !(x == y); }
    friend bool operator<(const QSqrt2& x, const QSqrt2& y) { return (x - y).sign() < 0; }

    std::string str() const;

private:
    Rational a_{0};
    Rational b_{0};
};

/// Field operations shared by the exact and floating-point code paths.
template <class T>
struct FieldTraits;

template <>
struct FieldTraits<double> {
    static constexpr bool exact = false;
    static double zero() { return 0.0; }
    static double one() { return 1.0; }
    static double from_rational(const Rational& r) { return r.get_d(); }
    static double to_double(double v) { return v; }
    static bool is_zero(double v) { return v == 0.0; }
    static int sign(double v) { return (v > 0) - (v < 0); }
    static double abs(double v) { return v < 0 ? -v : v; }
    static double sqrt(double v);
    static double sqrt2() { return 1.4142135623730951; }
};

template <>
struct FieldTraits<QSqrt2> {
    static constexpr bool exact = true;
    static QSqrt2 zero() { return QSqrt2(); }
    static QSqrt2 one() { return QSqrt2(1); }
    static QSqrt2 from_rational(const Rational& r) { return QSqrt2(r); }
    static double to_double(const QSqrt2& v) { return v.to_double(); }
    static bool is_zero(const QSqrt2& v) { return v.is_zero(); }
    static int sign(const QSqrt2& v) { return v.sign(); }
    static QSqrt2 abs(const QSqrt2& v) { return v.sign() < 0 ? -v : v; }
    /// Square roots of elements r or 2r with r a rational square; throws NotExactlyRepresentable otherwise.
    static QSqrt2 sqrt(const QSqrt2& v);
    static QSqrt2 sqrt2() { return QSqrt2::sqrt2(); }
};

template <>
struct FieldTraits<Rational> {
    static constexpr bool exact = true;
    static Rational zero() { return Rational(0); }
    static Rational one() { return Rational(1); }
    static Rational from_rational(const Rational& r) { return r; }
    static double to_double(const Rational& v) { return v.get_d(); }
    static bool is_zero(const Rational& v) { return v == 0; }
    static int sign(const Rational& v) { return sgn(v); }
    static Rational abs(const Rational& v) { return v < 0 ? Rational(-v) : v; }
};

}  // namespace kmlift
