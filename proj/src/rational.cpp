#include "kmlift/rational.hpp"

#include <cmath>

#include "kmlift/errors.hpp"

namespace kmlift {

const char* error_name(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::NotEven: return "NotEven";
        case ErrorKind::Degenerate: return "Degenerate";
        case ErrorKind::NotSymmetric: return "NotSymmetric";
        case ErrorKind::NotIsotropic: return "NotIsotropic";
        case ErrorKind::NotPrimitive: return "NotPrimitive";
        case ErrorKind::BadPairing: return "BadPairing";
        case ErrorKind::NotPositiveDefinite: return "NotPositiveDefinite";
        case ErrorKind::NotNegativeDefinite: return "NotNegativeDefinite";
        case ErrorKind::DimensionMismatch: return "DimensionMismatch";
        case ErrorKind::NotHomogeneous: return "NotHomogeneous";
        case ErrorKind::DegreeMismatch: return "DegreeMismatch";
        case ErrorKind::DegenerateFrame: return "DegenerateFrame";
        case ErrorKind::NotOrthogonalToU: return "NotOrthogonalToU";
        case ErrorKind::NotExactlyRepresentable: return "NotExactlyRepresentable";
        case ErrorKind::NonconvergentRequest: return "NonconvergentRequest";
        case ErrorKind::WordDecompositionFailure: return "WordDecompositionFailure";
        case ErrorKind::IndexMismatch: return "IndexMismatch";
        case ErrorKind::ModeMismatch: return "ModeMismatch";
        case ErrorKind::NegativeNorm: return "NegativeNorm";
        case ErrorKind::DivergentIntegral: return "DivergentIntegral";
        case ErrorKind::BadSignature: return "BadSignature";
        case ErrorKind::InconsistentTables: return "InconsistentTables";
        case ErrorKind::WeightMismatch: return "WeightMismatch";
        case ErrorKind::ParseError: return "ParseError";
    }
    return "Unknown";
}

Rational parse_rational(std::string_view text) {
    std::string s(text);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.erase(s.begin());
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
    if (s.empty()) throw Error(ErrorKind::ParseError, "empty rational");
    if (s.front() == '+') s.erase(s.begin());
    Rational r;
    if (r.set_str(s, 10) != 0) throw Error(ErrorKind::ParseError, "bad rational '" + s + "'");
    if (r.get_den() == 0) throw Error(ErrorKind::ParseError, "zero denominator in '" + s + "'");
    r.canonicalize();
    return r;
}

std::string to_string(const Rational& r) { return r.get_str(); }

bool is_integer(const Rational& r) { return r.get_den() == 1; }

Rational floor_rational(const Rational& r) {
    mpz_class q;
    mpz_fdiv_q(q.get_mpz_t(), r.get_num().get_mpz_t(), r.get_den().get_mpz_t());
    return Rational(q);
}

Rational frac(const Rational& r) { return r - floor_rational(r); }

std::optional<Rational> rational_sqrt(const Rational& r) {
    if (r < 0) return std::nullopt;
    const mpz_class& num = r.get_num();
    const mpz_class& den = r.get_den();
    if (!mpz_perfect_square_p(num.get_mpz_t()) || !mpz_perfect_square_p(den.get_mpz_t())) return std::nullopt;
    mpz_class sn, sd;
    mpz_sqrt(sn.get_mpz_t(), num.get_mpz_t());
    mpz_sqrt(sd.get_mpz_t(), den.get_mpz_t());
    Rational out(sn, sd);
    out.canonicalize();
    return out;
}

int QSqrt2::sign() const {
    const int sa = sgn(a_);
    const int sb = sgn(b_);
    if (sb == 0) return sa;
    if (sa == 0) return sb;
    if (sa == sb) return sa;
    // Opposite signs: compare a^2 with 2 b^2.
    const Rational diff = a_ * a_ - 2 * b_ * b_;
    const int sd = sgn(diff);
    return sd == 0 ? 0 : (sd > 0 ? sa : sb);
}

double QSqrt2::to_double() const { return a_.get_d() + b_.get_d() * std::sqrt(2.0); }

QSqrt2 QSqrt2::inverse() const {
    const Rational n = norm();
    if (n == 0) throw Error(ErrorKind::Degenerate, "division by zero in Q(sqrt 2)");
    return QSqrt2(Rational(a_ / n), Rational(-b_ / n));
}

QSqrt2& QSqrt2::operator+=(const QSqrt2& o) {
    a_ += o.a_;
    b_ += o.b_;
    return *this;
}

QSqrt2& QSqrt2::operator-=(const QSqrt2& o) {
    a_ -= o.a_;
    b_ -= o.b_;
    return *this;
}

QSqrt2& QSqrt2::operator*=(const QSqrt2& o) {
    Rational a = a_ * o.a_ + 2 * b_ * o.b_;
    Rational b = a_ * o.b_ + b_ * o.a_;
    a_ = std::move(a);
    b_ = std::move(b);
    return *this;
}

QSqrt2& QSqrt2::operator/=(const QSqrt2& o) { return *this *= o.inverse(); }

std::string QSqrt2::str() const {
    if (b_ == 0) return a_.get_str();
    if (a_ == 0) return b_.get_str() + "*sqrt2";
    return a_.get_str() + (b_ > 0 ? "+" : "") + b_.get_str() + "*sqrt2";
}

double FieldTraits<double>::sqrt(double v) {
    if (v < 0) throw Error(ErrorKind::Degenerate, "square root of a negative number");
    return std::sqrt(v);
}

QSqrt2 FieldTraits<QSqrt2>::sqrt(const QSqrt2& v) {
    if (v.sqrt2_part() != 0) throw Error(ErrorKind::NotExactlyRepresentable, "square root of " + v.str());
    const Rational& r = v.rational_part();
    if (auto s = rational_sqrt(r)) return QSqrt2(*s);
    // r = 2 s^2  =>  sqrt(r) = s sqrt 2
    if (auto s = rational_sqrt(Rational(r / 2))) return QSqrt2(Rational(0), *s);
    throw Error(ErrorKind::NotExactlyRepresentable, "square root of " + r.get_str() + " is not in Q(sqrt 2)");
}

}  // namespace kmlift
