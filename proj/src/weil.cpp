#include "kmlift/weil.hpp"

#include <cmath>
#include <numbers>
#include <numeric>

#include "kmlift/errors.hpp"

namespace kmlift {

Complex e_phase(double x) {
    const double r = x - std::floor(x);
    return std::polar(1.0, 2 * std::numbers::pi * r);
}

Complex e_phase(const Rational& x) { return e_phase(frac(x).get_d()); }

WeilRep weil_generators(const GramLattice& lattice, SPhase phase) {
    WeilRep rep{DiscriminantGroup(lattice), lattice.signature(), {}, {}};
    const auto n = static_cast<Eigen::Index>(rep.disc.order());
    rep.rho_T = CMatrix::Zero(n, n);
    rep.rho_S = CMatrix::Zero(n, n);
    const int p = rep.signature.p, q = rep.signature.q;
    const Rational eighth = phase == SPhase::Standard ? Rational(q - p, 8) : Rational(p - q, 8);
    const Complex scale = e_phase(eighth) / std::sqrt(static_cast<double>(n));
    for (Eigen::Index g = 0; g < n; ++g) {
        rep.rho_T(g, g) = e_phase(rep.disc.q_mod1(g));
        for (Eigen::Index d = 0; d < n; ++d) rep.rho_S(d, g) = scale * e_phase(-rep.disc.b_mod1(g, d));
    }
    return rep;
}

GeneratorWord parse_word(const std::string& text) {
    GeneratorWord w;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (c == ' ' || c == '*' || c == ',') continue;
        if (c != 'S' && c != 'T' && c != 's' && c != 't')
            throw Error(ErrorKind::ParseError, "unknown letter in word: " + text);
        char letter = c;
        if ((c == 'S' || c == 'T')) {
            if (text.compare(i + 1, 3, "^-1") == 0) {
                letter = static_cast<char>(c + ('s' - 'S'));
                i += 3;
            } else if (i + 1 < text.size() && text[i + 1] == '\'') {
                letter = static_cast<char>(c + ('s' - 'S'));
                i += 1;
            }
        }
        w.letters.push_back(letter);
    }
    return w;
}

namespace {

char invert_letter(char c) {
    switch (c) {
        case 'S': return 's';
        case 's': return 'S';
        case 'T': return 't';
        default: return 'T';
    }
}

SL2 letter_matrix(char c) {
    switch (c) {
        case 'S': return {0, -1, 1, 0};
        case 's': return {0, 1, -1, 0};
        case 'T': return {1, 1, 0, 1};
        default: return {1, -1, 0, 1};
    }
}

SL2 multiply(const SL2& x, const SL2& y) {
    return {x[0] * y[0] + x[1] * y[2], x[0] * y[1] + x[1] * y[3], x[2] * y[0] + x[3] * y[2],
            x[2] * y[1] + x[3] * y[3]};
}

}  // namespace

GeneratorWord inverse_word(const GeneratorWord& w) {
    GeneratorWord out;
    for (auto it = w.letters.rbegin(); it != w.letters.rend(); ++it) out.letters.push_back(invert_letter(*it));
    return out;
}

CMatrix weil_matrix(const WeilRep& rep, const GeneratorWord& w) {
    const auto n = rep.rho_T.rows();
    CMatrix m = CMatrix::Identity(n, n);
    for (char c : w.letters) {
        switch (c) {
            case 'S': m = m * rep.rho_S; break;
            case 's': m = m * rep.rho_S.adjoint(); break;
            case 'T': m = m * rep.rho_T; break;
            default: m = m * rep.rho_T.adjoint(); break;
        }
    }
    return m;
}

CVector weil_apply(const WeilRep& rep, const GeneratorWord& w, const CVector& v) {
    if (v.size() != rep.rho_T.rows()) throw Error(ErrorKind::DimensionMismatch, "vector size differs from |L'/L|");
    CVector out = v;
    for (auto it = w.letters.rbegin(); it != w.letters.rend(); ++it) {
        switch (*it) {
            case 'S': out = rep.rho_S * out; break;
            case 's': out = rep.rho_S.adjoint() * out; break;
            case 'T': out = rep.rho_T * out; break;
            default: out = rep.rho_T.adjoint() * out; break;
        }
    }
    return out;
}

SL2 word_matrix(const GeneratorWord& w) {
    SL2 m{1, 0, 0, 1};
    for (char c : w.letters) m = multiply(m, letter_matrix(c));
    return m;
}

Complex mobius(const SL2& m, Complex tau) {
    return (static_cast<double>(m[0]) * tau + static_cast<double>(m[1])) /
           (static_cast<double>(m[2]) * tau + static_cast<double>(m[3]));
}

Complex word_sqrt_factor(const GeneratorWord& w, Complex tau) {
    // (A, f)(B, g) = (AB, f(B tau) g(tau)); fold from the right
    Complex root = 1.0;
    for (auto it = w.letters.rbegin(); it != w.letters.rend(); ++it) {
        if (*it == 'S') root *= std::sqrt(tau);
        else if (*it == 's') root /= std::sqrt(-1.0 / tau);
        tau = mobius(letter_matrix(*it), tau);
    }
    return root;
}

int metaplectic_sign(const GeneratorWord& w) {
    const Complex tau(0.0, 1.0);
    const SL2 m = word_matrix(w);
    const Complex principal = std::sqrt(static_cast<double>(m[2]) * tau + static_cast<double>(m[3]));
    return std::real(word_sqrt_factor(w, tau) / principal) > 0 ? 1 : -1;
}

GeneratorWord word_for_bottom_row(Int c, Int d, std::size_t max_length) {
    if (std::gcd(c, d) != 1) throw Error(ErrorKind::WordDecompositionFailure, "bottom row is not coprime");
    // right-multiply by T^n and S until the bottom row is (0, +-1); then the matrix is +-T^x
    GeneratorWord reducer;
    Int r0 = c, r1 = d;
    while (r0 != 0) {
        const Int n = -(r1 - ((r1 % r0) + std::abs(r0)) % std::abs(r0)) / r0;
        // bottom row after T^n: (r0, r1 + n r0) with 0 <= r1 + n r0 < |r0|
        const char letter = n >= 0 ? 'T' : 't';
        for (Int k = 0; k < std::abs(n); ++k) reducer.letters.push_back(letter);
        r1 += n * r0;
        reducer.letters.push_back('S');
        const Int next0 = r1, next1 = -r0;
        r0 = next0;
        r1 = next1;
        if (reducer.letters.size() > max_length)
            throw Error(ErrorKind::WordDecompositionFailure, "word length bound exceeded");
    }
    GeneratorWord w = inverse_word(reducer);
    if (r1 == -1) w.letters = "SS" + w.letters;
    const SL2 m = word_matrix(w);
    if (m[2] != c || m[3] != d) throw Error(ErrorKind::WordDecompositionFailure, "bottom row check failed");
    if (w.letters.size() > max_length) throw Error(ErrorKind::WordDecompositionFailure, "word length bound exceeded");
    return w;
}

}  // namespace kmlift
