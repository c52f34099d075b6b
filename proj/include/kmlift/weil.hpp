#pragma once

#include <array>
#include <complex>
#include <string>

#include <Eigen/Dense>

#include "kmlift/lattice.hpp"

namespace kmlift {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

/// e(x) = exp(2 pi i x)
Complex e_phase(double x);
Complex e_phase(const Rational& x);

/// Scalar in front of the S-matrix: e((q-p)/8) satisfies (ST)^3 = S^2; the conjugate choice e((p-q)/8) does not
/// unless p = q mod 4 and is kept for comparison.
enum class SPhase { Standard, Conjugate };

struct WeilRep {
    DiscriminantGroup disc;
    Signature signature;
    CMatrix rho_T;
    CMatrix rho_S;
};

WeilRep weil_generators(const GramLattice& lattice, SPhase phase = SPhase::Standard);

/// Letters S, T and their inverses s = S^-1, t = T^-1.
struct GeneratorWord {
    std::string letters;
};

/// Accepts S, T, s, t and the spellings S^-1, T^-1, S', T'; throws ParseError otherwise.
GeneratorWord parse_word(const std::string& text);
GeneratorWord inverse_word(const GeneratorWord& w);

CMatrix weil_matrix(const WeilRep& rep, const GeneratorWord& w);
CVector weil_apply(const WeilRep& rep, const GeneratorWord& w, const CVector& v);

/// Image of the word in SL2(Z) as {a, b, c, d}.
using SL2 = std::array<Int, 4>;
SL2 word_matrix(const GeneratorWord& w);
Complex mobius(const SL2& m, Complex tau);

/// The holomorphic square root of c tau + d carried by the metaplectic element of the word, evaluated at tau.
Complex word_sqrt_factor(const GeneratorWord& w, Complex tau);
/// +1 or -1: the ratio of word_sqrt_factor to the principal root of c tau + d (constant on the upper half-plane).
int metaplectic_sign(const GeneratorWord& w);

/// A word whose SL2(Z) matrix has bottom row exactly (c, d); throws WordDecompositionFailure if gcd(c, d) != 1
/// or the word would exceed max_length letters.
GeneratorWord word_for_bottom_row(Int c, Int d, std::size_t max_length = 256);

}  // namespace kmlift
