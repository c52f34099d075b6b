#include <doctest.h>

#include <cmath>

#include "kmlift/weil.hpp"
#include "support.hpp"

using namespace kmlift;
using namespace testsupport;

namespace {

double unitarity_defect(const CMatrix& m) {
    return (m * m.adjoint() - CMatrix::Identity(m.rows(), m.cols())).cwiseAbs().maxCoeff();
}

const std::vector<IntMatrix>& weil_corpus() {
    static const std::vector<IntMatrix> corpus = {
        kU,                                                     // |L'/L| = 1
        kA1,                                                    // 2
        {{0, 1, 0}, {1, 0, 0}, {0, 0, -2}},                     // 2, signature (1,2)
        kA1A1,                                                  // 4
        {{0, 2}, {2, 0}},                                       // U(2): 4
        {{2, 0, 0}, {0, 2, 0}, {0, 0, 2}},                      // 8
        {{2, 0, 0, 0}, {0, 2, 0, 0}, {0, 0, 0, 2}, {0, 0, 2, 0}},  // A1+A1+U(2): 16
        {{2, -1, 0, 0}, {-1, 2, 0, 0}, {0, 0, 2, 0}, {0, 0, 0, -2}},  // A2+A1+A1(-1): 12
        {{2, -1, 0, 0}, {-1, 2, 0, 0}, {0, 0, 0, 2}, {0, 0, 2, 0}},   // A2+U(2): 12
        {{-4, 0, 0}, {0, 0, 1}, {0, 1, 0}},                     // 4, cyclic
    };
    return corpus;
}

}  // namespace

TEST_CASE("Weil generators on small examples") {
    const WeilRep u = weil_generators(build_lattice(kU));
    CHECK(u.rho_T.rows() == 1);
    CHECK(std::abs(u.rho_T(0, 0) - 1.0) < 1e-15);
    CHECK(std::abs(u.rho_S(0, 0) - 1.0) < 1e-15);

    const WeilRep a1 = weil_generators(build_lattice(kA1));
    // hand-built: T = diag(1, i), S = e(-1/8)/sqrt2 [[1,1],[1,-1]]
    const Complex c = std::polar(1.0, -std::numbers::pi / 4) / std::sqrt(2.0);
    CMatrix s(2, 2), t(2, 2);
    s << c, c, c, -c;
    t << 1.0, 0.0, 0.0, Complex(0, 1);
    CHECK((a1.rho_S - s).cwiseAbs().maxCoeff() < 1e-15);
    CHECK((a1.rho_T - t).cwiseAbs().maxCoeff() < 1e-15);

    // S^4 = Z^2 acts by (-1)^(p+q): an odd lattice picks up a sign
    CVector e0 = CVector::Zero(2);
    e0(0) = 1.0;
    CHECK((weil_apply(a1, parse_word("SSSS"), e0) + e0).norm() < 1e-12);
    CHECK(metaplectic_sign(parse_word("SSSS")) == -1);
    CHECK((weil_apply(a1, parse_word(""), e0) - e0).norm() == 0.0);
}

TEST_CASE("Weil relations on the corpus") {
    for (const auto& g : weil_corpus()) {
        const GramLattice l = build_lattice(g);
        const WeilRep rep = weil_generators(l);
        CAPTURE(rep.disc.order());
        CHECK(unitarity_defect(rep.rho_S) < 1e-12);
        CHECK(unitarity_defect(rep.rho_T) < 1e-12);
        CHECK((rep.rho_S - rep.rho_S.transpose()).cwiseAbs().maxCoeff() < 1e-12);
        const CMatrix st3 = weil_matrix(rep, parse_word("STSTST"));
        const CMatrix s2 = weil_matrix(rep, parse_word("SS"));
        CHECK((st3 - s2).cwiseAbs().maxCoeff() < 1e-12);
        CHECK((s2 * rep.rho_T - rep.rho_T * s2).cwiseAbs().maxCoeff() < 1e-12);
        const int parity = (l.signature().p + l.signature().q) % 2 == 0 ? 1 : -1;
        const CMatrix s4 = weil_matrix(rep, parse_word("SSSS"));
        CHECK((s4 - static_cast<double>(parity) * CMatrix::Identity(s4.rows(), s4.cols())).cwiseAbs().maxCoeff() <
              1e-12);
        CHECK((weil_matrix(rep, parse_word("Ss")) - CMatrix::Identity(s4.rows(), s4.cols())).cwiseAbs().maxCoeff() <
              1e-12);
    }
}

TEST_CASE("the conjugate S-phase breaks the braid relation when p - q is not 0 mod 4") {
    const WeilRep rep = weil_generators(build_lattice(kA1), SPhase::Conjugate);
    const CMatrix st3 = weil_matrix(rep, parse_word("STSTST"));
    const CMatrix s2 = weil_matrix(rep, parse_word("SS"));
    CHECK((st3 - s2).cwiseAbs().maxCoeff() > 0.1);
}

TEST_CASE("words") {
    CHECK(parse_word("S T^-1 S'").letters == "Sts");
    CHECK_THROWS_AS(parse_word("SX"), Error);
    CHECK(word_matrix(parse_word("STSTST")) == SL2{-1, 0, 0, -1});
    CHECK(word_matrix(parse_word("")) == SL2{1, 0, 0, 1});
    CHECK(metaplectic_sign(parse_word("S")) == 1);
    CHECK(metaplectic_sign(parse_word("SS")) == 1);
    for (Int c = -7; c <= 7; ++c)
        for (Int d = -7; d <= 7; ++d) {
            if (std::gcd(c, d) != 1) {
                CHECK_THROWS_AS(word_for_bottom_row(c, d), Error);
                continue;
            }
            const auto w = word_for_bottom_row(c, d);
            const SL2 m = word_matrix(w);
            CHECK(m[2] == c);
            CHECK(m[3] == d);
            CHECK(m[0] * m[3] - m[1] * m[2] == 1);
            // the metaplectic root squares to c tau + d
            const Complex tau(0.3, 1.7);
            const Complex root = word_sqrt_factor(w, tau);
            CHECK(std::abs(root * root - (static_cast<double>(c) * tau + static_cast<double>(d))) < 1e-12);
        }
    CHECK_THROWS_AS(word_for_bottom_row(1000, 999, 5), Error);
}
