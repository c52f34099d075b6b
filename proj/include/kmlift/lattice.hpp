#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "kmlift/matrix.hpp"
#include "kmlift/rational.hpp"

namespace kmlift {

using Int = std::int64_t;
using IntMatrix = std::vector<std::vector<Int>>;
using LatticeVector = RationalVector;

struct Signature {
    int p = 0;
    int q = 0;
    bool operator==(const Signature&) const = default;
};

/// Even lattice given by its integer Gram matrix in a fixed basis.
class GramLattice {
public:
    GramLattice() = default;

    const IntMatrix& gram() const { return gram_; }
    int rank() const { return static_cast<int>(gram_.size()); }
    Signature signature() const { return signature_; }
    Int determinant() const { return det_; }

    Matrix<Rational> gram_rational() const;
    Matrix<double> gram_double() const;

    Rational pairing(const LatticeVector& a, const LatticeVector& b) const;
    Rational norm(const LatticeVector& v) const { return pairing(v, v); }
    /// q(v) = (v,v)/2
    Rational quadratic(const LatticeVector& v) const;
    /// G v: the functional (., v) in the dual basis.
    LatticeVector dual_coords(const LatticeVector& v) const;

    friend GramLattice build_lattice(const IntMatrix& gram);
    friend GramLattice build_lattice_unchecked_rank0();

private:
    IntMatrix gram_;
    Signature signature_;
    Int det_ = 1;
};

/// Validates symmetry, evenness and nondegeneracy; computes the signature exactly.
GramLattice build_lattice(const IntMatrix& gram);
/// The zero lattice (rank 0), used for complements of hyperbolic planes.
GramLattice build_lattice_unchecked_rank0();

Signature sylvester_signature(const Matrix<Rational>& symmetric);

/// Smith normal form U A V = D of an integer matrix.
struct SmithForm {
    IntMatrix u;
    IntMatrix v;
    IntMatrix v_inverse;
    std::vector<Int> diagonal;
};
SmithForm smith_normal_form(const IntMatrix& a);

/// The finite quadratic module L'/L.
class DiscriminantGroup {
public:
    explicit DiscriminantGroup(const GramLattice& lattice);

    const std::vector<Int>& elementary_divisors() const { return divisors_; }
    const std::vector<LatticeVector>& generators() const { return generators_; }
    std::size_t order() const { return order_; }

    /// Mixed-radix digits of a coset (one digit per elementary divisor).
    std::vector<Int> key(std::size_t index) const;
    std::size_t index_of_key(const std::vector<Int>& key) const;
    /// Index of the coset of a dual vector; throws if the vector is not in L'.
    std::size_t index_of(const LatticeVector& dual_vector) const;
    /// Canonical representative sum_i a_i g_i with 0 <= a_i < d_i.
    LatticeVector representative(std::size_t index) const;

    Rational q_mod1(std::size_t index) const;
    Rational b_mod1(std::size_t i, std::size_t j) const;
    std::size_t add(std::size_t i, std::size_t j) const;
    std::size_t negate(std::size_t i) const;

    bool contains_dual(const LatticeVector& v) const;
    const GramLattice& lattice() const { return lattice_; }

private:
    GramLattice lattice_;
    std::vector<Int> divisors_;
    std::vector<LatticeVector> generators_;
    // rows of D V^{-1} for the nontrivial divisors
    std::vector<std::vector<Int>> key_rows_;
    std::size_t order_ = 1;
    std::vector<LatticeVector> reps_;
    std::vector<Rational> q_cache_;
};

/// Data attached to a primitive isotropic u and u' in L' with (u,u') = 1.
struct SplitData {
    GramLattice lattice;
    LatticeVector u;
    LatticeVector u_prime;
    Int N = 1;
    /// Representatives k_i in L n u^perp of a basis of K = (L n u^perp)/Zu.
    std::vector<LatticeVector> k_basis;
    GramLattice K;
    /// zeta in L with (zeta, u) = N.
    LatticeVector zeta;
    /// Cosets of L'/L with (lambda,u) = 0 mod N and their images in K'/K.
    std::vector<std::size_t> L0_cosets;
    std::map<std::size_t, std::size_t> projection;

    /// K-coordinates of the image of a vector of L0' under p.
    LatticeVector project(const LatticeVector& v) const;
    /// K-coordinates of a vector orthogonal to u, modulo Q u.
    LatticeVector to_K_coords(const LatticeVector& v) const;
    /// Representative in V of a vector with K-coordinates s (sum_i s_i k_i).
    LatticeVector from_K_coords(const LatticeVector& s) const;
    /// Vector of V orthogonal to u and to u'' = u' - q(u') u with the same class modulo u as from_K_coords(s).
    LatticeVector complement_vector(const LatticeVector& s) const;
    LatticeVector u_double_prime() const;

    // left inverse of [u | k_1 .. k_{n-2}]
    Matrix<Rational> left_inverse;
};

SplitData split_data(const GramLattice& lattice, const LatticeVector& u, const std::optional<LatticeVector>& u_prime);

/// Integer vectors x with (x + shift)^T Q (x + shift) <= bound, in lexicographic order.
std::vector<std::vector<Int>> short_vectors(const Matrix<double>& majorant, const std::vector<double>& shift, double bound);
/// Naive box scan, used as an oracle for short_vectors.
std::vector<std::vector<Int>> short_vectors_box(const Matrix<double>& majorant, const std::vector<double>& shift, double bound);

/// All lambda in L + coset with (lambda,lambda)_z <= R^2, in lexicographic order.
std::vector<LatticeVector> enumerate_coset(const GramLattice& lattice, const LatticeVector& coset,
                                           const Matrix<double>& majorant, double radius);

/// Lower Cholesky factor; throws NotPositiveDefinite.
Matrix<double> cholesky(const Matrix<double>& a);

Int gcd_vector(const std::vector<Int>& v);
LatticeVector to_rational(const std::vector<Int>& v);

}  // namespace kmlift
