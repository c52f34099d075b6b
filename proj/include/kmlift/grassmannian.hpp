#pragma once

#include <random>
#include <vector>

#include "kmlift/lattice.hpp"
#include "kmlift/matrix.hpp"

namespace kmlift {

/// Orthonormal basis e_1..e_{p+q} of V (columns, lattice coordinates) with (e_j,e_j) = +1 for j <= p and -1 after.
/// With split data the basis satisfies u = (e_p + e_{p+q}) / sqrt 2.
template <class T>
struct BaseFrame {
    Matrix<T> basis;
    int p = 0;
    int q = 0;
    int sign(int j) const { return j < p ? 1 : -1; }
};

/// Builds the base frame; exact mode throws NotExactlyRepresentable when a norm has no square root in Q(sqrt 2).
template <class T>
BaseFrame<T> make_base_frame(const GramLattice& lattice, const SplitData* split);

/// Negative definite q-dimensional subspace z, given by basis columns in lattice coordinates.
struct GrassPoint {
    Matrix<double> neg_basis;
};

GrassPoint grass_point(const GramLattice& lattice, const Matrix<double>& neg_basis);
/// (v,v)_z = (v_{z perp}, v_{z perp}) - (v_z, v_z)
double majorant(const GramLattice& lattice, const GrassPoint& z, const std::vector<double>& v);
Matrix<double> majorant_matrix(const GramLattice& lattice, const GrassPoint& z);

/// Isometry of V in lattice coordinates.
template <class T>
struct Isometry {
    Matrix<T> matrix;
};

template <class T>
T isometry_defect(const GramLattice& lattice, const Isometry<T>& g);

/// One isometry g with g(z) = z0 (the span of the negative base vectors), det g = +1.
Isometry<double> isometry_to_base(const GramLattice& lattice, const BaseFrame<double>& base, const GrassPoint& z);

/// The frame f_j = g^{-1} e_j attached to an isometry g.
template <class T>
struct Frame {
    Matrix<T> gram;
    Matrix<T> vectors;  // columns f_j
    int p = 0;
    int q = 0;
    int sign(int j) const { return j < p ? 1 : -1; }

    /// x-coordinates of g(v): x_j = sign_j (v, f_j); rows of the returned matrix act on lattice coordinates.
    Matrix<T> coordinate_map() const;
    /// Gram matrix of the majorant attached to z = g^{-1} z0.
    Matrix<T> majorant_gram() const;
    GrassPoint grass_point() const;
};

template <class T>
Frame<T> make_frame(const GramLattice& lattice, const BaseFrame<T>& base, const Isometry<T>& g);

/// Geometry attached to (z, u, u') and the isometry g: the projections of u, the subspaces w and w perp,
/// the vector mu and the map g sharp, with K-coordinate versions of everything needed downstream.
template <class T>
struct SplitFrame {
    Frame<T> frame;
    std::vector<T> u;
    std::vector<T> u_z;
    std::vector<T> u_perp;
    T u_perp_norm;  // (u_{z perp}, u_{z perp}) > 0
    T u_z_norm;     // (u_z, u_z) < 0
    std::vector<T> mu;
    /// x-coordinates of g sharp(v) for v in lattice coordinates.
    Matrix<T> sharp;
    /// (g u, e_j) for all j.
    std::vector<T> gu_pairings;
    /// Columns: x-coordinates of g sharp(k_i) for the K basis.
    Matrix<T> k_images;
    /// Majorant Gram matrix of K with respect to w: k_images^T k_images.
    Matrix<T> k_majorant;
    /// (k_i, mu)
    std::vector<T> mu_pairings;
    int p = 0;
    int q = 0;

    T pairing(const std::vector<T>& a, const std::vector<T>& b) const { return bilinear(frame.gram, a, b); }
    /// v_{w perp} + v_w
    std::vector<T> sharp_preimage(const std::vector<T>& v) const;
    /// (v_{w perp}, v_{w perp})
    T w_perp_norm(const std::vector<T>& v) const;
    /// Same for a vector given in K-coordinates.
    T w_perp_norm_K(const std::vector<T>& s) const;
};

template <class T>
SplitFrame<T> make_split_frame(const SplitData& sd, const BaseFrame<T>& base, const Isometry<T>& g);

SplitFrame<double> split_frame(const SplitData& sd, const GrassPoint& z);

/// Eichler transformation E(v, lam)(x) = x - (x,v) lam + (x,lam) v - q(lam)(x,v) v for isotropic v and lam orthogonal to v.
Matrix<Rational> eichler_matrix(const GramLattice& lattice, const LatticeVector& v, const LatticeVector& lam);
/// E(u, lam) with lam given in K-coordinates.
Isometry<Rational> eichler(const SplitData& sd, const LatticeVector& lam_K);

/// One factor of an exactly rational isometry: E(u, lam) or E(u'', lam) with u'' = u' - q(u') u.
struct EichlerStep {
    bool along_u_double_prime = false;
    LatticeVector lam_K;
};
/// Product of the steps in order, with each lam taken orthogonal to both u and u''.
Isometry<Rational> eichler_word(const SplitData& sd, const std::vector<EichlerStep>& steps);
/// Random word of alternating steps with parameters a/b, |a| <= 3, 1 <= b <= 3.
Isometry<Rational> random_eichler_isometry(const SplitData& sd, std::mt19937_64& rng, int steps = 3);

template <class T>
Isometry<T> convert_isometry(const Isometry<Rational>& g);

/// Residuals of the five Eichler compatibility properties for g and g o E(u, lam).
struct EichlerReport {
    double fixes_u = 0;          // |E u - u|
    double maps_w = 0;           // E(w~) in w and E(w~ perp) in w perp
    double sharp_equal = 0;      // (g o E) sharp = g sharp
    double norm_preserved = 0;   // v_{w perp}^2 = v_{w~ perp}^2
    double phase_law = 0;        // distance of (l',mu~) - (l',mu) - (l',lam) to Z
    double max() const;
};

template <class T>
EichlerReport eichler_report(const SplitData& sd, const BaseFrame<T>& base, const Isometry<T>& g,
                             const LatticeVector& lam_K);

template <class T>
Isometry<T> compose(const Isometry<T>& a, const Isometry<T>& b) {
    return Isometry<T>{a.matrix * b.matrix};
}

}  // namespace kmlift
