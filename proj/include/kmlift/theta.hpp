#pragma once

#include <map>
#include <optional>
#include <vector>

#include "kmlift/decompose.hpp"
#include "kmlift/grassmannian.hpp"
#include "kmlift/weil.hpp"

namespace kmlift {

/// A lattice together with the linear data a theta series needs: x-coordinates (the first p rows span the
/// positive part), the polynomial variables as functions of lattice coordinates, and the Laplacian metric in
/// those variables.
struct ThetaGeometry {
    GramLattice lattice;
    Matrix<double> xmap;
    int positive_rows = 0;
    Matrix<double> poly_map;
    Matrix<double> laplacian_metric;
    // derived by finish_geometry
    Matrix<double> majorant;
    Matrix<double> gram;
    double min_length = 0;       // shortest nonzero majorant length of the lattice
    double poly_map_norm = 0;    // |poly_map v| <= poly_map_norm * |v|_z
};
void finish_geometry(ThetaGeometry& geom);

/// L with the frame of g: polynomial variables are the x-coordinates, Laplacian is the standard one.
ThetaGeometry lattice_geometry(const GramLattice& lattice, const Frame<double>& frame);
/// K with g sharp: polynomial variables are K-coordinates, Laplacian is the one of g sharp(V).
ThetaGeometry sublattice_geometry(const SplitData& sd, const SplitFrame<double>& frame);

/// exp(-Delta / 8 pi y) P stored as P = sum_m y^{-m} E_m, with coefficient data for growth bounds.
struct ThetaPoly {
    std::vector<RealPoly> series;
    int m_plus = 0;
    int m_minus = 0;
    bool zero = false;
};
/// Homogeneous of degree (m+, m-) in the positive/negative x-coordinates; the caller supplies both degrees since
/// polynomials in K-coordinates do not expose the split.
ThetaPoly theta_poly(const RealPoly& poly, const ThetaGeometry& geom, int m_plus, int m_minus);
ThetaPoly theta_poly(const HalfPowerPoly& poly, const ThetaGeometry& geom, int m_plus, int m_minus);

struct ThetaValue {
    std::vector<Complex> components;  // indexed by the discriminant group
    double tail_bound = 0;            // bound on every component's truncation error
    std::size_t terms = 0;
    double abs_sum = 0;               // largest sum of absolute values of the terms of one component
};

struct ThetaOptions {
    double radius = 0;       // majorant cutoff; 0 selects the smallest radius whose tail bound meets the target
    double tail_target = 1e-12;
};

/// y^{q/2+m-} sum_{lambda in L+gamma} exp(-Delta/8 pi y)P(lambda+nu) e(tau q((lambda+nu)_{z perp}) +
/// conj(tau) q((lambda+nu)_z) - (lambda+nu/2, delta)); delta and nu are in lattice coordinates.
ThetaValue siegel_theta(const ThetaGeometry& geom, const DiscriminantGroup& disc, Complex tau,
                        const std::vector<double>& delta, const std::vector<double>& nu, const ThetaPoly& poly,
                        const ThetaOptions& options);

/// Box enumeration of the same series with the polynomial expanded by the formal-y exp-Laplacian; an
/// independent path used as an oracle for siegel_theta.
std::vector<Complex> theta_box_sum(const GramLattice& lattice, const Frame<double>& frame, Complex tau,
                                   const std::vector<double>& delta, const std::vector<double>& nu,
                                   const HalfPowerPoly& poly, int m_minus);

/// Certified bound on the terms of a coset sum outside the given radius.
double theta_tail_bound(const ThetaGeometry& geom, const ThetaPoly& poly, double y, double radius);
/// Smallest radius (on a geometric grid) whose tail bound is at most target.
double radius_for_target(const ThetaGeometry& geom, const ThetaPoly& poly, double y, double target);

/// max over cosets of y^{q/2+m-} sum_lambda sum_m y^{-m} |E_m(lambda)| exp(-pi y (lambda,lambda)_z), tail included.
/// For y' >= y the components at any tau' with Im tau' = y' are bounded by (y'/y)^{q/2+m-} times this value.
double theta_envelope(const ThetaGeometry& geom, const DiscriminantGroup& disc, double y, const ThetaPoly& poly,
                      double tail_target);

/// Theta_L(tau, g, P_alpha) for every count vector alpha with |alpha| = q.
std::map<CountVector, ThetaValue> km_theta_components(const GramLattice& lattice, const DiscriminantGroup& disc,
                                                      const Frame<double>& frame, Complex tau,
                                                      const ThetaOptions& options);

enum class Generator { S, T };
/// sup norm of Theta(gamma tau) - (c tau + d)^{(p-q)/2 + m+ - m-} rho(gamma) Theta(tau) for gamma = S or T.
struct ModularityResult {
    double defect = 0;
    double tail_bound = 0;  // sum of the tail bounds of both sides
};
ModularityResult modularity_defect(const ThetaGeometry& geom, const WeilRep& rep, const ThetaPoly& poly,
                                   Generator generator, Complex tau, double tail_target);

/// Which coprime pairs (c, d) enumerate the cosets in the Poincare-type sum.
enum class CosetRange { AllSigns, NonnegativeC };

struct SplitThetaOptions {
    Int coset_cutoff = 5;
    double tail_target = 1e-10;
    CosetRange cosets = CosetRange::AllSigns;
};

struct SplitThetaSides {
    ThetaValue lhs;
    ThetaValue rhs;
    std::size_t cosets_used = 0;
    Int max_r = 0;
    /// Gaussian weight exp(-pi (C+1)^2 y / (2 |u_perp|^2)) of the first coset row past the cutoff.
    double cutoff_weight = 0;
    double difference() const;
};

/// Both sides of the splitting of Theta_L(tau, g, P_alpha) along u: the direct lattice sum and the sum over
/// Gamma_infinity cosets of K-theta functions weighted by the u-decomposition of P_alpha.
SplitThetaSides split_theta_sides(const SplitData& sd, const SplitFrame<double>& frame, Complex tau,
                                  const CountVector& alpha, const SplitThetaOptions& options);

/// The map C[K'/K] -> C[L'/L], g -> sum over lambda in L0'/L of e(-r (lambda, u')) g_{p(lambda)} e_lambda.
CVector lift_from_K(const SplitData& sd, const DiscriminantGroup& disc_L, const CVector& g, Int r);

/// Vector-valued cusp form data: Fourier coefficients c(gamma, n) with n in q(gamma) + Z, n > 0.
struct CuspFormData {
    Rational weight;
    std::map<std::pair<std::size_t, Rational>, Complex> coeffs;
    Rational n_max;

    /// f(tau) as a vector over the discriminant group of the given order.
    CVector evaluate(Complex tau, std::size_t order) const;
    /// Validates cuspidality and n = q(gamma) mod 1; throws IndexMismatch.
    void validate(const DiscriminantGroup& disc) const;
    CuspFormData scaled(Complex factor) const;
};

/// Coefficients of F_K(tau; r, t) = sum_gamma f_gamma(tau; r, t) e_gamma over K'/K.
CuspFormData f_to_FK(const CuspFormData& f, const SplitData& sd, const DiscriminantGroup& disc_L, Int r, Int t);

/// Both sides of <f, lift_from_K(g, r)> = <F_K(-r, 0), g> for a vector g over K'/K, at tau.
std::pair<Complex, Complex> pairing_identity_sides(const CuspFormData& f, const SplitData& sd,
                                                   const DiscriminantGroup& disc_L, const CVector& g, Int r,
                                                   Complex tau);

/// Antilinear in the second argument.
Complex hermitian_pairing(const CVector& a, const CVector& b);

}  // namespace kmlift
