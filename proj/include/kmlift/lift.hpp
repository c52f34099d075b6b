#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "kmlift/theta.hpp"

namespace kmlift {

enum class YIntegralMethod { Quadrature, Bessel };
const char* method_name(YIntegralMethod method);
YIntegralMethod parse_method(const std::string& name);

/// int_0^inf y^s exp(-A y - B/y) dy.
/// Bessel: 2 (B/A)^{(s+1)/2} K_{s+1}(2 sqrt(AB)); Quadrature: trapezoid rule in t = log y.
/// Throws DivergentIntegral when the integral does not converge (A <= 0 with s >= -1, or B <= 0 with s <= -1).
double y_integral(double s, double A, double B, YIntegralMethod method, double tol = 1e-13);

struct LiftNumerics {
    double theta_tail = 1e-13;   // tail target for K- and L-theta sums
    double r_tail = 1e-16;       // the r-sum stops once exp(-pi r^2 / 2 y u^2) r^deg drops below this
    double y_tol = 1e-12;        // trapezoid convergence in t = log y
    int x_order = 20;            // Gauss-Legendre order per x panel
};

/// Everything a defining integral of the lift depends on: the cusp form (given by coefficients), the weight
/// count vector, the frame (z, u, u', g), and the twist degree ell.
struct LiftRequest {
    CuspFormData f;
    CountVector alpha;
    SplitData sd;
    SplitFrame<double> frame;
    int ell = 0;
    /// Set when f is a genuine modular form; checks that rely on modularity refuse to run otherwise.
    bool modular = false;
    LiftNumerics numerics;

    /// Weight (p+q)/2 + ell, |alpha| = q + ell, coefficient table indexed consistently; throws otherwise.
    void validate() const;
};

/// Coefficient table with c(gamma, n) = exp(-n) (a + bi), a, b uniform in [-1, 1], for every coset and
/// 0 < n <= n_max. Not modular; valid input for every check that runs on the strip or in formal mode.
CuspFormData synthetic_cusp_form(const GramLattice& lattice, const Rational& weight, int n_max, unsigned seed);

/// Poincare kernel h_alpha(tau, g), summed over h+ and r >= 1 with K-theta functions.
/// r_cutoff = 0 selects the cutoff from numerics.r_tail.
Complex h_alpha(const LiftRequest& req, Complex tau, Int r_cutoff = 0);
/// The same kernel with the K-theta series expanded lattice vector by lattice vector and f read directly
/// from its coefficient table; an independent evaluation path.
Complex h_alpha_termwise(const LiftRequest& req, Complex tau, Int r_cutoff = 0);

enum class SplitCheckMode { Formal, Modular };
struct SplitCheckReport {
    SplitCheckMode mode = SplitCheckMode::Formal;
    double pairing_residual = 0;    // <f, lift of g> against <F_K(-r,0), g>, random g, several r
    double splitting_residual = 0;  // direct Theta_L against its coset expansion
    double modular_residual = 0;    // y^k <f, Theta_L> - constant term - sum of h_alpha over cosets
    double max() const;
};
/// Formal mode runs the algebraic steps that hold for any coefficient table; modular mode needs req.modular and
/// throws ModeMismatch otherwise.
SplitCheckReport integrand_split_check(const LiftRequest& req, Complex tau, Int coset_cutoff, SplitCheckMode mode);

struct FourierPiece {
    Int t = 1;
    int h = 0;
    Complex value;
};

struct FourierResult {
    LatticeVector lam;               // K-coordinates
    Complex value;                   // c_lambda(g)
    Complex phase;                   // e((lambda, mu)); the lambda-term of the expansion is value * phase
    std::vector<FourierPiece> pieces;
    YIntegralMethod method = YIntegralMethod::Bessel;
    bool negative_norm = false;      // q(lambda) < 0: the coefficient vanishes by cuspidality
};

/// Coefficient of e((lambda, mu)) in the Fourier expansion of the defining integral, lambda a nonzero vector of K'.
FourierResult fourier_coefficient(const LiftRequest& req, const LatticeVector& lam, YIntegralMethod method);

struct StripCheck {
    Complex series_value;
    Complex quadrature_value;
    double residual = 0;
    double quadrature_error = 0;
};
/// Compares the lambda-term of the expansion with 2 * int over the strip of the lambda-part of h_alpha,
/// computed by x-quadrature on [0,1] and y-quadrature on (0, inf).
StripCheck strip_integral_check(const LiftRequest& req, const LatticeVector& lam, YIntegralMethod method);

struct DirectLiftOptions {
    double y_max = 6;
    int x_panels = 4;
    double y_tol = 1e-10;
};
struct DirectLiftResult {
    Complex value;
    double tail_bound = 0;       // bound on the part of the fundamental domain above y_max
    double error_estimate = 0;   // quadrature error estimate below y_max
};
/// y^k <f(tau), Theta_L(tau, g, P_alpha)>.
Complex direct_lift_integrand(const LiftRequest& req, Complex tau);
/// Integral of the integrand against dx dy / y^2 over the standard fundamental domain cut at y_max.
DirectLiftResult direct_lift_integral(const LiftRequest& req, const DirectLiftOptions& options);

/// The base-point-stabilizer isometry swapping e_{alpha1} with e_p and negating e_{p+1}, for which the
/// u-decomposition of P_{(q+ell) e_alpha1} reduces to the constant 2^{q+ell} in top degree.
struct GaugeReport {
    int alpha1 = 0;                    // 0-based, in [0, p-2]
    Isometry<QSqrt2> exact;
    Isometry<double> numeric;
    Decomposition<QSqrt2> parts;
    bool isometry = false;
    bool determinant_one = false;
    bool fixes_base_point = false;
    bool top_degree_only = false;      // parts = {(q+ell, 0): 2^{q+ell}} exactly
    bool ok() const { return isometry && determinant_one && fixes_base_point && top_degree_only; }
};
/// Throws BadSignature for p <= 1 or alpha1 outside [0, p-2].
GaugeReport gauge_isometry(const SplitData& sd, int alpha1, int ell = 0);
/// The split frame of the gauge isometry over the double base frame.
SplitFrame<double> gauge_frame(const SplitData& sd, int alpha1);

/// Fourier coefficients of the defining integrals at gauge frames, one per (alpha1, lambda).
struct GaugeTableEntry {
    int alpha1 = 0;
    LatticeVector lam;   // K-coordinates
    Complex value;
};
struct GaugeTables {
    int ell = 0;
    Rational norm_cutoff;
    std::vector<GaugeTableEntry> entries;
};
/// All lambda in K' with 0 < q(lambda) <= norm_cutoff and majorant norm at most radius^2 at the base frame.
std::vector<LatticeVector> positive_vectors(const SplitData& sd, const Rational& norm_cutoff, double radius);
/// Forward direction: tables computed with fourier_coefficient at every gauge frame.
GaugeTables gauge_tables(const CuspFormData& f, const SplitData& sd, const Rational& norm_cutoff, double radius,
                         YIntegralMethod method, int ell = 0);

struct EliminationResult {
    std::map<std::pair<std::size_t, Rational>, Complex> recovered;  // (coset of L'/L, n) -> c(f_coset, n)
    std::set<std::pair<std::size_t, Rational>> unresolved;          // n <= cutoff not represented by the tables
    double max_spread = 0;  // largest disagreement between two determinations of one coefficient
};
/// Recovers coefficients by induction on divisibility: lambda in order of increasing norm, known divisor
/// contributions subtracted, division by the positive gauge integral. Needs N = 1.
/// Throws InconsistentTables when two determinations differ by more than 1e-6 (relative, floored at 1).
EliminationResult eliminate_coefficients(const GaugeTables& tables, const SplitData& sd);

}  // namespace kmlift
