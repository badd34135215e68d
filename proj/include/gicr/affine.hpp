#pragma once

#include "gicr/curves.hpp"
#include "gicr/measure.hpp"
#include "gicr/noarb.hpp"
#include "gicr/numerics.hpp"

#include <Eigen/Dense>

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace gicr::affine {

/// Affine diffusion on R_+^m x R^n:
///   mu(x) = mu0 + sum_i x_i mu_i,   (1/2) sigma(x) sigma(x)^T = sigma0 + sum_i x_i sigma_i.
struct AffineParams {
    int m = 0;
    int n = 0;
    Eigen::VectorXd mu0;
    std::vector<Eigen::VectorXd> mu;     // d vectors
    Eigen::MatrixXd sigma0;
    std::vector<Eigen::MatrixXd> sigma;  // d matrices

    int dim() const { return m + n; }
    Eigen::VectorXd drift(const Eigen::VectorXd& x) const;
    /// (1/2) sigma(x) sigma(x)^T.
    Eigen::MatrixXd half_diffusion(const Eigen::VectorXd& x) const;
};

struct AdmissibilityReport {
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
};

/// Admissibility for the canonical state space: symmetric PSD diffusion
/// matrices, no constant diffusion on the R_+ block, sigma_i for i <= m
/// confined to row/column i and the R^n block, sigma_j = 0 for j > m, an
/// inward-pointing drift on the boundary of R_+^m and no dependence of the
/// R_+ drift on the R^n coordinates.
AdmissibilityReport validate_admissible(const AffineParams& p);

struct HazardAtom {
    double time;  // u_i
    double weight;
    double phi;
    Eigen::VectorXd psi;
};

/// Lambda_t = int (phi0 + psi0.X) ds + sum_{u_i <= t} (1 - exp(-phi_i - psi_i.X_{u_i})).
struct HazardSpec {
    std::function<double(double)> phi0 = [](double) { return 0.0; };
    std::function<Eigen::VectorXd(double)> psi0;
    std::vector<HazardAtom> atoms;
};

/// A(., T), B(., T) on a grid, right-continuous, with left limits at atoms.
class PiecewiseRiccatiSolution {
public:
    PiecewiseRiccatiSolution(double maturity, int dim, PiecewisePath path)
        : maturity_(maturity), dim_(dim), path_(std::move(path)) {}

    double maturity() const { return maturity_; }
    int dim() const { return dim_; }
    std::span<const double> times() const { return path_.times; }

    double A(double t) const { return path_.at(t)[0]; }
    Eigen::VectorXd B(double t) const { return path_.at(t).tail(dim_); }
    double A_left(double t) const { return path_.left_at(t)[0]; }
    Eigen::VectorXd B_left(double t) const { return path_.left_at(t).tail(dim_); }
    bool has_left_limit(std::size_t k) const { return path_.left_limits[k].has_value(); }

    /// Columns t, A, B_1..B_d, is_pre_atom_limit. At an atom the left limit
    /// row (flag 1) precedes the value row (flag 0).
    void write_csv(std::ostream& os) const;

private:
    double maturity_;
    int dim_;
    PiecewisePath path_;
};

/// Backward RK4 for the Riccati system with algebraic jumps
/// A(u_i-) = A(u_i) + phi_i w_i, B(u_i-) = B(u_i) + psi_i w_i at atoms in (0, T].
/// The grid must contain T and every atom up to T; it is truncated at T.
PiecewiseRiccatiSolution solve_riccati(const AffineParams& p, const HazardSpec& h,
                                       const RiskyMeasure& measure, double T, const Grid& grid);

/// One-factor CIR example: dX = (mu0 + mu1 X) dt + sigma sqrt(X) dW, intensity
/// X (psi0 = 1, phi0 = 0) and a single atom at u1 with w = 1, phi1 = 0, psi1.
struct CirParams {
    double mu0 = 0.1;
    double mu1 = -0.5;
    double sigma = 0.3;
    double psi1 = 0.0;
    double u1 = 1.0;

    double theta() const;
    void validate() const;
    AffineParams affine() const;
    HazardSpec hazard() const;
    RiskyMeasure measure() const;
};

struct Exponent {
    double A;
    double B;
};

/// Classical CIR exponent for time to maturity s without atoms:
/// B0 = L1/L3, A0 = -(2 mu0/sigma^2) log(2 theta e^{(theta-mu1)s/2} / L3).
Exponent cir_classical(const CirParams& p, double s);

/// Closed-form (A(t,T), B(t,T)), piecewise in whether (t, T] contains u1.
/// Throws std::domain_error where the spanning denominator is not positive.
Exponent cir_closed_form(const CirParams& p, double t, double T);

/// The closed-form branch evaluated without domain restrictions on (t, T);
/// spans_atom selects the formula used for t < u1 <= T.
Exponent cir_branch(const CirParams& p, double t, double T, bool spans_atom);

/// P(t, T) = 1{tau > t} exp(-A(t,T) - B(t,T).x); t must be a solution grid time.
double bond_price_affine(const PiecewiseRiccatiSolution& sol, const Eigen::VectorXd& x, double t,
                         const DefaultStatus& status);

/// One realized state path.
struct StatePath {
    std::vector<double> times;
    std::vector<Eigen::VectorXd> states;
};

/// K(t) = int_0^t (phi0 + psi0.X) ds + sum_{u_i <= t} (phi_i + psi_i.X_{u_i}), with
/// the continuous part by the trapezoid rule on the path grid. Throws
/// std::domain_error if an atom exponent is negative on the realized state.
double hazard_eval(const HazardSpec& h, const StatePath& path, double t);

/// The whole K path on the state path grid (one-factor states as scalars).
HazardPath hazard_path(const HazardSpec& h, std::span<const double> times,
                       std::span<const double> scalar_states);

/// Compensator jump induced by an exponent jump: 1 - exp(-kappa).
double compensator_jump(double kappa);

/// Forward curve, HJM coefficients and compensator of the CIR model seen
/// from state x. The Lebesgue forward rate and its drift come from finite
/// differences of the closed-form exponent in maturity and time; atom
/// values are f(t,u1) = psi1 x with a = psi1 mu(x), b = psi1 sigma sqrt(x).
struct CirAuditModel {
    ForwardCurveModel curve;
    HjmCoefficients coeffs;
    CompensatorSpec compensator;
    ShortRateModel short_rate;
};
CirAuditModel cir_audit_model(const CirParams& p, double x, double fd_step = 1e-3);

}  // namespace gicr::affine
