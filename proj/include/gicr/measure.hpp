#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace gicr {

/// Point mass of the pricing measure at a risky time.
struct Atom {
    double time;    // u_i, years
    double weight;  // w_i > 0
};

/// nu = Lebesgue + sum_i w_i delta_{u_i}, with finitely many atoms.
class RiskyMeasure {
public:
    RiskyMeasure() = default;
    /// Throws std::invalid_argument unless 0 < u_1 < u_2 < ... and all w_i > 0.
    explicit RiskyMeasure(std::vector<Atom> atoms);

    std::span<const Atom> atoms() const { return atoms_; }
    bool empty() const { return atoms_.empty(); }
    std::size_t size() const { return atoms_.size(); }
    const Atom& operator[](std::size_t i) const { return atoms_[i]; }

    /// Index of the atom at time u (within 1e-12), or -1.
    long find(double u) const;
    std::vector<double> atom_times() const;

private:
    std::vector<Atom> atoms_;
};

struct Horizon {
    double T_star;
};

/// A jump of the compensator base A at u: Lambda jumps by intensity * dA.
struct CompensatorJump {
    double time;
    double dA;         // Delta A(u) >= 0
    double intensity;  // generalized intensity lambda(u) >= 0
    double jump() const { return intensity * dA; }
};

/// Deterministic generalized intensity: Lambda_t = int_0^t lambda ds + sum_{u<=t} lambda(u) dA(u).
struct CompensatorSpec {
    std::function<double(double)> lambda = [](double) { return 0.0; };
    std::vector<CompensatorJump> jumps;
};

struct QuadratureOptions {
    double max_step = 1e-3;  // Simpson panel width bound
};

/// int_{(t,T]} g d nu with the Lebesgue part by composite Simpson and the
/// atom part as an exact sum over u_i in (t, T]. The Lebesgue part is split
/// at atoms; at a segment end that sits on an atom g is sampled one ulp
/// inside the segment, so an integrand with a jump at u_i contributes its
/// one-sided limit. Throws std::invalid_argument if t > T.
double nu_integrate(const RiskyMeasure& measure, const std::function<double(double)>& g,
                    double t, double T, QuadratureOptions opts = {});

/// Same, with separate integrands for the Lebesgue part and the atoms
/// (atom_value receives the atom index).
double nu_integrate(const RiskyMeasure& measure, const std::function<double(double)>& ac,
                    const std::function<double(std::size_t)>& atom_value, double t, double T,
                    QuadratureOptions opts = {});

/// Composite Simpson of g over [lo, hi]; breakpoints are sampled one ulp inside.
double lebesgue_integrate(const std::function<double(double)>& g, double lo, double hi,
                          std::span<const double> breakpoints = {}, QuadratureOptions opts = {});

/// Lambda_t before default for a deterministic intensity.
double compensator_accumulate(const CompensatorSpec& spec, double t, QuadratureOptions opts = {});

struct StructureReport {
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
};

/// Checks that every compensator jump sits on an atom, that
/// 0 <= lambda(u_i) dA(u_i) < w_i, that dA and lambda are nonnegative, and
/// that lambda is nonnegative on [0, horizon] (sampled).
StructureReport validate_structure(const RiskyMeasure& measure, const CompensatorSpec& spec,
                                   double horizon);

}  // namespace gicr

namespace gicr {

/// Right-continuous nondecreasing exponent K sampled on a time grid, with
/// the left limit recorded at every point (left[k] != right[k] exactly where
/// an atom jump sits). Default is tau = inf{t : K_t >= zeta}, zeta ~ Exp(1).
struct HazardPath {
    std::vector<double> times;
    std::vector<double> left;   // K(t_k-)
    std::vector<double> right;  // K(t_k)
};

/// K for a deterministic compensator on the grid points: trapezoidal
/// int lambda ds plus, at each jump, -log(1 - lambda dA) so that the default
/// probability at u_i given survival to u_i- equals lambda(u_i) dA(u_i).
HazardPath hazard_path_from_compensator(const CompensatorSpec& spec,
                                        std::span<const double> times);

}  // namespace gicr
