#pragma once

#include "gicr/curves.hpp"
#include "gicr/measure.hpp"
#include "gicr/numerics.hpp"

#include <json.hpp>

#include <functional>
#include <string>
#include <vector>

namespace gicr {

/// Ito coefficients of the forward curve, df(t,T) = a dt + b . dW, split like
/// ForwardCurveModel into a Lebesgue part and per-atom values.
struct HjmCoefficients {
    std::size_t dim = 1;
    std::function<double(double, double)> a_ac = [](double, double) { return 0.0; };
    std::function<double(double, std::size_t)> a_atom = [](double, std::size_t) { return 0.0; };
    std::function<Eigen::VectorXd(double, double)> b_ac;
    std::function<Eigen::VectorXd(double, std::size_t)> b_atom;

    /// Zero drift and volatility in dimension n.
    static HjmCoefficients zero(std::size_t n = 1);
};

struct BarCoefficients {
    double a_bar;
    Eigen::VectorXd b_bar;
};

struct DriftReport {
    double max_ac_residual = 0.0;          // |abar - 0.5 |bbar|^2|
    double max_atom_residual = 0.0;        // |f(t,u_i) - log(w_i/(w_i - lambda dA))|
    double max_short_rate_residual = 0.0;  // |f(t,t) - r_t - lambda_t|, integrated check
    std::vector<std::string> structural_violations;
    double tolerance = 1e-6;

    bool certified() const;
    /// Max-aggregates another report into this one.
    void merge(const DriftReport& other);
};

void to_json(nlohmann::json& j, const DriftReport& report);

/// abar(t,T) = int_{(t,T]} a(t,u) nu(du) and likewise bbar, componentwise.
BarCoefficients bar_coefficients(const HjmCoefficients& coeffs, const RiskyMeasure& measure,
                                 double t, double T, QuadratureOptions opts = {});

/// |abar(t,T) - 0.5 |bbar(t,T)|^2|.
double hjm_residual(const HjmCoefficients& coeffs, const RiskyMeasure& measure, double t,
                    double T, QuadratureOptions opts = {});

/// H'(t) = int_0^t lambda ds - sum_{u_i <= t} log((w_i - lambda(u_i) dA(u_i)) / w_i).
/// Throws std::domain_error if lambda dA >= w at an atom <= t, and
/// std::invalid_argument for a base jump off the atoms.
double h_prime(const CompensatorSpec& spec, const RiskyMeasure& measure, double t,
               QuadratureOptions opts = {});

/// Forward value an atom must carry: log(w / (w - lambda dA)).
/// Throws std::domain_error unless 0 <= lambda dA < w.
double atom_target_rate(double w, double lambda_u, double dA);

/// Checks the drift conditions on the grid: f(t,t) = r_t + lambda_t,
/// f(t,u_i) = atom_target_rate at every atom after t, abar = 0.5 |bbar|^2 for
/// every grid pair t <= T, the atom structure, and the integrated form of
/// the short-rate condition at the last grid point.
DriftReport audit(const ForwardCurveModel& curve, const HjmCoefficients& coeffs,
                  const CompensatorSpec& spec, const ShortRateModel& short_rate,
                  const Grid& grid, double tolerance = 1e-6, QuadratureOptions opts = {});

/// Which atoms the pointwise atom condition inspects at evaluation time t.
enum class AtomCheck {
    after_t,   // every atom u_i > t, against the intensity seen at t
    diagonal,  // only an atom at u_i = t, using f(u_i-, u_i)
};

/// The pointwise conditions at a single evaluation time t against the given
/// maturities. Used for state-dependent models, where each simulated state
/// yields its own curve and coefficients.
DriftReport audit_at(const ForwardCurveModel& curve, const HjmCoefficients& coeffs,
                     const CompensatorSpec& spec, const ShortRateModel& short_rate, double t,
                     std::span<const double> maturities, double horizon,
                     double tolerance = 1e-6, QuadratureOptions opts = {},
                     AtomCheck atom_check = AtomCheck::after_t);

}  // namespace gicr
