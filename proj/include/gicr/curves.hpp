#pragma once

#include "gicr/measure.hpp"

#include <functional>
#include <limits>

namespace gicr {

/// Forward curve f(t, .) against nu: a Lebesgue part and per-atom values.
struct ForwardCurveModel {
    std::function<double(double, double)> ac_part;             // (t, T) -> f(t, T), 1/year
    std::function<double(double, std::size_t)> atom_values;    // (t, i) -> f(t, u_i)
    RiskyMeasure measure;
};

struct ShortRateModel {
    std::function<double(double)> r = [](double) { return 0.0; };
};

struct DefaultStatus {
    double tau = std::numeric_limits<double>::infinity();
    bool alive_at(double t) const { return tau > t; }
};

/// J(t, T) = int_{(t,T]} f(t, u) nu(du). Throws std::invalid_argument if t > T.
double forward_integral(const ForwardCurveModel& curve, double t, double T,
                        QuadratureOptions opts = {});

/// P(t, T) = 1{tau > t} exp(-J(t, T)).
double bond_price(const ForwardCurveModel& curve, const DefaultStatus& status, double t,
                  double T, QuadratureOptions opts = {});

/// X0_t = exp(int_0^t r ds).
double numeraire(const ShortRateModel& model, double t, QuadratureOptions opts = {});

/// Curve with constant Lebesgue forward rate and constant atom values.
ForwardCurveModel flat_curve(double ac_rate, std::vector<double> atom_values,
                             RiskyMeasure measure);

}  // namespace gicr
