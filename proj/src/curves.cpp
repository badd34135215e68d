#include "gicr/curves.hpp"

#include <cmath>
#include <stdexcept>

namespace gicr {

double forward_integral(const ForwardCurveModel& curve, double t, double T,
                        QuadratureOptions opts) {
    if (t > T) throw std::invalid_argument("forward_integral: t > T");
    return nu_integrate(
        curve.measure, [&](double u) { return curve.ac_part(t, u); },
        [&](std::size_t i) { return curve.atom_values(t, i); }, t, T, opts);
}

double bond_price(const ForwardCurveModel& curve, const DefaultStatus& status, double t,
                  double T, QuadratureOptions opts) {
    if (t > T) throw std::invalid_argument("bond_price: t > T");
    if (!status.alive_at(t)) return 0.0;
    return std::exp(-forward_integral(curve, t, T, opts));
}

double numeraire(const ShortRateModel& model, double t, QuadratureOptions opts) {
    if (t < 0.0) throw std::invalid_argument("numeraire: t < 0");
    return std::exp(lebesgue_integrate(model.r, 0.0, t, {}, opts));
}

ForwardCurveModel flat_curve(double ac_rate, std::vector<double> atom_values,
                             RiskyMeasure measure) {
    if (atom_values.size() != measure.size())
        throw std::invalid_argument("flat_curve: one atom value per atom required");
    return ForwardCurveModel{
        [ac_rate](double, double) { return ac_rate; },
        [values = std::move(atom_values)](double, std::size_t i) { return values.at(i); },
        std::move(measure)};
}

}  // namespace gicr
