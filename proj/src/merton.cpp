#include "gicr/merton.hpp"

#include "gicr/numerics.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace gicr::merton {

void MertonParams::validate() const {
    if (!(U > 0.0)) throw std::invalid_argument("merton: U must be positive");
    if (!(T_star >= U)) throw std::invalid_argument("merton: T_star must be >= U");
    if (!std::isfinite(K) || !std::isfinite(r)) throw std::invalid_argument("merton: K and r must be finite");
}

namespace {

void require_before_maturity(const MertonParams& p, double t) {
    if (!(t >= 0.0) || !(t < p.U))
        throw std::domain_error("merton: requires 0 <= t < U");
}

// phi(z) / Phi(z), stable for very negative z.
double inverse_mills(double z) {
    const double log_pdf = -0.5 * z * z - 0.5 * std::log(2.0 * std::numbers::pi);
    return std::exp(log_pdf - log_norm_cdf(z));
}

}  // namespace

double distance_to_default(const MertonParams& p, double w, double t) {
    require_before_maturity(p, t);
    return (w - p.K) / std::sqrt(p.U - t);
}

double survival_prob(const MertonParams& p, double w, double t) {
    return norm_cdf(distance_to_default(p, w, t));
}

double forward_atom(const MertonParams& p, double w, double t) {
    return -log_norm_cdf(distance_to_default(p, w, t));
}

double vol_b(const MertonParams& p, double w, double t) {
    const double z = distance_to_default(p, w, t);
    return -inverse_mills(z) / std::sqrt(p.U - t);
}

double drift_a(const MertonParams& p, double w, double t) {
    const double b = vol_b(p, w, t);
    return 0.5 * b * b;
}

double price(const MertonParams& p, double w, double t, double T, const DefaultStatus& status) {
    if (t > T) throw std::invalid_argument("merton::price: t > T");
    if (!status.alive_at(t)) return 0.0;
    const double discount = std::exp(-p.r * (T - t));
    if (T < p.U || t >= p.U) return discount;
    return discount * survival_prob(p, w, t);
}

double atom_intensity(const MertonParams& p, double w, double t) {
    return norm_cdf(-distance_to_default(p, w, t));
}

RiskyMeasure measure(const MertonParams& p) { return RiskyMeasure({{p.U, 1.0}}); }

ForwardCurveModel curve(const MertonParams& p, double w) {
    return ForwardCurveModel{[r = p.r](double, double) { return r; },
                             [p, w](double t, std::size_t) { return forward_atom(p, w, t); },
                             measure(p)};
}

HjmCoefficients coefficients(const MertonParams& p, double w) {
    HjmCoefficients c = HjmCoefficients::zero(1);
    c.a_atom = [p, w](double t, std::size_t) { return drift_a(p, w, t); };
    c.b_atom = [p, w](double t, std::size_t) {
        return Eigen::VectorXd::Constant(1, vol_b(p, w, t)).eval();
    };
    return c;
}

CompensatorSpec compensator(const MertonParams& p, double w, double t) {
    CompensatorSpec spec;
    spec.jumps.push_back({p.U, 1.0, atom_intensity(p, w, t)});
    return spec;
}

ShortRateModel short_rate(const MertonParams& p) {
    return ShortRateModel{[r = p.r](double) { return r; }};
}

}  // namespace gicr::merton
