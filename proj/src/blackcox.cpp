#include "gicr/blackcox.hpp"

#include "gicr/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <stdexcept>

namespace gicr::blackcox {

void BlackCoxParams::validate() const {
    if (!(D0 < 0.0)) throw std::invalid_argument("blackcox: D0 must be negative");
    if (!(DU >= D0)) throw std::invalid_argument("blackcox: DU must be >= D0");
    if (!(U > 0.0)) throw std::invalid_argument("blackcox: U must be positive");
}

double barrier(const BlackCoxParams& p, double t) { return t < p.U ? p.D0 : p.DU; }

namespace {

double reflection_survival(double level, double w, double horizon) {
    return 1.0 - 2.0 * norm_cdf((level - w) / std::sqrt(horizon));
}

double clamp_probability(double raw) {
    if (raw < -1e-9 || raw > 1.0 + 1e-9)
        std::cerr << "blackcox: raw survival probability " << raw << " outside [0,1]\n";
    return std::clamp(raw, 0.0, 1.0);
}

}  // namespace

double survival_prob(const BlackCoxParams& p, double w, double t, double T) {
    p.validate();
    if (!(T > t)) throw std::invalid_argument("blackcox::survival_prob: requires T > t");
    if (!(w > barrier(p, t)))
        throw std::invalid_argument("blackcox::survival_prob: W_t at or below the barrier");

    if (t >= p.U) return clamp_probability(reflection_survival(p.DU, w, T - t));
    if (T < p.U) return clamp_probability(reflection_survival(p.D0, w, T - t));

    const double s = std::sqrt(p.U - t);
    // Mass of W_U above DU with no crossing of D0 on [t, U].
    const double alive_above =
        norm_cdf((w - p.DU) / s) - norm_cdf((2.0 * p.D0 - p.DU - w) / s);
    if (T == p.U) return clamp_probability(alive_above);

    const double a = std::sqrt(T - p.U);
    // W_U = s*eta + w, and the reflected kernel W_U = s*eta + 2D0 - w.
    const double direct = halfplane_band_prob(a, s, p.DU - w, (p.DU - w) / s);
    const double reflected =
        halfplane_band_prob(a, s, p.DU - 2.0 * p.D0 + w, (p.DU - 2.0 * p.D0 + w) / s);
    return clamp_probability(alive_above - 2.0 * (direct - reflected));
}

double crossing_density(const BlackCoxParams& p, double w, double t, double x) {
    if (x <= p.D0) return 0.0;
    const double s = std::sqrt(p.U - t);
    return (norm_pdf((w - x) / s) - norm_pdf((2.0 * p.D0 - x - w) / s)) / s;
}

double default_prob_at_U(const BlackCoxParams& p, double w, double t) {
    p.validate();
    if (!(t < p.U)) throw std::invalid_argument("blackcox::default_prob_at_U: requires t < U");
    if (!(w > p.D0)) throw std::invalid_argument("blackcox::default_prob_at_U: W_t at or below D0");
    if (p.DU == p.D0) return 0.0;
    const double mass = integrate_gauss_legendre(
        [&](double x) { return crossing_density(p, w, t, x); }, p.D0, p.DU, 1e-13);
    return std::clamp(mass, 0.0, 1.0);
}

}  // namespace gicr::blackcox
