#pragma once

#include "gicr/curves.hpp"
#include "gicr/noarb.hpp"

namespace gicr::merton {

/// Stylized Merton firm: default at U iff the normalized log-asset W_U <= K.
struct MertonParams {
    double K = 0.0;       // default threshold
    double U = 1.0;       // debt maturity, years
    double r = 0.0;       // constant short rate
    double T_star = 1.0;  // horizon, >= U

    void validate() const;
};

/// (w - K) / sqrt(U - t).
double distance_to_default(const MertonParams& p, double w, double t);

/// Phi(z): conditional probability that W_U > K. Throws std::domain_error for t >= U.
double survival_prob(const MertonParams& p, double w, double t);

/// f(t, U) = -log Phi(z) >= 0.
double forward_atom(const MertonParams& p, double w, double t);

/// b(t, U) = -(phi(z)/Phi(z)) / sqrt(U - t).
double vol_b(const MertonParams& p, double w, double t);

/// a(t, U) = b(t, U)^2 / 2.
double drift_a(const MertonParams& p, double w, double t);

/// P(t, T) given W_t = w. For t >= U the status carries the realized outcome.
double price(const MertonParams& p, double w, double t, double T, const DefaultStatus& status);

/// Generalized intensity at the atom with w_1 = dA = 1: the conditional
/// default probability 1 - Phi(z).
double atom_intensity(const MertonParams& p, double w, double t);

/// nu = ds + delta_U.
RiskyMeasure measure(const MertonParams& p);

/// Curve, Ito coefficients and compensator seen from the state (t, W_t = w).
ForwardCurveModel curve(const MertonParams& p, double w);
HjmCoefficients coefficients(const MertonParams& p, double w);
CompensatorSpec compensator(const MertonParams& p, double w, double t);
ShortRateModel short_rate(const MertonParams& p);

}  // namespace gicr::merton
