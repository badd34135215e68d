#pragma once

namespace gicr::blackcox {

/// First-passage default against D(t) = D0 for t < U and DU for t >= U.
struct BlackCoxParams {
    double D0 = -1.0;  // initial barrier, < 0
    double DU = -1.0;  // barrier from U on, >= D0
    double U = 1.0;    // jump time, years

    void validate() const;
};

double barrier(const BlackCoxParams& p, double t);

/// P(tau > T | F_t) on {tau > t} with W_t = w.
///
/// Three regimes: T < U and t >= U are reflection-principle formulas with
/// barrier D0 and DU; for t < U <= T the survival through the barrier jump is
///   Phi((w-DU)/s) - Phi((2D0-DU-w)/s) - 2 (P1 - P2),   s = sqrt(U - t),
/// where P1, P2 are the half-plane probabilities of the direct and the
/// reflected Gaussian kernel restricted to W_U > DU. Throws
/// std::invalid_argument if w <= D(t) or T <= t.
double survival_prob(const BlackCoxParams& p, double w, double t, double T);

/// P(tau = U | F_t): no crossing of D0 on [t, U) and W_U in (D0, DU].
double default_prob_at_U(const BlackCoxParams& p, double w, double t);

/// Density at x of W_U killed at D0, started from W_t = w.
double crossing_density(const BlackCoxParams& p, double w, double t, double x);

}  // namespace gicr::blackcox
