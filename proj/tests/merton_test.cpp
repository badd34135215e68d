#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gicr/mc.hpp"
#include "gicr/merton.hpp"
#include "gicr/numerics.hpp"

#include <cmath>
#include <random>

using namespace gicr;
using namespace gicr::merton;

namespace {

const MertonParams P{0.0, 1.0, 0.0, 2.0};

}  // namespace

TEST_CASE("parameter validation") {
    CHECK_NOTHROW(P.validate());
    CHECK_THROWS_AS((MertonParams{0.0, 0.0, 0.0, 1.0}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((MertonParams{0.0, 2.0, 0.0, 1.0}.validate()), std::invalid_argument);
    CHECK_THROWS_AS(survival_prob(P, 0.0, 1.0), std::domain_error);
    CHECK_THROWS_AS(forward_atom(P, 0.0, 1.5), std::domain_error);
}

TEST_CASE("closed forms at a reference state") {
    const double w = 0.3, t = 0.36;
    const double z = 0.3 / 0.8;
    CHECK(distance_to_default(P, w, t) == doctest::Approx(z));
    CHECK(survival_prob(P, w, t) == doctest::Approx(0.5 * std::erfc(-z / std::sqrt(2.0))).epsilon(1e-15));
    CHECK(forward_atom(P, w, t) == doctest::Approx(-std::log(survival_prob(P, w, t))).epsilon(1e-15));
    CHECK(atom_intensity(P, w, t) == doctest::Approx(1.0 - survival_prob(P, w, t)).epsilon(1e-14));
    CHECK(drift_a(P, w, t) == doctest::Approx(0.5 * vol_b(P, w, t) * vol_b(P, w, t)));
    CHECK(vol_b(P, w, t) < 0.0);
}

TEST_CASE("price drops by Phi(z) when the maturity reaches U") {
    const MertonParams p{-0.2, 1.0, 0.03, 3.0};
    const double w = 0.1, t = 0.25;
    const double before = price(p, w, t, std::nextafter(1.0, 0.0), {});
    const double at = price(p, w, t, 1.0, {});
    CHECK(at / before == doctest::Approx(survival_prob(p, w, t)).epsilon(1e-12));
    CHECK(price(p, w, t, 2.0, {}) == doctest::Approx(std::exp(-0.03 * 1.75) * survival_prob(p, w, t)));
    // After U the firm is either dead or holds a riskless bond.
    CHECK(price(p, w, 1.5, 2.0, DefaultStatus{1.0}) == 0.0);
    CHECK(price(p, w, 1.5, 2.0, {}) == doctest::Approx(std::exp(-0.015)));
}

TEST_CASE("finite-difference Ito drift of f(t,U) equals b^2/2") {
    // f depends on (t, W_t); its drift is f_t + f_ww / 2 and its volatility f_w.
    std::mt19937_64 gen(17);
    std::uniform_real_distribution<double> Ut(0.01, 0.9), Uw(-1.5, 1.5);
    for (int i = 0; i < 100; ++i) {
        const double t = Ut(gen), w = Uw(gen);
        auto f_t = [&](double s) { return forward_atom(P, w, s); };
        auto f_w = [&](double x) { return forward_atom(P, x, t); };
        // f_t and f_ww / 2 nearly cancel far from default, so the stencil
        // must be high order; h = 1e-3 balances truncation and roundoff.
        const double h = 1e-3;
        const double drift = finite_diff(f_t, t, h, 6) + 0.5 * finite_diff2(f_w, w, h, 6);
        const double vol = finite_diff(f_w, w, h, 6);
        CAPTURE(t);
        CAPTURE(w);
        CHECK(vol == doctest::Approx(vol_b(P, w, t)).epsilon(1e-6));
        CHECK(drift == doctest::Approx(0.5 * vol_b(P, w, t) * vol_b(P, w, t)).epsilon(1e-5));
    }
}

TEST_CASE("stability deep in the default region") {
    for (double w : {-10.0, -30.0, -45.0}) {
        CHECK(std::isfinite(forward_atom(P, w, 0.0)));
        CHECK(std::isfinite(vol_b(P, w, 0.0)));
        // phi/Phi ~ -z for z -> -inf.
        CHECK(vol_b(P, w, 0.0) == doctest::Approx(w).epsilon(0.01));
    }
}

TEST_CASE("compliant Merton passes the pointwise audit at random states") {
    std::mt19937_64 gen(23);
    std::uniform_real_distribution<double> Ut(0.0, 0.95), Uw(-1.0, 1.0);
    const double mats[] = {0.5, 0.99, 1.0, 1.5, 2.0};
    for (int i = 0; i < 20; ++i) {
        const double t = Ut(gen), w = Uw(gen);
        const auto rep = audit_at(curve(P, w), coefficients(P, w), compensator(P, w, t),
                                  short_rate(P), t, mats, P.T_star);
        CAPTURE(t);
        CHECK(rep.certified());
        CHECK(rep.max_atom_residual < 1e-12);
        CHECK(rep.max_ac_residual < 1e-10);
    }
}

TEST_CASE("tampered atom forward gives an atom residual equal to the target rate") {
    const double w = 0.2, t = 0.1;
    auto c = curve(P, w);
    c.atom_values = [](double, std::size_t) { return 0.0; };
    const double mats[] = {1.5};
    const auto rep = audit_at(c, HjmCoefficients::zero(1), compensator(P, w, t), short_rate(P), t,
                              mats, P.T_star);
    CHECK(rep.max_atom_residual == atom_target_rate(1.0, atom_intensity(P, w, t), 1.0));
    CHECK_FALSE(rep.certified());
}

TEST_CASE("closed-form price against Monte Carlo over W_U") {
    const MertonParams p{-0.1, 1.0, 0.0, 2.0};
    mc::SimConfig cfg;
    cfg.n_paths = 200000;
    cfg.seed = 99;
    auto payoff = [&](RngStream& s) { return s.normal() > p.K ? 1.0 : 0.0; };
    const auto est = mc::mc_price(payoff, cfg);
    CHECK(std::abs(est.mean - price(p, 0.0, 0.0, 1.5, {})) <= 3.0 * est.std_error);
}
