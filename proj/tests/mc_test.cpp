#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gicr/mc.hpp"

#include <cmath>
#include <sstream>

using namespace gicr;
using namespace gicr::mc;

TEST_CASE("SimConfig validation and hash") {
    SimConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    SimConfig small = cfg;
    small.n_paths = 99;
    CHECK_THROWS_AS(small.validate(), std::invalid_argument);
    SimConfig zero_dt = cfg;
    zero_dt.dt = 0.0;
    CHECK_THROWS_AS(zero_dt.validate(), std::invalid_argument);
    CHECK(cfg.hash() == SimConfig{}.hash());
    SimConfig other = cfg;
    other.seed = 43;
    CHECK(cfg.hash() != other.hash());
    CHECK(cfg.hash().size() == 16);
}

TEST_CASE("summarize") {
    const std::vector<double> xs{1.0, 2.0, 3.0, 4.0};
    const auto e = summarize(xs);
    CHECK(e.mean == 2.5);
    CHECK(e.std_error == doctest::Approx(std::sqrt(5.0 / 3.0 / 4.0)));
    CHECK(e.n == 4);
    CHECK(summarize(std::vector<double>{}).n == 0);
}

TEST_CASE("Brownian bundles are reproducible with the right increments") {
    SimConfig cfg;
    cfg.n_paths = 20000;
    cfg.dt = 0.1;
    cfg.horizon = 1.0;
    const double ev[] = {0.55};
    const auto a = simulate_brownian(cfg, 0.3, 0.0, ev);
    const auto b = simulate_brownian(cfg, 0.3, 0.0, ev);
    CHECK(a.values == b.values);
    CHECK(a.times.contains(0.55));
    std::vector<double> end(cfg.n_paths);
    for (std::size_t i = 0; i < cfg.n_paths; ++i) {
        CHECK(a.at(i, 0) == 0.3);
        end[i] = (a.at(i, a.times.size() - 1) - 0.3) * (a.at(i, a.times.size() - 1) - 0.3);
    }
    const auto var = summarize(end);
    CHECK(std::abs(var.mean - 1.0) <= 4.0 * var.std_error);
}

TEST_CASE("CIR Euler matches the exact mean") {
    const CirDynamics d{0.1, -0.5, 0.3, 0.2};
    SimConfig cfg;
    cfg.n_paths = 20000;
    cfg.dt = 1e-2;
    cfg.horizon = 1.0;
    const auto bundle = simulate_cir(d, cfg);
    std::vector<double> xT(cfg.n_paths);
    for (std::size_t i = 0; i < cfg.n_paths; ++i) xT[i] = bundle.at(i, bundle.times.size() - 1);
    const auto e = summarize(xT);
    const double exact = 0.2 * std::exp(-0.5) + 0.1 / 0.5 * (1.0 - std::exp(-0.5));
    CHECK(std::abs(e.mean - exact) <= 4.0 * e.std_error);
    CHECK_THROWS_AS(simulate_cir({0.1, -0.5, 0.3, -0.1}, cfg), std::invalid_argument);
}

TEST_CASE("doubly stochastic sampling: atoms hit exactly, intensity gives exponential times") {
    HazardPath hp;
    hp.times = {0.0, 0.5, 1.0, 1.5};
    hp.left = {0.0, 0.1, 0.2, 0.8};
    hp.right = {0.0, 0.1, 0.7, 0.8};
    const int n = 100000;
    std::vector<double> at_atom(n), alive(n), inside(n);
    for (int i = 0; i < n; ++i) {
        RngStream s(1, static_cast<std::uint64_t>(i));
        const double tau = sample_default_doubly_stochastic(hp, s);
        at_atom[i] = tau == 1.0;
        alive[i] = tau > 0.75;
        inside[i] = tau > 0.5 && tau < 1.0;
    }
    const auto a = summarize(at_atom);
    CHECK(std::abs(a.mean - (std::exp(-0.2) - std::exp(-0.7))) <= 3.0 * a.std_error);
    // Linear K inside a step: K(0.75) = 0.15.
    const auto s = summarize(alive);
    CHECK(std::abs(s.mean - std::exp(-0.15)) <= 3.0 * s.std_error);

    HazardPath bad = hp;
    bad.left[3] = 0.5;
    RngStream st(1, 0);
    // Only throws once the scan reaches the decrease.
    bool threw = false;
    for (int i = 0; i < 50 && !threw; ++i) {
        try {
            sample_default_doubly_stochastic(bad, st);
        } catch (const std::invalid_argument&) {
            threw = true;
        }
    }
    CHECK(threw);
}

TEST_CASE("first passage: immediate default and bridge crossings") {
    RngStream s(3, 0);
    const std::vector<double> t{0.0, 0.5, 1.0};
    const StepBarrier bar{-1.0, -0.5, 0.75};
    CHECK(first_passage_time(t, std::vector<double>{-1.2, 0.0, 0.0}, bar, s) == 0.0);
    CHECK(first_passage_time(t, std::vector<double>{0.0, -1.1, 0.0}, bar, s) == 0.5);
    CHECK(std::isinf(first_passage_time(t, std::vector<double>{3.0, 3.0, 3.0}, bar, s)));
    // W_U in (D0, DU] defaults exactly at the jump time.
    const std::vector<double> tj{0.0, 0.75, 1.0};
    RngStream s2(3, 1);
    CHECK(first_passage_time(tj, std::vector<double>{5.0, -0.7, 5.0}, bar, s2, false) == 0.75);
    // Ending below the old level at the jump time dates the crossing before it.
    CHECK(first_passage_time(tj, std::vector<double>{5.0, -1.2, 5.0}, bar, s2, false) < 0.75);
}

TEST_CASE("bridge correction removes the discrete-monitoring bias") {
    // Single barrier at -1 on [0, 1]: survival 1 - 2 Phi(-1).
    const double exact = 1.0 - std::erfc(1.0 / std::sqrt(2.0));
    SimConfig cfg;
    cfg.n_paths = 100000;
    cfg.dt = 0.1;
    cfg.horizon = 1.0;
    const auto bundle = simulate_brownian(cfg);
    const StepBarrier bar{-1.0, -1.0, 10.0};
    for (bool bridge : {true, false}) {
        const auto taus = first_passage_default(bundle, bar, cfg.seed, bridge);
        std::vector<double> alive(taus.size());
        for (std::size_t i = 0; i < taus.size(); ++i) alive[i] = taus[i] > 1.0;
        const auto e = summarize(alive);
        if (bridge) CHECK(std::abs(e.mean - exact) <= 3.0 * e.std_error);
        else CHECK(e.mean - exact > 5.0 * e.std_error);
    }
}

TEST_CASE("mc_price with antithetic pairs cancels odd payoffs") {
    SimConfig cfg;
    cfg.n_paths = 1000;
    const auto e = mc_price([](RngStream& s) { return s.normal(); }, cfg, true);
    CHECK(e.mean == 0.0);
    CHECK(e.std_error == 0.0);
    const auto u = mc_price([](RngStream& s) { return s.uniform(); }, cfg, true);
    CHECK(u.mean == doctest::Approx(0.5).epsilon(1e-12));
    const auto plain = mc_price([](RngStream& s) { return s.normal() * s.normal(); }, cfg);
    CHECK(std::abs(plain.mean) <= 4.0 * plain.std_error);
}

TEST_CASE("martingale test passes a martingale and fails a drift") {
    SimConfig cfg;
    cfg.n_paths = 20000;
    const std::vector<double> cps{0.0, 0.5, 1.0};
    DiscountedPriceModel bm = [](RngStream& s, std::span<const double> c, std::span<double> out) {
        double w = 0.0;
        out[0] = 0.0;
        for (std::size_t j = 1; j < c.size(); ++j) out[j] = (w += std::sqrt(c[j] - c[j - 1]) * s.normal());
    };
    CHECK(martingale_drift_test(bm, cfg, cps).pass());
    DiscountedPriceModel drift = [&](RngStream& s, std::span<const double> c, std::span<double> out) {
        bm(s, c, out);
        for (std::size_t j = 0; j < c.size(); ++j) out[j] += 0.1 * c[j];
    };
    const auto r = martingale_drift_test(drift, cfg, cps);
    CHECK_FALSE(r.pass());
    REQUIRE(r.increments.size() == 2);
    CHECK(r.increments[0].increment.mean > 0.0);
    const std::vector<double> bad{0.0, 0.0};
    CHECK_THROWS_AS(martingale_drift_test(bm, cfg, bad), std::invalid_argument);
}

TEST_CASE("estimate CSV") {
    SimConfig cfg;
    std::ostringstream os;
    const std::vector<NamedEstimate> rows{{"p", {0.25, 0.01, 100}}};
    write_estimates_csv(os, rows, cfg);
    CHECK(os.str() == "estimator,mean,std_error,n,config_hash\np,0.25,0.01,100," + cfg.hash() + "\n");
}
