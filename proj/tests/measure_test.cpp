#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gicr/measure.hpp"

#include <cmath>
#include <random>

using namespace gicr;

TEST_CASE("RiskyMeasure validation") {
    CHECK_NOTHROW(RiskyMeasure({{0.5, 1.0}, {1.0, 0.3}}));
    CHECK_THROWS_AS(RiskyMeasure({{0.0, 1.0}}), std::invalid_argument);
    CHECK_THROWS_AS(RiskyMeasure({{1.0, 1.0}, {0.5, 1.0}}), std::invalid_argument);
    CHECK_THROWS_AS(RiskyMeasure({{1.0, 0.0}}), std::invalid_argument);
    const RiskyMeasure m({{0.5, 1.0}, {1.0, 0.3}});
    CHECK(m.find(1.0) == 1);
    CHECK(m.find(0.7) == -1);
    CHECK(m.atom_times() == std::vector<double>{0.5, 1.0});
}

TEST_CASE("nu_integrate uses the (t, T] convention") {
    const RiskyMeasure m({{1.0, 2.0}});
    auto one = [](double) { return 1.0; };
    // Atom at T is included, atom at t is not.
    CHECK(nu_integrate(m, one, 0.0, 1.0) == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(nu_integrate(m, one, 1.0, 2.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(nu_integrate(m, one, 0.0, 0.999) == doctest::Approx(0.999).epsilon(1e-12));
    CHECK(nu_integrate(m, one, 0.5, 0.5) == 0.0);
    CHECK_THROWS_AS(nu_integrate(m, one, 1.0, 0.5), std::invalid_argument);
}

TEST_CASE("moving t onto an atom removes exactly w g(u)") {
    const RiskyMeasure m({{0.6, 0.7}, {1.3, 1.5}});
    auto g = [](double s) { return std::exp(-s) + s * s; };
    const double before = nu_integrate(m, g, std::nextafter(0.6, 0.0), 2.0);
    const double on = nu_integrate(m, g, 0.6, 2.0);
    CHECK(before - on == doctest::Approx(0.7 * g(0.6)).epsilon(1e-10));
}

TEST_CASE("nu_integrate with separate atom values") {
    const RiskyMeasure m({{1.0, 0.5}});
    const double v = nu_integrate(m, [](double s) { return s; }, [](std::size_t) { return 4.0; }, 0.0, 2.0);
    CHECK(v == doctest::Approx(2.0 + 0.5 * 4.0).epsilon(1e-12));
}

TEST_CASE("additivity over (t,s] + (s,T] for random g and times") {
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        const RiskyMeasure m({{0.3 + 0.2 * U(gen), 0.1 + U(gen)}, {1.1 + 0.5 * U(gen), 0.1 + U(gen)}});
        const double c0 = U(gen), c1 = 2.0 * U(gen) - 1.0, c2 = U(gen);
        auto g = [=](double x) { return c0 + c1 * x + c2 * std::sin(3.0 * x); };
        double t = 2.0 * U(gen), s = 2.0 * U(gen), T = 2.0 * U(gen);
        if (t > s) std::swap(t, s);
        if (s > T) std::swap(s, T);
        if (t > s) std::swap(t, s);
        // Put s on an atom in some trials.
        if (trial % 5 == 0 && m[0].time > t && m[0].time < T) s = m[0].time;
        const double whole = nu_integrate(m, g, t, T);
        const double parts = nu_integrate(m, g, t, s) + nu_integrate(m, g, s, T);
        CHECK(whole == doctest::Approx(parts).epsilon(1e-12).scale(1.0));
    }
}

TEST_CASE("lebesgue_integrate with breakpoints") {
    CHECK(lebesgue_integrate([](double x) { return x * x; }, 0.0, 1.0) == doctest::Approx(1.0 / 3.0).epsilon(1e-13));
    // A step at 0.5 contributes its one-sided limits on each segment.
    auto step = [](double x) { return x < 0.5 ? 1.0 : 3.0; };
    const double bp[] = {0.5};
    CHECK(lebesgue_integrate(step, 0.0, 1.0, bp) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("compensator accumulation") {
    CompensatorSpec spec;
    spec.lambda = [](double s) { return 0.2 + 0.1 * s; };
    spec.jumps = {{1.0, 1.0, 0.3}};
    CHECK(compensator_accumulate(spec, 0.5) == doctest::Approx(0.1 + 0.0125).epsilon(1e-12));
    CHECK(compensator_accumulate(spec, 1.0) == doctest::Approx(0.25 + 0.3).epsilon(1e-12));
    // Nondecreasing on any refinement.
    double prev = 0.0;
    for (int k = 0; k <= 400; ++k) {
        const double v = compensator_accumulate(spec, 2.0 * k / 400.0);
        CHECK(v >= prev);
        prev = v;
    }
}

TEST_CASE("validate_structure reports every violation") {
    const RiskyMeasure m({{1.0, 1.0}});
    CompensatorSpec off;
    off.jumps = {{0.7, 1.0, 0.2}};
    const auto r1 = validate_structure(m, off, 2.0);
    REQUIRE(r1.violations.size() == 1);
    CHECK(r1.violations[0] == "jump at non-atom 0.7");

    CompensatorSpec full;
    full.jumps = {{1.0, 1.0, 1.0}};
    const auto r2 = validate_structure(m, full, 2.0);
    REQUIRE(r2.violations.size() == 1);
    CHECK(r2.violations[0].find("not below weight") != std::string::npos);

    CompensatorSpec neg;
    neg.lambda = [](double s) { return s > 1.5 ? -0.1 : 0.1; };
    CHECK_FALSE(validate_structure(m, neg, 2.0).ok());

    CompensatorSpec good;
    good.lambda = [](double) { return 0.05; };
    good.jumps = {{1.0, 1.0, 0.4}};
    CHECK(validate_structure(m, good, 2.0).ok());
    CHECK_FALSE(validate_structure(m, good, 0.5).ok());
}

TEST_CASE("hazard path from a compensator") {
    CompensatorSpec spec;
    spec.lambda = [](double) { return 0.1; };
    spec.jumps = {{1.0, 1.0, 0.4}};
    const std::vector<double> times{0.0, 0.5, 1.0, 1.5};
    const auto hp = hazard_path_from_compensator(spec, times);
    CHECK(hp.left[2] == doctest::Approx(0.1));
    CHECK(hp.right[2] - hp.left[2] == doctest::Approx(-std::log(0.6)));
    CHECK(hp.right[3] == doctest::Approx(0.15 - std::log(0.6)));
    CHECK(hp.left[1] == hp.right[1]);
}
