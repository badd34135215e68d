#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gicr/affine.hpp"

#include <cmath>
#include <random>
#include <sstream>

using namespace gicr;
using namespace gicr::affine;

namespace {

double sup_diff(const CirParams& p, double T, double step) {
    const Grid grid = Grid::uniform(0.0, T, step, std::vector<double>{p.u1});
    const auto sol = solve_riccati(p.affine(), p.hazard(), p.measure(), T, grid);
    double worst = 0.0;
    for (double t : sol.times()) {
        const auto e = cir_closed_form(p, t, T);
        worst = std::max({worst, std::abs(sol.A(t) - e.A), std::abs(sol.B(t)[0] - e.B)});
    }
    return worst;
}

}  // namespace

TEST_CASE("admissibility") {
    CirParams cir;
    CHECK(validate_admissible(cir.affine()).ok());

    AffineParams bad = cir.affine();
    bad.mu0[0] = -0.1;
    const auto r1 = validate_admissible(bad);
    REQUIRE_FALSE(r1.ok());
    CHECK(r1.violations[0].find("drift points outward") != std::string::npos);

    AffineParams two;
    two.m = 1;
    two.n = 1;
    two.mu0 = Eigen::Vector2d(0.1, 0.0);
    two.mu = {Eigen::Vector2d(-0.5, 0.0), Eigen::Vector2d(0.0, -1.0)};
    two.sigma0 = Eigen::Matrix2d::Zero();
    two.sigma0(1, 1) = 0.02;
    two.sigma = {Eigen::Matrix2d::Zero(), Eigen::Matrix2d::Zero()};
    two.sigma[0](0, 0) = 0.05;
    CHECK(validate_admissible(two).ok());
    two.sigma0(1, 1) = -0.02;
    CHECK_FALSE(validate_admissible(two).ok());
    two.sigma0(1, 1) = 0.02;
    two.mu[1][0] = 0.3;  // R+ drift depending on the R coordinate
    CHECK_FALSE(validate_admissible(two).ok());
}

TEST_CASE("RK4 against the CIR closed form with and without an atom") {
    for (double psi1 : {0.0, 0.4}) {
        CirParams p;
        p.psi1 = psi1;
        for (double T : {0.5, 1.0, 2.0}) {
            CAPTURE(psi1);
            CAPTURE(T);
            CHECK(sup_diff(p, T, 1e-3) <= 1e-8);
        }
    }
}

TEST_CASE("solver jumps equal (phi w, psi w) at the atom") {
    CirParams p;
    p.psi1 = 0.4;
    const Grid grid = Grid::uniform(0.0, 2.0, 1e-2, std::vector<double>{1.0});
    const auto sol = solve_riccati(p.affine(), p.hazard(), p.measure(), 2.0, grid);
    CHECK(sol.B_left(1.0)[0] - sol.B(1.0)[0] == doctest::Approx(0.4).epsilon(1e-15));
    CHECK(sol.A_left(1.0) == sol.A(1.0));
    // Away from the atom there is no left limit.
    CHECK_FALSE(sol.has_left_limit(0));
    // Reading forward in t, B drops by psi1.
    const auto closed_left = cir_branch(p, 1.0, 2.0, true);
    const auto closed = cir_closed_form(p, 1.0, 2.0);
    CHECK(closed.B - closed_left.B == doctest::Approx(-0.4).epsilon(1e-14));
}

TEST_CASE("psi1 = 0 gives continuous columns") {
    CirParams p;
    const Grid grid = Grid::uniform(0.0, 2.0, 1e-2, std::vector<double>{1.0});
    const auto sol = solve_riccati(p.affine(), p.hazard(), p.measure(), 2.0, grid);
    CHECK(sol.B_left(1.0)[0] == sol.B(1.0)[0]);
    CHECK(sol.A_left(1.0) == sol.A(1.0));
}

TEST_CASE("fourth-order convergence of the Riccati solver") {
    CirParams p;
    p.psi1 = 0.4;
    p.sigma = 0.8;
    const double e1 = sup_diff(p, 2.0, 0.1);
    const double e2 = sup_diff(p, 2.0, 0.05);
    CHECK(e1 / e2 == doctest::Approx(16.0).epsilon(0.2));
}

TEST_CASE("atom at the maturity itself") {
    CirParams p;
    p.psi1 = 0.3;
    const Grid grid = Grid::uniform(0.0, 1.0, 1e-3, std::vector<double>{1.0});
    const auto sol = solve_riccati(p.affine(), p.hazard(), p.measure(), 1.0, grid);
    CHECK(sol.B(1.0)[0] == 0.0);
    CHECK(sol.B_left(1.0)[0] == doctest::Approx(0.3));
    const auto e = cir_closed_form(p, 0.0, 1.0);
    CHECK(sol.B(0.0)[0] == doctest::Approx(e.B).epsilon(1e-9));
}

TEST_CASE("two-factor CIR plus Gaussian factor against a semi-analytic oracle") {
    // X1 is CIR, X2 is Ornstein-Uhlenbeck; intensity X1 + X2 and an atom with
    // phi = 0.05, psi = (0.3, 0.2). The problem splits factor by factor.
    const double kappa = 1.2, b = 0.02, eta2 = 0.01, T = 2.0, u = 1.0;
    CirParams cir;
    cir.psi1 = 0.3;
    AffineParams ap;
    ap.m = 1;
    ap.n = 1;
    ap.mu0 = Eigen::Vector2d(cir.mu0, b);
    ap.mu = {Eigen::Vector2d(cir.mu1, 0.0), Eigen::Vector2d(0.0, -kappa)};
    ap.sigma0 = Eigen::Matrix2d::Zero();
    ap.sigma0(1, 1) = 0.5 * eta2;
    ap.sigma = {Eigen::Matrix2d::Zero(), Eigen::Matrix2d::Zero()};
    ap.sigma[0](0, 0) = 0.5 * cir.sigma * cir.sigma;
    REQUIRE(validate_admissible(ap).ok());
    HazardSpec h;
    h.psi0 = [](double) { return Eigen::Vector2d(1.0, 1.0).eval(); };
    h.atoms.push_back({u, 1.0, 0.05, Eigen::Vector2d(0.3, 0.2)});
    const RiskyMeasure m({{u, 1.0}});

    const Grid grid = Grid::uniform(0.0, T, 1e-3, std::vector<double>{u});
    const auto sol = solve_riccati(ap, h, m, T, grid);

    // OU coefficient: backward from value v at time s0, B2(t) = 1/k + (v - 1/k) e^{-k (s0 - t)}.
    auto B2 = [&](double t) {
        if (t >= u) return (1.0 - std::exp(-kappa * (T - t))) / kappa;
        const double v = (1.0 - std::exp(-kappa * (T - u))) / kappa + 0.2;
        return 1.0 / kappa + (v - 1.0 / kappa) * std::exp(-kappa * (u - t));
    };
    auto simpson = [](auto f, double lo, double hi) {
        const int n = 20000;
        const double hh = (hi - lo) / n;
        double s = f(lo) + f(hi);
        for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(lo + i * hh);
        return s * hh / 3.0;
    };
    auto a2_rate = [&](double s) { return b * B2(s) - 0.5 * eta2 * B2(s) * B2(s); };
    // Evaluate the integrand on each side of u with its one-sided limit.
    const double A2 = simpson(a2_rate, std::nextafter(u, T), T) +
                      simpson(a2_rate, 0.0, std::nextafter(u, 0.0));
    const auto e1 = cir_closed_form(cir, 0.0, T);
    CHECK(sol.B(0.0)[0] == doctest::Approx(e1.B).epsilon(1e-9));
    CHECK(sol.B(0.0)[1] == doctest::Approx(B2(0.0)).epsilon(1e-9));
    CHECK(sol.A(0.0) == doctest::Approx(e1.A + A2 + 0.05).epsilon(1e-8));
    CHECK(sol.A_left(u) - sol.A(u) == doctest::Approx(0.05).epsilon(1e-14));
}

TEST_CASE("closed form explodes for a negative atom loading") {
    CirParams p;
    p.psi1 = -50.0;  // bypasses validate on purpose
    CHECK_THROWS_AS(cir_closed_form(p, 0.0, 2.0), std::domain_error);
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("bond price and the jump of the price path at u1") {
    CirParams p;
    p.psi1 = 0.4;
    const Grid grid = Grid::uniform(0.0, 2.0, 1e-3, std::vector<double>{1.0});
    const auto sol = solve_riccati(p.affine(), p.hazard(), p.measure(), 2.0, grid);
    const Eigen::VectorXd x = Eigen::VectorXd::Constant(1, 0.2);
    const double at = bond_price_affine(sol, x, 1.0, {});
    const double before = std::exp(-sol.A_left(1.0) - sol.B_left(1.0).dot(x));
    CHECK(at / before == doctest::Approx(std::exp(0.4 * 0.2)).epsilon(1e-12));
    CHECK(bond_price_affine(sol, x, 1.5, DefaultStatus{1.0}) == 0.0);
    CHECK_THROWS_AS(bond_price_affine(sol, x, 2.5, {}), std::invalid_argument);
}

TEST_CASE("Riccati CSV lists the pre-atom limit first") {
    CirParams p;
    p.psi1 = 0.4;
    const Grid grid = Grid::uniform(0.0, 1.5, 0.5, std::vector<double>{1.0});
    const auto sol = solve_riccati(p.affine(), p.hazard(), p.measure(), 1.5, grid);
    std::ostringstream os;
    sol.write_csv(os);
    std::istringstream in(os.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "t,A,B_1,is_pre_atom_limit");
    std::vector<std::string> rows;
    while (std::getline(in, line)) rows.push_back(line);
    REQUIRE(rows.size() == 5);
    CHECK(rows[2].rfind("1,", 0) == 0);
    CHECK(rows[2].substr(rows[2].size() - 2) == ",1");
    CHECK(rows[3].substr(rows[3].size() - 2) == ",0");
}

TEST_CASE("hazard exponent along a state path") {
    CirParams p;
    p.psi1 = 0.5;
    const auto h = p.hazard();
    const std::vector<double> times{0.0, 0.5, 1.0, 1.5};
    const std::vector<double> xs{0.2, 0.4, 0.6, -0.1};
    const auto hp = hazard_path(h, times, xs);
    CHECK(hp.left[2] == doctest::Approx(0.25 * 0.6 + 0.25 * 1.0));
    CHECK(hp.right[2] - hp.left[2] == doctest::Approx(0.3));
    CHECK(hp.right[3] - hp.right[2] == doctest::Approx(0.25 * 0.6));  // negative state floored
    StatePath sp;
    sp.times = times;
    for (double x : {0.2, 0.4, 0.6, 0.0}) sp.states.push_back(Eigen::VectorXd::Constant(1, x));
    CHECK(hazard_eval(h, sp, 1.0) == doctest::Approx(hp.right[2]));
    CHECK(compensator_jump(0.3) == doctest::Approx(1.0 - std::exp(-0.3)));
}

TEST_CASE("CIR audit model satisfies the drift conditions at random states") {
    std::mt19937_64 gen(29);
    std::uniform_real_distribution<double> Ux(0.01, 0.8);
    CirParams p;
    p.psi1 = 0.4;
    const Grid mg = Grid::uniform(0.0, 2.0, 0.1, std::vector<double>{1.0});
    for (int i = 0; i < 5; ++i) {
        const double x = Ux(gen);
        const auto model = cir_audit_model(p, x, 1e-4);
        for (double t : {0.0, 0.5, 1.0, 1.5}) {
            std::vector<double> mats;
            for (double T : mg.points())
                if (T > t) mats.push_back(T);
            const auto rep = audit_at(model.curve, model.coeffs, model.compensator, model.short_rate,
                                      t, mats, 2.0, 1e-6, {}, AtomCheck::diagonal);
            CAPTURE(x);
            CAPTURE(t);
            CHECK(rep.max_ac_residual <= 1e-6);
            CHECK(rep.max_atom_residual <= 1e-6);
            CHECK(rep.max_short_rate_residual <= 1e-6);
            CHECK(rep.structural_violations.empty());
        }
    }
}

TEST_CASE("CIR audit detects a perturbed forward drift") {
    CirParams p;
    p.psi1 = 0.4;
    auto model = cir_audit_model(p, 0.3, 1e-4);
    const auto base = model.coeffs.a_ac;
    model.coeffs.a_ac = [base](double t, double T) { return base(t, T) + 1e-3; };
    const double mats[] = {0.5, 1.0, 2.0};
    const auto rep = audit_at(model.curve, model.coeffs, model.compensator, model.short_rate, 0.0,
                              mats, 2.0, 1e-6, {}, AtomCheck::diagonal);
    CHECK(rep.max_ac_residual == doctest::Approx(2e-3).epsilon(1e-3));
    CHECK_FALSE(rep.certified());
}
