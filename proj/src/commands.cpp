#include "gicr/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <set>

namespace gicr {

using nlohmann::json;

namespace {

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x + 0.0);  // no "-0"
    return buf;
}

std::vector<double> merged(std::vector<double> a, std::span<const double> b) {
    a.insert(a.end(), b.begin(), b.end());
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end(),
                        [](double x, double y) { return std::abs(x - y) <= 1e-12; }),
            a.end());
    return a;
}

std::size_t atoms_in(const RiskyMeasure& m, double t, double T) {
    std::size_t n = 0;
    for (const auto& a : m.atoms()) n += (a.time > t && a.time <= T) ? 1 : 0;
    return n;
}

std::string window_regime(double t, double T, double u, const std::string& name) {
    if (t >= u) return "after_" + name;
    if (T < u) return "before_" + name;
    return "spans_" + name;
}

void require_alive(const Scenario& s, const char* what) {
    if (!s.state.status().alive_at(s.state.t))
        throw ScenarioError("state.tau", std::string(what) + " needs a firm alive at state.t");
}

// ---------------------------------------------------------------------------
// Merton pieces, optionally with overridden atom forward values.

ForwardCurveModel merton_curve(const Scenario& s) {
    ForwardCurveModel c = merton::curve(s.merton, s.state.w);
    if (s.atom_override) {
        const double v = (*s.atom_override)[0];
        c.atom_values = [v](double, std::size_t) { return v; };
    }
    return c;
}

HjmCoefficients merton_coefficients(const Scenario& s) {
    if (s.atom_override) return HjmCoefficients::zero(1);
    return merton::coefficients(s.merton, s.state.w);
}

// Price at t < U of the maturity-T bond given W_t = w, honoring overrides.
double merton_pre_price(const Scenario& s, double w, double t, double T) {
    const auto& p = s.merton;
    double exponent = p.r * (T - t);
    if (t < p.U && p.U <= T)
        exponent += s.atom_override ? (*s.atom_override)[0] : merton::forward_atom(p, w, t);
    return std::exp(-exponent);
}

// ---------------------------------------------------------------------------

DriftReport audit_merton(const Scenario& s, double tol) {
    const auto& p = s.merton;
    const double t0 = s.state.t;
    if (t0 >= p.U)
        throw ScenarioError("state.t", "audit needs state.t < U: afterwards the curve is riskless");
    require_alive(s, "audit");
    const auto curve = merton_curve(s);
    const auto coeffs = merton_coefficients(s);
    const double atoms[] = {p.U};
    const Grid mgrid = Grid::uniform(t0, p.T_star, 0.05, atoms);
    const auto maturities = merged(std::vector<double>(mgrid.points().begin(), mgrid.points().end()),
                                   s.maturities);
    DriftReport report;
    report.tolerance = tol;
    for (int k = 0; k < 8; ++k) {
        const double t = t0 + (p.U - t0) * k / 8.0;
        report.merge(audit_at(curve, coeffs, merton::compensator(p, s.state.w, t),
                              merton::short_rate(p), t, maturities, p.T_star, tol));
    }
    return report;
}

DriftReport audit_cir(const Scenario& s, double tol) {
    const auto& p = s.cir;
    const double t0 = s.state.t;
    require_alive(s, "audit");
    const auto model = affine::cir_audit_model(p, s.state.x, 1e-4);
    const double atoms[] = {p.u1};
    const Grid mgrid = Grid::uniform(t0, s.horizon, 0.05, atoms);
    const auto maturities = merged(std::vector<double>(mgrid.points().begin(), mgrid.points().end()),
                                   s.maturities);
    std::vector<double> times;
    for (int k = 0; k < 8; ++k) times.push_back(t0 + (s.horizon - t0) * k / 8.0);
    if (p.u1 >= t0 && p.u1 < s.horizon) times = merged(times, atoms);
    DriftReport report;
    report.tolerance = tol;
    for (double t : times) {
        report.merge(audit_at(model.curve, model.coeffs, model.compensator, model.short_rate, t,
                              maturities, s.horizon, tol, {}, AtomCheck::diagonal));
    }
    return report;
}

DriftReport audit_custom(const Scenario& s, double tol) {
    require_alive(s, "audit");
    const auto times = merged(s.measure.atom_times(), s.maturities);
    const Grid grid = Grid::uniform(s.state.t, s.horizon, 0.05, times);
    return audit(custom_curve(s), HjmCoefficients::zero(1), custom_compensator(s),
                 custom_short_rate(s), grid, tol);
}

// ---------------------------------------------------------------------------

Comparison compare(std::string quantity, double time, double closed, std::span<const double> samples) {
    return Comparison{std::move(quantity), time, closed, mc::summarize(samples)};
}

SimulationResult simulate_merton(const Scenario& s) {
    const auto& p = s.merton;
    const double t0 = s.state.t;
    const double w0 = s.state.w;
    if (t0 >= p.U) throw ScenarioError("state.t", "simulate needs state.t < U");
    require_alive(s, "simulate");
    SimulationResult res;
    const double sd = std::sqrt(p.U - t0);

    for (double T : s.maturities) {
        auto payoff = [&](RngStream& st) {
            const double wU = w0 + sd * st.normal();
            const double disc = std::exp(-p.r * (T - t0));
            return (T >= p.U && wU <= p.K) ? 0.0 : disc;
        };
        const auto est = mc::mc_price(payoff, s.sim);
        res.comparisons.push_back(
            {"price", T, merton_pre_price(s, w0, t0, T), est});
    }
    auto default_at_U = [&](RngStream& st) { return w0 + sd * st.normal() <= p.K ? 1.0 : 0.0; };
    res.comparisons.push_back({"P(tau=U)", p.U, merton::atom_intensity(p, w0, t0),
                               mc::mc_price(default_at_U, s.sim)});

    // Martingale test of the discounted bond with the longest maturity.
    const double T = s.maturities.back();
    std::vector<double> checkpoints{t0};
    if (T >= p.U) {
        checkpoints.push_back(0.5 * (t0 + p.U));
        checkpoints.push_back(p.U);
    } else {
        checkpoints.push_back(0.5 * (t0 + T));
    }
    checkpoints = merged(checkpoints, std::span<const double>(&T, 1));
    mc::DiscountedPriceModel model = [&](RngStream& st, std::span<const double> cps,
                                         std::span<double> out) {
        double w = w0, prev = t0;
        bool alive = true;
        for (std::size_t j = 0; j < cps.size(); ++j) {
            const double tj = cps[j];
            if (tj > prev) w += std::sqrt(tj - prev) * st.normal();
            prev = tj;
            if (std::abs(tj - p.U) <= 1e-12) alive = w > p.K;
            double price;
            if (tj < p.U) price = merton_pre_price(s, w, tj, T);
            else price = alive ? std::exp(-p.r * (T - tj)) : 0.0;
            out[j] = price * std::exp(-p.r * tj);
        }
    };
    res.martingale = mc::martingale_drift_test(model, s.sim, checkpoints);
    return res;
}

SimulationResult simulate_blackcox(const Scenario& s) {
    const auto& p = s.blackcox;
    require_alive(s, "simulate");
    mc::SimConfig cfg = s.sim;
    cfg.horizon = s.maturities.back();
    const auto events = merged(s.maturities, std::span<const double>(&p.U, 1));
    const auto bundle = mc::simulate_brownian(cfg, s.state.w, s.state.t, events);
    const auto taus = mc::first_passage_default(bundle, {p.D0, p.DU, p.U}, cfg.seed, true);

    SimulationResult res;
    std::vector<double> ind(taus.size());
    for (double T : s.maturities) {
        for (std::size_t i = 0; i < taus.size(); ++i) ind[i] = taus[i] > T ? 1.0 : 0.0;
        res.comparisons.push_back(
            compare("P(tau>T)", T, blackcox::survival_prob(p, s.state.w, s.state.t, T), ind));
    }
    if (s.state.t < p.U && p.U <= cfg.horizon) {
        for (std::size_t i = 0; i < taus.size(); ++i) ind[i] = taus[i] == p.U ? 1.0 : 0.0;
        res.comparisons.push_back(compare("P(tau=U)", p.U,
                                          blackcox::default_prob_at_U(p, s.state.w, s.state.t), ind));
    }
    return res;
}

SimulationResult simulate_cir(const Scenario& s) {
    const auto& p = s.cir;
    if (s.state.t != 0.0) throw ScenarioError("state.t", "cir_affine simulation starts at t = 0");
    require_alive(s, "simulate");
    mc::SimConfig cfg = s.sim;
    cfg.horizon = s.maturities.back();
    const auto events = merged(s.maturities, std::span<const double>(&p.u1, 1));
    cfg.validate();
    if (!(s.state.x >= 0.0)) throw ScenarioError("state.x", "must be nonnegative");
    const mc::CirDynamics dyn{p.mu0, p.mu1, p.sigma, s.state.x};
    const Grid grid = mc::simulation_grid(cfg, 0.0, events);
    const auto h = p.hazard();

    // Paths are consumed one at a time; a stored bundle would need
    // n_paths * |grid| doubles. Streams match simulate_cir's ids.
    std::vector<double> taus(cfg.n_paths);
    const auto n = static_cast<long>(cfg.n_paths);
#pragma omp parallel
    {
        std::vector<double> path(grid.size());
#pragma omp for schedule(static)
        for (long i = 0; i < n; ++i) {
            const auto id = static_cast<std::uint64_t>(i);
            RngStream ps(cfg.seed, id);
            mc::cir_path(dyn, grid, ps, path);
            const HazardPath hp = affine::hazard_path(h, grid.points(), path);
            RngStream st(cfg.seed, cfg.n_paths + id);
            taus[static_cast<std::size_t>(i)] = mc::sample_default_doubly_stochastic(hp, st);
        }
    }

    SimulationResult res;
    const double x = s.state.x;
    auto closed_price = [&](double T) {
        const auto e = affine::cir_closed_form(p, 0.0, T);
        return std::exp(-e.A - e.B * x);
    };
    std::vector<double> ind(taus.size());
    for (double T : s.maturities) {
        for (std::size_t i = 0; i < taus.size(); ++i) ind[i] = taus[i] > T ? 1.0 : 0.0;
        res.comparisons.push_back(compare("price", T, closed_price(T), ind));
    }
    if (p.u1 <= cfg.horizon) {
        const auto before = affine::cir_classical(p, p.u1);
        const double closed = std::exp(-before.A - before.B * x) - closed_price(p.u1);
        for (std::size_t i = 0; i < taus.size(); ++i) ind[i] = taus[i] == p.u1 ? 1.0 : 0.0;
        res.comparisons.push_back(compare("P(tau=u1)", p.u1, closed, ind));
    }
    return res;
}

SimulationResult simulate_custom(const Scenario& s) {
    require_alive(s, "simulate");
    const double t0 = s.state.t;
    const auto atoms = s.measure.atom_times();
    const Grid grid = Grid::uniform(t0, s.horizon, s.sim.dt, merged(atoms, s.maturities));
    const auto spec = custom_compensator(s);
    const HazardPath hazard = hazard_path_from_compensator(spec, grid.points());
    const auto curve = custom_curve(s);
    const auto sr = custom_short_rate(s);

    mc::SimConfig cfg = s.sim;
    std::vector<double> taus(cfg.n_paths);
    for (std::size_t i = 0; i < cfg.n_paths; ++i) {
        RngStream st(cfg.seed, i);
        taus[i] = mc::sample_default_doubly_stochastic(hazard, st);
    }

    SimulationResult res;
    std::vector<double> ind(taus.size());
    for (double T : s.maturities) {
        const std::size_t k = *grid.index_of(T);
        for (std::size_t i = 0; i < taus.size(); ++i) ind[i] = taus[i] > T ? 1.0 : 0.0;
        res.comparisons.push_back(compare("P(tau>T)", T, std::exp(-hazard.right[k]), ind));
    }
    for (std::size_t a = 0; a < s.measure.size(); ++a) {
        const double u = s.measure[a].time;
        if (u <= t0 || u > s.horizon) continue;
        const std::size_t k = *grid.index_of(u);
        const double closed = std::exp(-hazard.left[k]) * -std::expm1(hazard.left[k] - hazard.right[k]);
        for (std::size_t i = 0; i < taus.size(); ++i) ind[i] = taus[i] == u ? 1.0 : 0.0;
        res.comparisons.push_back(compare("P(tau=u" + std::to_string(a + 1) + ")", u, closed, ind));
    }

    // Discounted price of the longest bond at t0, midpoints and atoms.
    const double T = s.maturities.back();
    std::vector<double> checkpoints{t0, T};
    for (double u : atoms) {
        if (u > t0 && u <= T) checkpoints.push_back(u);
    }
    checkpoints = merged(checkpoints, {});
    std::vector<double> mids;
    for (std::size_t j = 1; j < checkpoints.size(); ++j)
        mids.push_back(0.5 * (checkpoints[j - 1] + checkpoints[j]));
    checkpoints = merged(checkpoints, mids);
    std::vector<double> alive_value(checkpoints.size());
    for (std::size_t j = 0; j < checkpoints.size(); ++j) {
        alive_value[j] = bond_price(curve, DefaultStatus{}, checkpoints[j], T) /
                         numeraire(sr, checkpoints[j]);
    }
    mc::DiscountedPriceModel model = [&](RngStream& st, std::span<const double> cps,
                                         std::span<double> out) {
        const double tau = mc::sample_default_doubly_stochastic(hazard, st);
        for (std::size_t j = 0; j < cps.size(); ++j) out[j] = tau > cps[j] ? alive_value[j] : 0.0;
    };
    res.martingale = mc::martingale_drift_test(model, cfg, checkpoints);
    return res;
}

// ---------------------------------------------------------------------------
// Output helpers.

std::ofstream open_artifact(const std::filesystem::path& dir, const std::string& name) {
    std::ofstream os(dir / name, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + (dir / name).string());
    return os;
}

json comparison_json(const Comparison& c) {
    return json{{"quantity", c.quantity},   {"time", c.time},
                {"closed_form", c.closed_form}, {"mc_mean", c.mc.mean},
                {"std_error", c.mc.std_error}, {"n", c.mc.n},
                {"z_score", c.z_score()},    {"within_3se", c.within()}};
}

json martingale_json(const mc::MartingaleTestResult& m) {
    json inc = json::array();
    for (const auto& e : m.increments) {
        inc.push_back({{"t_from", e.t_from},
                       {"t_to", e.t_to},
                       {"mean_increment", e.increment.mean},
                       {"std_error", e.increment.std_error},
                       {"result", e.pass ? "PASS" : "FAIL"}});
    }
    return json{{"result", m.pass() ? "PASS" : "FAIL"}, {"increments", inc}};
}

int cmd_price(const Scenario& s, const CommandOptions& opts, std::ostream& out) {
    const auto rows = price_table(s);
    if (s.wants("prices.csv")) {
        auto os = open_artifact(opts.out_dir, "prices.csv");
        os << "T,price,regime\n";
        for (const auto& r : rows) os << fmt(r.T) << ',' << fmt(r.price) << ',' << r.regime << '\n';
    }
    out << "priced " << rows.size() << " maturities for " << to_string(s.model) << '\n';
    return exit_ok;
}

int cmd_audit(const Scenario& s, const CommandOptions& opts, std::ostream& out) {
    const double tol = opts.tolerance.value_or(s.tolerance.value_or(1e-6));
    const DriftReport report = audit_scenario(s, tol);
    json j = report;
    j["model"] = to_string(s.model);
    if (s.wants("audit.json")) {
        auto os = open_artifact(opts.out_dir, "audit.json");
        os << j.dump(2) << '\n';
    }
    out << j.dump(2) << '\n';
    return report.certified() ? exit_ok : exit_audit_violation;
}

int cmd_simulate(const Scenario& s, const CommandOptions& opts, std::ostream& out) {
    const auto res = simulate_scenario(s);
    if (s.wants("estimates.csv")) {
        std::vector<mc::NamedEstimate> rows;
        for (const auto& c : res.comparisons)
            rows.push_back({c.quantity + "@" + fmt(c.time), c.mc});
        auto os = open_artifact(opts.out_dir, "estimates.csv");
        mc::write_estimates_csv(os, rows, s.sim);
    }
    if (s.wants("comparison.csv")) {
        auto os = open_artifact(opts.out_dir, "comparison.csv");
        os << "quantity,time,closed_form,mc_mean,std_error,z_score,within_3se\n";
        for (const auto& c : res.comparisons) {
            os << c.quantity << ',' << fmt(c.time) << ',' << fmt(c.closed_form) << ','
               << fmt(c.mc.mean) << ',' << fmt(c.mc.std_error) << ',' << fmt(c.z_score()) << ','
               << (c.within() ? "true" : "false") << '\n';
        }
    }
    if (res.martingale && s.wants("martingale.csv")) {
        auto os = open_artifact(opts.out_dir, "martingale.csv");
        os << "t_from,t_to,mean_increment,std_error,result\n";
        for (const auto& e : res.martingale->increments) {
            os << fmt(e.t_from) << ',' << fmt(e.t_to) << ',' << fmt(e.increment.mean) << ','
               << fmt(e.increment.std_error) << ',' << (e.pass ? "PASS" : "FAIL") << '\n';
        }
    }
    json summary{{"model", to_string(s.model)},
                 {"config_hash", s.sim.hash()},
                 {"sim",
                  {{"n_paths", s.sim.n_paths},
                   {"dt", s.sim.dt},
                   {"seed", s.sim.seed},
                   {"horizon", s.sim.horizon}}}};
    json comps = json::array();
    for (const auto& c : res.comparisons) comps.push_back(comparison_json(c));
    summary["comparisons"] = comps;
    if (res.martingale) summary["martingale_test"] = martingale_json(*res.martingale);
    if (s.wants("simulation.json")) {
        auto os = open_artifact(opts.out_dir, "simulation.json");
        os << summary.dump(2) << '\n';
    }
    out << summary.dump(2) << '\n';
    return exit_ok;
}

int cmd_riccati(const Scenario& s, const CommandOptions& opts, std::ostream& out) {
    const auto rows = riccati_table(s);
    double max_diff = 0.0;
    for (const auto& r : rows)
        max_diff = std::max({max_diff, std::abs(r.A - r.A_closed), std::abs(r.B - r.B_closed)});
    if (s.wants("riccati.csv")) {
        auto os = open_artifact(opts.out_dir, "riccati.csv");
        os << "T,t,A,B_1,is_pre_atom_limit,A_closed,B_closed\n";
        for (const auto& r : rows) {
            os << fmt(r.T) << ',' << fmt(r.t) << ',' << fmt(r.A) << ',' << fmt(r.B) << ','
               << (r.pre_atom_limit ? 1 : 0) << ',' << fmt(r.A_closed) << ',' << fmt(r.B_closed)
               << '\n';
        }
    }
    out << "riccati rows " << rows.size() << ", max |solver - closed form| " << fmt(max_diff) << '\n';
    return exit_ok;
}

}  // namespace

double Comparison::z_score() const {
    return (mc.mean - closed_form) / std::max(mc.std_error, mc::se_floor);
}

bool Comparison::within(double n_se) const { return std::abs(z_score()) <= n_se; }

std::vector<PriceRow> price_table(const Scenario& s) {
    const double t = s.state.t;
    const auto status = s.state.status();
    std::vector<PriceRow> rows;
    for (double T : s.maturities) {
        PriceRow row{T, 0.0, ""};
        switch (s.model) {
            case ModelKind::merton:
                row.regime = window_regime(t, T, s.merton.U, "U");
                if (!status.alive_at(t)) break;
                row.price = t < s.merton.U ? merton_pre_price(s, s.state.w, t, T)
                                           : std::exp(-s.merton.r * (T - t));
                break;
            case ModelKind::blackcox:
                row.regime = window_regime(t, T, s.blackcox.U, "U");
                if (status.alive_at(t)) row.price = blackcox::survival_prob(s.blackcox, s.state.w, t, T);
                break;
            case ModelKind::cir_affine: {
                row.regime = window_regime(t, T, s.cir.u1, "u1");
                if (!status.alive_at(t)) break;
                const auto e = affine::cir_closed_form(s.cir, t, T);
                row.price = std::exp(-e.A - e.B * s.state.x);
                break;
            }
            case ModelKind::custom_curve: {
                const std::size_t n = atoms_in(s.measure, t, T);
                row.regime = n == 0 ? "no_atoms" : "atoms_in_window=" + std::to_string(n);
                row.price = bond_price(custom_curve(s), status, t, T);
                break;
            }
        }
        if (!status.alive_at(t)) row.regime = "defaulted";
        rows.push_back(row);
    }
    return rows;
}

DriftReport audit_scenario(const Scenario& s, double tolerance) {
    switch (s.model) {
        case ModelKind::merton: return audit_merton(s, tolerance);
        case ModelKind::cir_affine: return audit_cir(s, tolerance);
        case ModelKind::custom_curve: return audit_custom(s, tolerance);
        case ModelKind::blackcox: break;
    }
    throw UnsupportedOperation(
        "blackcox exposes no forward-rate coefficients; use the simulate command for its "
        "martingale and closed-form checks");
}

SimulationResult simulate_scenario(const Scenario& s) {
    switch (s.model) {
        case ModelKind::merton: return simulate_merton(s);
        case ModelKind::blackcox: return simulate_blackcox(s);
        case ModelKind::cir_affine: return simulate_cir(s);
        case ModelKind::custom_curve: return simulate_custom(s);
    }
    return {};
}

std::vector<RiccatiRow> riccati_table(const Scenario& s) {
    if (s.model != ModelKind::cir_affine)
        throw UnsupportedOperation("riccati needs a cir_affine scenario");
    const auto& p = s.cir;
    const auto ap = p.affine();
    const auto h = p.hazard();
    const auto m = p.measure();
    std::vector<RiccatiRow> rows;
    for (double T : s.maturities) {
        const double atoms[] = {p.u1};
        const Grid grid = Grid::uniform(0.0, T, s.riccati_step, atoms);
        const auto sol = affine::solve_riccati(ap, h, m, T, grid);
        const auto pts = sol.times();
        for (std::size_t k = 0; k < pts.size(); ++k) {
            const double t = pts[k];
            if (sol.has_left_limit(k)) {
                const auto c = affine::cir_branch(p, t, T, true);
                rows.push_back({T, t, sol.A_left(t), sol.B_left(t)[0], true, c.A, c.B});
            }
            const auto c = affine::cir_closed_form(p, t, T);
            rows.push_back({T, t, sol.A(t), sol.B(t)[0], false, c.A, c.B});
        }
    }
    return rows;
}

int run_command(const std::string& command, const std::filesystem::path& scenario_file,
                const CommandOptions& opts, std::ostream& out, std::ostream& err) {
    auto invalid = [&](const json& j) {
        out << j.dump(2) << '\n';
        return static_cast<int>(exit_invalid_input);
    };
    try {
        if (opts.tolerance && !(*opts.tolerance > 0.0))
            throw ScenarioError("--tolerance", "must be positive");
        const Scenario s = load_scenario(scenario_file);
        std::filesystem::create_directories(opts.out_dir);
        if (command == "price") return cmd_price(s, opts, out);
        if (command == "audit") return cmd_audit(s, opts, out);
        if (command == "simulate") return cmd_simulate(s, opts, out);
        if (command == "riccati") return cmd_riccati(s, opts, out);
        return invalid(ScenarioError("command", "unknown command '" + command + "'").to_json());
    } catch (const ScenarioError& e) {
        return invalid(e.to_json());
    } catch (const UnsupportedOperation& e) {
        out << json{{"status", "unsupported"}, {"message", e.what()}}.dump(2) << '\n';
        return exit_unsupported;
    } catch (const std::invalid_argument& e) {
        return invalid(ScenarioError("", e.what()).to_json());
    } catch (const std::domain_error& e) {
        return invalid(ScenarioError("", e.what()).to_json());
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_invalid_input;
    }
}

}  // namespace gicr
