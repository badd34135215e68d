#include "gicr/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace gicr {

using nlohmann::json;

std::string to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::merton: return "merton";
        case ModelKind::blackcox: return "blackcox";
        case ModelKind::cir_affine: return "cir_affine";
        case ModelKind::custom_curve: return "custom_curve";
    }
    return "unknown";
}

bool Scenario::wants(const std::string& artifact) const {
    return outputs.empty() ||
           std::find(outputs.begin(), outputs.end(), artifact) != outputs.end();
}

namespace {

std::string join_issues(const std::vector<ScenarioIssue>& issues) {
    std::string s = "invalid scenario:";
    for (const auto& i : issues) s += " [" + i.field + "] " + i.message + ";";
    return s;
}

// Collects problems instead of stopping at the first one.
class Reader {
public:
    std::vector<ScenarioIssue> issues;

    void fail(const std::string& field, const std::string& message) {
        issues.push_back({field, message});
    }

    const json* child(const json& obj, const std::string& key) {
        if (!obj.is_object()) return nullptr;
        auto it = obj.find(key);
        return it == obj.end() || it->is_null() ? nullptr : &*it;
    }

    std::optional<double> number(const json& obj, const std::string& key,
                                 const std::string& path) {
        const json* v = child(obj, key);
        if (!v) return std::nullopt;
        if (!v->is_number()) {
            fail(path, "expected a number");
            return std::nullopt;
        }
        const double x = v->get<double>();
        if (!std::isfinite(x)) {
            fail(path, "must be finite");
            return std::nullopt;
        }
        return x;
    }

    double number_or(const json& obj, const std::string& key, const std::string& path,
                     double fallback) {
        return number(obj, key, path).value_or(fallback);
    }

    double required(const json& obj, const std::string& key, const std::string& path) {
        const json* v = child(obj, key);
        if (!v) {
            fail(path, "required");
            return 0.0;
        }
        return number(obj, key, path).value_or(0.0);
    }

    std::optional<std::vector<double>> numbers(const json& obj, const std::string& key,
                                               const std::string& path) {
        const json* v = child(obj, key);
        if (!v) return std::nullopt;
        if (!v->is_array()) {
            fail(path, "expected an array of numbers");
            return std::nullopt;
        }
        std::vector<double> out;
        for (std::size_t i = 0; i < v->size(); ++i) {
            const json& e = (*v)[i];
            if (!e.is_number() || !std::isfinite(e.get<double>())) {
                fail(path + "[" + std::to_string(i) + "]", "expected a finite number");
                return std::nullopt;
            }
            out.push_back(e.get<double>());
        }
        return out;
    }

    // Runs a validator that signals by exception and records its message.
    template <class F>
    void check(const std::string& path, F&& f) {
        try {
            f();
        } catch (const std::exception& e) {
            fail(path, e.what());
        }
    }
};

RiskyMeasure parse_measure(Reader& rd, const json& m) {
    const json* atoms = rd.child(m, "atoms");
    if (!atoms) return RiskyMeasure{};
    if (!atoms->is_array()) {
        rd.fail("measure.atoms", "expected an array");
        return RiskyMeasure{};
    }
    std::vector<Atom> list;
    for (std::size_t i = 0; i < atoms->size(); ++i) {
        const std::string path = "measure.atoms[" + std::to_string(i) + "]";
        const json& a = (*atoms)[i];
        list.push_back({rd.required(a, "time", path + ".time"),
                        rd.required(a, "weight", path + ".weight")});
    }
    RiskyMeasure out;
    rd.check("measure.atoms", [&] { out = RiskyMeasure(list); });
    return out;
}

bool same_measure(const RiskyMeasure& a, const RiskyMeasure& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (std::abs(a[i].time - b[i].time) > 1e-12 || std::abs(a[i].weight - b[i].weight) > 1e-12)
            return false;
    }
    return true;
}

std::vector<CompensatorJump> parse_jumps(Reader& rd, const json& comp) {
    std::vector<CompensatorJump> jumps;
    const json* list = rd.child(comp, "jumps");
    if (!list) return jumps;
    if (!list->is_array()) {
        rd.fail("compensator.jumps", "expected an array");
        return jumps;
    }
    for (std::size_t i = 0; i < list->size(); ++i) {
        const std::string path = "compensator.jumps[" + std::to_string(i) + "]";
        const json& j = (*list)[i];
        const double u = rd.required(j, "u", path + ".u");
        if (rd.child(j, "kappa")) {
            // Exponent jump kappa: the conditional default probability at u is 1 - exp(-kappa).
            const double kappa = rd.required(j, "kappa", path + ".kappa");
            if (kappa < 0.0) rd.fail(path + ".kappa", "must be nonnegative");
            jumps.push_back({u, 1.0, -std::expm1(-kappa)});
        } else {
            jumps.push_back({u, rd.required(j, "dA", path + ".dA"),
                             rd.required(j, "lambda", path + ".lambda")});
        }
    }
    return jumps;
}

}  // namespace

ScenarioError::ScenarioError(std::vector<ScenarioIssue> issues)
    : std::runtime_error(join_issues(issues)), issues_(std::move(issues)) {}

json ScenarioError::to_json() const {
    json errors = json::array();
    for (const auto& i : issues_) errors.push_back({{"field", i.field}, {"message", i.message}});
    return json{{"status", "invalid"}, {"errors", errors}};
}

const std::vector<std::string>& known_artifacts() {
    static const std::vector<std::string> names{
        "prices.csv",     "audit.json",      "estimates.csv", "comparison.csv",
        "martingale.csv", "simulation.json", "riccati.csv"};
    return names;
}

Scenario parse_scenario(const json& doc) {
    Reader rd;
    Scenario s;
    if (!doc.is_object()) throw ScenarioError("", "scenario must be a JSON object");

    const json* model = rd.child(doc, "model");
    if (!model || !model->is_string()) {
        rd.fail("model", "required string");
        throw ScenarioError(rd.issues);
    }
    const std::string name = model->get<std::string>();
    if (name == "merton") s.model = ModelKind::merton;
    else if (name == "blackcox") s.model = ModelKind::blackcox;
    else if (name == "cir_affine") s.model = ModelKind::cir_affine;
    else if (name == "custom_curve") s.model = ModelKind::custom_curve;
    else {
        rd.fail("model", "unknown model '" + name + "'");
        throw ScenarioError(rd.issues);
    }

    static const json empty = json::object();
    const json* params_ptr = rd.child(doc, "params");
    if (params_ptr && !params_ptr->is_object()) rd.fail("params", "expected an object");
    const json& params = params_ptr && params_ptr->is_object() ? *params_ptr : empty;

    std::optional<RiskyMeasure> given_measure;
    if (const json* m = rd.child(doc, "measure")) given_measure = parse_measure(rd, *m);

    switch (s.model) {
        case ModelKind::merton: {
            auto& p = s.merton;
            p.K = rd.required(params, "K", "params.K");
            p.U = rd.required(params, "U", "params.U");
            p.r = rd.number_or(params, "r", "params.r", 0.0);
            p.T_star = rd.number_or(params, "T_star", "params.T_star", p.U);
            rd.check("params", [&] { p.validate(); });
            if (p.U > 0.0) s.measure = merton::measure(p);
            s.horizon = p.T_star;
            break;
        }
        case ModelKind::blackcox: {
            auto& p = s.blackcox;
            p.D0 = rd.required(params, "D0", "params.D0");
            p.DU = rd.required(params, "DU", "params.DU");
            p.U = rd.required(params, "U", "params.U");
            rd.check("params", [&] { p.validate(); });
            if (p.U > 0.0) s.measure = RiskyMeasure({{p.U, 1.0}});
            break;
        }
        case ModelKind::cir_affine: {
            auto& p = s.cir;
            p.mu0 = rd.number_or(params, "mu0", "params.mu0", p.mu0);
            p.mu1 = rd.number_or(params, "mu1", "params.mu1", p.mu1);
            p.sigma = rd.number_or(params, "sigma", "params.sigma", p.sigma);
            p.psi1 = rd.number_or(params, "psi1", "params.psi1", p.psi1);
            p.u1 = rd.number_or(params, "u1", "params.u1", p.u1);
            rd.check("params", [&] { p.validate(); });
            if (p.u1 > 0.0) s.measure = RiskyMeasure({{p.u1, 1.0}});
            break;
        }
        case ModelKind::custom_curve: {
            auto& c = s.custom;
            c.r = rd.number_or(params, "r", "params.r", 0.0);
            c.ac_rate = rd.number(params, "ac_rate", "params.ac_rate");
            c.atom_values = rd.numbers(params, "atom_values", "params.atom_values");
            const json* comp_ptr = rd.child(doc, "compensator");
            const json& comp = comp_ptr ? *comp_ptr : empty;
            c.lambda = rd.number_or(comp, "lambda", "compensator.lambda", 0.0);
            c.jumps = parse_jumps(rd, comp);
            if (!given_measure) rd.fail("measure", "required for custom_curve");
            else s.measure = *given_measure;
            break;
        }
    }
    if (given_measure && s.model != ModelKind::custom_curve && rd.issues.empty() &&
        !same_measure(*given_measure, s.measure))
        rd.fail("measure", "does not match the atoms implied by the model parameters");

    if (const json* ov = rd.child(doc, "overrides")) {
        if (s.model != ModelKind::merton && s.model != ModelKind::custom_curve)
            rd.fail("overrides", "only merton and custom_curve accept overrides");
        s.atom_override = rd.numbers(*ov, "atom_values", "overrides.atom_values");
        if (s.atom_override && s.atom_override->size() != s.measure.size())
            rd.fail("overrides.atom_values", "needs one value per atom");
    }
    if (s.custom.atom_values && s.custom.atom_values->size() != s.measure.size())
        rd.fail("params.atom_values", "needs one value per atom");

    const json* st_ptr = rd.child(doc, "state");
    const json& st = st_ptr ? *st_ptr : empty;
    s.state.t = rd.number_or(st, "t", "state.t", 0.0);
    s.state.w = rd.number_or(st, "w", "state.w", 0.0);
    s.state.x = rd.number_or(st, "x", "state.x", 0.0);
    if (auto tau = rd.number(st, "tau", "state.tau")) s.state.tau = *tau;
    bool outcome_known = rd.child(st, "tau") != nullptr;
    if (const json* d = rd.child(st, "defaulted")) {
        if (!d->is_boolean()) {
            rd.fail("state.defaulted", "expected a boolean");
        } else {
            outcome_known = true;
            if (d->get<bool>() && !rd.child(st, "tau")) s.state.tau = s.state.t;
        }
    }
    if (s.state.t < 0.0) rd.fail("state.t", "must be nonnegative");
    if (s.model == ModelKind::cir_affine && s.state.x < 0.0) rd.fail("state.x", "must be nonnegative");
    if (s.model == ModelKind::merton && s.state.t >= s.merton.U && !outcome_known)
        rd.fail("state.defaulted", "required once t >= U");
    if (s.model == ModelKind::blackcox && s.state.tau > s.state.t &&
        s.state.w <= blackcox::barrier(s.blackcox, s.state.t))
        rd.fail("state.w", "must be above the barrier on survival");

    if (auto m = rd.numbers(doc, "maturities", "maturities")) s.maturities = *m;
    if (s.maturities.empty()) rd.fail("maturities", "at least one maturity required");
    for (double T : s.maturities) {
        if (T <= s.state.t) {
            rd.fail("maturities", "every maturity must exceed state.t");
            break;
        }
    }
    std::sort(s.maturities.begin(), s.maturities.end());
    s.maturities.erase(std::unique(s.maturities.begin(), s.maturities.end()), s.maturities.end());
    if (s.model != ModelKind::merton) {
        s.horizon = s.maturities.empty() ? 1.0 : s.maturities.back();
        if (auto h = rd.number(doc, "horizon", "horizon")) s.horizon = *h;
    } else if (!s.maturities.empty() && s.maturities.back() > s.horizon + 1e-12) {
        rd.fail("maturities", "beyond params.T_star");
    }
    if (!s.maturities.empty() && s.horizon < s.maturities.back() - 1e-12)
        rd.fail("horizon", "must cover every maturity");

    const json* sim_ptr = rd.child(doc, "sim");
    const json& sim = sim_ptr ? *sim_ptr : empty;
    s.sim.dt = rd.number_or(sim, "dt", "sim.dt", s.sim.dt);
    s.sim.horizon = rd.number_or(sim, "horizon", "sim.horizon", s.horizon);
    if (const json* n = rd.child(sim, "n_paths")) {
        if (!n->is_number_integer() || n->get<long long>() < 0) rd.fail("sim.n_paths", "expected a nonnegative integer");
        else s.sim.n_paths = n->get<std::size_t>();
    }
    if (const json* seed = rd.child(sim, "seed")) {
        if (!seed->is_number_integer() || seed->get<long long>() < 0) rd.fail("sim.seed", "expected a nonnegative integer");
        else s.sim.seed = seed->get<std::uint64_t>();
    }
    rd.check("sim", [&] { s.sim.validate(); });

    s.tolerance = rd.number(doc, "tolerance", "tolerance");
    if (s.tolerance && !(*s.tolerance > 0.0)) rd.fail("tolerance", "must be positive");
    if (const json* ric = rd.child(doc, "riccati")) {
        s.riccati_step = rd.number_or(*ric, "step", "riccati.step", s.riccati_step);
        if (!(s.riccati_step > 0.0)) rd.fail("riccati.step", "must be positive");
    }

    if (const json* outs = rd.child(doc, "outputs")) {
        if (!outs->is_array()) {
            rd.fail("outputs", "expected an array of artifact names");
        } else {
            for (const auto& o : *outs) {
                const auto& known = known_artifacts();
                if (!o.is_string() || std::find(known.begin(), known.end(), o.get<std::string>()) == known.end()) {
                    rd.fail("outputs", "unknown artifact " + o.dump());
                    continue;
                }
                s.outputs.push_back(o.get<std::string>());
            }
        }
    }

    if (s.model == ModelKind::custom_curve && rd.issues.empty()) {
        const StructureReport rep = validate_structure(s.measure, custom_compensator(s), s.horizon);
        for (const auto& v : rep.violations) rd.fail("compensator", v);
        if (s.custom.lambda < 0.0) rd.fail("compensator.lambda", "must be nonnegative");
    }

    if (!rd.issues.empty()) throw ScenarioError(rd.issues);
    return s;
}

Scenario load_scenario(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw ScenarioError("", "cannot open " + file.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ScenarioError("", std::string("malformed JSON: ") + e.what());
    }
    return parse_scenario(doc);
}

ForwardCurveModel custom_curve(const Scenario& s) {
    const auto& c = s.custom;
    const double ac = c.ac_rate.value_or(c.r + c.lambda);
    std::vector<double> atoms;
    if (s.atom_override) {
        atoms = *s.atom_override;
    } else if (c.atom_values) {
        atoms = *c.atom_values;
    } else {
        for (std::size_t i = 0; i < s.measure.size(); ++i) {
            double lam_dA = 0.0;
            for (const auto& j : c.jumps) {
                if (std::abs(j.time - s.measure[i].time) <= 1e-12) lam_dA += j.jump();
            }
            atoms.push_back(atom_target_rate(s.measure[i].weight, lam_dA, 1.0));
        }
    }
    return flat_curve(ac, std::move(atoms), s.measure);
}

CompensatorSpec custom_compensator(const Scenario& s) {
    CompensatorSpec spec;
    spec.lambda = [lam = s.custom.lambda](double) { return lam; };
    spec.jumps = s.custom.jumps;
    return spec;
}

ShortRateModel custom_short_rate(const Scenario& s) {
    return ShortRateModel{[r = s.custom.r](double) { return r; }};
}

}  // namespace gicr
