#include "gicr/noarb.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gicr {

HjmCoefficients HjmCoefficients::zero(std::size_t n) {
    HjmCoefficients c;
    c.dim = n;
    c.b_ac = [n](double, double) { return Eigen::VectorXd::Zero(static_cast<long>(n)).eval(); };
    c.b_atom = [n](double, std::size_t) {
        return Eigen::VectorXd::Zero(static_cast<long>(n)).eval();
    };
    return c;
}

bool DriftReport::certified() const {
    return max_ac_residual <= tolerance && max_atom_residual <= tolerance &&
           max_short_rate_residual <= tolerance && structural_violations.empty();
}

void DriftReport::merge(const DriftReport& other) {
    max_ac_residual = std::max(max_ac_residual, other.max_ac_residual);
    max_atom_residual = std::max(max_atom_residual, other.max_atom_residual);
    max_short_rate_residual = std::max(max_short_rate_residual, other.max_short_rate_residual);
    for (const auto& v : other.structural_violations) {
        if (std::find(structural_violations.begin(), structural_violations.end(), v) ==
            structural_violations.end())
            structural_violations.push_back(v);
    }
}

void to_json(nlohmann::json& j, const DriftReport& report) {
    j = nlohmann::json{{"max_ac_residual", report.max_ac_residual},
                       {"max_atom_residual", report.max_atom_residual},
                       {"max_short_rate_residual", report.max_short_rate_residual},
                       {"structural_violations", report.structural_violations},
                       {"tolerance", report.tolerance},
                       {"certified", report.certified()}};
}

BarCoefficients bar_coefficients(const HjmCoefficients& coeffs, const RiskyMeasure& measure,
                                 double t, double T, QuadratureOptions opts) {
    BarCoefficients out;
    out.a_bar = nu_integrate(
        measure, [&](double u) { return coeffs.a_ac(t, u); },
        [&](std::size_t i) { return coeffs.a_atom(t, i); }, t, T, opts);
    out.b_bar.resize(static_cast<long>(coeffs.dim));
    for (long k = 0; k < static_cast<long>(coeffs.dim); ++k) {
        out.b_bar[k] = nu_integrate(
            measure, [&](double u) { return coeffs.b_ac(t, u)[k]; },
            [&](std::size_t i) { return coeffs.b_atom(t, i)[k]; }, t, T, opts);
    }
    return out;
}

double hjm_residual(const HjmCoefficients& coeffs, const RiskyMeasure& measure, double t,
                    double T, QuadratureOptions opts) {
    const auto bar = bar_coefficients(coeffs, measure, t, T, opts);
    return std::abs(bar.a_bar - 0.5 * bar.b_bar.squaredNorm());
}

double atom_target_rate(double w, double lambda_u, double dA) {
    const double jump = lambda_u * dA;
    if (!(jump >= 0.0) || !(jump < w))
        throw std::domain_error("atom_target_rate: requires 0 <= lambda*dA < w");
    return std::log(w / (w - jump));
}

double h_prime(const CompensatorSpec& spec, const RiskyMeasure& measure, double t,
               QuadratureOptions opts) {
    std::vector<double> times;
    for (const auto& j : spec.jumps) times.push_back(j.time);
    double sum = lebesgue_integrate(spec.lambda, 0.0, t, times, opts);
    for (const auto& j : spec.jumps) {
        if (j.time > t || j.jump() == 0.0) continue;
        const long i = measure.find(j.time);
        if (i < 0) throw std::invalid_argument("h_prime: compensator jump off the atoms");
        sum += atom_target_rate(measure[static_cast<std::size_t>(i)].weight, j.intensity, j.dA);
    }
    return sum;
}

namespace {

const CompensatorJump* jump_at(const CompensatorSpec& spec, double u) {
    for (const auto& j : spec.jumps) {
        if (std::abs(j.time - u) <= 1e-12) return &j;
    }
    return nullptr;
}

// Pointwise conditions at one evaluation time against the given maturities.
void check_time(DriftReport& report, const ForwardCurveModel& curve,
                const HjmCoefficients& coeffs, const CompensatorSpec& spec,
                const ShortRateModel& short_rate, double t, std::span<const double> maturities,
                double horizon, QuadratureOptions opts, AtomCheck atom_check) {
    const RiskyMeasure& measure = curve.measure;
    if (t < horizon) {
        const double res = std::abs(curve.ac_part(t, t) - short_rate.r(t) - spec.lambda(t));
        report.max_short_rate_residual = std::max(report.max_short_rate_residual, res);
    }
    for (std::size_t i = 0; i < measure.size(); ++i) {
        const double u = measure[i].time;
        if (u > horizon) continue;
        double eval_time = t;
        if (atom_check == AtomCheck::after_t) {
            if (u <= t) continue;
        } else {
            if (std::abs(u - t) > 1e-12) continue;
            eval_time = std::nextafter(u, 0.0);
        }
        const auto* jump = jump_at(spec, u);
        const double lam_dA = jump ? jump->jump() : 0.0;
        if (!(lam_dA >= 0.0 && lam_dA < measure[i].weight)) continue;  // structural
        const double target = atom_target_rate(measure[i].weight, lam_dA, 1.0);
        report.max_atom_residual = std::max(
            report.max_atom_residual, std::abs(curve.atom_values(eval_time, i) - target));
    }
    for (double T : maturities) {
        if (T <= t) continue;
        report.max_ac_residual =
            std::max(report.max_ac_residual, hjm_residual(coeffs, measure, t, T, opts));
    }
}

}  // namespace

DriftReport audit_at(const ForwardCurveModel& curve, const HjmCoefficients& coeffs,
                     const CompensatorSpec& spec, const ShortRateModel& short_rate, double t,
                     std::span<const double> maturities, double horizon, double tolerance,
                     QuadratureOptions opts, AtomCheck atom_check) {
    DriftReport report;
    report.tolerance = tolerance;
    report.structural_violations = validate_structure(curve.measure, spec, horizon).violations;
    check_time(report, curve, coeffs, spec, short_rate, t, maturities, horizon, opts, atom_check);
    return report;
}

DriftReport audit(const ForwardCurveModel& curve, const HjmCoefficients& coeffs,
                  const CompensatorSpec& spec, const ShortRateModel& short_rate,
                  const Grid& grid, double tolerance, QuadratureOptions opts) {
    DriftReport report;
    report.tolerance = tolerance;
    const RiskyMeasure& measure = curve.measure;
    const double horizon = grid.back();
    report.structural_violations = validate_structure(measure, spec, horizon).violations;

    const auto pts = grid.points();
    for (std::size_t k = 0; k < pts.size(); ++k) {
        check_time(report, curve, coeffs, spec, short_rate, pts[k], pts.subspan(k + 1), horizon,
                   opts, AtomCheck::after_t);
    }

    // Integrated form at the horizon; atom terms enter at the last grid time before u_i.
    if (report.structural_violations.empty()) {
        double lhs = lebesgue_integrate([&](double s) { return curve.ac_part(s, s); }, 0.0,
                                        horizon, measure.atom_times(), opts);
        for (std::size_t i = 0; i < measure.size(); ++i) {
            const double u = measure[i].time;
            if (u > horizon) continue;
            auto it = std::lower_bound(pts.begin(), pts.end(), u - 1e-12);
            if (it == pts.begin()) continue;
            lhs += curve.atom_values(*(it - 1), i);
        }
        const double rhs = lebesgue_integrate(short_rate.r, 0.0, horizon, {}, opts) +
                           h_prime(spec, measure, horizon, opts);
        report.max_short_rate_residual =
            std::max(report.max_short_rate_residual, std::abs(lhs - rhs));
    }
    return report;
}

}  // namespace gicr
