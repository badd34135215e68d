#include "gicr/measure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace gicr {

RiskyMeasure::RiskyMeasure(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {
    double prev = 0.0;
    for (const auto& a : atoms_) {
        if (!(a.time > prev))
            throw std::invalid_argument("RiskyMeasure: atom times must satisfy 0 < u_1 < u_2 < ...");
        if (!(a.weight > 0.0))
            throw std::invalid_argument("RiskyMeasure: atom weights must be positive");
        prev = a.time;
    }
}

long RiskyMeasure::find(double u) const {
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
        if (std::abs(atoms_[i].time - u) <= 1e-12) return static_cast<long>(i);
    }
    return -1;
}

std::vector<double> RiskyMeasure::atom_times() const {
    std::vector<double> out;
    out.reserve(atoms_.size());
    for (const auto& a : atoms_) out.push_back(a.time);
    return out;
}

namespace {

double simpson(const std::function<double(double)>& g, double lo, double hi, bool lo_inside,
               bool hi_inside, double max_step) {
    if (hi <= lo) return 0.0;
    auto n = static_cast<long>(std::ceil((hi - lo) / max_step));
    n = std::max(2L, n + (n % 2));
    const double h = (hi - lo) / static_cast<double>(n);
    const double f_lo = g(lo_inside ? std::nextafter(lo, hi) : lo);
    const double f_hi = g(hi_inside ? std::nextafter(hi, lo) : hi);
    double odd = 0.0, even = 0.0;
    for (long k = 1; k < n; ++k) {
        const double x = lo + h * static_cast<double>(k);
        (k % 2 ? odd : even) += g(x);
    }
    return h / 3.0 * (f_lo + f_hi + 4.0 * odd + 2.0 * even);
}

}  // namespace

double lebesgue_integrate(const std::function<double(double)>& g, double lo, double hi,
                          std::span<const double> breakpoints, QuadratureOptions opts) {
    if (lo > hi) throw std::invalid_argument("lebesgue_integrate: lower limit above upper");
    std::vector<double> cuts{lo};
    for (double b : breakpoints) {
        if (b > lo && b < hi) cuts.push_back(b);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.push_back(hi);
    auto is_break = [&](double x) {
        return std::any_of(breakpoints.begin(), breakpoints.end(),
                           [&](double b) { return std::abs(b - x) <= 1e-12; });
    };
    double sum = 0.0;
    for (std::size_t s = 1; s < cuts.size(); ++s) {
        sum += simpson(g, cuts[s - 1], cuts[s], is_break(cuts[s - 1]), is_break(cuts[s]),
                       opts.max_step);
    }
    return sum;
}

double nu_integrate(const RiskyMeasure& measure, const std::function<double(double)>& ac,
                    const std::function<double(std::size_t)>& atom_value, double t, double T,
                    QuadratureOptions opts) {
    if (t > T) throw std::invalid_argument("nu_integrate: t > T");
    const auto times = measure.atom_times();
    double sum = lebesgue_integrate(ac, t, T, times, opts);
    for (std::size_t i = 0; i < measure.size(); ++i) {
        const double u = measure[i].time;
        if (u > t && u <= T) sum += measure[i].weight * atom_value(i);
    }
    return sum;
}

double nu_integrate(const RiskyMeasure& measure, const std::function<double(double)>& g,
                    double t, double T, QuadratureOptions opts) {
    return nu_integrate(
        measure, g, [&](std::size_t i) { return g(measure[i].time); }, t, T, opts);
}

double compensator_accumulate(const CompensatorSpec& spec, double t, QuadratureOptions opts) {
    if (t < 0.0) throw std::invalid_argument("compensator_accumulate: t < 0");
    std::vector<double> times;
    for (const auto& j : spec.jumps) {
        if (!(j.dA >= 0.0) || !(j.intensity >= 0.0))
            throw std::invalid_argument("compensator_accumulate: negative jump in compensator");
        times.push_back(j.time);
    }
    double sum = lebesgue_integrate(
        [&](double s) {
            const double l = spec.lambda(s);
            if (l < 0.0) throw std::invalid_argument("compensator_accumulate: negative intensity");
            return l;
        },
        0.0, t, times, opts);
    for (const auto& j : spec.jumps) {
        if (j.time <= t) sum += j.jump();
    }
    return sum;
}

StructureReport validate_structure(const RiskyMeasure& measure, const CompensatorSpec& spec,
                                   double horizon) {
    StructureReport report;
    auto fmt = [](double x) {
        std::ostringstream os;
        os << x;
        return os.str();
    };
    for (const auto& j : spec.jumps) {
        if (j.dA < 0.0) report.violations.push_back("negative base jump dA at " + fmt(j.time));
        if (j.intensity < 0.0)
            report.violations.push_back("negative intensity at " + fmt(j.time));
        if (j.dA == 0.0) continue;
        const long i = measure.find(j.time);
        if (i < 0) {
            report.violations.push_back("jump at non-atom " + fmt(j.time));
            continue;
        }
        const double w = measure[static_cast<std::size_t>(i)].weight;
        if (!(j.jump() < w)) {
            report.violations.push_back("lambda*dA = " + fmt(j.jump()) + " not below weight " +
                                        fmt(w) + " at atom " + fmt(j.time));
        }
    }
    constexpr int kSamples = 1000;
    for (int k = 0; k <= kSamples; ++k) {
        const double s = horizon * k / kSamples;
        if (spec.lambda(s) < 0.0) {
            report.violations.push_back("negative intensity at " + fmt(s));
            break;
        }
    }
    for (const auto& a : measure.atoms()) {
        if (a.time > horizon + 1e-12)
            report.violations.push_back("atom beyond horizon at " + fmt(a.time));
    }
    return report;
}

}  // namespace gicr

namespace gicr {

HazardPath hazard_path_from_compensator(const CompensatorSpec& spec,
                                        std::span<const double> times) {
    HazardPath path;
    path.times.assign(times.begin(), times.end());
    path.left.resize(times.size());
    path.right.resize(times.size());
    double k = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (i > 0) k += 0.5 * (times[i] - times[i - 1]) * (spec.lambda(times[i - 1]) + spec.lambda(times[i]));
        path.left[i] = k;
        for (const auto& j : spec.jumps) {
            if (std::abs(j.time - times[i]) > 1e-12 || j.jump() == 0.0) continue;
            if (!(j.jump() < 1.0))
                k = std::numeric_limits<double>::infinity();
            else
                k += -std::log1p(-j.jump());
        }
        path.right[i] = k;
    }
    return path;
}

}  // namespace gicr
