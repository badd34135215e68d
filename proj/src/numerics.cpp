#include "gicr/numerics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace gicr {

namespace {

constexpr double kInvSqrt2Pi = 0.39894228040143267794;
constexpr int kGaussOrder = 16;

struct GaussRule {
    std::array<double, kGaussOrder> nodes{};
    std::array<double, kGaussOrder> weights{};
};

// Legendre nodes by Newton iteration on P_n.
GaussRule make_gauss_rule() {
    GaussRule rule;
    const int n = kGaussOrder;
    for (int i = 0; i < n; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        rule.nodes[i] = x;
        rule.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return rule;
}

const GaussRule& gauss_rule() {
    static const GaussRule rule = make_gauss_rule();
    return rule;
}

double gauss_panel(const std::function<double(double)>& f, double lo, double hi) {
    const auto& rule = gauss_rule();
    const double half = 0.5 * (hi - lo);
    const double mid = 0.5 * (hi + lo);
    double sum = 0.0;
    for (int i = 0; i < kGaussOrder; ++i) sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
    return half * sum;
}

double adaptive(const std::function<double(double)>& f, double lo, double hi,
                double whole, double tol, int depth) {
    const double mid = 0.5 * (lo + hi);
    const double left = gauss_panel(f, lo, mid);
    const double right = gauss_panel(f, mid, hi);
    if (depth >= 40 || std::abs(left + right - whole) <= tol) return left + right;
    return adaptive(f, lo, mid, left, 0.5 * tol, depth + 1) +
           adaptive(f, mid, hi, right, 0.5 * tol, depth + 1);
}

}  // namespace

double norm_pdf(double z) { return kInvSqrt2Pi * std::exp(-0.5 * z * z); }

double norm_cdf(double z) { return 0.5 * std::erfc(-z * std::numbers::sqrt2 * 0.5); }

double log_norm_cdf(double z) {
    // log1p keeps full relative accuracy when Phi(z) is close to 1.
    if (z > 0.0) return std::log1p(-norm_cdf(-z));
    if (z > -30.0) return std::log(norm_cdf(z));
    // Mills-ratio asymptotics: Phi(z) ~ phi(z)/(-z) * (1 - 1/z^2 + 3/z^4 - 15/z^6)
    const double z2 = z * z;
    const double series = 1.0 - 1.0 / z2 + 3.0 / (z2 * z2) - 15.0 / (z2 * z2 * z2);
    return -0.5 * z2 - std::log(-z) + std::log(kInvSqrt2Pi) + std::log(series);
}

double integrate_gauss_legendre(const std::function<double(double)>& f, double lo,
                                double hi, double abs_tol) {
    if (hi <= lo) return 0.0;
    return adaptive(f, lo, hi, gauss_panel(f, lo, hi), abs_tol, 0);
}

double integrate_gauss_legendre_fixed(const std::function<double(double)>& f,
                                      double lo, double hi, int panels) {
    if (hi <= lo) return 0.0;
    const double h = (hi - lo) / panels;
    double sum = 0.0;
    for (int k = 0; k < panels; ++k) sum += gauss_panel(f, lo + k * h, lo + (k + 1) * h);
    return sum;
}

double halfplane_band_prob(double a, double b, double c, double d) {
    if (!(a > 0.0)) throw std::invalid_argument("halfplane_band_prob: a must be positive");
    constexpr double kCut = 8.0;
    const double lo = std::max(d, -kCut);
    if (lo >= kCut) return 0.0;
    auto integrand = [&](double y) { return norm_cdf((c - b * y) / a) * norm_pdf(y); };
    // Split at the kink of Phi((c - b y)/a) so panels see smooth data.
    double split = std::numeric_limits<double>::quiet_NaN();
    if (b != 0.0) split = c / b;
    if (std::isfinite(split) && split > lo && split < kCut) {
        return integrate_gauss_legendre(integrand, lo, split, 5e-14) +
               integrate_gauss_legendre(integrand, split, kCut, 5e-14);
    }
    return integrate_gauss_legendre(integrand, lo, kCut, 1e-13);
}

namespace {

// Central stencil weights for offsets 1..order/2; the second derivative
// also has a centre weight.
struct Stencil {
    double centre;
    std::array<double, 3> w;
    double denom;
};

Stencil stencil(int derivative, int order) {
    if (derivative == 1) {
        switch (order) {
            case 2: return {0.0, {1.0, 0.0, 0.0}, 2.0};
            case 4: return {0.0, {8.0, -1.0, 0.0}, 12.0};
            case 6: return {0.0, {45.0, -9.0, 1.0}, 60.0};
        }
    } else {
        switch (order) {
            case 2: return {-2.0, {1.0, 0.0, 0.0}, 1.0};
            case 4: return {-30.0, {16.0, -1.0, 0.0}, 12.0};
            case 6: return {-490.0, {270.0, -27.0, 2.0}, 180.0};
        }
    }
    throw std::invalid_argument("finite difference order must be 2, 4 or 6");
}

}  // namespace

double finite_diff(const std::function<double(double)>& f, double x, double h, int order) {
    const Stencil s = stencil(1, order);
    double sum = 0.0;
    for (int k = order / 2; k >= 1; --k) sum += s.w[k - 1] * (f(x + k * h) - f(x - k * h));
    return sum / (s.denom * h);
}

double finite_diff2(const std::function<double(double)>& f, double x, double h, int order) {
    const Stencil s = stencil(2, order);
    double sum = s.centre * f(x);
    for (int k = order / 2; k >= 1; --k) sum += s.w[k - 1] * (f(x + k * h) + f(x - k * h));
    return sum / (s.denom * h * h);
}

// ---------------------------------------------------------------------------

Grid::Grid(std::vector<double> points) : points_(std::move(points)) {
    if (points_.empty()) throw std::invalid_argument("Grid: no points");
    if (points_.front() < 0.0) throw std::invalid_argument("Grid: negative time");
    for (std::size_t i = 1; i < points_.size(); ++i) {
        if (!(points_[i] > points_[i - 1]))
            throw std::invalid_argument("Grid: points must be strictly increasing");
    }
}

Grid Grid::uniform(double start, double end, double max_step,
                   std::span<const double> events) {
    if (!(end >= start)) throw std::invalid_argument("Grid::uniform: end < start");
    if (!(max_step > 0.0)) throw std::invalid_argument("Grid::uniform: step must be positive");
    std::vector<double> breaks{start};
    std::vector<double> sorted(events.begin(), events.end());
    std::sort(sorted.begin(), sorted.end());
    for (double e : sorted) {
        if (e > start + 1e-12 && e < end - 1e-12 && e - breaks.back() > 1e-12) breaks.push_back(e);
    }
    if (end > start) breaks.push_back(end);

    std::vector<double> pts{start};
    for (std::size_t s = 1; s < breaks.size(); ++s) {
        const double lo = breaks[s - 1];
        const double hi = breaks[s];
        const auto n = static_cast<long>(std::ceil((hi - lo) / max_step - 1e-9));
        const long steps = std::max(1L, n);
        for (long k = 1; k < steps; ++k) pts.push_back(lo + (hi - lo) * k / steps);
        pts.push_back(hi);
    }
    return Grid(std::move(pts));
}

std::optional<std::size_t> Grid::index_of(double t) const {
    auto it = std::lower_bound(points_.begin(), points_.end(), t - 1e-12);
    if (it != points_.end() && std::abs(*it - t) <= 1e-12)
        return static_cast<std::size_t>(it - points_.begin());
    return std::nullopt;
}

// ---------------------------------------------------------------------------

const StateVector& PiecewisePath::at(double t) const {
    for (std::size_t k = 0; k < times.size(); ++k) {
        if (std::abs(times[k] - t) <= 1e-12) return values[k];
    }
    throw std::out_of_range("PiecewisePath::at: time not on grid");
}

const StateVector& PiecewisePath::left_at(double t) const {
    for (std::size_t k = 0; k < times.size(); ++k) {
        if (std::abs(times[k] - t) <= 1e-12) return left_limits[k] ? *left_limits[k] : values[k];
    }
    throw std::out_of_range("PiecewisePath::left_at: time not on grid");
}

PiecewisePath rk4_backward_with_jumps(const VectorField& rhs, const StateVector& terminal,
                                      double terminal_time, std::span<const JumpEvent> jumps,
                                      const Grid& grid) {
    const auto last = grid.index_of(terminal_time);
    if (!last) throw std::invalid_argument("rk4_backward_with_jumps: terminal time not on grid");
    for (const auto& j : jumps) {
        if (j.time <= terminal_time + 1e-12 && j.time >= grid.front() - 1e-12 &&
            !grid.contains(j.time))
            throw std::invalid_argument("rk4_backward_with_jumps: event time " +
                                        std::to_string(j.time) + " not on grid");
    }

    const std::size_t n = *last + 1;
    PiecewisePath path;
    path.times.assign(grid.points().begin(), grid.points().begin() + static_cast<long>(n));
    path.values.resize(n);
    path.left_limits.resize(n);

    auto apply_jumps = [&](std::size_t k, const StateVector& right) {
        StateVector left = right;
        bool any = false;
        for (const auto& j : jumps) {
            if (std::abs(j.time - path.times[k]) <= 1e-12) {
                left += j.increment;
                any = true;
            }
        }
        if (any) path.left_limits[k] = left;
        return left;
    };

    StateVector x = terminal;
    path.values[n - 1] = x;
    x = apply_jumps(n - 1, x);
    for (std::size_t k = n - 1; k > 0; --k) {
        const double t1 = path.times[k];
        const double t0 = path.times[k - 1];
        const double h = t0 - t1;  // negative
        const StateVector k1 = rhs(t1, x);
        const StateVector k2 = rhs(t1 + 0.5 * h, x + 0.5 * h * k1);
        const StateVector k3 = rhs(t1 + 0.5 * h, x + 0.5 * h * k2);
        const StateVector k4 = rhs(t0, x + h * k3);
        x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!x.allFinite())
            throw IntegrationError("rk4_backward_with_jumps: non-finite state at t=" +
                                       std::to_string(t0), t0);
        path.values[k - 1] = x;
        x = apply_jumps(k - 1, x);
    }
    return path;
}

}  // namespace gicr
