#pragma once

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace gicr {

/// Standard normal density.
double norm_pdf(double z);

/// Standard normal distribution function, erfc based. Absolute error is
/// below 1e-15 over the whole real line.
double norm_cdf(double z);

/// log Phi(z), finite for arbitrarily negative z.
double log_norm_cdf(double z);

/// P(a*xi + b*eta <= c, eta > d) for independent standard normals xi, eta.
///
/// Evaluated as the integral of Phi((c - b y)/a) phi(y) over y in (d, inf),
/// truncated to [max(d, -8), 8] and integrated with adaptive Gauss-Legendre.
/// Pass d = -infinity for an unconstrained eta. Throws std::invalid_argument
/// if a <= 0.
double halfplane_band_prob(double a, double b, double c, double d);

/// Adaptive Gauss-Legendre quadrature of f over [lo, hi].
double integrate_gauss_legendre(const std::function<double(double)>& f,
                                double lo, double hi, double abs_tol = 1e-13);

/// Fixed composite Gauss-Legendre quadrature (panels x 16 nodes).
double integrate_gauss_legendre_fixed(const std::function<double(double)>& f,
                                      double lo, double hi, int panels);

/// Central first difference with error O(h^order), order in {2, 4, 6};
/// samples f on x +- k h for k <= order / 2.
double finite_diff(const std::function<double(double)>& f, double x, double h, int order = 2);

/// Central second difference, same stencils and orders.
double finite_diff2(const std::function<double(double)>& f, double x, double h, int order = 2);

/// Ordered time grid. Every event time registered at construction is a
/// grid point.
class Grid {
public:
    Grid() = default;

    /// Takes points as given; throws unless strictly increasing and >= 0.
    explicit Grid(std::vector<double> points);

    /// Points from start to end with spacing at most max_step. Each event in
    /// (start, end) becomes a grid point and every segment between
    /// consecutive breakpoints is divided evenly.
    static Grid uniform(double start, double end, double max_step,
                        std::span<const double> events = {});

    std::span<const double> points() const { return points_; }
    std::size_t size() const { return points_.size(); }
    double operator[](std::size_t i) const { return points_[i]; }
    double front() const { return points_.front(); }
    double back() const { return points_.back(); }

    /// Index of the point equal to t (within 1e-12), if any.
    std::optional<std::size_t> index_of(double t) const;

    bool contains(double t) const { return index_of(t).has_value(); }

private:
    std::vector<double> points_;
};

using StateVector = Eigen::VectorXd;
using VectorField = std::function<StateVector(double, const StateVector&)>;

struct JumpEvent {
    double time;
    StateVector increment;  // pre-event value minus post-event value
};

/// Right-continuous path produced by a backward solve, sampled on a grid.
struct PiecewisePath {
    std::vector<double> times;
    std::vector<StateVector> values;                     // value at times[k]
    std::vector<std::optional<StateVector>> left_limits;  // set at events

    /// Right-continuous evaluation at a grid time.
    const StateVector& at(double t) const;
    /// Left limit at t (equals the value where no event sits).
    const StateVector& left_at(double t) const;
};

class IntegrationError : public std::runtime_error {
public:
    IntegrationError(const std::string& what, double time)
        : std::runtime_error(what), time_(time) {}
    double time() const { return time_; }

private:
    double time_;
};

/// Classic RK4 integrated backward from terminal_time down to grid.front().
///
/// At every event time u the solver first reaches the right value x(u), then
/// sets the left limit x(u-) = x(u) + increment and continues from x(u-).
/// Jumps are applied algebraically; the grid must contain every event and
/// terminal_time. Throws IntegrationError on a non-finite state.
PiecewisePath rk4_backward_with_jumps(const VectorField& rhs,
                                      const StateVector& terminal,
                                      double terminal_time,
                                      std::span<const JumpEvent> jumps,
                                      const Grid& grid);

}  // namespace gicr
