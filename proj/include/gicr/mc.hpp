#pragma once

#include "gicr/measure.hpp"
#include "gicr/numerics.hpp"
#include "gicr/rng.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace gicr::mc {

struct SimConfig {
    std::size_t n_paths = 100000;
    double dt = 1e-2;
    std::uint64_t seed = 42;
    double horizon = 1.0;

    /// Throws std::invalid_argument unless n_paths >= 100, dt > 0, horizon > 0.
    void validate() const;
    /// Stable 64-bit digest of the fields, hex encoded.
    std::string hash() const;
};

/// n_paths x |times| states, row-major by path.
struct PathBundle {
    Grid times;
    std::size_t n_paths = 0;
    std::vector<double> values;
    std::vector<std::uint64_t> stream_ids;

    std::span<const double> path(std::size_t i) const {
        return {values.data() + i * times.size(), times.size()};
    }
    double at(std::size_t i, std::size_t k) const { return values[i * times.size() + k]; }
};

// Smallest standard error used in z-tests; deterministic quantities carry
// roundoff-sized SEs that would otherwise give absurd z-scores.
inline constexpr double se_floor = 1e-12;

struct Estimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t n = 0;
};

/// Mean and standard error of samples, summed in index order.
Estimate summarize(std::span<const double> samples);

/// Grid from t0 to cfg.horizon with step <= cfg.dt, containing the events.
Grid simulation_grid(const SimConfig& cfg, double t0 = 0.0, std::span<const double> events = {});

/// Brownian path on the grid from w0 into out (size = grid size).
void brownian_path(const Grid& grid, RngStream& stream, double w0, std::span<double> out);

/// Brownian paths W_{t0} = w0 with N(0, dt) increments; path i uses stream id i.
PathBundle simulate_brownian(const SimConfig& cfg, double w0 = 0.0, double t0 = 0.0,
                             std::span<const double> events = {});

struct CirDynamics {
    double mu0;
    double mu1;
    double sigma;
    double x0;
};

/// Full-truncation Euler: X_{k+1} = X_k + (mu0 + mu1 X_k^+) dt + sigma sqrt(X_k^+) dW.
void cir_path(const CirDynamics& p, const Grid& grid, RngStream& stream, std::span<double> out);

PathBundle simulate_cir(const CirDynamics& p, const SimConfig& cfg,
                        std::span<const double> events = {});

/// tau = inf{t : K_t >= zeta}, zeta ~ Exp(1) drawn from the stream. A crossing
/// caused by a jump returns the jump time exactly; a crossing inside a step
/// is located by linear interpolation of K. Returns +inf if K never reaches
/// zeta. Throws std::invalid_argument if K decreases.
double sample_default_doubly_stochastic(const HazardPath& hazard, RngStream& stream);

/// Piecewise-constant barrier with one jump: `before` on t < jump_time,
/// `after` from jump_time on.
struct StepBarrier {
    double before;
    double after;
    double jump_time;
    double at(double t) const { return t < jump_time ? before : after; }
};

/// First time a sampled path is at or below the barrier. Between grid points
/// with both ends above the barrier a crossing is imputed with probability
/// exp(-2 (W_k - D)(W_{k+1} - D) / dt) when bridge is on. Imputed crossings,
/// and crossings of the old level at the barrier jump, are dated at the
/// interval midpoint; default at the jump time itself needs W_U in (D0, DU].
double first_passage_time(std::span<const double> times, std::span<const double> path,
                          const StepBarrier& barrier, RngStream& stream, bool bridge = true);

/// Per-path default times of a bundle; bridge uniforms come from stream
/// (seed, n_paths + path id) so they never overlap the path draws.
std::vector<double> first_passage_default(const PathBundle& paths, const StepBarrier& barrier,
                                          std::uint64_t seed, bool bridge = true);

using PathPayoff = std::function<double(RngStream&)>;

/// E[payoff] over cfg.n_paths independent streams (seed, path id). With
/// antithetic on, each sample is the average of a stream and its mirror.
Estimate mc_price(const PathPayoff& payoff, const SimConfig& cfg, bool antithetic = false);

/// Per-path discounted prices P(t_j, T)/X0_{t_j} at every checkpoint.
using DiscountedPriceModel =
    std::function<void(RngStream&, std::span<const double> checkpoints, std::span<double> out)>;

struct IncrementEstimate {
    double t_from;
    double t_to;
    Estimate increment;
    bool pass;  // |mean| <= 3 max(SE, se_floor)
};

struct MartingaleTestResult {
    std::vector<IncrementEstimate> increments;
    bool pass() const;
};

/// Mean increments of discounted prices between consecutive checkpoints.
MartingaleTestResult martingale_drift_test(const DiscountedPriceModel& model, const SimConfig& cfg,
                                           std::span<const double> checkpoints);

/// Rows: estimator, mean, std_error, n, config_hash.
struct NamedEstimate {
    std::string estimator;
    Estimate estimate;
};
void write_estimates_csv(std::ostream& os, std::span<const NamedEstimate> rows,
                         const SimConfig& cfg);

}  // namespace gicr::mc
