#include "gicr/mc.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace gicr::mc {

void SimConfig::validate() const {
    if (n_paths < 100) throw std::invalid_argument("sim: n_paths must be >= 100");
    if (!(dt > 0.0)) throw std::invalid_argument("sim: dt must be positive");
    if (!(horizon > 0.0)) throw std::invalid_argument("sim: horizon must be positive");
}

std::string SimConfig::hash() const {
    std::uint64_t h = splitmix64(n_paths);
    h = splitmix64(h ^ std::bit_cast<std::uint64_t>(dt));
    h = splitmix64(h ^ seed);
    h = splitmix64(h ^ std::bit_cast<std::uint64_t>(horizon));
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

Estimate summarize(std::span<const double> samples) {
    Estimate e;
    e.n = samples.size();
    if (e.n == 0) return e;
    // Kahan sums in index order keep the result independent of thread count.
    double sum = 0.0, c = 0.0;
    for (double x : samples) {
        const double y = x - c;
        const double t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
    e.mean = sum / static_cast<double>(e.n);
    if (e.n < 2) return e;
    double ss = 0.0;
    c = 0.0;
    for (double x : samples) {
        const double d = x - e.mean;
        const double y = d * d - c;
        const double t = ss + y;
        c = (t - ss) - y;
        ss = t;
    }
    const double var = ss / static_cast<double>(e.n - 1);
    e.std_error = std::sqrt(var / static_cast<double>(e.n));
    return e;
}

Grid simulation_grid(const SimConfig& cfg, double t0, std::span<const double> events) {
    return Grid::uniform(t0, cfg.horizon, cfg.dt, events);
}

void brownian_path(const Grid& grid, RngStream& stream, double w0, std::span<double> out) {
    out[0] = w0;
    for (std::size_t k = 1; k < grid.size(); ++k)
        out[k] = out[k - 1] + std::sqrt(grid[k] - grid[k - 1]) * stream.normal();
}

namespace {

template <class Fill>
PathBundle make_bundle(const SimConfig& cfg, Grid grid, Fill&& fill) {
    cfg.validate();
    PathBundle b;
    b.times = std::move(grid);
    b.n_paths = cfg.n_paths;
    const std::size_t m = b.times.size();
    b.values.resize(b.n_paths * m);
    b.stream_ids.resize(b.n_paths);
    const auto n = static_cast<long>(b.n_paths);
#pragma omp parallel for schedule(static)
    for (long i = 0; i < n; ++i) {
        const auto id = static_cast<std::uint64_t>(i);
        RngStream stream(cfg.seed, id);
        b.stream_ids[static_cast<std::size_t>(i)] = id;
        fill(stream, std::span<double>(b.values.data() + static_cast<std::size_t>(i) * m, m));
    }
    return b;
}

}  // namespace

PathBundle simulate_brownian(const SimConfig& cfg, double w0, double t0,
                             std::span<const double> events) {
    Grid grid = simulation_grid(cfg, t0, events);
    return make_bundle(cfg, grid, [&](RngStream& s, std::span<double> out) {
        brownian_path(grid, s, w0, out);
    });
}

void cir_path(const CirDynamics& p, const Grid& grid, RngStream& stream, std::span<double> out) {
    out[0] = p.x0;
    for (std::size_t k = 1; k < grid.size(); ++k) {
        const double dt = grid[k] - grid[k - 1];
        const double xp = std::max(out[k - 1], 0.0);
        out[k] = out[k - 1] + (p.mu0 + p.mu1 * xp) * dt +
                 p.sigma * std::sqrt(xp) * std::sqrt(dt) * stream.normal();
    }
}

PathBundle simulate_cir(const CirDynamics& p, const SimConfig& cfg,
                        std::span<const double> events) {
    if (!(p.x0 >= 0.0)) throw std::invalid_argument("simulate_cir: x0 must be nonnegative");
    Grid grid = simulation_grid(cfg, 0.0, events);
    return make_bundle(cfg, grid, [&](RngStream& s, std::span<double> out) {
        cir_path(p, grid, s, out);
    });
}

double sample_default_doubly_stochastic(const HazardPath& hazard, RngStream& stream) {
    const double zeta = stream.exponential();
    const auto& t = hazard.times;
    constexpr double inf = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < t.size(); ++k) {
        if (hazard.right[k] < hazard.left[k] || (k > 0 && hazard.left[k] < hazard.right[k - 1]))
            throw std::invalid_argument("sample_default_doubly_stochastic: K decreases");
        if (k > 0 && hazard.left[k] >= zeta) {
            const double k0 = hazard.right[k - 1];
            const double k1 = hazard.left[k];
            const double frac = k1 > k0 ? (zeta - k0) / (k1 - k0) : 1.0;
            return t[k - 1] + frac * (t[k] - t[k - 1]);
        }
        if (hazard.right[k] >= zeta) return t[k];
    }
    return inf;
}

double first_passage_time(std::span<const double> times, std::span<const double> path,
                          const StepBarrier& barrier, RngStream& stream, bool bridge) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    if (path[0] <= barrier.at(times[0])) return times[0];
    for (std::size_t k = 1; k < times.size(); ++k) {
        const double level = barrier.at(times[k - 1]);
        const double gap0 = path[k - 1] - level;
        const double gap1 = path[k] - level;
        if (gap1 <= 0.0) {
            // Ending below the old level means the path crossed it strictly
            // before t_k, which matters when t_k is the barrier jump.
            return barrier.at(times[k]) != level ? 0.5 * (times[k - 1] + times[k]) : times[k];
        }
        if (bridge) {
            const double dt = times[k] - times[k - 1];
            const double p = std::exp(-2.0 * gap0 * gap1 / dt);
            if (stream.uniform() < p) return 0.5 * (times[k - 1] + times[k]);
        }
        if (path[k] <= barrier.at(times[k])) return times[k];
    }
    return inf;
}

std::vector<double> first_passage_default(const PathBundle& paths, const StepBarrier& barrier,
                                          std::uint64_t seed, bool bridge) {
    std::vector<double> out(paths.n_paths);
    const auto n = static_cast<long>(paths.n_paths);
    const auto times = paths.times.points();
#pragma omp parallel for schedule(static)
    for (long i = 0; i < n; ++i) {
        const auto id = static_cast<std::size_t>(i);
        RngStream stream(seed, paths.n_paths + paths.stream_ids[id]);
        out[id] = first_passage_time(times, paths.path(id), barrier, stream, bridge);
    }
    return out;
}

Estimate mc_price(const PathPayoff& payoff, const SimConfig& cfg, bool antithetic) {
    cfg.validate();
    std::vector<double> samples(cfg.n_paths);
    const auto n = static_cast<long>(cfg.n_paths);
#pragma omp parallel for schedule(static)
    for (long i = 0; i < n; ++i) {
        const auto id = static_cast<std::uint64_t>(i);
        RngStream stream(cfg.seed, id);
        double v = payoff(stream);
        if (antithetic) {
            RngStream twin(cfg.seed, id, true);
            v = 0.5 * (v + payoff(twin));
        }
        samples[static_cast<std::size_t>(i)] = v;
    }
    return summarize(samples);
}

bool MartingaleTestResult::pass() const {
    return std::all_of(increments.begin(), increments.end(),
                       [](const IncrementEstimate& e) { return e.pass; });
}

MartingaleTestResult martingale_drift_test(const DiscountedPriceModel& model, const SimConfig& cfg,
                                           std::span<const double> checkpoints) {
    cfg.validate();
    const std::size_t m = checkpoints.size();
    if (m < 2) throw std::invalid_argument("martingale_drift_test: need at least two checkpoints");
    for (std::size_t j = 1; j < m; ++j) {
        if (!(checkpoints[j] > checkpoints[j - 1]))
            throw std::invalid_argument("martingale_drift_test: checkpoints must increase");
    }
    std::vector<double> prices(cfg.n_paths * m);
    const auto n = static_cast<long>(cfg.n_paths);
#pragma omp parallel for schedule(static)
    for (long i = 0; i < n; ++i) {
        RngStream stream(cfg.seed, static_cast<std::uint64_t>(i));
        model(stream, checkpoints,
              std::span<double>(prices.data() + static_cast<std::size_t>(i) * m, m));
    }
    MartingaleTestResult result;
    std::vector<double> inc(cfg.n_paths);
    for (std::size_t j = 1; j < m; ++j) {
        for (std::size_t i = 0; i < cfg.n_paths; ++i)
            inc[i] = prices[i * m + j] - prices[i * m + j - 1];
        const Estimate e = summarize(inc);
        result.increments.push_back(
            {checkpoints[j - 1], checkpoints[j], e, std::abs(e.mean) <= 3.0 * std::max(e.std_error, se_floor)});
    }
    return result;
}

void write_estimates_csv(std::ostream& os, std::span<const NamedEstimate> rows,
                         const SimConfig& cfg) {
    const std::string hash = cfg.hash();
    os << "estimator,mean,std_error,n,config_hash\n";
    char buf[64];
    for (const auto& r : rows) {
        os << r.estimator << ',';
        std::snprintf(buf, sizeof buf, "%.12g", r.estimate.mean);
        os << buf << ',';
        std::snprintf(buf, sizeof buf, "%.12g", r.estimate.std_error);
        os << buf << ',' << r.estimate.n << ',' << hash << '\n';
    }
}

}  // namespace gicr::mc
