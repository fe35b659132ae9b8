#include "nsm/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <thread>
#include <type_traits>

#include "nsm/rng.hpp"

namespace nsm {

namespace {

// Runs fn(i) for i in [0, n), contiguous chunks per thread. Each index writes
// only its own slot, so results are independent of the thread count.
template <class Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(n, 1)));
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    const std::size_t chunk = (n + threads - 1) / threads;
    for (unsigned w = 0; w < threads; ++w) {
        const std::size_t lo = w * chunk, hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &fn] {
            for (std::size_t i = lo; i < hi; ++i) fn(i);
        });
    }
}

// Path-independent parts of the exact transitions on a fixed grid.
//   Ho-Lee:      r_i = level_i + sigma W(t_i),  W_i = W_{i-1} + scale_i Z
//   Hull-White:  r_i = r_{i-1} decay_i + level_i + scale_i Z
struct StepTable {
    ModelKind kind;
    double r0 = 0.0;
    double sigma = 0.0;
    std::vector<double> level, decay, scale;

    StepTable(const HoLeeModel& m, const TimeGrid& grid)
        : kind(ModelKind::ho_lee), r0(m.r0()), sigma(m.sigma()), level(grid.size()), scale(grid.size()) {
        for (std::size_t i = 1; i < grid.size(); ++i) {
            level[i] = m.short_rate_moments(grid[i]).mean;
            scale[i] = std::sqrt(grid[i] - grid[i - 1]);
        }
    }

    StepTable(const HullWhiteModel& m, const TimeGrid& grid)
        : kind(ModelKind::hull_white), r0(m.r0()), sigma(m.sigma()), level(grid.size()), decay(grid.size()),
          scale(grid.size()) {
        for (std::size_t i = 1; i < grid.size(); ++i) {
            // Transition from r = 0 gives the shift; the slope is e^{-a dt}.
            const auto step = m.transition(grid[i - 1], 0.0, grid[i]);
            level[i] = step.mean;
            decay[i] = std::exp(-m.a() * (grid[i] - grid[i - 1]));
            scale[i] = std::sqrt(step.variance);
        }
    }

    static StepTable of(const ShortRateModel& model, const TimeGrid& grid) {
        return std::visit([&](const auto& m) { return StepTable(m, grid); }, model);
    }

    void fill(RngSpec spec, std::vector<double>& rates) const {
        CounterRng rng(spec.seed, spec.stream);
        rates.resize(level.size());
        rates[0] = r0;
        if (kind == ModelKind::ho_lee) {
            double w = 0.0;
            for (std::size_t i = 1; i < rates.size(); ++i) {
                w += scale[i] * rng.normal();
                rates[i] = level[i] + sigma * w;
            }
        } else {
            for (std::size_t i = 1; i < rates.size(); ++i) {
                rates[i] = rates[i - 1] * decay[i] + level[i] + scale[i] * rng.normal();
            }
        }
    }
};

}  // namespace

TimeGrid::TimeGrid(std::vector<double> times) : times_(std::move(times)) {
    if (times_.empty() || times_.front() != 0.0) throw std::invalid_argument("time grid must start at 0");
    for (std::size_t i = 1; i < times_.size(); ++i) {
        if (!std::isfinite(times_[i]) || !(times_[i] > times_[i - 1])) {
            throw std::invalid_argument("time grid must be finite and strictly increasing");
        }
    }
}

TimeGrid TimeGrid::uniform(double horizon, int steps_per_year) {
    if (!(std::isfinite(horizon) && horizon > 0.0) || steps_per_year <= 0) {
        throw std::invalid_argument("uniform time grid needs horizon > 0 and steps_per_year > 0");
    }
    const auto steps = std::max<long long>(1, std::llround(horizon * steps_per_year));
    std::vector<double> t(static_cast<std::size_t>(steps) + 1);
    for (long long i = 0; i <= steps; ++i) t[static_cast<std::size_t>(i)] = horizon * static_cast<double>(i) / steps;
    return TimeGrid(std::move(t));
}

ShortRatePath simulate_hl_path(const HoLeeModel& model, const TimeGrid& grid, RngSpec rng) {
    ShortRatePath path{ModelKind::ho_lee, grid, {}};
    StepTable(model, grid).fill(rng, path.rates);
    return path;
}

ShortRatePath simulate_hw_path(const HullWhiteModel& model, const TimeGrid& grid, RngSpec rng) {
    ShortRatePath path{ModelKind::hull_white, grid, {}};
    StepTable(model, grid).fill(rng, path.rates);
    return path;
}

ShortRatePath simulate_path(const ShortRateModel& model, const TimeGrid& grid, RngSpec rng) {
    return std::visit(
        [&](const auto& m) {
            if constexpr (std::is_same_v<std::decay_t<decltype(m)>, HoLeeModel>) {
                return simulate_hl_path(m, grid, rng);
            } else {
                return simulate_hw_path(m, grid, rng);
            }
        },
        model);
}

std::vector<ShortRatePath> simulate_ensemble(const ShortRateModel& model, const TimeGrid& grid, std::size_t n_paths,
                                             std::uint64_t seed, unsigned threads) {
    std::vector<ShortRatePath> out(n_paths, ShortRatePath{kind_of(model), grid, {}});
    const auto table = StepTable::of(model, grid);
    parallel_for(n_paths, threads, [&](std::size_t i) { table.fill({seed, i}, out[i].rates); });
    return out;
}

std::vector<CurveInBasis> evolve_curve_on_path(const ShortRateModel& model, const ShortRatePath& path) {
    if (path.kind != kind_of(model)) {
        throw std::invalid_argument("path was simulated under " + std::string(model_kind_name(path.kind)) +
                                    ", model is " + std::string(model_kind_name(kind_of(model))));
    }
    if (path.rates.size() != path.grid.size()) throw std::invalid_argument("path rates and grid differ in length");
    if (path.rates.front() != r0(model)) throw std::invalid_argument("path does not start at the model's r0");
    std::vector<CurveInBasis> curves;
    curves.reserve(path.rates.size());
    for (std::size_t i = 0; i < path.rates.size(); ++i) curves.push_back(forward_curve(model, path.grid[i], path.rates[i]));
    return curves;
}

McEstimate mc_bond_price(const ShortRateModel& model, double T, std::size_t n_paths, int steps_per_year,
                         std::uint64_t seed, unsigned threads) {
    if (!(T > 0.0)) throw std::invalid_argument("bond maturity must be > 0");
    if (n_paths < 100) throw std::invalid_argument("need at least 100 paths");
    if (steps_per_year <= 0) throw std::invalid_argument("degenerate time grid: steps_per_year must be > 0");
    const auto grid = TimeGrid::uniform(T, steps_per_year);

    std::vector<double> discount(n_paths);
    const auto table = StepTable::of(model, grid);
    parallel_for(n_paths, threads, [&](std::size_t i) {
        std::vector<double> rates;
        table.fill({seed, i}, rates);
        double integral = 0.0;
        for (std::size_t k = 1; k < grid.size(); ++k) {
            integral += 0.5 * (rates[k - 1] + rates[k]) * (grid[k] - grid[k - 1]);
        }
        discount[i] = std::exp(-integral);
    });

    // Fixed-order two-pass reduction.
    double sum = 0.0;
    for (double d : discount) sum += d;
    const double mean = sum / static_cast<double>(n_paths);
    double ss = 0.0;
    for (double d : discount) ss += (d - mean) * (d - mean);
    const double variance = ss / static_cast<double>(n_paths - 1);
    return {mean, std::sqrt(variance / static_cast<double>(n_paths)), n_paths, seed};
}

}  // namespace nsm
