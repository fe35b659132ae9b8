#pragma once

// Exact-in-distribution simulation of the short rate under Q.
//
// Both models have Gaussian transitions, so paths are sampled without
// discretisation bias:
//
//   Ho-Lee:      r(t_{i+1}) = r(t_i) + m(t_{i+1}) - m(t_i) + sigma sqrt(dt) Z
//   Hull-White:  r(t_{i+1}) = r(t_i) e^{-a dt} + alpha(t_{i+1}) - alpha(t_i) e^{-a dt}
//                             + sigma sqrt((1 - e^{-2a dt}) / (2a)) Z
//
// Path i of an ensemble with seed s uses CounterRng(s, i), so ensembles are
// identical however the paths are distributed across threads.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "nsm/curves.hpp"
#include "nsm/models.hpp"

namespace nsm {

inline constexpr int kDefaultStepsPerYear = 100;

// Strictly increasing times in years, starting at 0.
class TimeGrid {
   public:
    explicit TimeGrid(std::vector<double> times);

    // round(horizon * steps_per_year) equal steps on [0, horizon] (at least one).
    static TimeGrid uniform(double horizon, int steps_per_year);

    const std::vector<double>& times() const { return times_; }
    std::size_t size() const { return times_.size(); }
    double operator[](std::size_t i) const { return times_[i]; }
    double horizon() const { return times_.back(); }

    friend bool operator==(const TimeGrid&, const TimeGrid&) = default;

   private:
    std::vector<double> times_;
};

struct RngSpec {
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
};

struct ShortRatePath {
    ModelKind kind;
    TimeGrid grid;
    std::vector<double> rates;
};

ShortRatePath simulate_hl_path(const HoLeeModel& model, const TimeGrid& grid, RngSpec rng);
ShortRatePath simulate_hw_path(const HullWhiteModel& model, const TimeGrid& grid, RngSpec rng);
ShortRatePath simulate_path(const ShortRateModel& model, const TimeGrid& grid, RngSpec rng);

// Paths 0..n_paths-1 with streams equal to their index. threads == 0 picks
// the hardware concurrency; the result does not depend on it.
std::vector<ShortRatePath> simulate_ensemble(const ShortRateModel& model, const TimeGrid& grid, std::size_t n_paths,
                                             std::uint64_t seed, unsigned threads = 0);

// Closed-form forward curve at every grid time, using the simulated r(t).
std::vector<CurveInBasis> evolve_curve_on_path(const ShortRateModel& model, const ShortRatePath& path);

struct McEstimate {
    double estimate = 0.0;
    double std_error = 0.0;
    std::size_t n_paths = 0;
    std::uint64_t seed = 0;
};

// E_Q[exp(-int_0^T r dt)] with the integral taken by the trapezoidal rule on
// a uniform grid of steps_per_year.
McEstimate mc_bond_price(const ShortRateModel& model, double T, std::size_t n_paths,
                         int steps_per_year = kDefaultStepsPerYear, std::uint64_t seed = 0, unsigned threads = 0);

}  // namespace nsm
