#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "epiplan/gamma.hpp"

namespace epiplan {

/// Per-region disease parameters. latent_days is the lag between infection and
/// infectiousness; sigma is the last day lag (past latency) still counted as
/// hospitalized, so sigma - tau approximates the length of hospital stay.
struct RegionParams {
    double alpha = 0.0;   // case fatality rate
    int latent_days = 6;  // d
    int sigma = 11;
    GammaKernel kernel;

    void validate() const {
        if (alpha < 0.0 || alpha > 1.0)
            throw std::invalid_argument("RegionParams: alpha must be in [0, 1]");
        if (latent_days < 0) throw std::invalid_argument("RegionParams: latent_days must be >= 0");
        if (sigma < 1) throw std::invalid_argument("RegionParams: sigma must be >= 1");
        if (kernel.max_lag < 1) throw std::invalid_argument("RegionParams: kernel not built");
        if (sigma > kernel.max_lag)
            throw std::invalid_argument("RegionParams: sigma exceeds kernel max_lag");
    }
};

/// Cross-region transmission rates; beta(i, r) sends infections from region i
/// into region r. Off-diagonal zeros decouple the regions.
struct CouplingMatrix {
    int regions = 0;
    std::vector<double> beta;  // row-major regions x regions

    static CouplingMatrix diagonal(const std::vector<double>& self_rates) {
        CouplingMatrix m;
        m.regions = static_cast<int>(self_rates.size());
        m.beta.assign(static_cast<size_t>(m.regions) * self_rates.size(), 0.0);
        for (int i = 0; i < m.regions; ++i) m.beta[static_cast<size_t>(i) * self_rates.size() + i] = self_rates[static_cast<size_t>(i)];
        return m;
    }

    double at(int from, int to) const {
        return beta[static_cast<size_t>(from) * static_cast<size_t>(regions) + static_cast<size_t>(to)];
    }

    void validate() const {
        if (regions < 1) throw std::invalid_argument("CouplingMatrix: need at least one region");
        if (beta.size() != static_cast<size_t>(regions) * static_cast<size_t>(regions))
            throw std::invalid_argument("CouplingMatrix: dimension mismatch");
        for (double b : beta)
            if (b < 0.0) throw std::invalid_argument("CouplingMatrix: negative transmission rate");
    }
};

/// Piecewise-constant integer isolation time tau(t). Interval j spans
/// (breakpoints[j], breakpoints[j+1]]; evaluation outside the covered range
/// throws rather than extrapolating.
struct ControlSchedule {
    std::vector<int> breakpoints;  // p+1 strictly increasing day indices
    std::vector<int> taus;         // p values
    int tau_min = 1;
    int tau_max = 1;

    ControlSchedule() = default;
    ControlSchedule(std::vector<int> bp, std::vector<int> values, int lo, int hi)
        : breakpoints(std::move(bp)), taus(std::move(values)), tau_min(lo), tau_max(hi) {
        validate();
    }

    void validate() const {
        if (taus.empty() || breakpoints.size() != taus.size() + 1)
            throw std::invalid_argument("ControlSchedule: need p+1 breakpoints for p values");
        for (size_t j = 1; j < breakpoints.size(); ++j)
            if (breakpoints[j] <= breakpoints[j - 1])
                throw std::invalid_argument("ControlSchedule: breakpoints must be strictly increasing");
        if (tau_min < 1 || tau_max < tau_min)
            throw std::invalid_argument("ControlSchedule: need 1 <= tau_min <= tau_max");
        for (int v : taus)
            if (v < tau_min || v > tau_max)
                throw std::invalid_argument("ControlSchedule: tau value outside [tau_min, tau_max]");
    }

    int first_day() const { return breakpoints.front() + 1; }
    int last_day() const { return breakpoints.back(); }

    int at(int t) const {
        if (t < first_day() || t > last_day())
            throw std::out_of_range("ControlSchedule: day " + std::to_string(t) + " outside covered range");
        for (size_t j = 1; j < breakpoints.size(); ++j)
            if (t <= breakpoints[j]) return taus[j - 1];
        throw std::out_of_range("ControlSchedule: unreachable");
    }
};

/// How the days at and before day 0 are seeded.
///   constant_history: x(t) = x0 for every t <= 0
///   pulse:            x(0) = x0, zero earlier
///   window:           x(t) = x0 on the last window_days days ending at 0, zero earlier
enum class SeedConvention : std::uint8_t { constant_history, pulse, window };

inline const char* to_string(SeedConvention c) {
    switch (c) {
        case SeedConvention::constant_history: return "constant";
        case SeedConvention::pulse: return "pulse";
        case SeedConvention::window: return "window";
    }
    return "?";
}

inline SeedConvention seed_convention_from_string(const std::string& s) {
    if (s == "constant") return SeedConvention::constant_history;
    if (s == "pulse") return SeedConvention::pulse;
    if (s == "window") return SeedConvention::window;
    throw std::invalid_argument("unknown seed convention '" + s + "' (constant|pulse|window)");
}

/// Daily new-case series on a dense day grid [floor_day, last_day], including
/// the seeded prehistory at days <= 0.
class Trajectory {
  public:
    Trajectory() = default;
    Trajectory(int region, int floor_day, int last_day, SeedConvention seed)
        : region_(region), floor_(floor_day), seed_(seed),
          values_(static_cast<size_t>(last_day - floor_day + 1), 0.0) {
        if (last_day < floor_day) throw std::invalid_argument("Trajectory: empty day range");
    }

    int region() const { return region_; }
    int first_day() const { return floor_; }
    int last_day() const { return floor_ + static_cast<int>(values_.size()) - 1; }
    SeedConvention seed() const { return seed_; }

    double at(int t) const {
        if (t < first_day() || t > last_day())
            throw std::out_of_range("Trajectory: day " + std::to_string(t) + " outside [" +
                                    std::to_string(first_day()) + ", " + std::to_string(last_day()) + "]");
        return values_[static_cast<size_t>(t - floor_)];
    }
    void set(int t, double v) {
        if (v < 0.0) throw std::invalid_argument("Trajectory: negative case count");
        values_[static_cast<size_t>(t - floor_)] = v;
    }

  private:
    int region_ = 0;
    int floor_ = 0;
    SeedConvention seed_ = SeedConvention::constant_history;
    std::vector<double> values_;
};

/// Seed the prehistory days [floor_day, 0] of a fresh trajectory.
/// window_days < 0 selects the default window of latent_days + 2.
inline Trajectory make_seeded_trajectory(int region, int floor_day, int last_day, double x0,
                                         SeedConvention seed, int latent_days, int window_days = -1) {
    if (x0 < 0.0) throw std::invalid_argument("seed: x0 must be nonnegative");
    if (floor_day > 0) throw std::invalid_argument("seed: prehistory must reach day 0");
    Trajectory traj(region, floor_day, last_day, seed);
    int lo = floor_day;
    if (seed == SeedConvention::pulse) {
        lo = 0;
    } else if (seed == SeedConvention::window) {
        int w = window_days >= 0 ? window_days : latent_days + 2;
        if (w < 1) throw std::invalid_argument("seed: window_days must be >= 1");
        lo = std::max(floor_day, 1 - w);
    }
    for (int t = lo; t <= 0; ++t) traj.set(t, x0);
    return traj;
}

/// Nondecreasing bed capacity: base plus every tranche with arrival day <= t.
struct BedPlan {
    int region = 0;
    double base = 0.0;
    std::vector<int> tranche_days;
    std::vector<double> tranche_sizes;

    void validate() const {
        if (base < 0.0) throw std::invalid_argument("BedPlan: negative base capacity");
        if (tranche_days.size() != tranche_sizes.size())
            throw std::invalid_argument("BedPlan: tranche day/size length mismatch");
        for (double s : tranche_sizes)
            if (s < 0.0) throw std::invalid_argument("BedPlan: negative tranche size");
        for (size_t i = 1; i < tranche_days.size(); ++i)
            if (tranche_days[i] <= tranche_days[i - 1])
                throw std::invalid_argument("BedPlan: tranche days must be strictly increasing");
    }

    double at(int t) const {
        double b = base;
        for (size_t i = 0; i < tranche_days.size(); ++i)
            if (tranche_days[i] <= t) b += tranche_sizes[i];
        return b;
    }
};

/// Linear cost model and daily budget for the cost-constrained problem.
struct CostModel {
    double per_new_bed = 0.0;      // kappa_B
    double per_patient_day = 0.0;  // kappa_S
    double per_new_case = 0.0;     // kappa_I
    std::vector<double> budget;    // F(t) for t = budget_start, budget_start+1, ...
    int budget_start = 0;

    void validate() const {
        if (per_new_bed < 0.0 || per_patient_day < 0.0 || per_new_case < 0.0)
            throw std::invalid_argument("CostModel: negative cost coefficient");
        for (double f : budget)
            if (f < 0.0) throw std::invalid_argument("CostModel: negative budget");
    }

    double budget_at(int t) const {
        int idx = t - budget_start;
        if (idx < 0 || idx >= static_cast<int>(budget.size()))
            throw std::out_of_range("CostModel: no budget for day " + std::to_string(t));
        return budget[static_cast<size_t>(idx)];
    }
};

}  // namespace epiplan
