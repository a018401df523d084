#pragma once

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "epiplan/model.hpp"

namespace epiplan {

/// Effective reproduction number beta * [tau - alpha * sum_{i<tau} omega(i)].
inline double reproduction_number(double alpha, double beta, int tau, const GammaKernel& kernel) {
    if (tau < 1) throw std::invalid_argument("reproduction_number: tau must be >= 1");
    if (tau - 1 > kernel.max_lag)
        throw std::invalid_argument("reproduction_number: tau exceeds kernel range");
    if (alpha < 0.0 || alpha > 1.0 || beta < 0.0)
        throw std::invalid_argument("reproduction_number: invalid alpha or beta");
    double drag = 0.0;
    for (int i = 0; i < tau; ++i) drag += kernel.omega[static_cast<size_t>(i)];
    return beta * (static_cast<double>(tau) - alpha * drag);
}

/// Not-yet-isolated infectious population feeding new infections at day t:
/// I_a(t) = sum_{i<tau} (1 - alpha omega(i)) x(t - d - i).
inline double active_infectious(const Trajectory& traj, const RegionParams& params, int tau, int t) {
    params.validate();
    if (tau < 1) throw std::invalid_argument("active_infectious: tau must be >= 1");
    if (tau - 1 > params.kernel.max_lag)
        throw std::invalid_argument("active_infectious: tau exceeds kernel range");
    if (t - params.latent_days - (tau - 1) < traj.first_day())
        throw std::out_of_range("active_infectious: insufficient history depth");
    double sum = 0.0;
    for (int i = 0; i < tau; ++i)
        sum += params.kernel.survival(params.alpha, i) * traj.at(t - params.latent_days - i);
    return sum;
}

/// One step of the infection dynamics: x(t+1) = beta * I_a(t).
inline double step_single(const Trajectory& history, const RegionParams& params, double beta,
                          int tau, int t) {
    if (beta < 0.0) throw std::invalid_argument("step_single: beta must be nonnegative");
    return beta * active_infectious(history, params, tau, t);
}

namespace detail {

inline int prehistory_depth(const RegionParams& params, int tau_max) {
    return params.latent_days + std::max({params.sigma, tau_max, params.kernel.max_lag});
}

}  // namespace detail

/// Run the single-region dynamics over days [1, horizon] under the given
/// control schedule; tau is evaluated on the day being generated.
inline Trajectory simulate_single(const RegionParams& params, double beta,
                                  const ControlSchedule& control, double x0, int horizon,
                                  SeedConvention seed = SeedConvention::constant_history,
                                  int window_days = -1) {
    params.validate();
    control.validate();
    if (horizon < 1) throw std::invalid_argument("simulate_single: horizon must be >= 1");
    if (control.first_day() > 1 || control.last_day() < horizon)
        throw std::invalid_argument("simulate_single: control must cover [1, horizon]");
    if (x0 < 0.0) throw std::invalid_argument("simulate_single: x0 must be nonnegative");

    int floor_day = -detail::prehistory_depth(params, control.tau_max);
    Trajectory traj = make_seeded_trajectory(0, floor_day, horizon, x0, seed,
                                             params.latent_days, window_days);
    for (int t = 1; t <= horizon; ++t)
        traj.set(t, step_single(traj, params, beta, control.at(t), t - 1));
    return traj;
}

/// Coupled multi-region dynamics:
/// x_r(t+1) = sum_i beta(i, r) * sum_{j < tau_i(t+1)} (1 - alpha_i omega_i(j)) x_i(t - d_i - j).
/// With diagonal coupling this reduces region by region to simulate_single,
/// reproducing the same floating-point results.
inline std::vector<Trajectory> simulate_multi(const std::vector<RegionParams>& params,
                                              const CouplingMatrix& coupling,
                                              const std::vector<ControlSchedule>& controls,
                                              const std::vector<double>& x0, int horizon,
                                              SeedConvention seed = SeedConvention::constant_history,
                                              int window_days = -1) {
    coupling.validate();
    const size_t m = params.size();
    if (m == 0) throw std::invalid_argument("simulate_multi: need at least one region");
    if (coupling.regions != static_cast<int>(m) || controls.size() != m || x0.size() != m)
        throw std::invalid_argument("simulate_multi: region count mismatch");
    if (horizon < 1) throw std::invalid_argument("simulate_multi: horizon must be >= 1");

    std::vector<Trajectory> trajs;
    trajs.reserve(m);
    for (size_t r = 0; r < m; ++r) {
        params[r].validate();
        controls[r].validate();
        if (controls[r].first_day() > 1 || controls[r].last_day() < horizon)
            throw std::invalid_argument("simulate_multi: control must cover [1, horizon]");
        int floor_day = -detail::prehistory_depth(params[r], controls[r].tau_max);
        trajs.push_back(make_seeded_trajectory(static_cast<int>(r), floor_day, horizon, x0[r],
                                               seed, params[r].latent_days, window_days));
    }

    std::vector<double> source(m);
    for (int t = 1; t <= horizon; ++t) {
        for (size_t i = 0; i < m; ++i)
            source[i] = active_infectious(trajs[i], params[i], controls[i].at(t), t - 1);
        for (size_t r = 0; r < m; ++r) {
            double acc = 0.0;
            for (size_t i = 0; i < m; ++i)
                acc += coupling.at(static_cast<int>(i), static_cast<int>(r)) * source[i];
            trajs[r].set(t, acc);
        }
    }
    return trajs;
}

/// Hospital census at the start of day t: cohorts isolated between tau and
/// sigma days past latency, read with the same generation lag d+1 as the
/// dynamics: h(t) = sum_{i=tau}^{sigma} (1 - alpha omega(i)) x(t - d - 1 - i).
inline double hospitalized(const Trajectory& traj, const RegionParams& params, int tau, int t) {
    params.validate();
    if (tau < 1) throw std::invalid_argument("hospitalized: tau must be >= 1");
    if (tau > params.sigma)
        throw std::invalid_argument("hospitalized: tau exceeds sigma (empty stay window)");
    if (t - params.latent_days - 1 - params.sigma < traj.first_day())
        throw std::out_of_range("hospitalized: insufficient history depth");
    double sum = 0.0;
    for (int i = tau; i <= params.sigma; ++i)
        sum += params.kernel.survival(params.alpha, i) * traj.at(t - params.latent_days - 1 - i);
    return sum;
}

/// Cumulative cases by day t: the seed value at day 0 plus all cases generated
/// on days 1..t-1.
inline double cumulative_cases(const Trajectory& traj, int t) {
    if (t < 1) throw std::invalid_argument("cumulative_cases: t must be >= 1");
    if (traj.first_day() > 0 || traj.last_day() < t - 1)
        throw std::out_of_range("cumulative_cases: trajectory does not cover [0, t-1]");
    double sum = 0.0;
    for (int s = 0; s < t; ++s) sum += traj.at(s);
    return sum;
}

/// Cumulative disease deaths by day t, accumulating the gamma-delayed death
/// weight of every earlier cohort:
/// D(t) = sum_{s=0}^{t-1} sum_{i=0}^{n} alpha omega_p(i) x(s - i).
inline double cumulative_deaths(const Trajectory& traj, const RegionParams& params, int t) {
    params.validate();
    if (t < 1) throw std::invalid_argument("cumulative_deaths: t must be >= 1");
    if (traj.first_day() > -params.kernel.max_lag || traj.last_day() < t - 1)
        throw std::out_of_range("cumulative_deaths: insufficient history depth");
    double sum = 0.0;
    for (int s = 0; s < t; ++s) {
        double day = 0.0;
        for (int i = 0; i <= params.kernel.max_lag; ++i)
            day += params.kernel.omega_p[static_cast<size_t>(i)] * traj.at(s - i);
        sum += params.alpha * day;
    }
    return sum;
}

/// Daily death increments for days 1..t, same arithmetic as cumulative_deaths.
inline std::vector<double> death_series(const Trajectory& traj, const RegionParams& params, int t) {
    params.validate();
    if (t < 1) throw std::invalid_argument("death_series: t must be >= 1");
    std::vector<double> out(static_cast<size_t>(t) + 1, 0.0);
    double acc = 0.0;
    for (int s = 0; s < t; ++s) {
        double day = 0.0;
        for (int i = 0; i <= params.kernel.max_lag; ++i)
            day += params.kernel.omega_p[static_cast<size_t>(i)] * traj.at(s - i);
        acc += params.alpha * day;
        out[static_cast<size_t>(s) + 1] = acc;
    }
    return out;  // out[k] = D(k)
}

/// Occupancy ratio h / beds.
inline double hosp_rate(double hospitalized_count, double beds) {
    if (!(beds > 0.0)) throw std::invalid_argument("hosp_rate: beds must be positive");
    return hospitalized_count / beds;
}

}  // namespace epiplan
