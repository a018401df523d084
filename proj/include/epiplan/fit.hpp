#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <future>
#include <limits>
#include <stdexcept>
#include <thread>
#include <vector>

#include "epiplan/nelder_mead.hpp"
#include "epiplan/simulate.hpp"

namespace epiplan {

/// Observed cumulative case and death series on (possibly irregular) report days.
struct ObservedSeries {
    std::vector<int> days;
    std::vector<double> cases;
    std::vector<double> deaths;

    void validate() const {
        if (days.empty()) throw std::invalid_argument("ObservedSeries: empty data");
        if (cases.size() != days.size() || deaths.size() != days.size())
            throw std::invalid_argument("ObservedSeries: column length mismatch");
        for (size_t i = 0; i < days.size(); ++i) {
            if (cases[i] < 0.0 || deaths[i] < 0.0)
                throw std::invalid_argument("ObservedSeries: negative value");
            if (i > 0 && days[i] <= days[i - 1])
                throw std::invalid_argument("ObservedSeries: days must be strictly increasing");
        }
    }
};

/// Everything the fit needs besides the data: the tau intervals, the search
/// box, and the fixed model context (kernel, latent period, seeding).
struct FitSpec {
    std::vector<int> breakpoints;  // p+1 interval edges; tau_k rules (T_k, T_{k+1}]
    int tau_min = 3;
    int tau_max = 5;
    double alpha_lo = 0.0, alpha_hi = 1.0;
    double beta_lo = 0.0, beta_hi = 1.0;
    double x0 = 1.0;
    int latent_days = 6;
    GammaKernel kernel;
    SeedConvention seed = SeedConvention::constant_history;
    int window_days = -1;

    void validate() const {
        if (breakpoints.size() < 2) throw std::invalid_argument("FitSpec: need at least one interval");
        for (size_t j = 1; j < breakpoints.size(); ++j)
            if (breakpoints[j] <= breakpoints[j - 1])
                throw std::invalid_argument("FitSpec: breakpoints must be strictly increasing");
        if (tau_min < 1 || tau_max < tau_min) throw std::invalid_argument("FitSpec: empty tau domain");
        if (!(alpha_lo <= alpha_hi) || !(beta_lo <= beta_hi))
            throw std::invalid_argument("FitSpec: infeasible bounds");
        if (alpha_lo < 0.0 || alpha_hi > 1.0 || beta_lo < 0.0)
            throw std::invalid_argument("FitSpec: bounds outside valid parameter range");
        if (x0 < 0.0) throw std::invalid_argument("FitSpec: x0 must be nonnegative");
        if (kernel.max_lag < 1) throw std::invalid_argument("FitSpec: kernel not built");
    }

    int intervals() const { return static_cast<int>(breakpoints.size()) - 1; }
};

struct FitResult {
    double alpha = 0.0;
    double beta = 0.0;
    std::vector<int> taus;
    std::vector<double> reproduction;  // R_k per interval
    double loss = 0.0;
    std::vector<double> fitted_cases;   // at the observed days
    std::vector<double> fitted_deaths;  // at the observed days
};

namespace detail {

struct ModelCurves {
    std::vector<double> cases;
    std::vector<double> deaths;
};

inline ModelCurves model_at_observed(double alpha, double beta, const std::vector<int>& taus,
                                     const FitSpec& spec, const ObservedSeries& obs) {
    RegionParams params;
    params.alpha = alpha;
    params.latent_days = spec.latent_days;
    params.sigma = std::min(spec.latent_days + spec.tau_max, spec.kernel.max_lag);  // unused by C/D
    params.kernel = spec.kernel;

    ControlSchedule control(spec.breakpoints, taus, spec.tau_min, spec.tau_max);
    const int horizon = obs.days.back();
    Trajectory traj = simulate_single(params, beta, control, spec.x0, horizon, spec.seed,
                                      spec.window_days);

    std::vector<double> deaths = death_series(traj, params, horizon);
    ModelCurves out;
    out.cases.reserve(obs.days.size());
    out.deaths.reserve(obs.days.size());
    double cum = 0.0;
    int s = 0;
    for (int day : obs.days) {
        for (; s < day; ++s) cum += traj.at(s);
        out.cases.push_back(cum);
        out.deaths.push_back(deaths[static_cast<size_t>(day)]);
    }
    return out;
}

}  // namespace detail

/// Normalized least squares over the observed days only:
/// sum_t [(C_model - C_obs)/max C_obs]^2 + [(D_model - D_obs)/max D_obs]^2.
inline double fit_loss(double alpha, double beta, const std::vector<int>& taus, const FitSpec& spec,
                       const ObservedSeries& obs) {
    spec.validate();
    obs.validate();
    if (static_cast<int>(taus.size()) != spec.intervals())
        throw std::invalid_argument("fit_loss: tau count does not match intervals");
    if (obs.days.front() <= spec.breakpoints.front() || obs.days.back() > spec.breakpoints.back())
        throw std::invalid_argument("fit_loss: observed days outside fit intervals");

    double cmax = *std::max_element(obs.cases.begin(), obs.cases.end());
    double dmax = *std::max_element(obs.deaths.begin(), obs.deaths.end());
    if (cmax <= 0.0) cmax = 1.0;
    if (dmax <= 0.0) dmax = 1.0;

    detail::ModelCurves curves = detail::model_at_observed(alpha, beta, taus, spec, obs);
    double loss = 0.0;
    for (size_t i = 0; i < obs.days.size(); ++i) {
        double dc = (curves.cases[i] - obs.cases[i]) / cmax;
        double dd = (curves.deaths[i] - obs.deaths[i]) / dmax;
        loss += dc * dc + dd * dd;
    }
    return loss;
}

namespace detail {

struct TupleFit {
    std::vector<int> taus;
    double alpha = 0.0, beta = 0.0;
    double loss = std::numeric_limits<double>::infinity();
};

// Multistart simplex search over (alpha, beta) for one fixed tau tuple;
// 16 starts on a uniform 4x4 grid inside the box.
inline TupleFit fit_tuple(const std::vector<int>& taus, const FitSpec& spec,
                          const ObservedSeries& obs) {
    TupleFit best;
    best.taus = taus;
    auto objective = [&](const std::vector<double>& ab) {
        return fit_loss(ab[0], ab[1], taus, spec, obs);
    };
    NelderMeadOptions opts;
    opts.diameter_tol = 1e-6;
    opts.max_evaluations = 400;
    for (int ia = 0; ia < 4; ++ia) {
        for (int ib = 0; ib < 4; ++ib) {
            double a0 = spec.alpha_lo + (spec.alpha_hi - spec.alpha_lo) * (2 * ia + 1) / 8.0;
            double b0 = spec.beta_lo + (spec.beta_hi - spec.beta_lo) * (2 * ib + 1) / 8.0;
            NelderMeadResult r = nelder_mead(objective, {a0, b0}, {spec.alpha_lo, spec.beta_lo},
                                             {spec.alpha_hi, spec.beta_hi}, opts);
            if (r.value < best.loss) {
                best.loss = r.value;
                best.alpha = r.x[0];
                best.beta = r.x[1];
            }
        }
    }
    return best;
}

inline std::vector<std::vector<int>> all_tuples(int p, int lo, int hi) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur(static_cast<size_t>(p), lo);
    while (true) {
        out.push_back(cur);
        int k = p - 1;
        while (k >= 0 && cur[static_cast<size_t>(k)] == hi) {
            cur[static_cast<size_t>(k)] = lo;
            --k;
        }
        if (k < 0) break;
        ++cur[static_cast<size_t>(k)];
    }
    return out;
}

}  // namespace detail

/// Estimate (alpha, beta) and the integer tau schedule. Every tau tuple in the
/// domain is enumerated (up to 10^4 tuples; beyond that, coordinate-wise
/// refinement from the all-tau_min tuple), each crossed with the multistart
/// continuous search. Tuples are evaluated concurrently; the reduction is
/// deterministic with ties broken by lexicographic tuple order.
inline FitResult fit(const ObservedSeries& obs, const FitSpec& spec) {
    spec.validate();
    obs.validate();
    const int p = spec.intervals();
    const int width = spec.tau_max - spec.tau_min + 1;
    double count = std::pow(static_cast<double>(width), p);

    std::vector<detail::TupleFit> results;
    if (count <= 1e4) {
        std::vector<std::vector<int>> tuples = detail::all_tuples(p, spec.tau_min, spec.tau_max);
        results.resize(tuples.size());
        unsigned workers = std::max(1u, std::thread::hardware_concurrency());
        std::vector<std::future<void>> futs;
        std::atomic<size_t> next{0};
        for (unsigned w = 0; w < workers; ++w) {
            futs.push_back(std::async(std::launch::async, [&]() {
                while (true) {
                    size_t k = next.fetch_add(1);
                    if (k >= tuples.size()) return;
                    results[k] = detail::fit_tuple(tuples[k], spec, obs);
                }
            }));
        }
        for (auto& f : futs) f.get();
    } else {
        std::vector<int> cur(static_cast<size_t>(p), spec.tau_min);
        detail::TupleFit incumbent = detail::fit_tuple(cur, spec, obs);
        bool improved = true;
        while (improved) {
            improved = false;
            for (int k = 0; k < p; ++k) {
                for (int v = spec.tau_min; v <= spec.tau_max; ++v) {
                    if (v == incumbent.taus[static_cast<size_t>(k)]) continue;
                    std::vector<int> trial = incumbent.taus;
                    trial[static_cast<size_t>(k)] = v;
                    detail::TupleFit r = detail::fit_tuple(trial, spec, obs);
                    if (r.loss < incumbent.loss) {
                        incumbent = r;
                        improved = true;
                    }
                }
            }
        }
        results.push_back(incumbent);
    }

    const detail::TupleFit* best = &results.front();
    for (const auto& r : results)
        if (r.loss < best->loss) best = &r;  // tuple order is lexicographic already

    FitResult out;
    out.alpha = best->alpha;
    out.beta = best->beta;
    out.taus = best->taus;
    out.loss = best->loss;
    for (int tau : out.taus)
        out.reproduction.push_back(reproduction_number(out.alpha, out.beta, tau, spec.kernel));
    detail::ModelCurves curves = detail::model_at_observed(out.alpha, out.beta, out.taus, spec, obs);
    out.fitted_cases = std::move(curves.cases);
    out.fitted_deaths = std::move(curves.deaths);
    return out;
}

}  // namespace epiplan
