#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "epiplan/simulate.hpp"

namespace epiplan {

/// A bed-distribution instance: fixed epidemic scenario (parameters, coupling,
/// controls over [1, window_end]) plus the capacity to distribute. Shares of
/// tranche q going to region r are the decision variables; each tranche's
/// shares sum to 1 since the objective strictly improves with every bed placed.
struct AllocationProblem {
    std::vector<RegionParams> regions;
    CouplingMatrix coupling;
    std::vector<ControlSchedule> controls;
    std::vector<double> x0;
    SeedConvention seed = SeedConvention::constant_history;
    int seed_window_days = -1;

    std::vector<double> base_beds;
    std::vector<int> tranche_days;
    std::vector<double> tranche_sizes;

    double weight = 0.0;       // K
    int window_start = 1;      // first day the occupancy penalty counts
    int window_end = 1;        // horizon T
    std::optional<CostModel> costs;

    int region_count() const { return static_cast<int>(regions.size()); }
    int tranche_count() const { return static_cast<int>(tranche_days.size()); }

    void validate() const {
        if (regions.empty()) throw std::invalid_argument("AllocationProblem: no regions");
        coupling.validate();
        const size_t m = regions.size();
        if (coupling.regions != static_cast<int>(m) || controls.size() != m || x0.size() != m ||
            base_beds.size() != m)
            throw std::invalid_argument("AllocationProblem: region count mismatch");
        if (tranche_days.empty()) throw std::invalid_argument("AllocationProblem: need q >= 1 tranches");
        if (tranche_sizes.size() != tranche_days.size())
            throw std::invalid_argument("AllocationProblem: tranche day/size length mismatch");
        for (double s : tranche_sizes)
            if (s < 0.0) throw std::invalid_argument("AllocationProblem: negative tranche size");
        for (double b : base_beds)
            if (b < 0.0) throw std::invalid_argument("AllocationProblem: negative base beds");
        if (weight < 0.0) throw std::invalid_argument("AllocationProblem: K must be >= 0");
        if (window_end < window_start)
            throw std::invalid_argument("AllocationProblem: degenerate planning window");
        for (size_t r = 0; r < m; ++r) {
            regions[r].validate();
            controls[r].validate();
            if (controls[r].first_day() > 1 || controls[r].last_day() < window_end)
                throw std::invalid_argument("AllocationProblem: control must cover [1, window_end]");
        }
    }
};

/// Tranche shares per region: shares[q][r] in [0,1], rows summing to 1.
using ShareMatrix = std::vector<std::vector<double>>;

struct OccupancyStats {
    double mean = 0.0;
    double max = 0.0;
};

struct Violation {
    int day = 0;
    int region = -1;  // -1 marks a cost-constraint violation
    double load = 0.0;
    double limit = 0.0;
};

struct FeasibilityReport {
    bool feasible = true;
    std::vector<Violation> violations;
};

struct AllocationSolution {
    ShareMatrix shares;
    std::vector<BedPlan> plans;
    double objective = 0.0;
    std::vector<double> final_cumulative_cases;
    std::vector<double> final_new_cases;
    std::vector<OccupancyStats> occupancy;
    FeasibilityReport feasibility;
};

inline std::vector<BedPlan> plans_from_shares(const AllocationProblem& problem,
                                              const ShareMatrix& shares) {
    if (static_cast<int>(shares.size()) != problem.tranche_count())
        throw std::invalid_argument("plans_from_shares: share row per tranche required");
    std::vector<BedPlan> plans(problem.regions.size());
    for (int r = 0; r < problem.region_count(); ++r) {
        plans[static_cast<size_t>(r)].region = r;
        plans[static_cast<size_t>(r)].base = problem.base_beds[static_cast<size_t>(r)];
        plans[static_cast<size_t>(r)].tranche_days = problem.tranche_days;
        plans[static_cast<size_t>(r)].tranche_sizes.resize(shares.size());
    }
    for (size_t q = 0; q < shares.size(); ++q) {
        if (static_cast<int>(shares[q].size()) != problem.region_count())
            throw std::invalid_argument("plans_from_shares: share column per region required");
        for (int r = 0; r < problem.region_count(); ++r)
            plans[static_cast<size_t>(r)].tranche_sizes[q] =
                shares[q][static_cast<size_t>(r)] * problem.tranche_sizes[q];
    }
    for (auto& p : plans) p.validate();
    return plans;
}

namespace detail {

/// Bed-independent part of the problem: the dynamics never see the plans, so
/// one simulation serves every candidate.
struct EpidemicPrecompute {
    std::vector<Trajectory> trajectories;
    std::vector<std::vector<double>> hosp;  // hosp[r][t - window_start], window_start..window_end+1
    std::vector<double> final_new_cases;
    std::vector<double> final_cumulative_cases;
};

inline EpidemicPrecompute precompute_epidemic(const AllocationProblem& problem) {
    EpidemicPrecompute pre;
    pre.trajectories = simulate_multi(problem.regions, problem.coupling, problem.controls,
                                      problem.x0, problem.window_end, problem.seed,
                                      problem.seed_window_days);
    const int m = problem.region_count();
    pre.hosp.resize(static_cast<size_t>(m));
    for (int r = 0; r < m; ++r) {
        const auto& traj = pre.trajectories[static_cast<size_t>(r)];
        auto& row = pre.hosp[static_cast<size_t>(r)];
        row.reserve(static_cast<size_t>(problem.window_end - problem.window_start + 2));
        for (int t = problem.window_start; t <= problem.window_end + 1; ++t) {
            int tau = t <= problem.window_end ? problem.controls[static_cast<size_t>(r)].at(t)
                                              : problem.controls[static_cast<size_t>(r)].at(problem.window_end);
            row.push_back(hospitalized(traj, problem.regions[static_cast<size_t>(r)], tau, t));
        }
        pre.final_new_cases.push_back(traj.at(problem.window_end));
        pre.final_cumulative_cases.push_back(cumulative_cases(traj, problem.window_end));
    }
    return pre;
}

inline double penalty_term(const AllocationProblem& problem, const EpidemicPrecompute& pre,
                           const std::vector<BedPlan>& plans) {
    double sum = 0.0;
    for (int t = problem.window_start; t <= problem.window_end; ++t) {
        for (int r = 0; r < problem.region_count(); ++r) {
            double beds = plans[static_cast<size_t>(r)].at(t);
            if (!(beds > 0.0))
                throw std::invalid_argument("objective: nonpositive bed capacity on day " +
                                            std::to_string(t));
            sum += pre.hosp[static_cast<size_t>(r)][static_cast<size_t>(t - problem.window_start)] / beds;
        }
    }
    return sum;
}

inline double objective_from(const AllocationProblem& problem, const EpidemicPrecompute& pre,
                             const std::vector<BedPlan>& plans) {
    double fixed = 0.0;
    for (double x : pre.final_new_cases) fixed += x;
    return fixed + problem.weight * penalty_term(problem, pre, plans);
}

/// d(penalty)/d(shares[q][r]) = -sum_{t >= tranche_day_q} h_r(t) * size_q / b_r(t)^2.
inline ShareMatrix penalty_gradient(const AllocationProblem& problem, const EpidemicPrecompute& pre,
                                    const ShareMatrix& shares) {
    std::vector<BedPlan> plans = plans_from_shares(problem, shares);
    ShareMatrix grad(shares.size(), std::vector<double>(static_cast<size_t>(problem.region_count()), 0.0));
    for (int t = problem.window_start; t <= problem.window_end; ++t) {
        for (int r = 0; r < problem.region_count(); ++r) {
            double beds = plans[static_cast<size_t>(r)].at(t);
            double h = pre.hosp[static_cast<size_t>(r)][static_cast<size_t>(t - problem.window_start)];
            double common = -h / (beds * beds);
            for (size_t q = 0; q < shares.size(); ++q)
                if (problem.tranche_days[q] <= t)
                    grad[q][static_cast<size_t>(r)] += common * problem.tranche_sizes[q];
        }
    }
    return grad;
}

/// Euclidean projection of v onto the probability simplex.
inline void project_simplex(std::vector<double>& v) {
    std::vector<double> u = v;
    std::sort(u.begin(), u.end(), std::greater<double>());
    double css = 0.0, theta = 0.0;
    int rho = 0;
    for (size_t j = 0; j < u.size(); ++j) {
        css += u[j];
        double trial = (css - 1.0) / static_cast<double>(j + 1);
        if (u[j] - trial > 0.0) {
            rho = static_cast<int>(j + 1);
            theta = trial;
        }
    }
    (void)rho;
    for (double& x : v) x = std::max(x - theta, 0.0);
}

inline void project_shares(ShareMatrix& s) {
    for (auto& row : s) project_simplex(row);
}

}  // namespace detail

/// Full objective sum_r [ x_r(T) + K sum_t h_r(t) / b_r(t) ]. The x_r(T) term
/// does not depend on the plans; beds only enter through the occupancy penalty.
inline double objective(const AllocationProblem& problem, const std::vector<BedPlan>& plans) {
    problem.validate();
    detail::EpidemicPrecompute pre = detail::precompute_epidemic(problem);
    return detail::objective_from(problem, pre, plans);
}

/// Daily cost-constraint check: kB * (new beds arriving at t) plus service and
/// pre-hospital case costs against the budget F(t). Only positive census
/// increases are charged.
struct CostCheck {
    bool satisfied = true;
    double spend = 0.0;
    double budget = 0.0;
};

inline CostCheck cost_constraint(const AllocationProblem& problem,
                                 const detail::EpidemicPrecompute& pre, int t) {
    if (!problem.costs) throw std::invalid_argument("cost_constraint: no cost model in problem");
    const CostModel& cm = *problem.costs;
    double new_beds = 0.0;
    for (size_t q = 0; q < problem.tranche_days.size(); ++q)
        if (problem.tranche_days[q] == t) new_beds += problem.tranche_sizes[q];
    double spend = cm.per_new_bed * new_beds;
    size_t idx = static_cast<size_t>(t - problem.window_start);
    for (int r = 0; r < problem.region_count(); ++r) {
        double h = pre.hosp[static_cast<size_t>(r)][idx];
        double dh = pre.hosp[static_cast<size_t>(r)][idx + 1] - h;
        spend += cm.per_patient_day * h + cm.per_new_case * std::max(dh, 0.0);
    }
    CostCheck out;
    out.spend = spend;
    out.budget = cm.budget_at(t);
    out.satisfied = spend <= out.budget;
    return out;
}

inline CostCheck cost_constraint(const AllocationProblem& problem, const std::vector<BedPlan>&, int t) {
    problem.validate();
    detail::EpidemicPrecompute pre = detail::precompute_epidemic(problem);
    return cost_constraint(problem, pre, t);
}

namespace detail {

inline FeasibilityReport feasibility_from(const AllocationProblem& problem,
                                          const EpidemicPrecompute& pre,
                                          const std::vector<BedPlan>& plans) {
    FeasibilityReport rep;
    for (int t = problem.window_start; t <= problem.window_end; ++t) {
        for (int r = 0; r < problem.region_count(); ++r) {
            double h = pre.hosp[static_cast<size_t>(r)][static_cast<size_t>(t - problem.window_start)];
            double b = plans[static_cast<size_t>(r)].at(t);
            if (h > b) {
                rep.feasible = false;
                rep.violations.push_back({t, r, h, b});
            }
        }
        if (problem.costs) {
            CostCheck cc = cost_constraint(problem, pre, t);
            if (!cc.satisfied) {
                rep.feasible = false;
                rep.violations.push_back({t, -1, cc.spend, cc.budget});
            }
        }
    }
    return rep;
}

}  // namespace detail

/// Occupancy feasibility (h_r(t) <= b_r(t) everywhere, plus the cost constraint
/// when a cost model is present), with the offending days reported.
inline FeasibilityReport feasible(const AllocationProblem& problem,
                                  const std::vector<BedPlan>& plans) {
    problem.validate();
    detail::EpidemicPrecompute pre = detail::precompute_epidemic(problem);
    return detail::feasibility_from(problem, pre, plans);
}

struct SolveOptions {
    double gradient_tol = 1e-6;
    int max_iterations = 2000;
    double polish_step = 0.01;
    bool enforce_costs = false;  // Problem 2: reject cost-infeasible scenarios
};

/// Minimize the objective over per-tranche shares. The penalty is convex in
/// the shares (h fixed, 1/b convex), so projected gradient descent from five
/// starts plus a local grid polish certifies the optimum. With K = 0 every
/// split ties and the shares default to the uniform 1/m.
inline AllocationSolution solve(const AllocationProblem& problem, const SolveOptions& opts = {}) {
    problem.validate();
    if (opts.enforce_costs && !problem.costs)
        throw std::invalid_argument("solve: cost enforcement requested without a cost model");

    detail::EpidemicPrecompute pre = detail::precompute_epidemic(problem);
    const int m = problem.region_count();
    const int q = problem.tranche_count();

    if (opts.enforce_costs) {
        // Tranche totals and the census are share-independent, so cost
        // feasibility is decided before any search.
        std::ostringstream bad;
        bool ok = true;
        for (int t = problem.window_start; t <= problem.window_end; ++t) {
            CostCheck cc = cost_constraint(problem, pre, t);
            if (!cc.satisfied) {
                ok = false;
                bad << (bad.tellp() > 0 ? ", " : "") << t;
            }
        }
        if (!ok)
            throw std::runtime_error("solve: no feasible point, budget exceeded on days " + bad.str());
    }

    auto uniform = [&](double v0) {
        ShareMatrix s(static_cast<size_t>(q), std::vector<double>(static_cast<size_t>(m), 0.0));
        for (auto& row : s) {
            row[0] = v0;
            double rest = (1.0 - v0) / std::max(1, m - 1);
            for (int r = 1; r < m; ++r) row[static_cast<size_t>(r)] = rest;
        }
        return s;
    };

    ShareMatrix best_shares;
    double best_value = std::numeric_limits<double>::infinity();

    if (problem.weight == 0.0) {
        best_shares = uniform(1.0 / m);  // flat objective; report the even tie-break
        best_value = detail::objective_from(problem, pre, plans_from_shares(problem, best_shares));
    } else {
        std::vector<ShareMatrix> starts = {uniform(1.0 / m), uniform(1.0), uniform(0.0)};
        {
            ShareMatrix alt = uniform(1.0), alt2 = uniform(0.0);
            for (size_t k = 0; k < alt.size(); k += 2) std::swap(alt[k], alt2[k]);
            starts.push_back(alt);
            starts.push_back(alt2);
        }

        auto try_objective = [&](const ShareMatrix& s) {
            // A corner start can strand a zero-base region without beds.
            try {
                return detail::objective_from(problem, pre, plans_from_shares(problem, s));
            } catch (const std::invalid_argument&) {
                return std::numeric_limits<double>::infinity();
            }
        };

        for (ShareMatrix shares : starts) {
            double value = try_objective(shares);
            if (!std::isfinite(value)) continue;
            double step = 1.0;
            for (int it = 0; it < opts.max_iterations; ++it) {
                ShareMatrix grad = detail::penalty_gradient(problem, pre, shares);
                ShareMatrix trial;
                double trial_value = 0.0;
                bool accepted = false;
                while (step > 1e-12) {
                    trial = shares;
                    for (size_t k = 0; k < trial.size(); ++k)
                        for (size_t r = 0; r < trial[k].size(); ++r)
                            trial[k][r] -= step * problem.weight * grad[k][r];
                    detail::project_shares(trial);
                    trial_value = try_objective(trial);
                    if (trial_value < value - 1e-15) {
                        accepted = true;
                        break;
                    }
                    step *= 0.5;
                }
                if (!accepted) break;
                double moved = 0.0;
                for (size_t k = 0; k < trial.size(); ++k)
                    for (size_t r = 0; r < trial[k].size(); ++r)
                        moved = std::max(moved, std::fabs(trial[k][r] - shares[k][r]));
                shares = std::move(trial);
                value = trial_value;
                step = std::min(step * 2.0, 1.0);
                if (moved < opts.gradient_tol && value <= best_value + 1e-9) break;
            }
            if (value < best_value) {
                best_value = value;
                best_shares = shares;
            }
        }
        if (!std::isfinite(best_value))
            throw std::invalid_argument("solve: no share split yields positive capacity on every window day");

        // Local polish: coordinate moves of polish_step between region pairs.
        bool improved = true;
        while (improved) {
            improved = false;
            for (int k = 0; k < q; ++k) {
                for (int ra = 0; ra < m; ++ra) {
                    for (int rb = 0; rb < m; ++rb) {
                        if (ra == rb) continue;
                        ShareMatrix trial = best_shares;
                        double delta = std::min(opts.polish_step, trial[static_cast<size_t>(k)][static_cast<size_t>(rb)]);
                        if (delta <= 0.0) continue;
                        trial[static_cast<size_t>(k)][static_cast<size_t>(ra)] += delta;
                        trial[static_cast<size_t>(k)][static_cast<size_t>(rb)] -= delta;
                        double v = try_objective(trial);
                        if (v < best_value - 1e-12) {
                            best_value = v;
                            best_shares = std::move(trial);
                            improved = true;
                        }
                    }
                }
            }
        }
    }

    AllocationSolution sol;
    sol.shares = best_shares;
    sol.plans = plans_from_shares(problem, best_shares);
    sol.objective = best_value;
    sol.final_new_cases = pre.final_new_cases;
    sol.final_cumulative_cases = pre.final_cumulative_cases;
    sol.feasibility = detail::feasibility_from(problem, pre, sol.plans);
    for (int r = 0; r < m; ++r) {
        OccupancyStats st;
        double sum = 0.0;
        for (int t = problem.window_start; t <= problem.window_end; ++t) {
            double occ = hosp_rate(pre.hosp[static_cast<size_t>(r)][static_cast<size_t>(t - problem.window_start)],
                                   sol.plans[static_cast<size_t>(r)].at(t));
            sum += occ;
            st.max = std::max(st.max, occ);
        }
        st.mean = sum / static_cast<double>(problem.window_end - problem.window_start + 1);
        sol.occupancy.push_back(st);
    }
    return sol;
}

}  // namespace epiplan
