#pragma once

#include <cctype>
#include <filesystem>
#include <fstream>
#include <future>
#include <sstream>
#include <string>
#include <vector>

#include "epiplan/csv.hpp"
#include "epiplan/scenario.hpp"

namespace epiplan {

namespace detail {

inline std::string safe_name(std::string s) {
    for (char& c : s)
        if (!std::isalnum(static_cast<unsigned char>(c))) c = '_';
    return s;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

inline std::string resolved_params(const Scenario& sc) {
    std::ostringstream os;
    os << "scenario_hash=" << scenario_hash(sc) << "\n";
    os << "kernel.shape=" << format_double(sc.kernel_params.shape) << "\n";
    os << "kernel.rate=" << format_double(sc.kernel_params.rate) << "\n";
    os << "kernel.max_lag=" << sc.kernel_max_lag << "\n";
    os << "horizon=" << sc.horizon << "\n";
    os << "tau_domain=[" << sc.tau_min << "," << sc.tau_max << "]\n";
    os << "seed.convention=" << to_string(sc.seed) << "\n";
    if (sc.seed == SeedConvention::window)
        os << "seed.window_days="
           << (sc.seed_window_days >= 0 ? sc.seed_window_days
                                        : (sc.regions.empty() ? 8 : sc.regions[0].latent_days + 2))
           << "\n";
    for (int r = 0; r < sc.region_count(); ++r) {
        const auto& reg = sc.regions[static_cast<size_t>(r)];
        os << "region." << reg.name << ".alpha=" << format_double(reg.alpha) << "\n";
        os << "region." << reg.name << ".x0=" << format_double(reg.x0) << "\n";
        os << "region." << reg.name << ".latent_days=" << reg.latent_days << "\n";
        os << "region." << reg.name << ".sigma=" << reg.sigma << "\n";
        os << "region." << reg.name << ".beds_base=" << format_double(reg.beds_base) << "\n";
        os << "region." << reg.name << ".control.taus=";
        for (size_t j = 0; j < reg.control_taus.size(); ++j)
            os << (j ? "," : "") << reg.control_taus[j];
        os << "\n";
    }
    for (int i = 0; i < sc.region_count(); ++i)
        for (int r = 0; r < sc.region_count(); ++r)
            os << "beta[" << i << "][" << r << "]="
               << format_double(sc.beta[static_cast<size_t>(i) * sc.regions.size() + static_cast<size_t>(r)])
               << "\n";
    return os.str();
}

}  // namespace detail

/// Simulate the scenario and write per-region daily series plus a summary.
inline void run_simulate(const Scenario& sc, const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);

    GammaKernel kernel = sc.build_kernel_();
    std::vector<RegionParams> params;
    std::vector<ControlSchedule> controls;
    std::vector<double> x0;
    for (int r = 0; r < sc.region_count(); ++r) {
        params.push_back(sc.region_params(r, kernel));
        controls.push_back(sc.control_schedule(r));
        x0.push_back(sc.regions[static_cast<size_t>(r)].x0);
    }
    std::vector<Trajectory> trajs = simulate_multi(params, sc.coupling(), controls, x0, sc.horizon,
                                                   sc.seed, sc.seed_window_days);

    std::vector<std::string> comments = {"scenario=" + scenario_hash(sc)};
    std::ostringstream summary;
    summary << detail::resolved_params(sc);

    for (int r = 0; r < sc.region_count(); ++r) {
        const auto& reg = sc.regions[static_cast<size_t>(r)];
        const auto& traj = trajs[static_cast<size_t>(r)];
        std::string base = detail::safe_name(reg.name);

        std::vector<double> xs, cases, hosp, active, occ;
        std::vector<double> deaths_cum = death_series(traj, params[static_cast<size_t>(r)], sc.horizon);
        std::vector<double> deaths(deaths_cum.begin() + 1, deaths_cum.end());
        double cum = 0.0;
        for (int t = 1; t <= sc.horizon; ++t) {
            cum += traj.at(t - 1);  // C(t) = sum of x over days < t
            xs.push_back(traj.at(t));
            cases.push_back(cum);
            int tau = controls[static_cast<size_t>(r)].at(t);
            hosp.push_back(hospitalized(traj, params[static_cast<size_t>(r)], tau, t));
            active.push_back(active_infectious(traj, params[static_cast<size_t>(r)], tau, t));
            if (reg.beds_base > 0.0) occ.push_back(hosp.back() / reg.beds_base);
        }

        fs::path dir(out_dir);
        write_series_csv((dir / (base + "_x.csv")).string(), comments, "new_cases", 1, xs);
        write_series_csv((dir / (base + "_cases.csv")).string(), comments, "cumulative_cases", 1, cases);
        write_series_csv((dir / (base + "_deaths.csv")).string(), comments, "cumulative_deaths", 1, deaths);
        write_series_csv((dir / (base + "_hospitalized.csv")).string(), comments, "hospitalized", 1, hosp);
        write_series_csv((dir / (base + "_active.csv")).string(), comments, "active_infectious", 1, active);
        if (!occ.empty())
            write_series_csv((dir / (base + "_occupancy.csv")).string(), comments, "occupancy", 1, occ);

        summary << "region." << reg.name << ".final_cases=" << format_double(cases.back()) << "\n";
        summary << "region." << reg.name << ".final_deaths=" << format_double(deaths.back()) << "\n";
        const auto& ctl = controls[static_cast<size_t>(r)];
        for (size_t j = 0; j < ctl.taus.size(); ++j) {
            double R = reproduction_number(reg.alpha,
                                           sc.beta[static_cast<size_t>(r) * sc.regions.size() + static_cast<size_t>(r)],
                                           ctl.taus[j], kernel);
            summary << "region." << reg.name << ".R[" << ctl.breakpoints[j] + 1 << ".."
                    << ctl.breakpoints[j + 1] << "]=" << format_double(R) << "\n";
        }
    }
    detail::write_text(fs::path(out_dir) / "summary.txt", summary.str());
}

/// Fit alpha, beta and the tau schedule to an observed CSV; write the
/// parameter report and the fitted-vs-observed curves.
inline FitResult run_fit(const Scenario& sc, const std::string& data_csv, const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);

    ObservedReadResult data = read_observed_csv(data_csv);
    FitSpec spec = sc.fit_spec();
    FitResult res = fit(data.series, spec);

    std::ostringstream rep;
    rep << detail::resolved_params(sc);
    for (const auto& w : data.warnings) rep << "warning=" << w << "\n";
    rep << "alpha=" << format_double(res.alpha) << "\n";
    rep << "beta=" << format_double(res.beta) << "\n";
    rep << "loss=" << format_double(res.loss) << "\n";
    for (size_t k = 0; k < res.taus.size(); ++k)
        rep << "R_" << k + 1 << "(tau_" << k + 1 << ")=" << format_double(res.reproduction[k]) << " ("
            << res.taus[k] << ")\n";
    detail::write_text(fs::path(out_dir) / "fit_report.txt", rep.str());

    std::ofstream curves(fs::path(out_dir) / "fitted_vs_observed.csv");
    curves << "# scenario=" << scenario_hash(sc) << "\n";
    curves << "day,observed_cases,fitted_cases,observed_deaths,fitted_deaths\n";
    for (size_t i = 0; i < data.series.days.size(); ++i)
        curves << data.series.days[i] << "," << format_double(data.series.cases[i]) << ","
               << format_double(res.fitted_cases[i]) << "," << format_double(data.series.deaths[i])
               << "," << format_double(res.fitted_deaths[i]) << "\n";
    return res;
}

namespace detail {

inline std::string allocation_rows(const Scenario& sc, const AllocationSolution& sol) {
    std::ostringstream os;
    os << "region";
    for (size_t q = 0; q < sol.shares.size(); ++q) os << ",tranche" << q + 1;
    os << "\n";
    for (int r = 0; r < sc.region_count(); ++r) {
        os << sc.regions[static_cast<size_t>(r)].name;
        for (size_t q = 0; q < sol.shares.size(); ++q)
            os << "," << format_double(sol.plans[static_cast<size_t>(r)].tranche_sizes[q]);
        os << "\n";
    }
    return os.str();
}

}  // namespace detail

/// Solve the bed-distribution problem (1: capacity only, 2: with the cost
/// constraint) and write the split table and summary.
inline AllocationSolution run_allocate(const Scenario& sc, int problem_number,
                                       const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    if (problem_number != 1 && problem_number != 2)
        throw std::invalid_argument("run_allocate: problem must be 1 or 2");

    AllocationProblem prob = sc.allocation_problem();
    SolveOptions opts;
    opts.enforce_costs = problem_number == 2;
    AllocationSolution sol = solve(prob, opts);

    std::ostringstream table;
    table << "# scenario=" << scenario_hash(sc) << "\n" << detail::allocation_rows(sc, sol);
    detail::write_text(fs::path(out_dir) / "allocation.csv", table.str());

    std::ostringstream summary;
    summary << detail::resolved_params(sc);
    summary << "problem=" << problem_number << "\n";
    summary << "objective=" << format_double(sol.objective) << "\n";
    summary << "feasible=" << (sol.feasibility.feasible ? "feasible" : "infeasible") << "\n";
    summary << "violations=" << sol.feasibility.violations.size() << "\n";
    for (int r = 0; r < sc.region_count(); ++r) {
        const auto& name = sc.regions[static_cast<size_t>(r)].name;
        summary << "region." << name << ".final_cumulative_cases="
                << format_double(sol.final_cumulative_cases[static_cast<size_t>(r)]) << "\n";
        summary << "region." << name << ".occupancy_mean="
                << format_double(sol.occupancy[static_cast<size_t>(r)].mean) << "\n";
        summary << "region." << name << ".occupancy_max="
                << format_double(sol.occupancy[static_cast<size_t>(r)].max) << "\n";
    }
    detail::write_text(fs::path(out_dir) / "allocation_summary.txt", summary.str());
    return sol;
}

struct SweepRow {
    std::vector<int> taus;  // one per region
    AllocationSolution solution;
};

/// Re-solve the allocation for every combination of planning-window tau values
/// in the grid. Cells run concurrently; rows come back in grid order.
inline std::vector<SweepRow> run_sweep(const Scenario& sc, const std::vector<int>& tau_grid,
                                       const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    if (sc.region_count() != 2)
        throw std::invalid_argument("run_sweep: tau sweep is defined for two-region scenarios");
    if (tau_grid.empty()) throw std::invalid_argument("run_sweep: empty tau grid");
    for (int v : tau_grid)
        if (v < sc.tau_min || v > sc.tau_max)
            throw std::invalid_argument("run_sweep: grid value outside tau_domain");
    for (int r = 0; r < 2; ++r) {
        const auto& bp = sc.regions[static_cast<size_t>(r)].control_breakpoints;
        if (bp.size() < 2 || bp[bp.size() - 2] != sc.window_start - 1 || bp.back() != sc.window_end)
            throw std::invalid_argument(
                "run_sweep: the last control interval must equal the objective window");
    }

    std::vector<std::pair<int, int>> cells;
    for (int t1 : tau_grid)
        for (int t2 : tau_grid) cells.emplace_back(t1, t2);

    auto solve_cell = [&](std::pair<int, int> cell) {
        Scenario mod = sc;
        mod.regions[0].control_taus.back() = cell.first;
        mod.regions[1].control_taus.back() = cell.second;
        SweepRow row;
        row.taus = {cell.first, cell.second};
        row.solution = solve(mod.allocation_problem());
        return row;
    };

    std::vector<std::future<SweepRow>> futs;
    futs.reserve(cells.size());
    for (const auto& c : cells)
        futs.push_back(std::async(std::launch::async, solve_cell, c));
    std::vector<SweepRow> rows;
    rows.reserve(cells.size());
    for (auto& f : futs) rows.push_back(f.get());

    detail::write_text(fs::path(out_dir) / "sweep_summary.txt", detail::resolved_params(sc));
    std::ofstream out(fs::path(out_dir) / "sweep.csv");
    out << "# scenario=" << scenario_hash(sc) << "\n";
    out << "tau1,tau2";
    for (size_t q = 0; q < sc.tranche_days.size(); ++q) out << ",r1_tranche" << q + 1;
    out << ",objective,occ_mean_1,occ_mean_2,occ_max_1,occ_max_2,feasible\n";
    for (const auto& row : rows) {
        out << row.taus[0] << "," << row.taus[1];
        for (size_t q = 0; q < row.solution.shares.size(); ++q)
            out << "," << format_double(row.solution.plans[0].tranche_sizes[q]);
        out << "," << format_double(row.solution.objective);
        out << "," << format_double(row.solution.occupancy[0].mean) << ","
            << format_double(row.solution.occupancy[1].mean);
        out << "," << format_double(row.solution.occupancy[0].max) << ","
            << format_double(row.solution.occupancy[1].max);
        out << "," << (row.solution.feasibility.feasible ? "feasible" : "infeasible") << "\n";
    }
    return rows;
}

}  // namespace epiplan
