#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "epiplan/runner.hpp"

namespace {

epiplan::Scenario load_with_seed_override(const std::string& path, const std::string& seed) {
    epiplan::Scenario sc = epiplan::load_scenario(path);
    if (!seed.empty()) sc.seed = epiplan::seed_convention_from_string(seed);
    return sc;
}

std::vector<int> parse_grid(const std::string& list) {
    std::vector<int> out;
    std::string cur;
    for (char c : list + ",") {
        if (c == ',') {
            if (!cur.empty()) {
                try {
                    out.push_back(std::stoi(cur));
                } catch (const std::exception&) {
                    throw std::invalid_argument("--tau-grid: '" + cur + "' is not an integer");
                }
            }
            cur.clear();
        } else {
            cur += c;
        }
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Delay-difference epidemic simulation, fitting and bed-capacity planning"};
    app.require_subcommand(1);

    std::string scenario_path, out_dir = "out", seed_convention, data_csv, tau_grid = "3,4,5";
    int problem_number = 1;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--scenario", scenario_path, "scenario JSON file")->required();
        cmd->add_option("--out", out_dir, "output directory");
        cmd->add_option("--seed-convention", seed_convention,
                        "override the scenario seeding (constant|pulse|window)");
    };

    CLI::App* sim = app.add_subcommand("simulate", "run the scenario and write daily series");
    add_common(sim);

    CLI::App* fit_cmd = app.add_subcommand("fit", "fit alpha, beta and the tau schedule to data");
    add_common(fit_cmd);
    fit_cmd->add_option("--data", data_csv, "observed date,cases,deaths CSV")->required();

    CLI::App* alloc = app.add_subcommand("allocate", "solve the bed-distribution problem");
    add_common(alloc);
    alloc->add_option("--problem", problem_number, "1: capacity constraint, 2: with cost constraint")
        ->check(CLI::Range(1, 2));

    CLI::App* sweep = app.add_subcommand("sweep", "re-solve the allocation over a tau grid");
    add_common(sweep);
    sweep->add_option("--tau-grid", tau_grid, "comma-separated tau values");

    CLI11_PARSE(app, argc, argv);

    try {
        epiplan::Scenario sc = load_with_seed_override(scenario_path, seed_convention);
        if (sim->parsed()) {
            epiplan::run_simulate(sc, out_dir);
        } else if (fit_cmd->parsed()) {
            epiplan::FitResult res = epiplan::run_fit(sc, data_csv, out_dir);
            std::printf("alpha=%.6g beta=%.6g loss=%.6g\n", res.alpha, res.beta, res.loss);
        } else if (alloc->parsed()) {
            epiplan::AllocationSolution sol = epiplan::run_allocate(sc, problem_number, out_dir);
            std::printf("objective=%.6g %s\n", sol.objective,
                        sol.feasibility.feasible ? "feasible" : "infeasible");
        } else if (sweep->parsed()) {
            epiplan::run_sweep(sc, parse_grid(tau_grid), out_dir);
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
