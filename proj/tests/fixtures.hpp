#pragma once

// Shared two-region synthetic setup used across the test suites.

#include "epiplan/allocate.hpp"
#include "epiplan/simulate.hpp"

namespace fixtures {

inline epiplan::GammaKernel kernel() { return epiplan::build_kernel({10.0, 1.3333}, 35); }

inline epiplan::RegionParams region(double alpha = 0.6, int latent = 6, int sigma = 11) {
    epiplan::RegionParams p;
    p.alpha = alpha;
    p.latent_days = latent;
    p.sigma = sigma;
    p.kernel = kernel();
    return p;
}

// tau = 4 on [1,50], 5 on [51,100], then tau_plan on [101,150]
inline epiplan::ControlSchedule planned_control(int tau_plan) {
    return epiplan::ControlSchedule({0, 50, 100, 150}, {4, 5, tau_plan}, 3, 5);
}

inline epiplan::ControlSchedule history_control() {
    return epiplan::ControlSchedule({0, 50, 100}, {4, 5}, 3, 5);
}

inline epiplan::ControlSchedule constant_control(int tau, int horizon, int lo = 1, int hi = 10) {
    return epiplan::ControlSchedule({0, horizon}, {tau}, lo, hi);
}

inline epiplan::AllocationProblem two_region_problem(int tau1, int tau2) {
    epiplan::AllocationProblem prob;
    prob.regions = {region(), region()};
    prob.coupling = epiplan::CouplingMatrix::diagonal({0.30, 0.28});
    prob.controls = {planned_control(tau1), planned_control(tau2)};
    prob.x0 = {2.0, 2.0};
    prob.seed = epiplan::SeedConvention::window;
    prob.base_beds = {126.0, 60.0};
    prob.tranche_days = {101, 108, 115, 122};
    prob.tranche_sizes = {350.0, 300.0, 100.0, 20.0};
    prob.weight = 100.0;
    prob.window_start = 101;
    prob.window_end = 150;
    return prob;
}

}  // namespace fixtures
