#pragma once

#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "epiplan/allocate.hpp"
#include "epiplan/fit.hpp"

namespace epiplan {

/// All validation problems of a scenario document, reported in one pass.
class ScenarioError : public std::runtime_error {
  public:
    explicit ScenarioError(const std::vector<std::string>& problems)
        : std::runtime_error(join(problems)), problems_(problems) {}
    const std::vector<std::string>& problems() const { return problems_; }

  private:
    static std::string join(const std::vector<std::string>& ps) {
        std::ostringstream os;
        os << "scenario has " << ps.size() << " problem(s):";
        for (const auto& p : ps) os << "\n  - " << p;
        return os.str();
    }
    std::vector<std::string> problems_;
};

struct ScenarioRegion {
    std::string name;
    double alpha = 0.0;
    double x0 = 0.0;
    int latent_days = 6;
    int sigma = 11;
    double beds_base = 0.0;
    std::vector<int> control_breakpoints;
    std::vector<int> control_taus;
};

struct ScenarioFitSection {
    std::vector<int> breakpoints;
    double alpha_lo = 0.0, alpha_hi = 1.0;
    double beta_lo = 0.0, beta_hi = 1.0;
    double x0 = 1.0;
};

/// In-memory form of a scenario document (JSON on disk).
struct Scenario {
    GammaParams kernel_params;
    int kernel_max_lag = 35;
    std::vector<ScenarioRegion> regions;
    std::vector<double> beta;  // row-major m x m
    int horizon = 0;
    int tau_min = 1, tau_max = 1;
    SeedConvention seed = SeedConvention::constant_history;
    int seed_window_days = -1;
    std::vector<int> tranche_days;
    std::vector<double> tranche_sizes;
    double objective_weight = 0.0;
    int window_start = 0, window_end = 0;
    std::optional<CostModel> costs;
    std::optional<ScenarioFitSection> fit;
    std::string source_text;

    int region_count() const { return static_cast<int>(regions.size()); }

    GammaKernel build_kernel_() const { return build_kernel(kernel_params, kernel_max_lag); }

    RegionParams region_params(int r, const GammaKernel& kernel) const {
        RegionParams p;
        p.alpha = regions[static_cast<size_t>(r)].alpha;
        p.latent_days = regions[static_cast<size_t>(r)].latent_days;
        p.sigma = regions[static_cast<size_t>(r)].sigma;
        p.kernel = kernel;
        return p;
    }

    ControlSchedule control_schedule(int r) const {
        const auto& reg = regions[static_cast<size_t>(r)];
        return ControlSchedule(reg.control_breakpoints, reg.control_taus, tau_min, tau_max);
    }

    CouplingMatrix coupling() const {
        CouplingMatrix m;
        m.regions = region_count();
        m.beta = beta;
        return m;
    }

    AllocationProblem allocation_problem() const {
        AllocationProblem prob;
        GammaKernel kernel = build_kernel_();
        for (int r = 0; r < region_count(); ++r) {
            prob.regions.push_back(region_params(r, kernel));
            prob.controls.push_back(control_schedule(r));
            prob.x0.push_back(regions[static_cast<size_t>(r)].x0);
            prob.base_beds.push_back(regions[static_cast<size_t>(r)].beds_base);
        }
        prob.coupling = coupling();
        prob.seed = seed;
        prob.seed_window_days = seed_window_days;
        prob.tranche_days = tranche_days;
        prob.tranche_sizes = tranche_sizes;
        prob.weight = objective_weight;
        prob.window_start = window_start;
        prob.window_end = window_end;
        prob.costs = costs;
        return prob;
    }

    FitSpec fit_spec() const {
        if (!fit) throw std::runtime_error("scenario has no fit section");
        FitSpec spec;
        spec.breakpoints = fit->breakpoints;
        spec.tau_min = tau_min;
        spec.tau_max = tau_max;
        spec.alpha_lo = fit->alpha_lo;
        spec.alpha_hi = fit->alpha_hi;
        spec.beta_lo = fit->beta_lo;
        spec.beta_hi = fit->beta_hi;
        spec.x0 = fit->x0;
        spec.latent_days = regions.empty() ? 6 : regions[0].latent_days;
        spec.kernel = build_kernel_();
        spec.seed = seed;
        spec.window_days = seed_window_days;
        return spec;
    }
};

namespace detail {

inline uint64_t fnv1a(const std::string& data) {
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace detail

inline std::string scenario_hash(const Scenario& s) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(detail::fnv1a(s.source_text)));
    return buf;
}

inline Scenario parse_scenario(const std::string& text) {
    std::vector<std::string> problems;
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ScenarioError({std::string("not valid JSON: ") + e.what()});
    }

    Scenario sc;
    sc.source_text = text;

    auto need = [&](const nlohmann::json& obj, const char* key, const std::string& where) -> const nlohmann::json* {
        if (!obj.contains(key)) {
            problems.push_back(where + ": missing '" + key + "'");
            return nullptr;
        }
        return &obj.at(key);
    };

    try {
        if (const auto* k = need(doc, "kernel", "top level")) {
            sc.kernel_params.shape = k->value("shape", 10.0);
            sc.kernel_params.rate = k->value("rate", 1.3333);
            sc.kernel_max_lag = k->value("max_lag", 35);
            if (!(sc.kernel_params.shape > 0.0)) problems.push_back("kernel: shape must be > 0");
            if (!(sc.kernel_params.rate > 0.0)) problems.push_back("kernel: rate must be > 0");
            if (sc.kernel_max_lag < 1) problems.push_back("kernel: max_lag must be >= 1");
        }

        sc.horizon = doc.value("horizon", 0);
        if (sc.horizon < 1) problems.push_back("top level: horizon must be >= 1");

        if (const auto* t = need(doc, "tau_domain", "top level")) {
            sc.tau_min = t->value("min", 1);
            sc.tau_max = t->value("max", 1);
            if (sc.tau_min < 1 || sc.tau_max < sc.tau_min)
                problems.push_back("tau_domain: need 1 <= min <= max");
        }

        if (doc.contains("seed")) {
            const auto& s = doc.at("seed");
            try {
                sc.seed = seed_convention_from_string(s.value("convention", "constant"));
            } catch (const std::invalid_argument& e) {
                problems.push_back(std::string("seed: ") + e.what());
            }
            sc.seed_window_days = s.value("window_days", -1);
            if (sc.seed == SeedConvention::window && sc.seed_window_days == 0)
                problems.push_back("seed: window_days must be >= 1");
        }

        if (const auto* regions = need(doc, "regions", "top level")) {
            if (!regions->is_array() || regions->empty()) {
                problems.push_back("regions: must be a nonempty array");
            } else {
                for (size_t r = 0; r < regions->size(); ++r) {
                    const auto& jr = (*regions)[r];
                    ScenarioRegion reg;
                    std::string where = "regions[" + std::to_string(r) + "]";
                    reg.name = jr.value("name", "region" + std::to_string(r + 1));
                    for (size_t r2 = 0; r2 < sc.regions.size(); ++r2)
                        if (sc.regions[r2].name == reg.name)
                            problems.push_back(where + ": duplicate region name '" + reg.name + "'");
                    reg.alpha = jr.value("alpha", -1.0);
                    if (reg.alpha < 0.0 || reg.alpha > 1.0)
                        problems.push_back(where + ": alpha must be in [0, 1]");
                    reg.x0 = jr.value("x0", -1.0);
                    if (reg.x0 < 0.0) problems.push_back(where + ": x0 must be >= 0");
                    reg.latent_days = jr.value("latent_days", 6);
                    if (reg.latent_days < 0) problems.push_back(where + ": latent_days must be >= 0");
                    reg.sigma = jr.value("sigma", 11);
                    if (reg.sigma < 1) problems.push_back(where + ": sigma must be >= 1");
                    reg.beds_base = jr.value("beds_base", 0.0);
                    if (reg.beds_base < 0.0) problems.push_back(where + ": beds_base must be >= 0");
                    if (jr.contains("control")) {
                        const auto& c = jr.at("control");
                        reg.control_breakpoints = c.value("breakpoints", std::vector<int>{});
                        reg.control_taus = c.value("taus", std::vector<int>{});
                        if (reg.control_breakpoints.size() != reg.control_taus.size() + 1)
                            problems.push_back(where + ".control: need one more breakpoint than tau values");
                        for (size_t j = 1; j < reg.control_breakpoints.size(); ++j)
                            if (reg.control_breakpoints[j] <= reg.control_breakpoints[j - 1])
                                problems.push_back(where + ".control: breakpoints must increase");
                        for (int tv : reg.control_taus)
                            if (tv < sc.tau_min || tv > sc.tau_max)
                                problems.push_back(where + ".control: tau outside tau_domain");
                        if (!reg.control_breakpoints.empty() &&
                            (reg.control_breakpoints.front() > 0 ||
                             reg.control_breakpoints.back() < sc.horizon))
                            problems.push_back(where + ".control: must cover days 1.." +
                                               std::to_string(sc.horizon));
                    } else {
                        problems.push_back(where + ": missing 'control'");
                    }
                    sc.regions.push_back(reg);
                }
            }
        }

        const int m = sc.region_count();
        if (const auto* b = need(doc, "beta", "top level")) {
            if (!b->is_array() || static_cast<int>(b->size()) != m) {
                problems.push_back("beta: must be an " + std::to_string(m) + "x" + std::to_string(m) +
                                   " matrix");
            } else {
                for (const auto& row : *b) {
                    if (!row.is_array() || static_cast<int>(row.size()) != m) {
                        problems.push_back("beta: ragged matrix row");
                        break;
                    }
                    for (const auto& v : row) {
                        double x = v.get<double>();
                        if (x < 0.0) problems.push_back("beta: negative transmission rate");
                        sc.beta.push_back(x);
                    }
                }
            }
        }

        if (doc.contains("beds")) {
            const auto& beds = doc.at("beds");
            sc.tranche_days = beds.value("tranche_days", std::vector<int>{});
            sc.tranche_sizes = beds.value("tranche_sizes", std::vector<double>{});
            if (sc.tranche_days.size() != sc.tranche_sizes.size())
                problems.push_back("beds: tranche_days and tranche_sizes must have equal length");
            for (double s : sc.tranche_sizes)
                if (s < 0.0) problems.push_back("beds: negative tranche size");
            for (size_t i = 1; i < sc.tranche_days.size(); ++i)
                if (sc.tranche_days[i] <= sc.tranche_days[i - 1])
                    problems.push_back("beds: tranche_days must increase");
        }

        if (doc.contains("objective")) {
            const auto& obj = doc.at("objective");
            sc.objective_weight = obj.value("weight", 0.0);
            sc.window_start = obj.value("window_start", 0);
            sc.window_end = obj.value("window_end", sc.horizon);
            if (sc.objective_weight < 0.0) problems.push_back("objective: weight must be >= 0");
            if (sc.window_start < 1 || sc.window_end < sc.window_start || sc.window_end > sc.horizon)
                problems.push_back("objective: window must satisfy 1 <= start <= end <= horizon");
        }

        if (doc.contains("costs")) {
            const auto& jc = doc.at("costs");
            CostModel cm;
            cm.per_new_bed = jc.value("per_new_bed", 0.0);
            cm.per_patient_day = jc.value("per_patient_day", 0.0);
            cm.per_new_case = jc.value("per_new_case", 0.0);
            cm.budget = jc.value("budget", std::vector<double>{});
            cm.budget_start = jc.value("budget_start", sc.window_start);
            if (cm.per_new_bed < 0.0 || cm.per_patient_day < 0.0 || cm.per_new_case < 0.0)
                problems.push_back("costs: coefficients must be >= 0");
            for (double f : cm.budget)
                if (f < 0.0) problems.push_back("costs: negative budget entry");
            if (static_cast<int>(cm.budget.size()) < sc.window_end - cm.budget_start + 1)
                problems.push_back("costs: budget series does not cover the objective window");
            sc.costs = cm;
        }

        if (doc.contains("fit")) {
            const auto& jf = doc.at("fit");
            ScenarioFitSection fs;
            fs.breakpoints = jf.value("breakpoints", std::vector<int>{});
            if (fs.breakpoints.size() < 2) problems.push_back("fit: need at least 2 breakpoints");
            for (size_t j = 1; j < fs.breakpoints.size(); ++j)
                if (fs.breakpoints[j] <= fs.breakpoints[j - 1])
                    problems.push_back("fit: breakpoints must increase");
            if (jf.contains("alpha_bounds")) {
                auto ab = jf.at("alpha_bounds").get<std::vector<double>>();
                if (ab.size() == 2) {
                    fs.alpha_lo = ab[0];
                    fs.alpha_hi = ab[1];
                } else {
                    problems.push_back("fit: alpha_bounds must be [lo, hi]");
                }
            }
            if (jf.contains("beta_bounds")) {
                auto bb = jf.at("beta_bounds").get<std::vector<double>>();
                if (bb.size() == 2) {
                    fs.beta_lo = bb[0];
                    fs.beta_hi = bb[1];
                } else {
                    problems.push_back("fit: beta_bounds must be [lo, hi]");
                }
            }
            fs.x0 = jf.value("x0", 1.0);
            if (fs.x0 < 0.0) problems.push_back("fit: x0 must be >= 0");
            if (!(fs.alpha_lo <= fs.alpha_hi) || fs.alpha_lo < 0.0 || fs.alpha_hi > 1.0)
                problems.push_back("fit: alpha_bounds must satisfy 0 <= lo <= hi <= 1");
            if (!(fs.beta_lo <= fs.beta_hi) || fs.beta_lo < 0.0)
                problems.push_back("fit: beta_bounds must satisfy 0 <= lo <= hi");
            sc.fit = fs;
        }
    } catch (const nlohmann::json::exception& e) {
        problems.push_back(std::string("malformed value: ") + e.what());
    }

    if (!problems.empty()) throw ScenarioError(problems);
    return sc;
}

inline Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open scenario file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_scenario(ss.str());
}

}  // namespace epiplan
