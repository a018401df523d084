#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace epiplan {

struct NelderMeadOptions {
    double diameter_tol = 1e-6;
    int max_evaluations = 400;
    double initial_step = 0.1;  // relative to box width
};

struct NelderMeadResult {
    std::vector<double> x;
    double value = 0.0;
    int evaluations = 0;
    bool converged = false;
};

/// Derivative-free simplex descent on a box. Candidate points are clamped to
/// the box, which keeps the standard reflect/expand/contract/shrink updates
/// feasible without penalty terms.
inline NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                                    std::vector<double> start, const std::vector<double>& lo,
                                    const std::vector<double>& hi,
                                    const NelderMeadOptions& opts = {}) {
    const size_t n = start.size();
    if (n == 0 || lo.size() != n || hi.size() != n)
        throw std::invalid_argument("nelder_mead: dimension mismatch");
    for (size_t k = 0; k < n; ++k)
        if (!(lo[k] <= hi[k])) throw std::invalid_argument("nelder_mead: empty box");

    auto clamp = [&](std::vector<double>& x) {
        for (size_t k = 0; k < n; ++k) x[k] = std::clamp(x[k], lo[k], hi[k]);
    };
    clamp(start);

    NelderMeadResult res;
    res.evaluations = 0;
    auto eval = [&](const std::vector<double>& x) {
        ++res.evaluations;
        return f(x);
    };

    std::vector<std::vector<double>> simplex(n + 1, start);
    std::vector<double> values(n + 1);
    for (size_t k = 0; k < n; ++k) {
        double step = opts.initial_step * (hi[k] - lo[k]);
        if (step == 0.0) step = opts.initial_step;
        simplex[k + 1][k] += (simplex[k + 1][k] + step <= hi[k]) ? step : -step;
        clamp(simplex[k + 1]);
    }
    for (size_t v = 0; v <= n; ++v) values[v] = eval(simplex[v]);

    const double rho = 1.0, chi = 2.0, gam = 0.5, shrink = 0.5;
    std::vector<size_t> order(n + 1);

    while (res.evaluations < opts.max_evaluations) {
        std::iota(order.begin(), order.end(), size_t{0});
        std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return values[a] < values[b]; });

        double diam = 0.0;
        for (size_t v = 1; v <= n; ++v)
            for (size_t k = 0; k < n; ++k)
                diam = std::max(diam, std::fabs(simplex[order[v]][k] - simplex[order[0]][k]));
        if (diam < opts.diameter_tol) {
            res.converged = true;
            break;
        }

        const size_t best = order[0], worst = order[n], second = order[n - 1];
        std::vector<double> centroid(n, 0.0);
        for (size_t v = 0; v <= n; ++v)
            if (v != worst)
                for (size_t k = 0; k < n; ++k) centroid[k] += simplex[v][k] / static_cast<double>(n);

        auto affine = [&](double coef) {
            std::vector<double> x(n);
            for (size_t k = 0; k < n; ++k) x[k] = centroid[k] + coef * (centroid[k] - simplex[worst][k]);
            clamp(x);
            return x;
        };

        std::vector<double> xr = affine(rho);
        double fr = eval(xr);
        if (fr < values[best]) {
            std::vector<double> xe = affine(rho * chi);
            double fe = eval(xe);
            if (fe < fr) {
                simplex[worst] = std::move(xe);
                values[worst] = fe;
            } else {
                simplex[worst] = std::move(xr);
                values[worst] = fr;
            }
        } else if (fr < values[second]) {
            simplex[worst] = std::move(xr);
            values[worst] = fr;
        } else {
            std::vector<double> xc = affine(fr < values[worst] ? rho * gam : -gam);
            double fc = eval(xc);
            if (fc < std::min(fr, values[worst])) {
                simplex[worst] = std::move(xc);
                values[worst] = fc;
            } else {
                for (size_t v = 0; v <= n; ++v) {
                    if (v == best) continue;
                    for (size_t k = 0; k < n; ++k)
                        simplex[v][k] = simplex[best][k] + shrink * (simplex[v][k] - simplex[best][k]);
                    clamp(simplex[v]);
                    values[v] = eval(simplex[v]);
                }
            }
        }
    }

    size_t arg = 0;
    for (size_t v = 1; v <= n; ++v)
        if (values[v] < values[arg]) arg = v;
    res.x = simplex[arg];
    res.value = values[arg];
    return res;
}

}  // namespace epiplan
