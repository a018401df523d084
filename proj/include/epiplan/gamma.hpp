#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace epiplan {

/// Shape/rate parameters of the gamma delay distribution (mean = shape/rate).
struct GammaParams {
    double shape = 10.0;   // a
    double rate = 1.3333;  // b, per day

    void validate() const {
        if (!(shape > 0.0) || !(rate > 0.0))
            throw std::invalid_argument("GammaParams: shape and rate must be positive");
    }
    double mean() const { return shape / rate; }
};

/// Gamma density b^a / Gamma(a) * x^(a-1) * exp(-b x).
inline double gamma_pdf(double x, const GammaParams& p) {
    p.validate();
    if (x < 0.0) throw std::invalid_argument("gamma_pdf: x must be nonnegative");
    if (x == 0.0) {
        if (p.shape > 1.0) return 0.0;
        if (p.shape == 1.0) return p.rate;
        return std::numeric_limits<double>::infinity();
    }
    return std::exp(p.shape * std::log(p.rate) - std::lgamma(p.shape)
                    + (p.shape - 1.0) * std::log(x) - p.rate * x);
}

namespace detail {

// Regularized lower incomplete gamma P(a, z), split into the two standard
// convergence regimes: power series for z < a+1, continued fraction above.
inline double lower_gamma_series(double a, double z) {
    double ap = a;
    double del = 1.0 / a;
    double sum = del;
    for (int n = 0; n < 500; ++n) {
        ap += 1.0;
        del *= z / ap;
        sum += del;
        if (std::fabs(del) < std::fabs(sum) * std::numeric_limits<double>::epsilon())
            break;
    }
    return sum * std::exp(-z + a * std::log(z) - std::lgamma(a));
}

inline double upper_gamma_cf(double a, double z) {
    const double eps = std::numeric_limits<double>::epsilon();
    const double fpmin = std::numeric_limits<double>::min() / eps;
    double b = z + 1.0 - a;
    double c = 1.0 / fpmin;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 500; ++i) {
        double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < fpmin) d = fpmin;
        c = b + an / c;
        if (std::fabs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) <= eps) break;
    }
    return std::exp(-z + a * std::log(z) - std::lgamma(a)) * h;
}

}  // namespace detail

/// Regularized lower incomplete gamma P(a, b x): probability of a delay <= x days.
inline double gamma_cdf(double x, const GammaParams& p) {
    p.validate();
    if (x < 0.0) throw std::invalid_argument("gamma_cdf: x must be nonnegative");
    if (x == 0.0) return 0.0;
    const double z = p.rate * x;
    if (z < p.shape + 1.0) return detail::lower_gamma_series(p.shape, z);
    return 1.0 - detail::upper_gamma_cf(p.shape, z);
}

/// Discretized death-delay kernel over integer day lags 0..max_lag.
///
/// omega_p[i] is the gamma density sampled at day i and is used directly as the
/// per-day death weight. omega[i] is the running sum of omega_p (clamped at 1),
/// the cumulative weight the difference equations use; it brackets the
/// continuous CDF between day i and day i+1. Built kernels are immutable and
/// safe to share across threads.
struct GammaKernel {
    GammaParams params;
    int max_lag = 0;
    std::vector<double> omega;    // cumulative, nondecreasing, in [0, 1]
    std::vector<double> omega_p;  // density at integer days, >= 0

    double survival(double alpha, int i) const { return 1.0 - alpha * omega[static_cast<size_t>(i)]; }
};

inline GammaKernel build_kernel(const GammaParams& p, int max_lag) {
    p.validate();
    if (max_lag < 1) throw std::invalid_argument("build_kernel: max_lag must be >= 1");
    GammaKernel k;
    k.params = p;
    k.max_lag = max_lag;
    k.omega_p.resize(static_cast<size_t>(max_lag) + 1);
    k.omega.resize(static_cast<size_t>(max_lag) + 1);
    double acc = 0.0;
    for (int i = 0; i <= max_lag; ++i) {
        double d = gamma_pdf(static_cast<double>(i), p);
        k.omega_p[static_cast<size_t>(i)] = d;
        acc += d;
        k.omega[static_cast<size_t>(i)] = std::min(acc, 1.0);
    }
    return k;
}

}  // namespace epiplan
