#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "vgv/stats.hpp"
#include "vgv/timeseries.hpp"

namespace vgv {

/// GJR-GARCH(1,1,1) parameters. The conditional variance recursion is
///   s2_t = alpha0 + alpha1*a_{t-1}^2 + beta1*s2_{t-1} + gamma1*a_{t-1}^2*[a_{t-1} < 0]
/// with a_t = sigma_t * eps_t and eps_t drawn from `noise`.
struct GjrGarchParams {
    double alpha0 = 0.0;
    double alpha1 = 0.0;
    double beta1 = 0.0;
    double gamma1 = 0.0;
    NoiseFamily noise;

    double persistence() const { return alpha1 + beta1 + 0.5 * gamma1; }

    /// Sign constraints: alpha0 > 0, alpha1 >= 0, beta1 >= 0, alpha1 + gamma1 >= 0.
    bool is_valid() const {
        return alpha0 > 0.0 && alpha1 >= 0.0 && beta1 >= 0.0 && alpha1 + gamma1 >= 0.0;
    }
};

struct StationarityReport {
    bool stationary = false;
    double margin = 0.0;  // 1 - (alpha1 + beta1 + gamma1/2)
};

/// Stationary iff alpha0 > 0 and persistence < 1.
StationarityReport stationarity_check(const GjrGarchParams& p);

/// E[a_t^2] = alpha0 / (1 - alpha1 - beta1 - gamma1/2). Throws when the
/// denominator is not positive.
double unconditional_variance(const GjrGarchParams& p);

/// Transient time scale tau = 1 / (-ln persistence), in steps.
/// Requires persistence in (0,1).
double relaxation_time(const GjrGarchParams& p);

/// Conditional volatility of the observed returns: sigma_1 = sigma0 exactly,
/// then the recursion. Output length equals the returns length.
VolatilitySeries filter(const GjrGarchParams& p, const ReturnSeries& r, double sigma0);

/// Sum over t of [ log f_eps(r_t / sigma_t) - ln sigma_t ] with sigma from
/// filter(p, r, sigma0).
double log_likelihood(const GjrGarchParams& p, const ReturnSeries& r, double sigma0);

/// Stationary simulation: sigma_1 = sigma0, r_1 = sigma_1 * eps_1, then the
/// recursion. Deterministic given (p, length, sigma0, seed).
std::pair<ReturnSeries, VolatilitySeries> simulate(const GjrGarchParams& p, std::size_t length,
                                                   double sigma0, std::uint64_t seed,
                                                   Scale scale = Scale::percent);

struct FitOptions {
    int multistarts = 5;
    int max_iterations = 4000;  // simplex iterations per start
    double tolerance = 1e-8;    // simplex f-spread convergence
    std::size_t min_length = 250;
};

/// Per-parameter rows follow the order alpha0, alpha1, beta1, gamma1 and,
/// for t noise, nu. A parameter pinned at its sign constraint is reported
/// with estimate snapped to the boundary, standard error 0, t-statistic 0
/// and p-value 0 flagged as underflowed (the information matrix is projected
/// onto the free coordinates).
struct FitReport {
    GjrGarchParams params;
    double sigma0 = 0.0;
    std::vector<std::string> param_names;
    std::vector<double> estimates;
    std::vector<double> std_errors;
    std::vector<double> t_statistics;
    std::vector<double> p_values;
    std::vector<bool> at_boundary;
    std::vector<bool> p_underflow;
    bool std_errors_available = false;
    double log_likelihood = 0.0;
    bool converged = false;
    int iterations = 0;

    bool operator==(const FitReport& other) const;
};

/// Maximum-likelihood fit of the GJR-GARCH(1,1,1) with fixed
/// sigma0 = historical volatility of the full input. The search runs on an
/// unconstrained reparameterization (log alpha0, interior map for the
/// persistence split, log(nu-2)) with multi-start Nelder-Mead; standard
/// errors come from the inverse finite-difference Hessian of the negative
/// log-likelihood. Inputs shorter than options.min_length are rejected.
FitReport fit(const ReturnSeries& r, NoiseKind noise_kind, const FitOptions& options = {});

std::string fit_report_to_json_string(const FitReport& report, int indent = 2);
FitReport fit_report_from_json_string(const std::string& text);

}  // namespace vgv
