#include "vgv/garch.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

#include "json.hpp"

namespace vgv {

namespace {

constexpr double kPenalty = 1e30;

struct NoiseConstants {
    bool is_t = false;
    double nu = 0.0;
    double inv_c2 = 1.0;    // 1/c^2 with c^2 = (nu-2)/nu
    double log_norm = 0.0;  // per-observation additive constant
};

NoiseConstants noise_constants(const NoiseFamily& f) {
    NoiseConstants k;
    if (f.kind == NoiseKind::standard_normal) {
        k.log_norm = -0.5 * std::log(2.0 * M_PI);
        return k;
    }
    k.is_t = true;
    k.nu = f.dof;
    const double c2 = (k.nu - 2.0) / k.nu;
    k.inv_c2 = 1.0 / c2;
    k.log_norm = std::lgamma(0.5 * (k.nu + 1.0)) - std::lgamma(0.5 * k.nu) -
                 0.5 * std::log(k.nu * M_PI) - 0.5 * std::log(c2);
    return k;
}

// Negative log-likelihood without precondition checks; returns a large
// penalty instead of throwing so the optimizer and the finite-difference
// Hessian can probe freely.
double neg_log_likelihood_core(const GjrGarchParams& p, const std::vector<double>& r,
                               double sigma0) {
    if (!(sigma0 > 0.0) || !(p.alpha0 > 0.0)) return kPenalty;
    if (p.noise.kind == NoiseKind::standardized_t && !(p.noise.dof > 2.0)) return kPenalty;
    const NoiseConstants k = noise_constants(p.noise);
    double s2 = sigma0 * sigma0;
    double ll = 0.0;
    for (std::size_t t = 0; t < r.size(); ++t) {
        if (t > 0) {
            const double a = r[t - 1];
            const double lever = (a < 0.0) ? p.gamma1 : 0.0;
            s2 = p.alpha0 + (p.alpha1 + lever) * a * a + p.beta1 * s2;
        }
        if (!(s2 > 0.0) || !std::isfinite(s2)) return kPenalty;
        const double z2 = r[t] * r[t] / s2;
        if (k.is_t)
            ll += k.log_norm - 0.5 * (k.nu + 1.0) * std::log1p(z2 * k.inv_c2 / k.nu);
        else
            ll += k.log_norm - 0.5 * z2;
        ll -= 0.5 * std::log(s2);
    }
    if (!std::isfinite(ll)) return kPenalty;
    return -ll;
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }
double logit(double p) { return std::log(p / (1.0 - p)); }

// theta -> params map keeping alpha1, beta1, gamma1 >= 0 and persistence < 1
// by construction: u = persistence, v = beta share of u, w = leverage share
// of the remainder.
GjrGarchParams theta_to_params(const std::vector<double>& th, NoiseKind kind) {
    GjrGarchParams p;
    p.alpha0 = std::exp(th[0]);
    const double u = sigmoid(th[1]);
    const double v = sigmoid(th[2]);
    const double w = sigmoid(th[3]);
    p.beta1 = u * v;
    const double rest = u * (1.0 - v);
    p.alpha1 = rest * (1.0 - w);
    p.gamma1 = 2.0 * rest * w;
    if (kind == NoiseKind::standard_normal)
        p.noise = NoiseFamily::normal();
    else
        p.noise = NoiseFamily::student_t(2.0 + std::exp(th[4]));
    return p;
}

struct NmResult {
    std::vector<double> x;
    double f = kPenalty;
    bool converged = false;
    int iterations = 0;
};

NmResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                     const std::vector<double>& x0, const std::vector<double>& steps,
                     int max_iter, double ftol) {
    const std::size_t n = x0.size();
    std::vector<std::vector<double>> xs(n + 1, x0);
    for (std::size_t i = 0; i < n; ++i) xs[i + 1][i] += steps[i];
    std::vector<double> fs(n + 1);
    for (std::size_t i = 0; i <= n; ++i) fs[i] = f(xs[i]);

    std::vector<std::size_t> order(n + 1);
    NmResult res;
    for (res.iterations = 0; res.iterations < max_iter; ++res.iterations) {
        for (std::size_t i = 0; i <= n; ++i) order[i] = i;
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return fs[a] < fs[b]; });
        const std::size_t best = order[0], worst = order[n], second = order[n - 1];
        if (fs[worst] - fs[best] < ftol) {
            res.converged = true;
            break;
        }
        std::vector<double> centroid(n, 0.0);
        for (std::size_t i = 0; i <= n; ++i) {
            if (i == worst) continue;
            for (std::size_t d = 0; d < n; ++d) centroid[d] += xs[i][d];
        }
        for (std::size_t d = 0; d < n; ++d) centroid[d] /= static_cast<double>(n);

        auto blend = [&](double coef) {
            std::vector<double> x(n);
            for (std::size_t d = 0; d < n; ++d)
                x[d] = centroid[d] + coef * (xs[worst][d] - centroid[d]);
            return x;
        };
        std::vector<double> xr = blend(-1.0);
        const double fr = f(xr);
        if (fr < fs[order[0]]) {
            std::vector<double> xe = blend(-2.0);
            const double fe = f(xe);
            if (fe < fr) {
                xs[worst] = std::move(xe);
                fs[worst] = fe;
            } else {
                xs[worst] = std::move(xr);
                fs[worst] = fr;
            }
        } else if (fr < fs[second]) {
            xs[worst] = std::move(xr);
            fs[worst] = fr;
        } else {
            const bool outside = fr < fs[worst];
            std::vector<double> xc = blend(outside ? -0.5 : 0.5);
            const double fc = f(xc);
            if (fc < std::min(fr, fs[worst])) {
                xs[worst] = std::move(xc);
                fs[worst] = fc;
            } else {
                for (std::size_t i = 0; i <= n; ++i) {
                    if (i == best) continue;
                    for (std::size_t d = 0; d < n; ++d)
                        xs[i][d] = xs[best][d] + 0.5 * (xs[i][d] - xs[best][d]);
                    fs[i] = f(xs[i]);
                }
            }
        }
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i <= n; ++i)
        if (fs[i] < fs[best]) best = i;
    res.x = xs[best];
    res.f = fs[best];
    return res;
}

// Cholesky inverse of a symmetric positive definite matrix (row-major).
// Returns false when the matrix is not positive definite.
bool spd_inverse(std::vector<double>& m, std::size_t n) {
    std::vector<double> l(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double s = m[i * n + j];
            for (std::size_t k = 0; k < j; ++k) s -= l[i * n + k] * l[j * n + k];
            if (i == j) {
                if (!(s > 0.0)) return false;
                l[i * n + i] = std::sqrt(s);
            } else {
                l[i * n + j] = s / l[j * n + j];
            }
        }
    }
    // Invert L in place, then inv(M) = L^-T L^-1.
    std::vector<double> li(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        li[i * n + i] = 1.0 / l[i * n + i];
        for (std::size_t j = 0; j < i; ++j) {
            double s = 0.0;
            for (std::size_t k = j; k < i; ++k) s += l[i * n + k] * li[k * n + j];
            li[i * n + j] = -s / l[i * n + i];
        }
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j <= i; ++j) {
            double s = 0.0;
            for (std::size_t k = i; k < n; ++k) s += li[k * n + i] * li[k * n + j];
            m[i * n + j] = m[j * n + i] = s;
        }
    return true;
}

}  // namespace

StationarityReport stationarity_check(const GjrGarchParams& p) {
    StationarityReport rep;
    rep.margin = 1.0 - p.persistence();
    rep.stationary = p.alpha0 > 0.0 && rep.margin > 0.0;
    return rep;
}

double unconditional_variance(const GjrGarchParams& p) {
    const double den = 1.0 - p.persistence();
    if (!(den > 0.0))
        throw std::domain_error("unconditional_variance: persistence >= 1");
    return p.alpha0 / den;
}

double relaxation_time(const GjrGarchParams& p) {
    const double pers = p.persistence();
    if (!(pers > 0.0 && pers < 1.0))
        throw std::domain_error("relaxation_time: persistence outside (0,1)");
    return -1.0 / std::log(pers);
}

namespace {

void check_filter_pre(const GjrGarchParams& p, double sigma0) {
    if (!(sigma0 > 0.0))
        throw std::invalid_argument("garch: sigma0 must be positive");
    if (!stationarity_check(p).stationary)
        throw std::invalid_argument("garch: parameters not stationary");
}

}  // namespace

VolatilitySeries filter(const GjrGarchParams& p, const ReturnSeries& r, double sigma0) {
    check_filter_pre(p, sigma0);
    VolatilitySeries out;
    out.kind = VolKind::conditional;
    out.values.resize(r.size());
    double s2 = sigma0 * sigma0;
    for (std::size_t t = 0; t < r.size(); ++t) {
        if (t > 0) {
            const double a = r.values[t - 1];
            const double lever = (a < 0.0) ? p.gamma1 : 0.0;
            s2 = p.alpha0 + (p.alpha1 + lever) * a * a + p.beta1 * s2;
        }
        if (!std::isfinite(s2) || !(s2 > 0.0))
            throw std::runtime_error("garch filter: non-finite variance at index " +
                                     std::to_string(t + 1));
        out.values[t] = std::sqrt(s2);
    }
    return out;
}

double log_likelihood(const GjrGarchParams& p, const ReturnSeries& r, double sigma0) {
    check_filter_pre(p, sigma0);
    const double nll = neg_log_likelihood_core(p, r.values, sigma0);
    if (nll >= kPenalty)
        throw std::runtime_error("garch log_likelihood: non-finite likelihood");
    return -nll;
}

std::pair<ReturnSeries, VolatilitySeries> simulate(const GjrGarchParams& p, std::size_t length,
                                                   double sigma0, std::uint64_t seed,
                                                   Scale scale) {
    check_filter_pre(p, sigma0);
    p.noise.validate();
    if (length == 0)
        throw std::invalid_argument("garch simulate: length must be positive");
    ReturnSeries r;
    r.scale = scale;
    r.values.resize(length);
    VolatilitySeries v;
    v.kind = VolKind::conditional;
    v.values.resize(length);
    RngEngine rng(seed);
    double s2 = sigma0 * sigma0;
    for (std::size_t t = 0; t < length; ++t) {
        if (t > 0) {
            const double a = r.values[t - 1];
            const double lever = (a < 0.0) ? p.gamma1 : 0.0;
            s2 = p.alpha0 + (p.alpha1 + lever) * a * a + p.beta1 * s2;
        }
        const double sigma = std::sqrt(s2);
        v.values[t] = sigma;
        r.values[t] = sigma * sample_noise(p.noise, rng);
    }
    return {std::move(r), std::move(v)};
}

FitReport fit(const ReturnSeries& r, NoiseKind noise_kind, const FitOptions& options) {
    if (r.size() < options.min_length)
        throw std::invalid_argument("garch fit: need at least " +
                                    std::to_string(options.min_length) + " returns, got " +
                                    std::to_string(r.size()));
    const double sigma0 = historical_volatility(r);
    const double var = sigma0 * sigma0;
    const bool is_t = (noise_kind == NoiseKind::standardized_t);
    const std::size_t dim = is_t ? 5 : 4;

    auto objective = [&](const std::vector<double>& th) {
        for (double x : th)
            if (!std::isfinite(x)) return kPenalty;
        return neg_log_likelihood_core(theta_to_params(th, noise_kind), r.values, sigma0);
    };

    // Multi-start grid over (persistence, beta share, leverage share, dof).
    const double starts[5][4] = {
        {0.97, 0.90, 0.50, 8.0},
        {0.90, 0.80, 0.50, 8.0},
        {0.99, 0.95, 0.70, 6.0},
        {0.95, 0.70, 0.30, 12.0},
        {0.985, 0.85, 0.95, 8.0},
    };
    NmResult best;
    int total_iterations = 0;
    const int n_starts = std::max(1, std::min(options.multistarts, 5));
    for (int s = 0; s < n_starts; ++s) {
        const double u0 = starts[s][0], v0 = starts[s][1], w0 = starts[s][2], nu0 = starts[s][3];
        std::vector<double> th0 = {std::log(std::max(var * (1.0 - u0), 1e-12)), logit(u0),
                                   logit(v0), logit(w0)};
        std::vector<double> steps = {0.5, 0.5, 0.5, 0.5};
        if (is_t) {
            th0.push_back(std::log(nu0 - 2.0));
            steps.push_back(0.3);
        }
        NmResult res = nelder_mead(objective, th0, steps, options.max_iterations,
                                   options.tolerance);
        total_iterations += res.iterations;
        if (best.x.empty() || res.f < best.f) best = std::move(res);
    }
    best.iterations = total_iterations;
    if (best.x.empty() || best.f >= kPenalty)
        throw std::runtime_error("garch fit: optimizer failed to find a feasible point");

    FitReport report;
    report.params = theta_to_params(best.x, noise_kind);
    report.sigma0 = sigma0;
    report.log_likelihood = -best.f;
    report.converged = best.converged;
    report.iterations = best.iterations;

    // Snap sign-constrained coordinates that converged onto the boundary.
    constexpr double kBoundaryTol = 1e-5;
    if (report.params.alpha1 < kBoundaryTol) report.params.alpha1 = 0.0;
    if (report.params.gamma1 < kBoundaryTol) report.params.gamma1 = 0.0;
    if (report.params.beta1 < kBoundaryTol) report.params.beta1 = 0.0;

    report.param_names = {"alpha0", "alpha1", "beta1", "gamma1"};
    report.estimates = {report.params.alpha0, report.params.alpha1, report.params.beta1,
                        report.params.gamma1};
    if (is_t) {
        report.param_names.push_back("nu");
        report.estimates.push_back(report.params.noise.dof);
    }
    const std::size_t np = report.estimates.size();
    report.at_boundary.assign(np, false);
    for (std::size_t i = 1; i < 4; ++i)  // alpha1, beta1, gamma1
        report.at_boundary[i] = (report.estimates[i] == 0.0);

    std::vector<std::size_t> free_idx;
    for (std::size_t i = 0; i < np; ++i)
        if (!report.at_boundary[i]) free_idx.push_back(i);

    // Observed information from central finite differences of the negative
    // log-likelihood over the free coordinates.
    auto nll_at = [&](const std::vector<double>& est) {
        GjrGarchParams p;
        p.alpha0 = est[0];
        p.alpha1 = est[1];
        p.beta1 = est[2];
        p.gamma1 = est[3];
        p.noise = is_t ? NoiseFamily::student_t(est[4]) : NoiseFamily::normal();
        return neg_log_likelihood_core(p, r.values, sigma0);
    };
    const std::size_t nf = free_idx.size();
    std::vector<double> h(nf);
    for (std::size_t a = 0; a < nf; ++a) {
        const double p = report.estimates[free_idx[a]];
        h[a] = std::max(1e-3 * std::abs(p), 1e-5);
        if (p > 0.0) h[a] = std::min(h[a], 0.45 * p);
    }
    std::vector<double> hess(nf * nf, 0.0);
    const double f0 = nll_at(report.estimates);
    bool hessian_ok = true;
    for (std::size_t a = 0; a < nf && hessian_ok; ++a) {
        for (std::size_t b = a; b < nf && hessian_ok; ++b) {
            auto probe = [&](double da, double db) {
                std::vector<double> est = report.estimates;
                est[free_idx[a]] += da;
                est[free_idx[b]] += db;
                return nll_at(est);
            };
            double v;
            if (a == b) {
                v = (probe(h[a], 0.0) - 2.0 * f0 + probe(-h[a], 0.0)) / (h[a] * h[a]);
            } else {
                v = (probe(h[a], h[b]) - probe(h[a], -h[b]) - probe(-h[a], h[b]) +
                     probe(-h[a], -h[b])) /
                    (4.0 * h[a] * h[b]);
            }
            if (!std::isfinite(v)) hessian_ok = false;
            hess[a * nf + b] = hess[b * nf + a] = v;
        }
    }
    if (hessian_ok && nf > 0) hessian_ok = spd_inverse(hess, nf);

    report.std_errors.assign(np, 0.0);
    report.t_statistics.assign(np, 0.0);
    report.p_values.assign(np, 0.0);
    report.p_underflow.assign(np, false);
    report.std_errors_available = hessian_ok;
    for (std::size_t i = 0; i < np; ++i) {
        if (report.at_boundary[i]) {
            report.p_underflow[i] = true;  // reported as the paper's 0* rows
            continue;
        }
        if (!hessian_ok) continue;
        const auto it = std::find(free_idx.begin(), free_idx.end(), i);
        const std::size_t a = static_cast<std::size_t>(it - free_idx.begin());
        const double se = std::sqrt(std::max(hess[a * nf + a], 0.0));
        report.std_errors[i] = se;
        if (se > 0.0) {
            report.t_statistics[i] = report.estimates[i] / se;
            report.p_values[i] = std::erfc(std::abs(report.t_statistics[i]) / std::sqrt(2.0));
            if (report.p_values[i] == 0.0) report.p_underflow[i] = true;
        }
    }
    return report;
}

bool FitReport::operator==(const FitReport& other) const {
    return params.alpha0 == other.params.alpha0 && params.alpha1 == other.params.alpha1 &&
           params.beta1 == other.params.beta1 && params.gamma1 == other.params.gamma1 &&
           params.noise.kind == other.params.noise.kind &&
           params.noise.dof == other.params.noise.dof && sigma0 == other.sigma0 &&
           param_names == other.param_names && estimates == other.estimates &&
           std_errors == other.std_errors && t_statistics == other.t_statistics &&
           p_values == other.p_values && at_boundary == other.at_boundary &&
           p_underflow == other.p_underflow &&
           std_errors_available == other.std_errors_available &&
           log_likelihood == other.log_likelihood && converged == other.converged &&
           iterations == other.iterations;
}

std::string fit_report_to_json_string(const FitReport& r, int indent) {
    nlohmann::json j;
    j["noise"] = to_string(r.params.noise.kind);
    j["sigma0"] = r.sigma0;
    j["log_likelihood"] = r.log_likelihood;
    j["converged"] = r.converged;
    j["iterations"] = r.iterations;
    j["std_errors_available"] = r.std_errors_available;
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t i = 0; i < r.param_names.size(); ++i) {
        rows.push_back({{"name", r.param_names[i]},
                        {"estimate", r.estimates[i]},
                        {"std_error", r.std_errors[i]},
                        {"t_statistic", r.t_statistics[i]},
                        {"p_value", r.p_values[i]},
                        {"at_boundary", static_cast<bool>(r.at_boundary[i])},
                        {"p_underflow", static_cast<bool>(r.p_underflow[i])}});
    }
    j["parameters"] = rows;
    return j.dump(indent);
}

FitReport fit_report_from_json_string(const std::string& text) {
    const nlohmann::json j = nlohmann::json::parse(text);
    FitReport r;
    r.sigma0 = j.at("sigma0").get<double>();
    r.log_likelihood = j.at("log_likelihood").get<double>();
    r.converged = j.at("converged").get<bool>();
    r.iterations = j.at("iterations").get<int>();
    r.std_errors_available = j.at("std_errors_available").get<bool>();
    const bool is_t = j.at("noise").get<std::string>() == "t";
    for (const auto& row : j.at("parameters")) {
        r.param_names.push_back(row.at("name").get<std::string>());
        r.estimates.push_back(row.at("estimate").get<double>());
        r.std_errors.push_back(row.at("std_error").get<double>());
        r.t_statistics.push_back(row.at("t_statistic").get<double>());
        r.p_values.push_back(row.at("p_value").get<double>());
        r.at_boundary.push_back(row.at("at_boundary").get<bool>());
        r.p_underflow.push_back(row.at("p_underflow").get<bool>());
    }
    r.params.alpha0 = r.estimates.at(0);
    r.params.alpha1 = r.estimates.at(1);
    r.params.beta1 = r.estimates.at(2);
    r.params.gamma1 = r.estimates.at(3);
    r.params.noise = is_t ? NoiseFamily::student_t(r.estimates.at(4)) : NoiseFamily::normal();
    return r;
}

}  // namespace vgv
