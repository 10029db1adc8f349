#pragma once

#include <cstdint>
#include <limits>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "vgv/ensemble.hpp"

namespace vgv {

enum class FitScope { global, per_window };

struct ValidationConfig {
    double rho = 0.1;
    std::size_t window = 500;
    std::size_t shift = 60;
    std::uint32_t ensemble_z = 3000;
    FitScope fit_scope = FitScope::global;
    IvgMode ivg_mode = IvgMode::literal;

    void validate() const;
};

struct ValidatedLinks {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;  // 0-based, i < j
    std::size_t count = 0;
};

/// An empirical edge is validated when its ensemble occurrence fraction is
/// at most rho. The graph kind selects the matching count matrix.
ValidatedLinks validate_links(const VisibilityGraph& g, const LinkFrequency& freq, double rho);

/// V = (n/<d>) / (n_bar/<d_bar>). When n_bar = 0 but n > 0 the ratio is
/// reported as the sentinel below rather than an error; 0/0 is NaN. A zero
/// mean degree is a domain error.
double validated_visibility(double n, double mean_d, double n_bar, double mean_d_bar);

constexpr double kVisibilitySentinel = std::numeric_limits<double>::max();

/// Conditional volatility of the price history under the given (already
/// fitted) null parameters, with sigma_1 = historical volatility of the full
/// return series. This sigma_t series is the graph input.
VolatilitySeries conditional_volatility_series(const PriceSeries& prices,
                                               const GjrGarchParams& params,
                                               Scale scale = Scale::percent);

struct WindowRecord {
    std::size_t end_index = 0;  // 1-based position in the volatility series
    std::string end_label;
    std::uint32_t n_validated_vg = 0;
    std::uint32_t n_validated_ivg = 0;
    double mean_degree_vg = 0.0;
    double mean_degree_ivg = 0.0;
    double v = 1.0;
    std::string flags;
};

struct IndicatorSeries {
    std::vector<WindowRecord> records;
    ValidationConfig config;
    std::uint64_t master_seed = 0;
    GjrGarchParams global_params;                // fit_scope == global
    std::vector<GjrGarchParams> window_params;   // fit_scope == per_window, aligned
};

struct NullModelSource {
    GjrGarchParams params;  // used directly under FitScope::global
    NoiseKind noise_kind = NoiseKind::standardized_t;  // per-window refits
    FitOptions fit_options;
};

/// Sliding-window validation over the volatility series. For each window the
/// empirical VG/IVG are validated against a fresh null ensemble whose sigma0
/// is the sample standard deviation of the window's underlying returns; each
/// record is stamped at the window's last index/date. Ensembles are cached
/// by (params, window, Z, ivg mode, sigma0 quantized to 1e-6); the ensemble
/// seed derives from (master_seed, quantized sigma0) so equal keys reuse
/// equal ensembles. With per-window scope the window's returns are refitted
/// and refiltered; a failed window fit yields a flagged record.
IndicatorSeries sliding_indicator(const VolatilitySeries& vol, const ReturnSeries& returns,
                                  std::span<const std::string> labels,
                                  const ValidationConfig& cfg, const NullModelSource& source,
                                  std::uint64_t master_seed, int workers = 1,
                                  std::ostream* progress = nullptr);

void write_indicator_csv(const IndicatorSeries& s, std::ostream& out,
                         std::span<const std::string> event_labels = {});
std::string indicator_to_json_string(const IndicatorSeries& s,
                                     std::span<const std::string> event_labels = {},
                                     int indent = 2);

std::string to_string(FitScope s);
std::string to_string(IvgMode m);

}  // namespace vgv
