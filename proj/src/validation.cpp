#include "vgv/validation.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <map>
#include <stdexcept>
#include <tuple>

#include "json.hpp"

namespace vgv {

void ValidationConfig::validate() const {
    if (!(rho > 0.0 && rho <= 1.0))
        throw std::invalid_argument("ValidationConfig: rho must be in (0,1]");
    if (window < 2) throw std::invalid_argument("ValidationConfig: window must be >= 2");
    if (shift < 1) throw std::invalid_argument("ValidationConfig: shift must be >= 1");
    if (ensemble_z < 1) throw std::invalid_argument("ValidationConfig: Z must be >= 1");
}

ValidatedLinks validate_links(const VisibilityGraph& g, const LinkFrequency& freq, double rho) {
    if (g.node_count() != freq.node_count())
        throw std::invalid_argument("validate_links: node count mismatch (" +
                                    std::to_string(g.node_count()) + " vs " +
                                    std::to_string(freq.node_count()) + ")");
    ValidatedLinks out;
    const GraphKind kind = g.kind();
    for (std::size_t j = 1; j < g.node_count(); ++j)
        for (std::size_t i = 0; i < j; ++i) {
            if (!g.has_edge(i, j)) continue;
            if (freq.probability(kind, i, j) <= rho) {
                out.edges.emplace_back(static_cast<std::uint32_t>(i),
                                       static_cast<std::uint32_t>(j));
                ++out.count;
            }
        }
    return out;
}

double validated_visibility(double n, double mean_d, double n_bar, double mean_d_bar) {
    if (!(mean_d > 0.0) || !(mean_d_bar > 0.0))
        throw std::domain_error("validated_visibility: zero mean degree");
    if (n_bar == 0.0)
        return n == 0.0 ? std::numeric_limits<double>::quiet_NaN() : kVisibilitySentinel;
    return (n / mean_d) / (n_bar / mean_d_bar);
}

VolatilitySeries conditional_volatility_series(const PriceSeries& prices,
                                               const GjrGarchParams& params, Scale scale) {
    const ReturnSeries r = compute_returns(prices, scale);
    return filter(params, r, historical_volatility(r));
}

namespace {

struct EnsembleKey {
    std::uint64_t p[6];
    std::uint64_t w, z, mode, qsigma0;

    bool operator<(const EnsembleKey& o) const {
        return std::memcmp(this, &o, sizeof(EnsembleKey)) < 0;
    }
};

std::uint64_t double_bits(double x) {
    std::uint64_t b;
    std::memcpy(&b, &x, sizeof(b));
    return b;
}

EnsembleKey make_key(const GjrGarchParams& p, std::size_t w, std::uint32_t z, IvgMode mode,
                     long long qsigma0) {
    EnsembleKey k{};
    k.p[0] = double_bits(p.alpha0);
    k.p[1] = double_bits(p.alpha1);
    k.p[2] = double_bits(p.beta1);
    k.p[3] = double_bits(p.gamma1);
    k.p[4] = double_bits(p.noise.dof);
    k.p[5] = static_cast<std::uint64_t>(p.noise.kind);
    k.w = w;
    k.z = z;
    k.mode = static_cast<std::uint64_t>(mode);
    k.qsigma0 = static_cast<std::uint64_t>(qsigma0);
    return k;
}

}  // namespace

IndicatorSeries sliding_indicator(const VolatilitySeries& vol, const ReturnSeries& returns,
                                  std::span<const std::string> labels,
                                  const ValidationConfig& cfg, const NullModelSource& source,
                                  std::uint64_t master_seed, int workers,
                                  std::ostream* progress) {
    cfg.validate();
    if (vol.size() != returns.size())
        throw std::invalid_argument("sliding_indicator: volatility/returns length mismatch");
    if (!labels.empty() && labels.size() != vol.size())
        throw std::invalid_argument("sliding_indicator: label count mismatch");
    const std::size_t t_len = vol.size();
    const std::size_t w = cfg.window;
    if (t_len < w)
        throw std::invalid_argument("sliding_indicator: series shorter than the window");

    IndicatorSeries out;
    out.config = cfg;
    out.master_seed = master_seed;
    out.global_params = source.params;

    const std::size_t n_windows = (t_len - w) / cfg.shift + 1;
    std::map<EnsembleKey, LinkFrequency> cache;

    for (std::size_t lam = 0; lam < n_windows; ++lam) {
        const std::size_t start = lam * cfg.shift;
        if (progress)
            (*progress) << "window " << (lam + 1) << "/" << n_windows << " (end index "
                        << (start + w) << ")\n";

        WindowRecord rec;
        rec.end_index = start + w;
        if (!labels.empty()) rec.end_label = labels[start + w - 1];

        const ReturnSeries r_win = slice(returns, start, w);
        const double sigma0_w = historical_volatility(r_win);

        GjrGarchParams params = source.params;
        std::vector<double> window_vol;
        if (cfg.fit_scope == FitScope::per_window) {
            try {
                FitReport fr = fit(r_win, source.noise_kind, source.fit_options);
                params = fr.params;
                window_vol = filter(params, r_win, sigma0_w).values;
            } catch (const std::exception&) {
                rec.flags = "fit-failed";
                rec.v = std::numeric_limits<double>::quiet_NaN();
                out.records.push_back(std::move(rec));
                out.window_params.push_back(GjrGarchParams{});
                continue;
            }
            out.window_params.push_back(params);
        } else {
            window_vol.assign(vol.values.begin() + static_cast<std::ptrdiff_t>(start),
                              vol.values.begin() + static_cast<std::ptrdiff_t>(start + w));
        }

        const VisibilityGraph g_vg = vg_build(window_vol);
        const VisibilityGraph g_ivg = ivg_build(window_vol, cfg.ivg_mode);

        const long long qsigma0 = std::llround(sigma0_w * 1e6);
        const EnsembleKey key = make_key(params, w, cfg.ensemble_z, cfg.ivg_mode, qsigma0);
        auto it = cache.find(key);
        if (it == cache.end()) {
            EnsembleConfig ecfg;
            ecfg.size_z = cfg.ensemble_z;
            ecfg.length = w;
            ecfg.sigma0 = sigma0_w;
            ecfg.master_seed = derive_seed(master_seed, static_cast<std::uint64_t>(qsigma0));
            ecfg.params = params;
            ecfg.ivg_mode = cfg.ivg_mode;
            it = cache.emplace(key, generate_frequencies(ecfg, workers)).first;
        }
        const LinkFrequency& freq = it->second;

        rec.n_validated_vg = static_cast<std::uint32_t>(validate_links(g_vg, freq, cfg.rho).count);
        rec.n_validated_ivg =
            static_cast<std::uint32_t>(validate_links(g_ivg, freq, cfg.rho).count);
        rec.mean_degree_vg = degrees(g_vg).mean;
        rec.mean_degree_ivg = degrees(g_ivg).mean;

        if (!(rec.mean_degree_ivg > 0.0) || rec.n_validated_ivg == 0) {
            if (rec.n_validated_vg == 0) {
                rec.v = std::numeric_limits<double>::quiet_NaN();
                rec.flags = "v-undefined";
            } else {
                rec.v = kVisibilitySentinel;
                rec.flags = "ivg-none";
            }
        } else {
            rec.v = validated_visibility(rec.n_validated_vg, rec.mean_degree_vg,
                                         rec.n_validated_ivg, rec.mean_degree_ivg);
        }
        out.records.push_back(std::move(rec));
    }
    return out;
}

namespace {

std::string format_double(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", x);
    return buf;
}

void write_config_comments(const IndicatorSeries& s, std::ostream& out,
                           std::span<const std::string> event_labels) {
    const auto& c = s.config;
    out << "# vgv indicator\n";
    out << "# rho=" << format_double(c.rho) << " window=" << c.window << " shift=" << c.shift
        << " ensemble_z=" << c.ensemble_z << " fit_scope=" << to_string(c.fit_scope)
        << " ivg_mode=" << to_string(c.ivg_mode) << " seed=" << s.master_seed << "\n";
    if (s.config.fit_scope == FitScope::global) {
        const auto& p = s.global_params;
        out << "# params noise=" << to_string(p.noise.kind)
            << " alpha0=" << format_double(p.alpha0) << " alpha1=" << format_double(p.alpha1)
            << " beta1=" << format_double(p.beta1) << " gamma1=" << format_double(p.gamma1);
        if (p.noise.kind == NoiseKind::standardized_t)
            out << " nu=" << format_double(p.noise.dof);
        out << "\n";
    }
    for (const auto& e : event_labels) out << "# event " << e << "\n";
}

nlohmann::json params_to_json(const GjrGarchParams& p) {
    nlohmann::json j{{"alpha0", p.alpha0},
                     {"alpha1", p.alpha1},
                     {"beta1", p.beta1},
                     {"gamma1", p.gamma1},
                     {"noise", to_string(p.noise.kind)}};
    if (p.noise.kind == NoiseKind::standardized_t) j["nu"] = p.noise.dof;
    return j;
}

}  // namespace

void write_indicator_csv(const IndicatorSeries& s, std::ostream& out,
                         std::span<const std::string> event_labels) {
    write_config_comments(s, out, event_labels);
    out << "end_date,end_index,n,n_bar,mean_deg_vg,mean_deg_ivg,V,flags\n";
    for (const auto& r : s.records) {
        out << r.end_label << ',' << r.end_index << ',' << r.n_validated_vg << ','
            << r.n_validated_ivg << ',' << format_double(r.mean_degree_vg) << ','
            << format_double(r.mean_degree_ivg) << ',' << format_double(r.v) << ','
            << r.flags << '\n';
    }
}

std::string indicator_to_json_string(const IndicatorSeries& s,
                                     std::span<const std::string> event_labels, int indent) {
    nlohmann::json j;
    j["config"] = {{"rho", s.config.rho},
                   {"window", s.config.window},
                   {"shift", s.config.shift},
                   {"ensemble_z", s.config.ensemble_z},
                   {"fit_scope", to_string(s.config.fit_scope)},
                   {"ivg_mode", to_string(s.config.ivg_mode)},
                   {"seed", s.master_seed}};
    if (s.config.fit_scope == FitScope::global) {
        j["params"] = params_to_json(s.global_params);
    } else {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& p : s.window_params) arr.push_back(params_to_json(p));
        j["window_params"] = arr;
    }
    if (!event_labels.empty()) {
        j["events"] = std::vector<std::string>(event_labels.begin(), event_labels.end());
    }
    nlohmann::json recs = nlohmann::json::array();
    for (const auto& r : s.records) {
        nlohmann::json row{{"end_date", r.end_label},
                           {"end_index", r.end_index},
                           {"n", r.n_validated_vg},
                           {"n_bar", r.n_validated_ivg},
                           {"mean_deg_vg", r.mean_degree_vg},
                           {"mean_deg_ivg", r.mean_degree_ivg},
                           {"flags", r.flags}};
        if (std::isnan(r.v))
            row["V"] = nullptr;
        else
            row["V"] = r.v;
        recs.push_back(row);
    }
    j["records"] = recs;
    return j.dump(indent);
}

std::string to_string(FitScope s) {
    return s == FitScope::global ? "global" : "per-window";
}

std::string to_string(IvgMode m) {
    return m == IvgMode::literal ? "literal" : "complement";
}

}  // namespace vgv
