// vgv: validated-visibility analytics for financial time series.
//
// Subcommands: fit, simulate, graph, indicator, sweep, probe.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"

#include "vgv/ensemble.hpp"
#include "vgv/garch.hpp"
#include "vgv/stats.hpp"
#include "vgv/timeseries.hpp"
#include "vgv/validation.hpp"
#include "vgv/visibility.hpp"

namespace {

namespace fs = std::filesystem;

struct CommonOpts {
    std::string input;
    std::string output = "-";
    std::string format = "csv";
    std::string date_column = "date";
    std::string price_column = "close";
    std::uint64_t seed = 1;
    std::size_t window = 500;
    std::size_t shift = 60;
    double rho = 0.1;
    std::uint32_t ensemble_z = 3000;
    std::string noise = "t";
    std::string ivg_mode = "literal";
    std::string fit_scope = "global";
    int workers = 0;  // 0: hardware concurrency
    bool quiet = false;
};

void add_common_options(CLI::App* cmd, CommonOpts& o, bool needs_input) {
    auto* in = cmd->add_option("--input,-i", o.input, "Input CSV (header row required)");
    if (needs_input) in->required();
    cmd->add_option("--output,-o", o.output, "Output path ('-' for stdout)");
    cmd->add_option("--format", o.format, "Output format")
        ->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--date-column", o.date_column, "CSV date column name");
    cmd->add_option("--price-column", o.price_column, "CSV price column name");
    cmd->add_option("--seed", o.seed, "Master seed");
    cmd->add_option("--window,-W", o.window, "Sliding window length");
    cmd->add_option("--shift,-L", o.shift, "Window shift");
    cmd->add_option("--rho", o.rho, "Validation threshold");
    cmd->add_option("--ensemble-size,-Z", o.ensemble_z, "Null ensemble size");
    cmd->add_option("--noise", o.noise, "Innovation law")->check(CLI::IsMember({"normal", "t"}));
    cmd->add_option("--ivg-mode", o.ivg_mode, "Invisibility graph mode")
        ->check(CLI::IsMember({"literal", "complement"}));
    cmd->add_option("--fit-scope", o.fit_scope, "Null model fit scope")
        ->check(CLI::IsMember({"global", "per-window"}));
    cmd->add_option("--workers", o.workers, "Worker threads (0 = hardware)");
    cmd->add_flag("--quiet,-q", o.quiet, "Suppress progress output");
}

int effective_workers(const CommonOpts& o) {
    if (o.workers > 0) return o.workers;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

vgv::NoiseKind noise_kind(const CommonOpts& o) {
    return o.noise == "normal" ? vgv::NoiseKind::standard_normal
                               : vgv::NoiseKind::standardized_t;
}

vgv::IvgMode ivg_mode(const CommonOpts& o) {
    return o.ivg_mode == "literal" ? vgv::IvgMode::literal : vgv::IvgMode::complement;
}

vgv::PriceSeries load_prices(const CommonOpts& o) {
    std::ifstream in(o.input);
    if (!in) throw std::runtime_error("cannot open input file: " + o.input);
    vgv::CsvConfig cfg;
    cfg.date_column = o.date_column;
    cfg.price_column = o.price_column;
    return vgv::load_csv(in, cfg);
}

void write_text(const std::string& path, const std::string& text) {
    if (path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    out << text;
}

std::vector<std::string> read_label_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open labels file: " + path);
    std::vector<std::string> labels;
    std::string line;
    while (std::getline(in, line)) {
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        labels.push_back(line);
    }
    return labels;
}

std::vector<std::string> return_labels(const vgv::PriceSeries& prices) {
    // Return/volatility index t corresponds to the price at t+1.
    std::vector<std::string> labels;
    if (!prices.has_labels()) return labels;
    labels.assign(prices.labels().begin() + 1, prices.labels().end());
    return labels;
}

void print_fit_table(const vgv::FitReport& rep, std::ostream& out) {
    char buf[160];
    out << "parameter    estimate     std. error   t-statistic  p-value\n";
    for (std::size_t i = 0; i < rep.param_names.size(); ++i) {
        std::string pval;
        if (rep.p_underflow[i])
            pval = "0*";
        else {
            std::snprintf(buf, sizeof(buf), "%.4g", rep.p_values[i]);
            pval = buf;
        }
        std::snprintf(buf, sizeof(buf), "%-12s %-12.4g %-12.4g %-12.4g %s%s\n",
                      rep.param_names[i].c_str(), rep.estimates[i], rep.std_errors[i],
                      rep.t_statistics[i], pval.c_str(),
                      rep.at_boundary[i] ? "  (boundary)" : "");
        out << buf;
    }
    std::snprintf(buf, sizeof(buf),
                  "log-likelihood %.6f  sigma0 %.6g  converged %s  iterations %d\n",
                  rep.log_likelihood, rep.sigma0, rep.converged ? "yes" : "no",
                  rep.iterations);
    out << buf;
    if (!rep.std_errors_available)
        out << "warning: Hessian not positive definite; standard errors unavailable\n";
}

vgv::GjrGarchParams params_from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open params file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return vgv::fit_report_from_json_string(ss.str()).params;
}

// ---------------------------------------------------------------- fit

int run_fit(const CommonOpts& o, const std::string& json_path) {
    const auto prices = load_prices(o);
    const auto returns = vgv::compute_returns(prices);
    const auto report = vgv::fit(returns, noise_kind(o));
    print_fit_table(report, std::cout);
    if (!json_path.empty()) write_text(json_path, vgv::fit_report_to_json_string(report));
    return 0;
}

// ---------------------------------------------------------------- simulate

int run_simulate(const CommonOpts& o, vgv::GjrGarchParams params, double sigma0,
                 std::size_t length) {
    const auto [r, v] = vgv::simulate(params, length, sigma0, o.seed);
    std::ostringstream out;
    char buf[192];
    out << "# vgv simulate\n";
    std::snprintf(buf, sizeof(buf),
                  "# params noise=%s alpha0=%.10g alpha1=%.10g beta1=%.10g gamma1=%.10g",
                  vgv::to_string(params.noise.kind).c_str(), params.alpha0, params.alpha1,
                  params.beta1, params.gamma1);
    out << buf;
    if (params.noise.kind == vgv::NoiseKind::standardized_t) {
        std::snprintf(buf, sizeof(buf), " nu=%.10g", params.noise.dof);
        out << buf;
    }
    out << "\n";
    std::snprintf(buf, sizeof(buf), "# sigma0=%.10g seed=%llu length=%zu\n", sigma0,
                  static_cast<unsigned long long>(o.seed), length);
    out << buf;
    out << "t,return,volatility\n";
    for (std::size_t t = 0; t < length; ++t) {
        std::snprintf(buf, sizeof(buf), "%zu,%.10g,%.10g\n", t + 1, r.values[t], v.values[t]);
        out << buf;
    }
    write_text(o.output, out.str());
    return 0;
}

// ---------------------------------------------------------------- graph

int run_graph(const CommonOpts& o, const std::string& column, const std::string& kind) {
    std::ifstream in(o.input);
    if (!in) throw std::runtime_error("cannot open input file: " + o.input);
    // Any numeric column works here; reuse the price loader with the
    // requested column as the value column.
    vgv::CsvConfig cfg;
    cfg.date_column = o.date_column;
    cfg.price_column = column;
    const auto series = vgv::load_csv(in, cfg);
    const auto& y = series.values();
    const vgv::VisibilityGraph g =
        (kind == "vg") ? vgv::vg_build(y) : vgv::ivg_build(y, ivg_mode(o));
    std::ostringstream out;
    out << "# vgv graph kind=" << kind;
    if (kind == "ivg") out << " ivg_mode=" << o.ivg_mode;
    out << " n=" << g.node_count() << " edges=" << g.edge_count() << "\n";
    vgv::write_edge_list_csv(g, out);
    write_text(o.output, out.str());
    return 0;
}

// ---------------------------------------------------------------- indicator

vgv::IndicatorSeries compute_indicator(const CommonOpts& o, const std::string& params_json,
                                       std::ostream* progress) {
    const auto prices = load_prices(o);
    const auto returns = vgv::compute_returns(prices);

    vgv::NullModelSource source;
    source.noise_kind = noise_kind(o);
    if (!params_json.empty())
        source.params = params_from_json_file(params_json);
    else
        source.params = vgv::fit(returns, source.noise_kind).params;

    const auto vol = vgv::filter(source.params, returns, vgv::historical_volatility(returns));

    vgv::ValidationConfig cfg;
    cfg.rho = o.rho;
    cfg.window = o.window;
    cfg.shift = o.shift;
    cfg.ensemble_z = o.ensemble_z;
    cfg.fit_scope =
        o.fit_scope == "global" ? vgv::FitScope::global : vgv::FitScope::per_window;
    cfg.ivg_mode = ivg_mode(o);

    const auto labels = return_labels(prices);
    return vgv::sliding_indicator(vol, returns, labels, cfg, source, o.seed,
                                  effective_workers(o), progress);
}

int run_indicator(const CommonOpts& o, const std::string& params_json,
                  const std::string& labels_path) {
    std::ostream* progress = o.quiet ? nullptr : &std::cerr;
    const auto series = compute_indicator(o, params_json, progress);
    std::vector<std::string> events;
    if (!labels_path.empty()) events = read_label_file(labels_path);
    if (o.format == "json") {
        write_text(o.output, vgv::indicator_to_json_string(series, events));
    } else {
        std::ostringstream out;
        vgv::write_indicator_csv(series, out, events);
        write_text(o.output, out.str());
    }
    return 0;
}

// ---------------------------------------------------------------- sweep

std::string format_g(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%g", x);
    return buf;
}

int run_sweep(const CommonOpts& o, const std::vector<double>& rho_grid,
              const std::vector<std::size_t>& window_grid,
              const std::vector<std::size_t>& shift_grid, const std::string& out_dir,
              const std::string& params_json) {
    if (rho_grid.empty() || window_grid.empty() || shift_grid.empty())
        throw std::runtime_error("sweep: all grids must be non-empty");
    for (double rho : rho_grid)
        if (!(rho > 0.0 && rho <= 1.0))
            throw std::runtime_error("sweep: rho must be in (0,1], got " + format_g(rho));
    fs::create_directories(out_dir);

    const auto prices = load_prices(o);
    const auto returns = vgv::compute_returns(prices);
    vgv::NullModelSource source;
    source.noise_kind = noise_kind(o);
    if (!params_json.empty())
        source.params = params_from_json_file(params_json);
    else
        source.params = vgv::fit(returns, source.noise_kind).params;
    const auto vol = vgv::filter(source.params, returns, vgv::historical_volatility(returns));
    const auto labels = return_labels(prices);
    std::ostream* progress = o.quiet ? nullptr : &std::cerr;

    std::ostringstream summary;
    summary << "# vgv sweep summary seed=" << o.seed << "\n";
    summary << "window,shift,rho_a,rho_b,spearman_n\n";

    for (std::size_t w : window_grid) {
        for (std::size_t l : shift_grid) {
            std::vector<std::vector<double>> n_series;
            for (double rho : rho_grid) {
                CommonOpts run = o;
                run.rho = rho;
                run.window = w;
                run.shift = l;
                vgv::ValidationConfig cfg;
                cfg.rho = rho;
                cfg.window = w;
                cfg.shift = l;
                cfg.ensemble_z = o.ensemble_z;
                cfg.fit_scope = o.fit_scope == "global" ? vgv::FitScope::global
                                                        : vgv::FitScope::per_window;
                cfg.ivg_mode = ivg_mode(o);
                if (progress)
                    (*progress) << "sweep rho=" << format_g(rho) << " W=" << w << " L=" << l
                                << "\n";
                const auto series = vgv::sliding_indicator(vol, returns, labels, cfg, source,
                                                           o.seed, effective_workers(o),
                                                           nullptr);
                std::vector<double> n_t;
                for (const auto& rec : series.records)
                    n_t.push_back(static_cast<double>(rec.n_validated_vg));
                n_series.push_back(n_t);

                const std::string name = "indicator_rho" + format_g(rho) + "_W" +
                                         std::to_string(w) + "_L" + std::to_string(l) + ".csv";
                std::ostringstream out;
                vgv::write_indicator_csv(series, out);
                write_text((fs::path(out_dir) / name).string(), out.str());
            }
            for (std::size_t a = 0; a < rho_grid.size(); ++a)
                for (std::size_t b = a + 1; b < rho_grid.size(); ++b) {
                    const double corr =
                        vgv::spearman_rank_correlation(n_series[a], n_series[b]);
                    summary << w << ',' << l << ',' << format_g(rho_grid[a]) << ','
                            << format_g(rho_grid[b]) << ',' << format_g(corr) << "\n";
                }
        }
    }
    write_text((fs::path(out_dir) / "sweep_summary.csv").string(), summary.str());
    return 0;
}

// ---------------------------------------------------------------- probe

void write_degree_histogram_csv(const vgv::DegreeHistogram& h, const std::string& title,
                                const std::string& path) {
    std::ostringstream out;
    out << "# vgv probe " << title << "\n";
    out << "degree,count\n";
    for (const auto& [deg, count] : h.counts) out << deg << ',' << count << '\n';
    write_text(path, out.str());
}

int run_probe(const CommonOpts& o, const std::string& out_dir, std::size_t null_samples,
              const std::vector<std::uint32_t>& z_grid, int stability_repeats,
              const std::string& params_json) {
    fs::create_directories(out_dir);
    const auto prices = load_prices(o);
    const auto returns = vgv::compute_returns(prices);
    vgv::NullModelSource source;
    source.noise_kind = noise_kind(o);
    vgv::FitReport report;
    if (!params_json.empty()) {
        source.params = params_from_json_file(params_json);
    } else {
        report = vgv::fit(returns, source.noise_kind);
        source.params = report.params;
    }
    const double sigma0 = vgv::historical_volatility(returns);
    const auto vol = vgv::filter(source.params, returns, sigma0);
    const int workers = effective_workers(o);
    std::ostream* progress = o.quiet ? nullptr : &std::cerr;

    // Empirical vs pooled-null degree distributions on the full span.
    if (progress) (*progress) << "probe: degree distributions (" << null_samples << " samples)\n";
    const auto emp_deg = vgv::degrees(vgv::vg_build(vol.values));
    const auto emp_hist = vgv::degree_histogram(emp_deg.degree);
    vgv::EnsembleConfig full_cfg;
    full_cfg.size_z = 1;  // unused by the degree pool
    full_cfg.length = vol.size();
    full_cfg.sigma0 = sigma0;
    full_cfg.master_seed = o.seed;
    full_cfg.params = source.params;
    const auto null_hist = vgv::null_degree_distribution(full_cfg, null_samples, workers);
    const auto ranksum = vgv::compare_with_null(emp_hist, null_hist);
    write_degree_histogram_csv(emp_hist, "empirical degrees",
                               (fs::path(out_dir) / "degrees_empirical.csv").string());
    write_degree_histogram_csv(null_hist, "null pooled degrees",
                               (fs::path(out_dir) / "degrees_null.csv").string());

    // Distance profile at the sliding-window length.
    if (progress) (*progress) << "probe: distance profile (Z=" << o.ensemble_z << ")\n";
    vgv::EnsembleConfig win_cfg = full_cfg;
    win_cfg.size_z = o.ensemble_z;
    win_cfg.length = o.window;
    win_cfg.ivg_mode = ivg_mode(o);
    const auto freq = vgv::generate_frequencies(win_cfg, workers);
    std::ostringstream profile_out;
    profile_out << "# vgv probe distance profile window=" << o.window
                << " ensemble_z=" << o.ensemble_z << " seed=" << o.seed << "\n";
    vgv::write_distance_profile_csv(vgv::distance_profile(freq, vgv::GraphKind::vg),
                                    vgv::distance_profile(freq, vgv::GraphKind::ivg),
                                    profile_out);
    write_text((fs::path(out_dir) / "distance_profile.csv").string(), profile_out.str());

    // Ensemble-size stability.
    if (progress) (*progress) << "probe: stability diagnostic\n";
    const auto stability = vgv::stability_diagnostic(win_cfg, z_grid, stability_repeats,
                                                     workers);
    std::ostringstream stab_out;
    stab_out << "# vgv probe stability window=" << o.window << " repeats=" << stability_repeats
             << " seed=" << o.seed << "\n";
    stab_out << "z,mean_distance,cv\n";
    for (const auto& row : stability)
        stab_out << row.z << ',' << format_g(row.mean_distance) << ',' << format_g(row.cv)
                 << "\n";
    write_text((fs::path(out_dir) / "stability.csv").string(), stab_out.str());

    std::ostringstream summary;
    summary << "{\n  \"ranksum_p\": " << format_g(ranksum.p_value)
            << ",\n  \"ranksum_statistic\": " << format_g(ranksum.statistic)
            << ",\n  \"null_samples\": " << null_samples << ",\n  \"seed\": " << o.seed
            << "\n}\n";
    write_text((fs::path(out_dir) / "probe_summary.json").string(), summary.str());
    if (progress)
        (*progress) << "probe: rank-sum p = " << format_g(ranksum.p_value) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Visibility-graph link validation against a GJR-GARCH null model"};
    app.require_subcommand(1);
    app.set_config("--config", "", "Config file (key=value, overridable by flags)");

    CommonOpts fit_o, sim_o, graph_o, ind_o, sweep_o, probe_o;
    std::string fit_json;
    auto* cmd_fit = app.add_subcommand("fit", "Fit the GJR-GARCH null model to a price CSV");
    add_common_options(cmd_fit, fit_o, true);
    cmd_fit->add_option("--json", fit_json, "Also write the fit report as JSON");

    double sim_alpha0 = 0.002, sim_alpha1 = 0.0, sim_beta1 = 0.926, sim_gamma1 = 0.14,
           sim_nu = 8.9, sim_sigma0 = 0.7071;
    std::size_t sim_length = 500;
    std::string sim_params_json;
    auto* cmd_sim = app.add_subcommand("simulate", "Simulate the null model");
    add_common_options(cmd_sim, sim_o, false);
    cmd_sim->add_option("--alpha0", sim_alpha0, "alpha0");
    cmd_sim->add_option("--alpha1", sim_alpha1, "alpha1");
    cmd_sim->add_option("--beta1", sim_beta1, "beta1");
    cmd_sim->add_option("--gamma1", sim_gamma1, "gamma1");
    cmd_sim->add_option("--nu", sim_nu, "t degrees of freedom");
    cmd_sim->add_option("--sigma0", sim_sigma0, "Initial volatility");
    cmd_sim->add_option("--length", sim_length, "Series length");
    cmd_sim->add_option("--params-json", sim_params_json, "Read parameters from a fit report");

    std::string graph_column = "close", graph_kind = "vg";
    auto* cmd_graph = app.add_subcommand("graph", "Export the visibility graph edge list");
    add_common_options(cmd_graph, graph_o, true);
    cmd_graph->add_option("--column", graph_column, "Value column to graph");
    cmd_graph->add_option("--kind", graph_kind, "Graph kind")
        ->check(CLI::IsMember({"vg", "ivg"}));

    std::string ind_params_json, ind_labels;
    auto* cmd_ind = app.add_subcommand("indicator", "Sliding-window validated-link indicator");
    add_common_options(cmd_ind, ind_o, true);
    cmd_ind->add_option("--params-json", ind_params_json,
                        "Use parameters from a fit report instead of fitting");
    cmd_ind->add_option("--labels", ind_labels, "Event date file echoed into the output");

    std::vector<double> sweep_rho{0.05, 0.1, 0.2};
    std::vector<std::size_t> sweep_w{500}, sweep_l{60};
    std::string sweep_dir = "sweep_out", sweep_params_json;
    auto* cmd_sweep = app.add_subcommand("sweep", "Indicator over a rho/W/L grid");
    add_common_options(cmd_sweep, sweep_o, true);
    cmd_sweep->add_option("--rho-grid", sweep_rho, "Validation thresholds")->delimiter(',');
    cmd_sweep->add_option("--window-grid", sweep_w, "Window lengths")->delimiter(',');
    cmd_sweep->add_option("--shift-grid", sweep_l, "Shifts")->delimiter(',');
    cmd_sweep->add_option("--output-dir", sweep_dir, "Output directory");
    cmd_sweep->add_option("--params-json", sweep_params_json,
                          "Use parameters from a fit report instead of fitting");

    std::string probe_dir = "probe_out", probe_params_json;
    std::size_t probe_samples = 50;
    std::vector<std::uint32_t> probe_z{10, 100, 1000};
    int probe_repeats = 8;
    auto* cmd_probe = app.add_subcommand("probe", "Null model diagnostics bundle");
    add_common_options(cmd_probe, probe_o, true);
    cmd_probe->add_option("--output-dir", probe_dir, "Output directory");
    cmd_probe->add_option("--null-samples", probe_samples, "Null graphs for the degree pool");
    cmd_probe->add_option("--z-grid", probe_z, "Ensemble sizes for the stability table")
        ->delimiter(',');
    cmd_probe->add_option("--stability-repeats", probe_repeats, "Repeats per ensemble size");
    cmd_probe->add_option("--params-json", probe_params_json,
                          "Use parameters from a fit report instead of fitting");

    CLI11_PARSE(app, argc, argv);

    try {
        if (cmd_fit->parsed()) return run_fit(fit_o, fit_json);
        if (cmd_sim->parsed()) {
            vgv::GjrGarchParams p;
            if (!sim_params_json.empty()) {
                p = params_from_json_file(sim_params_json);
            } else {
                p.alpha0 = sim_alpha0;
                p.alpha1 = sim_alpha1;
                p.beta1 = sim_beta1;
                p.gamma1 = sim_gamma1;
                p.noise = noise_kind(sim_o) == vgv::NoiseKind::standard_normal
                              ? vgv::NoiseFamily::normal()
                              : vgv::NoiseFamily::student_t(sim_nu);
            }
            return run_simulate(sim_o, p, sim_sigma0, sim_length);
        }
        if (cmd_graph->parsed()) return run_graph(graph_o, graph_column, graph_kind);
        if (cmd_ind->parsed()) return run_indicator(ind_o, ind_params_json, ind_labels);
        if (cmd_sweep->parsed())
            return run_sweep(sweep_o, sweep_rho, sweep_w, sweep_l, sweep_dir,
                             sweep_params_json);
        if (cmd_probe->parsed())
            return run_probe(probe_o, probe_dir, probe_samples, probe_z, probe_repeats,
                             probe_params_json);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
