#include "vgv/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace vgv {

void EnsembleConfig::validate() const {
    if (size_z < 1) throw std::invalid_argument("EnsembleConfig: Z must be >= 1");
    if (length < 2) throw std::invalid_argument("EnsembleConfig: length must be >= 2");
    if (!(sigma0 > 0.0)) throw std::invalid_argument("EnsembleConfig: sigma0 must be positive");
    if (!stationarity_check(params).stationary)
        throw std::invalid_argument("EnsembleConfig: parameters not stationary");
    params.noise.validate();
}

LinkFrequency::LinkFrequency(std::size_t n, std::uint32_t z)
    : n_(n), z_(z), vg_counts_(n * (n - 1) / 2, 0), ivg_counts_(n * (n - 1) / 2, 0) {
    if (n < 2) throw std::invalid_argument("LinkFrequency: need at least 2 nodes");
}

std::uint32_t LinkFrequency::count(GraphKind kind, std::size_t i, std::size_t j) const {
    if (i == j || i >= n_ || j >= n_)
        throw std::out_of_range("LinkFrequency: bad pair");
    if (i > j) std::swap(i, j);
    return counts(kind)[VisibilityGraph::pair_index(i, j)];
}

namespace {

// Splits [0, total) into `workers` chunks and runs fn(worker, begin, end) on
// each; rethrows the first worker exception.
void parallel_chunks(std::uint64_t total, int workers,
                     const std::function<void(int, std::uint64_t, std::uint64_t)>& fn) {
    const int nw = std::max(1, std::min<int>(workers, static_cast<int>(
                                                          std::min<std::uint64_t>(total, 64))));
    if (nw == 1) {
        fn(0, 0, total);
        return;
    }
    std::vector<std::thread> threads;
    std::exception_ptr error;
    std::mutex error_mutex;
    for (int w = 0; w < nw; ++w) {
        const std::uint64_t begin = total * w / nw;
        const std::uint64_t end = total * (w + 1) / nw;
        threads.emplace_back([&, w, begin, end] {
            try {
                fn(w, begin, end);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        });
    }
    for (auto& t : threads) t.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace

LinkFrequency generate_frequencies(const EnsembleConfig& cfg, int workers) {
    cfg.validate();
    const std::size_t n = cfg.length;
    const std::size_t n_pairs = n * (n - 1) / 2;
    const bool literal = (cfg.ivg_mode == IvgMode::literal);

    const int nw = std::max(1, std::min<int>(workers, 64));
    std::vector<std::vector<std::uint32_t>> vg_parts(nw), ivg_parts(nw);

    parallel_chunks(cfg.size_z, nw, [&](int w, std::uint64_t begin, std::uint64_t end) {
        auto& vg_buf = vg_parts[w];
        auto& ivg_buf = ivg_parts[w];
        vg_buf.assign(n_pairs, 0);
        if (literal) ivg_buf.assign(n_pairs, 0);
        for (std::uint64_t k = begin; k < end; ++k) {
            std::vector<double> vol;
            try {
                vol = simulate(cfg.params, n, cfg.sigma0, derive_seed(cfg.master_seed, k))
                          .second.values;
            } catch (const std::exception& e) {
                throw std::runtime_error("generate_frequencies: replicate " +
                                         std::to_string(k) + ": " + e.what());
            }
            if (literal) {
                detail::scan_pairs(vol, [&](std::size_t i, std::size_t j, bool in_vg,
                                            bool in_ivg) {
                    const std::size_t idx = VisibilityGraph::pair_index(i, j);
                    vg_buf[idx] += in_vg;
                    ivg_buf[idx] += in_ivg;
                });
            } else {
                detail::scan_pairs(vol, [&](std::size_t i, std::size_t j, bool in_vg, bool) {
                    vg_buf[VisibilityGraph::pair_index(i, j)] += in_vg;
                });
            }
        }
    });

    LinkFrequency freq(n, cfg.size_z);
    auto& vg = freq.counts(GraphKind::vg);
    auto& ivg = freq.counts(GraphKind::ivg);
    for (int w = 0; w < nw; ++w) {
        if (vg_parts[w].empty()) continue;
        for (std::size_t idx = 0; idx < n_pairs; ++idx) vg[idx] += vg_parts[w][idx];
        if (literal)
            for (std::size_t idx = 0; idx < n_pairs; ++idx) ivg[idx] += ivg_parts[w][idx];
    }
    if (!literal) {
        // Complement IVG: present exactly when the VG link is absent;
        // nearest-neighbour pairs are always VG links, so they come out 0.
        for (std::size_t j = 1; j < n; ++j)
            for (std::size_t i = 0; i < j; ++i) {
                const std::size_t idx = VisibilityGraph::pair_index(i, j);
                ivg[idx] = cfg.size_z - vg[idx];
            }
    }
    return freq;
}

DistanceProfile distance_profile(const LinkFrequency& f, GraphKind kind) {
    DistanceProfile prof;
    prof.kind = kind;
    const std::size_t n = f.node_count();
    prof.mean.resize(n - 1);
    prof.stddev.resize(n - 1);
    for (std::size_t d = 1; d < n; ++d) {
        const std::size_t n_pairs = n - d;
        double sum = 0.0;
        for (std::size_t i = 0; i + d < n; ++i) sum += f.probability(kind, i, i + d);
        const double mean = sum / static_cast<double>(n_pairs);
        double ss = 0.0;
        for (std::size_t i = 0; i + d < n; ++i) {
            const double dev = f.probability(kind, i, i + d) - mean;
            ss += dev * dev;
        }
        prof.mean[d - 1] = mean;
        prof.stddev[d - 1] = std::sqrt(ss / static_cast<double>(n_pairs));
    }
    return prof;
}

namespace {

DegreeHistogram pooled_null_degrees(const EnsembleConfig& cfg, std::size_t sample_count,
                                    std::uint64_t sub_master, int workers) {
    const int nw = std::max(1, std::min<int>(workers, 64));
    std::vector<DegreeHistogram> parts(nw);
    parallel_chunks(sample_count, nw, [&](int w, std::uint64_t begin, std::uint64_t end) {
        auto& hist = parts[w];
        for (std::uint64_t k = begin; k < end; ++k) {
            const auto vol =
                simulate(cfg.params, cfg.length, cfg.sigma0, derive_seed(sub_master, k)).second;
            const auto deg = degrees(vg_build(vol.values));
            for (std::uint32_t d : deg.degree) {
                ++hist.counts[static_cast<int>(d)];
                ++hist.total;
            }
        }
    });
    DegreeHistogram pooled;
    for (const auto& part : parts)
        for (const auto& [k, v] : part.counts) {
            pooled.counts[k] += v;
            pooled.total += v;
        }
    return pooled;
}

std::vector<double> expand_histogram(const DegreeHistogram& h) {
    std::vector<double> sample;
    sample.reserve(h.total);
    for (const auto& [value, count] : h.counts)
        sample.insert(sample.end(), count, static_cast<double>(value));
    return sample;
}

}  // namespace

DegreeHistogram null_degree_distribution(const EnsembleConfig& cfg, std::size_t sample_count,
                                         int workers) {
    cfg.validate();
    if (sample_count == 0)
        throw std::invalid_argument("null_degree_distribution: sample_count must be >= 1");
    return pooled_null_degrees(cfg, sample_count, cfg.master_seed, workers);
}

RankSumResult compare_with_null(const DegreeHistogram& empirical,
                                const DegreeHistogram& null_hist) {
    if (empirical.total == 0 || null_hist.total == 0)
        throw std::invalid_argument("compare_with_null: empty histogram");
    const auto a = expand_histogram(empirical);
    const auto b = expand_histogram(null_hist);
    return rank_sum_test(a, b);
}

std::vector<StabilityRow> stability_diagnostic(const EnsembleConfig& cfg,
                                               std::span<const std::uint32_t> z_values,
                                               int repeats, int workers) {
    cfg.validate();
    if (repeats < 2)
        throw std::invalid_argument("stability_diagnostic: need at least 2 repeats");
    std::vector<StabilityRow> rows;
    for (std::size_t zi = 0; zi < z_values.size(); ++zi) {
        const std::uint32_t z = z_values[zi];
        if (z < 2) throw std::invalid_argument("stability_diagnostic: each Z must be >= 2");
        std::vector<double> distances;
        distances.reserve(static_cast<std::size_t>(repeats));
        for (int rep = 0; rep < repeats; ++rep) {
            const std::uint64_t tag = (zi * static_cast<std::uint64_t>(repeats) +
                                       static_cast<std::uint64_t>(rep)) * 2;
            const auto a = pooled_null_degrees(cfg, z, derive_seed(cfg.master_seed, tag),
                                               workers);
            const auto b = pooled_null_degrees(cfg, z, derive_seed(cfg.master_seed, tag + 1),
                                               workers);
            distances.push_back(distribution_distance(a.as_map(), b.as_map()));
        }
        StabilityRow row;
        row.z = z;
        double mean = 0.0;
        for (double d : distances) mean += d;
        mean /= static_cast<double>(distances.size());
        double ss = 0.0;
        for (double d : distances) ss += (d - mean) * (d - mean);
        const double sd = std::sqrt(ss / static_cast<double>(distances.size() - 1));
        row.mean_distance = mean;
        row.cv = (mean > 0.0) ? sd / mean : 0.0;
        rows.push_back(row);
    }
    return rows;
}

void write_link_frequency_csv(const LinkFrequency& f, std::ostream& out) {
    out << "i,j,d,vg_count,ivg_count,p_vg,p_ivg\n";
    char buf[64];
    for (std::size_t j = 1; j < f.node_count(); ++j)
        for (std::size_t i = 0; i < j; ++i) {
            out << (i + 1) << ',' << (j + 1) << ',' << (j - i) << ','
                << f.count(GraphKind::vg, i, j) << ',' << f.count(GraphKind::ivg, i, j);
            std::snprintf(buf, sizeof(buf), ",%.10g,%.10g", f.probability(GraphKind::vg, i, j),
                          f.probability(GraphKind::ivg, i, j));
            out << buf << '\n';
        }
}

void write_distance_profile_csv(const DistanceProfile& vg, const DistanceProfile& ivg,
                                std::ostream& out) {
    out << "d,p_vg_mean,p_vg_std,p_ivg_mean,p_ivg_std\n";
    char buf[128];
    for (std::size_t d = 1; d <= vg.mean.size(); ++d) {
        std::snprintf(buf, sizeof(buf), "%zu,%.10g,%.10g,%.10g,%.10g\n", d, vg.mean[d - 1],
                      vg.stddev[d - 1], ivg.mean[d - 1], ivg.stddev[d - 1]);
        out << buf;
    }
}

}  // namespace vgv
