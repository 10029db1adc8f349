#pragma once

#include <cstdint>
#include <ostream>
#include <span>
#include <vector>

#include "vgv/garch.hpp"
#include "vgv/visibility.hpp"

namespace vgv {

struct EnsembleConfig {
    std::uint32_t size_z = 3000;
    std::size_t length = 500;
    double sigma0 = 1.0;
    std::uint64_t master_seed = 0;
    GjrGarchParams params;
    IvgMode ivg_mode = IvgMode::literal;

    void validate() const;
};

/// Per-pair occurrence counts of VG and IVG links across the ensemble.
/// Replicate k is simulated with engine seed derive_seed(master_seed, k), so
/// the result is identical for any worker count. p_ij = count / Z.
class LinkFrequency {
public:
    LinkFrequency(std::size_t n, std::uint32_t z);

    std::size_t node_count() const { return n_; }
    std::uint32_t ensemble_size() const { return z_; }

    std::uint32_t count(GraphKind kind, std::size_t i, std::size_t j) const;
    double probability(GraphKind kind, std::size_t i, std::size_t j) const {
        return static_cast<double>(count(kind, i, j)) / static_cast<double>(z_);
    }

    std::vector<std::uint32_t>& counts(GraphKind kind) {
        return kind == GraphKind::vg ? vg_counts_ : ivg_counts_;
    }
    const std::vector<std::uint32_t>& counts(GraphKind kind) const {
        return kind == GraphKind::vg ? vg_counts_ : ivg_counts_;
    }

private:
    std::size_t n_;
    std::uint32_t z_;
    std::vector<std::uint32_t> vg_counts_;
    std::vector<std::uint32_t> ivg_counts_;
};

/// Simulates Z volatility series from the null model, maps each to its VG
/// and IVG and accumulates per-pair occurrence counts. Graphs are not
/// retained. Simulation failures carry the replicate index.
LinkFrequency generate_frequencies(const EnsembleConfig& cfg, int workers = 1);

/// Mean and dispersion of p_ij over all pairs at each distance d = |i-j|.
struct DistanceProfile {
    GraphKind kind = GraphKind::vg;
    std::vector<double> mean;    // index d-1, d = 1..n-1
    std::vector<double> stddev;  // population std over same-distance pairs
};

DistanceProfile distance_profile(const LinkFrequency& f, GraphKind kind);

/// Pooled degree histogram over `sample_count` null VGs (replicate k seeded
/// from derive_seed(master_seed, k)).
DegreeHistogram null_degree_distribution(const EnsembleConfig& cfg, std::size_t sample_count,
                                         int workers = 1);

/// Rank-sum test of two degree histograms, expanded back to degree samples.
RankSumResult compare_with_null(const DegreeHistogram& empirical, const DegreeHistogram& null_hist);

struct StabilityRow {
    std::uint32_t z = 0;
    double mean_distance = 0.0;
    double cv = 0.0;  // std/mean of the distances over the repeats
};

/// Ensemble-size diagnostic: for each Z, builds `repeats` independent pairs
/// of ensembles (sub-seeds derived from (master_seed, z index, repeat, side))
/// and reports the mean and coefficient of variation of the divergence
/// between the pooled degree histograms of each pair.
std::vector<StabilityRow> stability_diagnostic(const EnsembleConfig& cfg,
                                               std::span<const std::uint32_t> z_values,
                                               int repeats, int workers = 1);

void write_link_frequency_csv(const LinkFrequency& f, std::ostream& out);
void write_distance_profile_csv(const DistanceProfile& vg, const DistanceProfile& ivg,
                                std::ostream& out);

}  // namespace vgv
