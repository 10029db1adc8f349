#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <span>
#include <string>

namespace vgv {

enum class NoiseKind { standard_normal, standardized_t };

/// Zero-mean, unit-variance innovation law. For the standardized t the
/// underlying Student-t(dof) draw is rescaled by sqrt((dof-2)/dof), so
/// dof > 2 is required.
struct NoiseFamily {
    NoiseKind kind = NoiseKind::standardized_t;
    double dof = 8.9;

    static NoiseFamily normal() { return {NoiseKind::standard_normal, 0.0}; }
    static NoiseFamily student_t(double dof) { return {NoiseKind::standardized_t, dof}; }

    void validate() const;
};

using RngEngine = std::mt19937_64;

/// Deterministic stream seeding: stream k of a master seed always yields the
/// same engine seed, independent of scheduling (splitmix64 of master ^ index
/// mix). Workers pulling disjoint stream indices therefore reproduce the
/// serial run exactly.
std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t stream_index);

/// Uniform in [0,1) from the top 53 bits of the engine output.
double uniform01(RngEngine& rng);

/// One draw with E=0 and Var=1 from the given family.
double sample_noise(const NoiseFamily& family, RngEngine& rng);

/// Log density of the unit-variance standardized law at x.
double noise_log_density(const NoiseFamily& family, double x);

enum class RankSumMethod { automatic, normal_approximation, exact_permutation };

struct RankSumResult {
    double statistic = 0.0;  // rank sum of the first sample (midranks)
    double p_value = 1.0;    // two-sided
    RankSumMethod method = RankSumMethod::normal_approximation;
};

/// Two-sided Mann-Whitney/Wilcoxon rank-sum test with midranks for ties.
/// automatic: exact permutation when either side has fewer than 20
/// observations, otherwise the tie-corrected, continuity-corrected normal
/// approximation. The exact path counts all C(n1+n2, n1) group assignments
/// (shift-algorithm convolution) and doubles the smaller tail.
RankSumResult rank_sum_test(std::span<const double> a, std::span<const double> b,
                            RankSumMethod method = RankSumMethod::automatic);

/// Jensen-Shannon divergence in bits between two histograms normalized over
/// the union of their supports. Symmetric, zero iff equal, at most 1 bit.
double distribution_distance(const std::map<int, double>& p, const std::map<int, double>& q);

/// Spearman rank correlation with midranks for ties.
double spearman_rank_correlation(std::span<const double> a, std::span<const double> b);

std::string to_string(NoiseKind k);

}  // namespace vgv
