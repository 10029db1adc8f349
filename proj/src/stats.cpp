#include "vgv/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace vgv {

namespace {

constexpr double kLn2Pi = 1.8378770664093454836;

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

}  // namespace

void NoiseFamily::validate() const {
    if (kind == NoiseKind::standardized_t && !(dof > 2.0))
        throw std::invalid_argument("NoiseFamily: standardized t requires dof > 2, got " +
                                    std::to_string(dof));
}

std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t stream_index) {
    return splitmix64(splitmix64(master_seed) ^
                      (stream_index + 1) * 0x9E3779B97F4A7C15ULL);
}

double uniform01(RngEngine& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

namespace {

// Marsaglia polar method; the second variate of the pair is discarded so the
// draw sequence depends only on the engine state.
double standard_normal(RngEngine& rng) {
    for (;;) {
        const double u = 2.0 * uniform01(rng) - 1.0;
        const double v = 2.0 * uniform01(rng) - 1.0;
        const double s = u * u + v * v;
        if (s > 0.0 && s < 1.0)
            return u * std::sqrt(-2.0 * std::log(s) / s);
    }
}

// Bailey's polar generator for Student-t(nu).
double student_t_raw(RngEngine& rng, double nu) {
    for (;;) {
        const double u = 2.0 * uniform01(rng) - 1.0;
        const double v = 2.0 * uniform01(rng) - 1.0;
        const double w = u * u + v * v;
        if (w > 0.0 && w <= 1.0)
            return u * std::sqrt(nu * (std::pow(w, -2.0 / nu) - 1.0) / w);
    }
}

}  // namespace

double sample_noise(const NoiseFamily& family, RngEngine& rng) {
    family.validate();
    if (family.kind == NoiseKind::standard_normal)
        return standard_normal(rng);
    return student_t_raw(rng, family.dof) * std::sqrt((family.dof - 2.0) / family.dof);
}

double noise_log_density(const NoiseFamily& family, double x) {
    family.validate();
    if (family.kind == NoiseKind::standard_normal)
        return -0.5 * kLn2Pi - 0.5 * x * x;
    const double nu = family.dof;
    // X = c*T with T ~ t(nu) and c = sqrt((nu-2)/nu); f_X(x) = f_T(x/c)/c.
    const double c = std::sqrt((nu - 2.0) / nu);
    const double t = x / c;
    const double log_ft = std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu) -
                          0.5 * std::log(nu * M_PI) -
                          0.5 * (nu + 1.0) * std::log1p(t * t / nu);
    return log_ft - std::log(c);
}

namespace {

// Midranks of the pooled sample; returns (ranks aligned with input order,
// tie group sizes).
void midranks(std::span<const double> a, std::span<const double> b,
              std::vector<double>& ranks, std::vector<std::size_t>& tie_sizes) {
    const std::size_t n = a.size() + b.size();
    std::vector<std::pair<double, std::size_t>> pooled(n);
    for (std::size_t i = 0; i < a.size(); ++i) pooled[i] = {a[i], i};
    for (std::size_t i = 0; i < b.size(); ++i) pooled[a.size() + i] = {b[i], a.size() + i};
    std::sort(pooled.begin(), pooled.end(),
              [](const auto& x, const auto& y) { return x.first < y.first; });
    ranks.assign(n, 0.0);
    tie_sizes.clear();
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && pooled[j + 1].first == pooled[i].first) ++j;
        const double r = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j + 1));
        for (std::size_t k = i; k <= j; ++k) ranks[pooled[k].second] = r;
        tie_sizes.push_back(j - i + 1);
        i = j + 1;
    }
}

double normal_two_sided_p(double w, double mu, double var) {
    if (!(var > 0.0)) return 1.0;
    double z = (std::abs(w - mu) - 0.5) / std::sqrt(var);
    if (z < 0.0) z = 0.0;
    return std::erfc(z / std::sqrt(2.0));
}

// Exact tail probabilities of the rank sum over all C(n1+n2, n1) group
// assignments, by convolution over doubled midranks (integers even with
// .5 ties). Counts are held in doubles; they stay below 2^53 for the
// sample sizes this path serves.
double exact_two_sided_p(const std::vector<double>& ranks, std::size_t n1, double w_obs) {
    const std::size_t n = ranks.size();
    std::vector<long long> r2(n);
    long long total2 = 0;
    for (std::size_t i = 0; i < n; ++i) {
        r2[i] = std::llround(2.0 * ranks[i]);
        total2 += r2[i];
    }
    std::sort(r2.begin(), r2.end());
    // f[k][s] = number of k-subsets with doubled-rank sum s.
    const long long max_sum = std::accumulate(r2.end() - static_cast<std::ptrdiff_t>(n1),
                                              r2.end(), 0LL);
    std::vector<std::vector<double>> f(n1 + 1,
                                       std::vector<double>(static_cast<std::size_t>(max_sum) + 1, 0.0));
    f[0][0] = 1.0;
    for (std::size_t item = 0; item < n; ++item) {
        const long long v = r2[item];
        const std::size_t kmax = std::min(n1, item + 1);
        for (std::size_t k = kmax; k >= 1; --k) {
            auto& row = f[k];
            const auto& prev = f[k - 1];
            for (long long s = max_sum; s >= v; --s)
                row[static_cast<std::size_t>(s)] += prev[static_cast<std::size_t>(s - v)];
        }
    }
    const auto& dist = f[n1];
    double total = 0.0, low = 0.0, high = 0.0;
    const long long w2 = std::llround(2.0 * w_obs);
    for (long long s = 0; s <= max_sum; ++s) {
        const double c = dist[static_cast<std::size_t>(s)];
        if (c == 0.0) continue;
        total += c;
        if (s <= w2) low += c;
        if (s >= w2) high += c;
    }
    const double p = 2.0 * std::min(low, high) / total;
    return std::min(1.0, p);
}

}  // namespace

RankSumResult rank_sum_test(std::span<const double> a, std::span<const double> b,
                            RankSumMethod method) {
    if (a.empty() || b.empty())
        throw std::invalid_argument("rank_sum_test: empty sample");
    const std::size_t n1 = a.size(), n2 = b.size(), n = n1 + n2;

    std::vector<double> ranks;
    std::vector<std::size_t> tie_sizes;
    midranks(a, b, ranks, tie_sizes);
    double w = 0.0;
    for (std::size_t i = 0; i < n1; ++i) w += ranks[i];

    RankSumResult res;
    res.statistic = w;
    if (method == RankSumMethod::automatic)
        method = (std::min(n1, n2) >= 20) ? RankSumMethod::normal_approximation
                                          : RankSumMethod::exact_permutation;
    res.method = method;

    if (method == RankSumMethod::exact_permutation) {
        res.p_value = exact_two_sided_p(ranks, n1, w);
        return res;
    }

    const double dn = static_cast<double>(n);
    const double mu = static_cast<double>(n1) * (dn + 1.0) / 2.0;
    double tie_term = 0.0;
    for (std::size_t t : tie_sizes) {
        const double td = static_cast<double>(t);
        tie_term += td * td * td - td;
    }
    const double var = static_cast<double>(n1) * static_cast<double>(n2) / 12.0 *
                       ((dn + 1.0) - tie_term / (dn * (dn - 1.0)));
    res.p_value = normal_two_sided_p(w, mu, var);
    return res;
}

double distribution_distance(const std::map<int, double>& p, const std::map<int, double>& q) {
    if (p.empty() || q.empty())
        throw std::invalid_argument("distribution_distance: empty histogram");
    double sp = 0.0, sq = 0.0;
    for (const auto& [k, v] : p) sp += v;
    for (const auto& [k, v] : q) sq += v;
    if (!(sp > 0.0) || !(sq > 0.0))
        throw std::invalid_argument("distribution_distance: histogram has zero mass");

    auto term = [](double x, double m) { return x > 0.0 ? x * std::log2(x / m) : 0.0; };
    double js = 0.0;
    auto it_p = p.begin();
    auto it_q = q.begin();
    while (it_p != p.end() || it_q != q.end()) {
        double vp = 0.0, vq = 0.0;
        if (it_q == q.end() || (it_p != p.end() && it_p->first < it_q->first)) {
            vp = it_p->second / sp;
            ++it_p;
        } else if (it_p == p.end() || it_q->first < it_p->first) {
            vq = it_q->second / sq;
            ++it_q;
        } else {
            vp = it_p->second / sp;
            vq = it_q->second / sq;
            ++it_p;
            ++it_q;
        }
        const double m = 0.5 * (vp + vq);
        js += 0.5 * (term(vp, m) + term(vq, m));
    }
    return std::max(0.0, js);
}

double spearman_rank_correlation(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size() || a.size() < 2)
        throw std::invalid_argument("spearman_rank_correlation: need two equal-length series");
    auto rank_of = [](std::span<const double> v) {
        std::vector<double> ranks;
        std::vector<std::size_t> ties;
        midranks(v, {}, ranks, ties);
        return ranks;
    };
    const auto ra = rank_of(a);
    const auto rb = rank_of(b);
    const double n = static_cast<double>(a.size());
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ma += ra[i];
        mb += rb[i];
    }
    ma /= n;
    mb /= n;
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sab += (ra[i] - ma) * (rb[i] - mb);
        saa += (ra[i] - ma) * (ra[i] - ma);
        sbb += (rb[i] - mb) * (rb[i] - mb);
    }
    if (!(saa > 0.0) || !(sbb > 0.0)) return 0.0;  // a constant series has no ranking
    return sab / std::sqrt(saa * sbb);
}

std::string to_string(NoiseKind k) {
    return k == NoiseKind::standard_normal ? "normal" : "t";
}

}  // namespace vgv
