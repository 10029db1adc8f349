#pragma once

// Test-only reference implementations, kept independent of the library code
// paths they cross-check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

namespace oracles {

// Composite Simpson quadrature.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n) {
    if (n % 2 != 0) ++n;
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

// Doubled midranks of the pooled sample (exact integers even with .5 ties).
inline std::vector<long long> doubled_midranks(std::span<const double> a,
                                               std::span<const double> b) {
    const std::size_t n = a.size() + b.size();
    std::vector<std::pair<double, std::size_t>> pooled(n);
    for (std::size_t i = 0; i < a.size(); ++i) pooled[i] = {a[i], i};
    for (std::size_t i = 0; i < b.size(); ++i) pooled[a.size() + i] = {b[i], a.size() + i};
    std::sort(pooled.begin(), pooled.end());
    std::vector<long long> r2(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && pooled[j + 1].first == pooled[i].first) ++j;
        const long long doubled = static_cast<long long>(i + 1 + j + 1);
        for (std::size_t k = i; k <= j; ++k) r2[pooled[k].second] = doubled;
        i = j + 1;
    }
    return r2;
}

// Exact two-sided rank-sum p-value by literal enumeration of all
// C(n1+n2, n1) group assignments. Feasible only for small pooled sizes.
inline double ranksum_exact_enumeration(std::span<const double> a, std::span<const double> b) {
    const std::size_t n1 = a.size(), n = a.size() + b.size();
    const auto r2 = doubled_midranks(a, b);
    long long w_obs = 0;
    for (std::size_t i = 0; i < n1; ++i) w_obs += r2[i];

    std::vector<std::size_t> idx(n1);
    for (std::size_t i = 0; i < n1; ++i) idx[i] = i;
    std::uint64_t total = 0, low = 0, high = 0;
    for (;;) {
        long long w = 0;
        for (std::size_t i : idx) w += r2[i];
        ++total;
        if (w <= w_obs) ++low;
        if (w >= w_obs) ++high;
        // next combination
        std::size_t k = n1;
        while (k > 0 && idx[k - 1] == n - n1 + k - 1) --k;
        if (k == 0) break;
        ++idx[k - 1];
        for (std::size_t i = k; i < n1; ++i) idx[i] = idx[i - 1] + 1;
    }
    const double p = 2.0 * static_cast<double>(std::min(low, high)) / static_cast<double>(total);
    return std::min(1.0, p);
}

// Exact two-sided rank-sum p-value via an integer-count convolution.
// Counts fit in uint64 for pooled sizes up to ~60.
inline double ranksum_exact_counts(std::span<const double> a, std::span<const double> b) {
    const std::size_t n1 = a.size(), n = a.size() + b.size();
    auto r2 = doubled_midranks(a, b);
    long long w_obs = 0;
    for (std::size_t i = 0; i < n1; ++i) w_obs += r2[i];
    std::sort(r2.begin(), r2.end());
    long long max_sum = 0;
    for (std::size_t i = n - n1; i < n; ++i) max_sum += r2[i];
    std::vector<std::vector<std::uint64_t>> f(
        n1 + 1, std::vector<std::uint64_t>(static_cast<std::size_t>(max_sum) + 1, 0));
    f[0][0] = 1;
    for (std::size_t item = 0; item < n; ++item) {
        const long long v = r2[item];
        for (std::size_t k = std::min(n1, item + 1); k >= 1; --k)
            for (long long s = max_sum; s >= v; --s)
                f[k][static_cast<std::size_t>(s)] += f[k - 1][static_cast<std::size_t>(s - v)];
    }
    std::uint64_t total = 0, low = 0, high = 0;
    for (long long s = 0; s <= max_sum; ++s) {
        const std::uint64_t c = f[n1][static_cast<std::size_t>(s)];
        total += c;
        if (s <= w_obs) low += c;
        if (s >= w_obs) high += c;
    }
    const double p = 2.0 * static_cast<double>(std::min(low, high)) / static_cast<double>(total);
    return std::min(1.0, p);
}

inline std::vector<double> random_series(std::mt19937_64& rng, std::size_t len, double lo,
                                         double hi) {
    std::uniform_real_distribution<double> dist(lo, hi);
    std::vector<double> y(len);
    for (auto& v : y) v = dist(rng);
    return y;
}

inline double sample_mean(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v;
    return s / static_cast<double>(x.size());
}

inline double sample_variance(std::span<const double> x) {
    const double m = sample_mean(x);
    double s = 0.0;
    for (double v : x) s += (v - m) * (v - m);
    return s / static_cast<double>(x.size() - 1);
}

inline double percentile(std::vector<double> x, double q) {
    std::sort(x.begin(), x.end());
    const double pos = q * static_cast<double>(x.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, x.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return x[lo] * (1.0 - frac) + x[hi] * frac;
}

}  // namespace oracles
