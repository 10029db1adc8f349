#include "doctest.h"

#include <cmath>
#include <map>
#include <random>

#include "oracles.hpp"
#include "vgv/stats.hpp"

using namespace vgv;

namespace {

std::vector<double> draw(const NoiseFamily& f, std::size_t n, std::uint64_t seed) {
    RngEngine rng(seed);
    std::vector<double> x(n);
    for (auto& v : x) v = sample_noise(f, rng);
    return x;
}

}  // namespace

TEST_CASE("sample_noise moment contract") {
    const std::size_t n = 1000000;
    for (const auto& family : {NoiseFamily::normal(), NoiseFamily::student_t(8.9),
                               NoiseFamily::student_t(5.7)}) {
        const auto x = draw(family, n, 1234);
        const double mean = oracles::sample_mean(x);
        const double var = oracles::sample_variance(x);
        CAPTURE(static_cast<int>(family.kind));
        CAPTURE(family.dof);
        CHECK(std::abs(mean) < 5.0 / std::sqrt(static_cast<double>(n)));
        CHECK(var == doctest::Approx(1.0).epsilon(0.02));
    }
}

TEST_CASE("standard normal excess kurtosis is near zero") {
    const auto x = draw(NoiseFamily::normal(), 1000000, 77);
    double m2 = 0.0, m4 = 0.0;
    for (double v : x) {
        m2 += v * v;
        m4 += v * v * v * v;
    }
    m2 /= static_cast<double>(x.size());
    m4 /= static_cast<double>(x.size());
    const double excess = m4 / (m2 * m2) - 3.0;
    CHECK(std::abs(excess) < 0.05);
}

TEST_CASE("sample_noise is deterministic for a fixed seed") {
    const auto a = draw(NoiseFamily::student_t(8.9), 1000, 42);
    const auto b = draw(NoiseFamily::student_t(8.9), 1000, 42);
    CHECK(a == b);
}

TEST_CASE("derive_seed separates streams") {
    CHECK(derive_seed(1, 0) != derive_seed(1, 1));
    CHECK(derive_seed(1, 0) != derive_seed(2, 0));
    CHECK(derive_seed(123, 456) == derive_seed(123, 456));
}

TEST_CASE("sample_noise rejects dof <= 2") {
    RngEngine rng(1);
    CHECK_THROWS(sample_noise(NoiseFamily::student_t(2.0), rng));
    CHECK_THROWS(noise_log_density(NoiseFamily::student_t(1.5), 0.0));
}

TEST_CASE("normal log density at zero") {
    CHECK(noise_log_density(NoiseFamily::normal(), 0.0) ==
          doctest::Approx(-0.9189385332046727).epsilon(1e-12));
}

TEST_CASE("standardized t approaches the normal for huge dof") {
    const double at0_t = noise_log_density(NoiseFamily::student_t(1e6), 0.0);
    const double at0_n = noise_log_density(NoiseFamily::normal(), 0.0);
    CHECK(std::abs(std::exp(at0_t) - std::exp(at0_n)) < 1e-3);
}

TEST_CASE("noise densities integrate to one") {
    for (const auto& family : {NoiseFamily::normal(), NoiseFamily::student_t(8.9),
                               NoiseFamily::student_t(3.5)}) {
        const double mass = oracles::simpson(
            [&](double x) { return std::exp(noise_log_density(family, x)); }, -50.0, 50.0,
            200000);
        CHECK(mass == doctest::Approx(1.0).epsilon(1e-6));
    }
}

TEST_CASE("standardized t has unit variance by quadrature") {
    const NoiseFamily f = NoiseFamily::student_t(8.9);
    const double var = oracles::simpson(
        [&](double x) { return x * x * std::exp(noise_log_density(f, x)); }, -100.0, 100.0,
        400000);
    CHECK(var == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("rank_sum_test on identical samples accepts") {
    const std::vector<double> a{1, 2, 3, 4, 5};
    const auto res = rank_sum_test(a, a);
    CHECK(res.p_value >= 0.99);
}

TEST_CASE("rank_sum_test fully separated small samples") {
    const std::vector<double> a{1, 2, 3}, b{4, 5, 6};
    const auto res = rank_sum_test(a, b);
    CHECK(res.method == RankSumMethod::exact_permutation);
    CHECK(res.p_value == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(res.p_value ==
          doctest::Approx(oracles::ranksum_exact_enumeration(a, b)).epsilon(1e-12));
}

TEST_CASE("rank_sum_test separates shifted large samples") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> noise(0.0, 1.0);
    std::vector<double> a(1000), b(1000);
    for (auto& v : a) v = noise(rng);
    for (auto& v : b) v = noise(rng) + 10.0;
    const auto res = rank_sum_test(a, b);
    CHECK(res.method == RankSumMethod::normal_approximation);
    CHECK(res.p_value < 1e-10);
}

TEST_CASE("exact path matches the literal enumeration oracle with ties") {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> value(0, 4);  // heavy ties
    std::uniform_int_distribution<int> size(2, 7);
    for (int rep = 0; rep < 30; ++rep) {
        std::vector<double> a(static_cast<std::size_t>(size(rng)));
        std::vector<double> b(static_cast<std::size_t>(size(rng)));
        for (auto& v : a) v = value(rng);
        for (auto& v : b) v = value(rng);
        const auto res = rank_sum_test(a, b, RankSumMethod::exact_permutation);
        const double want = oracles::ranksum_exact_enumeration(a, b);
        CHECK(res.p_value == doctest::Approx(want).epsilon(1e-12));
    }
}

TEST_CASE("counting oracle agrees with the literal enumeration oracle") {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> value(0.0, 1.0);
    for (int rep = 0; rep < 10; ++rep) {
        std::vector<double> a(6), b(8);
        for (auto& v : a) v = value(rng);
        for (auto& v : b) v = value(rng);
        CHECK(oracles::ranksum_exact_counts(a, b) ==
              doctest::Approx(oracles::ranksum_exact_enumeration(a, b)).epsilon(1e-12));
    }
}

TEST_CASE("normal approximation tracks the exact oracle at moderate sizes") {
    std::mt19937_64 rng(17);
    std::normal_distribution<double> noise(0.0, 1.0);
    std::uniform_int_distribution<int> size(15, 25);
    for (int rep = 0; rep < 20; ++rep) {
        std::vector<double> a(static_cast<std::size_t>(size(rng)));
        std::vector<double> b(static_cast<std::size_t>(size(rng)));
        for (auto& v : a) v = noise(rng);
        for (auto& v : b) v = noise(rng) + 0.3;
        const auto normal = rank_sum_test(a, b, RankSumMethod::normal_approximation);
        const double exact = oracles::ranksum_exact_counts(a, b);
        CHECK(std::abs(normal.p_value - exact) < 0.02);
    }
}

TEST_CASE("rank_sum_test rejects empty samples") {
    const std::vector<double> a{1.0};
    CHECK_THROWS(rank_sum_test(a, {}));
    CHECK_THROWS(rank_sum_test({}, a));
}

TEST_CASE("distribution_distance identity and disjoint point masses") {
    const std::map<int, double> p{{0, 10.0}};
    const std::map<int, double> q{{1, 4.0}};
    CHECK(distribution_distance(p, p) == 0.0);
    CHECK(distribution_distance(p, q) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("distribution_distance is symmetric and bounded on random histograms") {
    std::mt19937_64 rng(23);
    std::uniform_int_distribution<int> key(0, 20);
    std::uniform_real_distribution<double> mass(0.1, 5.0);
    for (int rep = 0; rep < 100; ++rep) {
        std::map<int, double> p, q;
        for (int i = 0; i < 8; ++i) {
            p[key(rng)] += mass(rng);
            q[key(rng)] += mass(rng);
        }
        const double dpq = distribution_distance(p, q);
        const double dqp = distribution_distance(q, p);
        CHECK(dpq == dqp);
        CHECK(dpq >= 0.0);
        CHECK(dpq <= 1.0 + 1e-12);
    }
    CHECK_THROWS(distribution_distance({}, {{0, 1.0}}));
}

TEST_CASE("spearman_rank_correlation basics") {
    const std::vector<double> a{1, 2, 3, 4, 5};
    const std::vector<double> b{10, 20, 30, 40, 50};
    const std::vector<double> c{50, 40, 30, 20, 10};
    CHECK(spearman_rank_correlation(a, b) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(spearman_rank_correlation(a, c) == doctest::Approx(-1.0).epsilon(1e-12));
}
