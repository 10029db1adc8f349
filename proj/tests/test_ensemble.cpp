#include "doctest.h"

#include <cmath>
#include <sstream>

#include "oracles.hpp"
#include "vgv/ensemble.hpp"

using namespace vgv;

namespace {

GjrGarchParams sp500_params() {
    return {0.002, 0.0, 0.926, 0.14, NoiseFamily::student_t(8.9)};
}

EnsembleConfig small_config(std::uint32_t z, std::size_t length, std::uint64_t seed,
                            IvgMode mode = IvgMode::literal) {
    EnsembleConfig cfg;
    cfg.size_z = z;
    cfg.length = length;
    cfg.sigma0 = std::sqrt(0.5);
    cfg.master_seed = seed;
    cfg.params = sp500_params();
    cfg.ivg_mode = mode;
    return cfg;
}

double mean_degree_of(const DegreeHistogram& h) {
    double s = 0.0;
    for (const auto& [d, c] : h.counts) s += static_cast<double>(d) * static_cast<double>(c);
    return s / static_cast<double>(h.total);
}

}  // namespace

TEST_CASE("a Z=1 ensemble reproduces the single replicate's graphs") {
    const auto cfg = small_config(1, 40, 555);
    const auto freq = generate_frequencies(cfg);
    const auto vol = simulate(cfg.params, cfg.length, cfg.sigma0,
                              derive_seed(cfg.master_seed, 0)).second;
    const auto vg = vg_build(vol.values);
    const auto ivg = ivg_build(vol.values, IvgMode::literal);
    for (std::size_t j = 1; j < cfg.length; ++j)
        for (std::size_t i = 0; i < j; ++i) {
            CHECK(freq.count(GraphKind::vg, i, j) == (vg.has_edge(i, j) ? 1u : 0u));
            CHECK(freq.count(GraphKind::ivg, i, j) == (ivg.has_edge(i, j) ? 1u : 0u));
        }
}

TEST_CASE("nearest-neighbour VG counts equal Z") {
    const auto freq = generate_frequencies(small_config(37, 50, 1));
    for (std::size_t i = 0; i + 1 < 50; ++i) {
        CHECK(freq.count(GraphKind::vg, i, i + 1) == 37);
        CHECK(freq.count(GraphKind::ivg, i, i + 1) == 0);
    }
}

TEST_CASE("generate_frequencies is independent of the worker count") {
    const auto cfg = small_config(64, 60, 99);
    const auto serial = generate_frequencies(cfg, 1);
    const auto threaded = generate_frequencies(cfg, 4);
    CHECK(serial.counts(GraphKind::vg) == threaded.counts(GraphKind::vg));
    CHECK(serial.counts(GraphKind::ivg) == threaded.counts(GraphKind::ivg));
}

TEST_CASE("literal counts never exceed Z jointly; complement counts partition Z") {
    const auto lit = generate_frequencies(small_config(50, 40, 7, IvgMode::literal));
    const auto comp = generate_frequencies(small_config(50, 40, 7, IvgMode::complement));
    for (std::size_t j = 1; j < 40; ++j)
        for (std::size_t i = 0; i < j; ++i) {
            CHECK(lit.count(GraphKind::vg, i, j) + lit.count(GraphKind::ivg, i, j) <= 50);
            if (j - i >= 2)
                CHECK(comp.count(GraphKind::vg, i, j) + comp.count(GraphKind::ivg, i, j) == 50);
            else
                CHECK(comp.count(GraphKind::ivg, i, j) == 0);
        }
}

TEST_CASE("distance_profile of the VG starts at one") {
    const auto freq = generate_frequencies(small_config(25, 30, 3));
    const auto prof = distance_profile(freq, GraphKind::vg);
    REQUIRE(prof.mean.size() == 29);
    CHECK(prof.mean[0] == 1.0);
    CHECK(prof.stddev[0] == 0.0);
}

TEST_CASE("distance_profile of a constant frequency matrix is flat") {
    LinkFrequency freq(12, 10);
    for (auto& c : freq.counts(GraphKind::vg)) c = 4;
    const auto prof = distance_profile(freq, GraphKind::vg);
    for (std::size_t d = 1; d < 12; ++d) {
        CHECK(prof.mean[d - 1] == doctest::Approx(0.4).epsilon(1e-12));
        CHECK(prof.stddev[d - 1] == doctest::Approx(0.0).epsilon(1e-12));
    }
}

TEST_CASE("same-distance dispersion shrinks roughly like 1/sqrt(Z)") {
    const std::size_t w = 60;
    const auto prof_small =
        distance_profile(generate_frequencies(small_config(750, w, 21), 2), GraphKind::vg);
    const auto prof_large =
        distance_profile(generate_frequencies(small_config(3000, w, 22), 2), GraphKind::vg);
    const std::size_t d = 5;
    const double ratio = prof_small.stddev[d - 1] / prof_large.stddev[d - 1];
    CHECK(ratio > 1.4);
    CHECK(ratio < 2.8);
}

TEST_CASE("pair dispersion at fixed distance is binomial-sized") {
    // translation invariance of the null: same-distance pairs share one p(d)
    const auto freq = generate_frequencies(small_config(400, 120, 17), 2);
    const auto prof = distance_profile(freq, GraphKind::vg);
    for (std::size_t d : {3ul, 15ul}) {
        const double p = prof.mean[d - 1];
        const double se = std::sqrt(p * (1.0 - p) / 400.0);
        std::size_t outside = 0, pairs = 0;
        for (std::size_t i = 0; i + d < 120; ++i) {
            ++pairs;
            if (std::abs(freq.probability(GraphKind::vg, i, i + d) - p) > 4.0 * se) ++outside;
        }
        CAPTURE(d);
        CHECK(static_cast<double>(outside) < 0.01 * static_cast<double>(pairs) + 1.0);
    }
}

TEST_CASE("null_degree_distribution pooling") {
    const auto cfg = small_config(1, 80, 31);
    const auto one = null_degree_distribution(cfg, 1);
    CHECK(one.total == 80);
    const auto many = null_degree_distribution(cfg, 7, 2);
    CHECK(many.total == 7 * 80);
}

TEST_CASE("split-half pooled mean degree is stable") {
    auto cfg = small_config(1, 150, 41);
    const auto a = null_degree_distribution(cfg, 40, 2);
    cfg.master_seed = 42;
    const auto b = null_degree_distribution(cfg, 40, 2);
    const double ma = mean_degree_of(a), mb = mean_degree_of(b);
    CHECK(std::abs(ma - mb) / ma < 0.01);
}

TEST_CASE("compare_with_null accepts identical histograms") {
    DegreeHistogram h;
    h.counts = {{3, 10}, {4, 20}, {5, 5}};
    h.total = 35;
    CHECK(compare_with_null(h, h).p_value >= 0.99);
}

TEST_CASE("compare_with_null rejects a super-exponential series") {
    const std::size_t w = 200;
    std::vector<double> bubble(w);
    for (std::size_t t = 0; t < w; ++t) {
        const double x = static_cast<double>(t) / static_cast<double>(w);
        bubble[t] = std::exp(3.0 * x * x);
    }
    const auto emp = degree_histogram(degrees(vg_build(bubble)).degree);
    const auto null_hist = null_degree_distribution(small_config(1, w, 50), 5, 2);
    CHECK(compare_with_null(emp, null_hist).p_value < 0.05);
}

TEST_CASE("compare_with_null is roughly calibrated under the null") {
    const std::size_t w = 300;
    int rejections = 0;
    const int repeats = 60;
    for (int rep = 0; rep < repeats; ++rep) {
        const auto cfg = small_config(1, w, 1000 + rep);
        const auto va = simulate(cfg.params, w, cfg.sigma0, derive_seed(cfg.master_seed, 0));
        const auto vb = simulate(cfg.params, w, cfg.sigma0, derive_seed(cfg.master_seed, 1));
        const auto ha = degree_histogram(degrees(vg_build(va.second.values)).degree);
        const auto hb = degree_histogram(degrees(vg_build(vb.second.values)).degree);
        if (compare_with_null(ha, hb).p_value < 0.05) ++rejections;
    }
    const double fraction = static_cast<double>(rejections) / repeats;
    CHECK(fraction <= 0.18);
}

TEST_CASE("stability_diagnostic CV shrinks with Z") {
    const auto cfg = small_config(1, 120, 71);
    const std::vector<std::uint32_t> zs{10, 100};
    const auto rows = stability_diagnostic(cfg, zs, 6, 2);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].z == 10);
    CHECK(rows[0].mean_distance > rows[1].mean_distance);
    CHECK(rows[0].cv > rows[1].cv);
    for (const auto& r : rows) CHECK(r.cv >= 0.0);
}

TEST_CASE("stability_diagnostic validates inputs") {
    const auto cfg = small_config(1, 60, 1);
    const std::vector<std::uint32_t> zs{10};
    CHECK_THROWS(stability_diagnostic(cfg, zs, 1));
    const std::vector<std::uint32_t> bad{1};
    CHECK_THROWS(stability_diagnostic(cfg, bad, 2));
}

TEST_CASE("csv exports are well-formed") {
    const auto freq = generate_frequencies(small_config(5, 12, 2));
    std::ostringstream pairs;
    write_link_frequency_csv(freq, pairs);
    std::size_t lines = 0;
    for (char c : pairs.str())
        if (c == '\n') ++lines;
    CHECK(lines == 1 + 12 * 11 / 2);

    std::ostringstream prof;
    write_distance_profile_csv(distance_profile(freq, GraphKind::vg),
                               distance_profile(freq, GraphKind::ivg), prof);
    lines = 0;
    for (char c : prof.str())
        if (c == '\n') ++lines;
    CHECK(lines == 1 + 11);
}

TEST_CASE("config validation") {
    auto cfg = small_config(1, 40, 1);
    cfg.sigma0 = 0.0;
    CHECK_THROWS(generate_frequencies(cfg));
    cfg = small_config(0, 40, 1);
    CHECK_THROWS(generate_frequencies(cfg));
    cfg = small_config(1, 40, 1);
    cfg.params.beta1 = 1.2;
    CHECK_THROWS(generate_frequencies(cfg));
}
