#include "vgv/visibility.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

namespace vgv {

VisibilityGraph::VisibilityGraph(std::size_t n, GraphKind kind)
    : n_(n), kind_(kind), bits_((n * (n - 1) / 2 + 63) / 64, 0) {
    if (n < 2) throw std::invalid_argument("VisibilityGraph: need at least 2 nodes");
}

bool VisibilityGraph::has_edge(std::size_t i, std::size_t j) const {
    if (i == j) return false;
    if (i > j) std::swap(i, j);
    const std::size_t k = pair_index(i, j);
    return (bits_[k >> 6] >> (k & 63)) & 1ULL;
}

void VisibilityGraph::set_edge(std::size_t i, std::size_t j) {
    if (i > j) std::swap(i, j);
    const std::size_t k = pair_index(i, j);
    bits_[k >> 6] |= 1ULL << (k & 63);
}

std::size_t VisibilityGraph::edge_count() const {
    std::size_t c = 0;
    for (std::uint64_t w : bits_) c += static_cast<std::size_t>(std::popcount(w));
    return c;
}

namespace {

void check_finite(std::span<const double> y) {
    if (y.size() < 2)
        throw std::invalid_argument("visibility: need at least 2 points");
    for (std::size_t i = 0; i < y.size(); ++i)
        if (!std::isfinite(y[i]))
            throw std::invalid_argument("visibility: non-finite value at index " +
                                        std::to_string(i + 1));
}

// Strictly below the straight segment joining (i, y_i) and (j, y_j), checked
// at every intermediate point against the interpolated chord height.
bool all_below_chord(std::span<const double> y, std::size_t i, std::size_t j) {
    const double span = static_cast<double>(j - i);
    for (std::size_t k = i + 1; k < j; ++k) {
        const double chord = y[i] + (y[j] - y[i]) * (static_cast<double>(k - i) / span);
        if (!(y[k] < chord)) return false;
    }
    return true;
}

bool all_above_chord(std::span<const double> y, std::size_t i, std::size_t j) {
    const double span = static_cast<double>(j - i);
    for (std::size_t k = i + 1; k < j; ++k) {
        const double chord = y[i] + (y[j] - y[i]) * (static_cast<double>(k - i) / span);
        if (!(y[k] > chord)) return false;
    }
    return true;
}

VisibilityGraph complement_of(const VisibilityGraph& vg) {
    VisibilityGraph g(vg.node_count(), GraphKind::ivg);
    for (std::size_t j = 1; j < vg.node_count(); ++j)
        for (std::size_t i = 0; i < j; ++i)
            if (!vg.has_edge(i, j)) g.set_edge(i, j);
    return g;
}

}  // namespace

VisibilityGraph vg_build(std::span<const double> y) {
    check_finite(y);
    VisibilityGraph g(y.size(), GraphKind::vg);
    detail::scan_pairs(y, [&](std::size_t i, std::size_t j, bool in_vg, bool) {
        if (in_vg) g.set_edge(i, j);
    });
    return g;
}

VisibilityGraph vg_build_brute(std::span<const double> y) {
    check_finite(y);
    VisibilityGraph g(y.size(), GraphKind::vg);
    for (std::size_t j = 1; j < y.size(); ++j)
        for (std::size_t i = 0; i < j; ++i)
            if (all_below_chord(y, i, j)) g.set_edge(i, j);
    return g;
}

VisibilityGraph ivg_build(std::span<const double> y, IvgMode mode) {
    check_finite(y);
    if (mode == IvgMode::complement) return complement_of(vg_build(y));
    VisibilityGraph g(y.size(), GraphKind::ivg);
    detail::scan_pairs(y, [&](std::size_t i, std::size_t j, bool, bool in_ivg) {
        if (in_ivg) g.set_edge(i, j);
    });
    return g;
}

VisibilityGraph ivg_build_brute(std::span<const double> y, IvgMode mode) {
    check_finite(y);
    if (mode == IvgMode::complement) return complement_of(vg_build_brute(y));
    VisibilityGraph g(y.size(), GraphKind::ivg);
    for (std::size_t j = 1; j < y.size(); ++j)
        for (std::size_t i = 0; i + 1 < j; ++i)  // nearest neighbours excluded
            if (all_above_chord(y, i, j)) g.set_edge(i, j);
    return g;
}

DegreeSummary degrees(const VisibilityGraph& g) {
    DegreeSummary s;
    s.degree.assign(g.node_count(), 0);
    std::size_t edges = 0;
    for (std::size_t j = 1; j < g.node_count(); ++j) {
        for (std::size_t i = 0; i < j; ++i) {
            if (g.has_edge(i, j)) {
                ++s.degree[i];
                ++s.degree[j];
                ++edges;
            }
        }
    }
    s.mean = 2.0 * static_cast<double>(edges) / static_cast<double>(g.node_count());
    return s;
}

DegreeHistogram degree_histogram(std::span<const std::uint32_t> degree_values) {
    if (degree_values.empty())
        throw std::invalid_argument("degree_histogram: empty degree list");
    DegreeHistogram h;
    for (std::uint32_t d : degree_values) {
        ++h.counts[static_cast<int>(d)];
        ++h.total;
    }
    return h;
}

std::map<int, double> DegreeHistogram::as_map() const {
    std::map<int, double> m;
    for (const auto& [k, v] : counts) m[k] = static_cast<double>(v);
    return m;
}

void write_edge_list_csv(const VisibilityGraph& g, std::ostream& out) {
    out << "i,j\n";
    for (std::size_t j = 1; j < g.node_count(); ++j)
        for (std::size_t i = 0; i < j; ++i)
            if (g.has_edge(i, j)) out << (i + 1) << ',' << (j + 1) << '\n';
}

}  // namespace vgv
