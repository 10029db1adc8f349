#pragma once

#include <cstdint>
#include <map>
#include <ostream>
#include <span>
#include <vector>

namespace vgv {

enum class GraphKind { vg, ivg };

/// Two readings of the invisibility graph: `literal` keeps a pair only when
/// every intermediate point lies strictly above the connecting segment;
/// `complement` takes the set complement of the visibility graph (nearest
/// neighbours, always in the VG, are excluded either way).
enum class IvgMode { literal, complement };

/// Undirected simple graph on time-indexed nodes, adjacency packed as
/// upper-triangular bits (i < j).
class VisibilityGraph {
public:
    VisibilityGraph(std::size_t n, GraphKind kind);

    std::size_t node_count() const { return n_; }
    GraphKind kind() const { return kind_; }

    bool has_edge(std::size_t i, std::size_t j) const;
    void set_edge(std::size_t i, std::size_t j);
    std::size_t edge_count() const;

    bool operator==(const VisibilityGraph& other) const {
        return n_ == other.n_ && kind_ == other.kind_ && bits_ == other.bits_;
    }

    /// Pair (i<j) -> linear index into the triangular layout.
    static std::size_t pair_index(std::size_t i, std::size_t j) {
        return j * (j - 1) / 2 + i;
    }

private:
    std::size_t n_;
    GraphKind kind_;
    std::vector<std::uint64_t> bits_;
};

struct DegreeSummary {
    std::vector<std::uint32_t> degree;
    double mean = 0.0;  // 2E/n
};

struct DegreeHistogram {
    std::map<int, std::uint64_t> counts;
    std::uint64_t total = 0;

    std::map<int, double> as_map() const;
};

/// Fast single-pass builder: for each right endpoint j the scan walks left
/// maintaining the steepest backward slope seen so far; node i is visible
/// from j iff its slope strictly exceeds that maximum. Worst case O(n^2).
VisibilityGraph vg_build(std::span<const double> y);

/// Brute-force oracle: evaluates "every intermediate strictly below the
/// segment" pairwise, O(n^3). Kept as an independent cross-check of the
/// sweep builder; the two must agree exactly.
VisibilityGraph vg_build_brute(std::span<const double> y);

VisibilityGraph ivg_build(std::span<const double> y, IvgMode mode = IvgMode::literal);
VisibilityGraph ivg_build_brute(std::span<const double> y, IvgMode mode = IvgMode::literal);

DegreeSummary degrees(const VisibilityGraph& g);
DegreeHistogram degree_histogram(std::span<const std::uint32_t> degree_values);

/// Edge list as CSV rows "i,j" with 1-based indices.
void write_edge_list_csv(const VisibilityGraph& g, std::ostream& out);

namespace detail {

/// Enumerates every pair (i<j) of the series in a fused backward sweep and
/// reports VG and literal-IVG membership. f(i, j, in_vg, in_ivg_literal);
/// nearest-neighbour pairs report in_vg=true, in_ivg_literal=false.
template <class F>
void scan_pairs(std::span<const double> y, F&& f) {
    const std::size_t n = y.size();
    std::vector<double> inv(n, 0.0);
    for (std::size_t d = 1; d < n; ++d) inv[d] = 1.0 / static_cast<double>(d);
    for (std::size_t j = 1; j < n; ++j) {
        const double yj = y[j];
        f(j - 1, j, true, false);
        double max_slope = (y[j - 1] - yj);  // distance 1
        double min_slope = max_slope;
        for (std::size_t back = 2; back <= j; ++back) {
            const std::size_t i = j - back;
            const double slope = (y[i] - yj) * inv[back];
            f(i, j, slope > max_slope, slope < min_slope);
            if (slope > max_slope) max_slope = slope;
            if (slope < min_slope) min_slope = slope;
        }
    }
}

}  // namespace detail

}  // namespace vgv
