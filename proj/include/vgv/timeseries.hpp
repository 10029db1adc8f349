#pragma once

#include <cstddef>
#include <istream>
#include <string>
#include <vector>

namespace vgv {

enum class Scale { raw, percent };
enum class VolKind { historical, conditional };

/// Closing-price series with optional ISO-8601 date labels (one per value).
/// Invariants: length >= 2, all values > 0, labels (if present) strictly
/// increasing and same length as values.
class PriceSeries {
public:
    PriceSeries(std::vector<double> values, std::vector<std::string> labels = {});

    const std::vector<double>& values() const { return values_; }
    const std::vector<std::string>& labels() const { return labels_; }
    bool has_labels() const { return !labels_.empty(); }
    std::size_t size() const { return values_.size(); }

private:
    std::vector<double> values_;
    std::vector<std::string> labels_;
};

/// Simple returns r_t = p[t+1]/p[t] - 1, optionally scaled by 100.
struct ReturnSeries {
    std::vector<double> values;
    Scale scale = Scale::percent;

    std::size_t size() const { return values.size(); }
};

struct VolatilitySeries {
    std::vector<double> values;
    VolKind kind = VolKind::conditional;

    std::size_t size() const { return values.size(); }
};

struct CsvConfig {
    std::string date_column = "date";
    std::string price_column = "close";
};

/// Parses a header-first CSV stream into a PriceSeries. Rows are kept in
/// file order. A malformed or non-positive price row is an error naming the
/// 1-based data row index. Blank lines are skipped.
PriceSeries load_csv(std::istream& in, const CsvConfig& cfg = {});

ReturnSeries compute_returns(const PriceSeries& prices, Scale scale = Scale::percent);

/// Sample standard deviation (divisor n-1) of the first `count` returns.
/// Requires count >= 2 and count <= r.size().
double historical_volatility(const ReturnSeries& r, std::size_t count);
inline double historical_volatility(const ReturnSeries& r) {
    return historical_volatility(r, r.values.size());
}

PriceSeries slice(const PriceSeries& s, std::size_t start, std::size_t length);
ReturnSeries slice(const ReturnSeries& s, std::size_t start, std::size_t length);
VolatilitySeries slice(const VolatilitySeries& s, std::size_t start, std::size_t length);

}  // namespace vgv
