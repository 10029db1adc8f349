#include "vgv/timeseries.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace vgv {

namespace {

void validate_prices(const std::vector<double>& values,
                     const std::vector<std::string>& labels) {
    if (values.size() < 2)
        throw std::invalid_argument("PriceSeries: need at least 2 values, got " +
                                    std::to_string(values.size()));
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!(values[i] > 0.0) || !std::isfinite(values[i]))
            throw std::invalid_argument("PriceSeries: non-positive or non-finite price at index " +
                                        std::to_string(i + 1));
    }
    if (!labels.empty()) {
        if (labels.size() != values.size())
            throw std::invalid_argument("PriceSeries: label count does not match value count");
        for (std::size_t i = 1; i < labels.size(); ++i) {
            if (!(labels[i - 1] < labels[i]))
                throw std::invalid_argument("PriceSeries: labels not strictly increasing at index " +
                                            std::to_string(i + 1));
        }
    }
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    fields.push_back(cur);
    return fields;
}

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

}  // namespace

PriceSeries::PriceSeries(std::vector<double> values, std::vector<std::string> labels)
    : values_(std::move(values)), labels_(std::move(labels)) {
    validate_prices(values_, labels_);
}

PriceSeries load_csv(std::istream& in, const CsvConfig& cfg) {
    std::string line;
    if (!std::getline(in, line))
        throw std::runtime_error("load_csv: empty input");

    const auto header = split_csv_line(line);
    std::ptrdiff_t price_col = -1;
    std::ptrdiff_t date_col = -1;
    for (std::size_t i = 0; i < header.size(); ++i) {
        const std::string name = trim(header[i]);
        if (name == cfg.price_column) price_col = static_cast<std::ptrdiff_t>(i);
        if (name == cfg.date_column) date_col = static_cast<std::ptrdiff_t>(i);
    }
    if (price_col < 0)
        throw std::runtime_error("load_csv: missing price column '" + cfg.price_column + "'");

    std::vector<double> values;
    std::vector<std::string> labels;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++row;
        if (trim(line).empty()) continue;
        const auto fields = split_csv_line(line);
        if (static_cast<std::size_t>(price_col) >= fields.size())
            throw std::runtime_error("load_csv: row " + std::to_string(row) +
                                     " has too few columns");
        const std::string cell = trim(fields[static_cast<std::size_t>(price_col)]);
        double price = 0.0;
        std::size_t consumed = 0;
        try {
            price = std::stod(cell, &consumed);
        } catch (const std::exception&) {
            throw std::runtime_error("load_csv: row " + std::to_string(row) +
                                     ": cannot parse price '" + cell + "'");
        }
        if (consumed != cell.size())
            throw std::runtime_error("load_csv: row " + std::to_string(row) +
                                     ": cannot parse price '" + cell + "'");
        if (!(price > 0.0) || !std::isfinite(price))
            throw std::runtime_error("load_csv: row " + std::to_string(row) +
                                     ": non-positive price " + cell);
        values.push_back(price);
        if (date_col >= 0 && static_cast<std::size_t>(date_col) < fields.size())
            labels.push_back(trim(fields[static_cast<std::size_t>(date_col)]));
    }
    if (values.size() < 2)
        throw std::runtime_error("load_csv: fewer than 2 valid rows");
    if (labels.size() != values.size()) labels.clear();
    return PriceSeries(std::move(values), std::move(labels));
}

ReturnSeries compute_returns(const PriceSeries& prices, Scale scale) {
    const auto& p = prices.values();
    ReturnSeries r;
    r.scale = scale;
    r.values.resize(p.size() - 1);
    const double mult = (scale == Scale::percent) ? 100.0 : 1.0;
    for (std::size_t t = 0; t + 1 < p.size(); ++t)
        r.values[t] = mult * (p[t + 1] / p[t] - 1.0);
    return r;
}

double historical_volatility(const ReturnSeries& r, std::size_t count) {
    if (count < 2)
        throw std::invalid_argument("historical_volatility: need at least 2 returns");
    if (count > r.values.size())
        throw std::invalid_argument("historical_volatility: count exceeds series length");
    double mean = 0.0;
    for (std::size_t i = 0; i < count; ++i) mean += r.values[i];
    mean /= static_cast<double>(count);
    double ss = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
        const double d = r.values[i] - mean;
        ss += d * d;
    }
    return std::sqrt(ss / static_cast<double>(count - 1));
}

namespace {

template <typename T>
std::vector<T> slice_vec(const std::vector<T>& v, std::size_t start, std::size_t length,
                         const char* what) {
    if (start > v.size() || length > v.size() - start)
        throw std::out_of_range(std::string(what) + ": slice [" + std::to_string(start) +
                                ", +" + std::to_string(length) + ") out of range for length " +
                                std::to_string(v.size()));
    return std::vector<T>(v.begin() + static_cast<std::ptrdiff_t>(start),
                          v.begin() + static_cast<std::ptrdiff_t>(start + length));
}

}  // namespace

PriceSeries slice(const PriceSeries& s, std::size_t start, std::size_t length) {
    auto values = slice_vec(s.values(), start, length, "PriceSeries");
    std::vector<std::string> labels;
    if (s.has_labels()) labels = slice_vec(s.labels(), start, length, "PriceSeries labels");
    return PriceSeries(std::move(values), std::move(labels));
}

ReturnSeries slice(const ReturnSeries& s, std::size_t start, std::size_t length) {
    return ReturnSeries{slice_vec(s.values, start, length, "ReturnSeries"), s.scale};
}

VolatilitySeries slice(const VolatilitySeries& s, std::size_t start, std::size_t length) {
    return VolatilitySeries{slice_vec(s.values, start, length, "VolatilitySeries"), s.kind};
}

}  // namespace vgv
