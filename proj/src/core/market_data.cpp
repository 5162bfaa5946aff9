#include "market_data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "errors.hpp"
#include "rng.hpp"
#include "time_util.hpp"

namespace dimpc {

namespace {

constexpr double kScaleFloor = 1e-6;
constexpr double kTwoPi = 6.283185307179586476925286766559;

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    fields.push_back(trim(cur));
    return fields;
}

}  // namespace

PriceSeries PriceSeries::prefix(size_t n) const { return slice(0, n); }

PriceSeries PriceSeries::tail(size_t n) const { return slice(values.size() - n, values.size()); }

PriceSeries PriceSeries::slice(size_t first, size_t last) const {
    if (first > last || last > values.size())
        throw std::invalid_argument("PriceSeries::slice: range out of bounds");
    PriceSeries out;
    out.start_hour = start_hour + static_cast<int64_t>(first);
    out.values.assign(values.begin() + first, values.begin() + last);
    return out;
}

PriceSeries load_price_csv(const std::string& path, const CsvColumns& columns, GapPolicy gaps) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open price CSV '" + path + "'");

    std::string line;
    if (!std::getline(in, line)) throw parse_error(path + ": empty file, header row required");
    const auto header = split_csv_line(line);
    long ts_col = -1, price_col = -1;
    for (size_t i = 0; i < header.size(); ++i) {
        if (header[i] == columns.timestamp) ts_col = static_cast<long>(i);
        if (header[i] == columns.price) price_col = static_cast<long>(i);
    }
    if (ts_col < 0)
        throw parse_error(path + ": missing timestamp column '" + columns.timestamp + "'");
    if (price_col < 0) throw parse_error(path + ": missing price column '" + columns.price + "'");

    std::vector<std::pair<int64_t, double>> rows;
    size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto fields = split_csv_line(line);
        const size_t need = static_cast<size_t>(std::max(ts_col, price_col)) + 1;
        auto row_err = [&](const std::string& why) -> parse_error {
            return parse_error(path + ":" + std::to_string(line_no) + ": " + why);
        };
        if (fields.size() < need) throw row_err("row has too few columns");
        int64_t hour;
        try {
            hour = parse_iso_hour(fields[static_cast<size_t>(ts_col)]);
        } catch (const parse_error& e) {
            throw row_err(e.what());
        }
        const std::string& ptext = fields[static_cast<size_t>(price_col)];
        char* end = nullptr;
        const double price = std::strtod(ptext.c_str(), &end);
        if (end == ptext.c_str() || *end != '\0') throw row_err("unparseable price '" + ptext + "'");
        if (!std::isfinite(price)) throw row_err("non-finite price '" + ptext + "'");
        rows.emplace_back(hour, price);
    }
    if (rows.empty()) throw parse_error(path + ": empty series (no data rows)");

    std::sort(rows.begin(), rows.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

    PriceSeries series;
    series.start_hour = rows.front().first;
    series.values.reserve(rows.size());
    series.values.push_back(rows.front().second);
    for (size_t i = 1; i < rows.size(); ++i) {
        const int64_t prev = rows[i - 1].first;
        const int64_t cur = rows[i].first;
        if (cur == prev)
            throw parse_error(path + ": duplicate timestamp " + format_iso_hour(cur));
        if (cur != prev + 1) {
            if (gaps == GapPolicy::Error)
                throw parse_error(path + ": missing hour " + format_iso_hour(prev + 1) +
                                  " (use gap-fill to interpolate)");
            const double v0 = rows[i - 1].second;
            const double v1 = rows[i].second;
            const int64_t span = cur - prev;
            for (int64_t h = 1; h < span; ++h)
                series.values.push_back(v0 + (v1 - v0) * static_cast<double>(h) /
                                                 static_cast<double>(span));
        }
        series.values.push_back(rows[i].second);
    }
    return series;
}

void write_price_csv(const std::string& path, const PriceSeries& series,
                     const CsvColumns& columns) {
    std::ofstream out(path);
    if (!out) throw io_error("cannot write price CSV '" + path + "'");
    out << columns.timestamp << ',' << columns.price << '\n';
    char buf[40];
    for (size_t i = 0; i < series.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", series.values[i]);
        out << format_iso_hour(series.hour_at(i)) << ',' << buf << '\n';
    }
    if (!out) throw io_error("short write to '" + path + "'");
}

ScalerStats fit_scaler(const PriceSeries& series, size_t window) {
    if (window < 2) throw std::invalid_argument("fit_scaler: window must be >= 2");
    if (window > series.size())
        throw std::invalid_argument("fit_scaler: window " + std::to_string(window) +
                                    " exceeds series length " + std::to_string(series.size()));
    const size_t first = series.size() - window;
    double mean = 0.0;
    for (size_t i = first; i < series.size(); ++i) mean += series.values[i];
    mean /= static_cast<double>(window);
    double var = 0.0;
    for (size_t i = first; i < series.size(); ++i) {
        const double d = series.values[i] - mean;
        var += d * d;
    }
    var /= static_cast<double>(window);  // population variance: window=2 stays defined
    ScalerStats stats;
    stats.center = mean;
    stats.scale = std::max(std::sqrt(var), kScaleFloor);
    return stats;
}

double standardize(double x, const ScalerStats& stats) {
    if (!(stats.scale > 0.0)) throw std::invalid_argument("standardize: scale must be positive");
    return (x - stats.center) / stats.scale;
}

double inverse_standardize(double z, const ScalerStats& stats) {
    if (!(stats.scale > 0.0))
        throw std::invalid_argument("inverse_standardize: scale must be positive");
    return z * stats.scale + stats.center;
}

PriceSeries synth_prices(const SynthConfig& cfg) {
    if (cfg.days <= 0) throw std::invalid_argument("synth_prices: days must be positive");
    if (!(cfg.noise_ar_coeff > -1.0 && cfg.noise_ar_coeff < 1.0))
        throw std::invalid_argument("synth_prices: noise_ar_coeff must lie in (-1,1)");
    if (cfg.noise_std < 0.0) throw std::invalid_argument("synth_prices: noise_std must be >= 0");
    if (cfg.spike_prob < 0.0 || cfg.spike_prob > 1.0)
        throw std::invalid_argument("synth_prices: spike_prob must lie in [0,1]");
    if (cfg.spike_scale < 0.0)
        throw std::invalid_argument("synth_prices: spike_scale must be >= 0");

    Rng rng(cfg.seed);
    PriceSeries series;
    series.start_hour = cfg.start_hour;
    const size_t n = static_cast<size_t>(cfg.days) * 24;
    series.values.reserve(n);
    double noise = 0.0;
    for (size_t k = 0; k < n; ++k) {
        noise = cfg.noise_ar_coeff * noise + cfg.noise_std * rng.gaussian();
        double v = cfg.base +
                   cfg.daily_amplitude * std::sin(kTwoPi * static_cast<double>(k) / 24.0) + noise;
        if (cfg.spike_prob > 0.0 && rng.uniform() < cfg.spike_prob)
            v += rng.exponential(cfg.spike_scale);
        series.values.push_back(v);
    }
    return series;
}

}  // namespace dimpc
