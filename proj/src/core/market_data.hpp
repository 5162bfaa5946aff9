#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace dimpc {

// Uniformly spaced hourly prices. values[i] is observed at start_hour + i.
struct PriceSeries {
    int64_t start_hour = 0;  // epoch hours, UTC
    std::vector<double> values;

    size_t size() const { return values.size(); }
    int64_t hour_at(size_t i) const { return start_hour + static_cast<int64_t>(i); }

    // First `n` observations, same start.
    PriceSeries prefix(size_t n) const;
    // Last `n` observations.
    PriceSeries tail(size_t n) const;
    // Half-open index range [first, last).
    PriceSeries slice(size_t first, size_t last) const;
};

struct ScalerStats {
    double center = 0.0;
    double scale = 1.0;  // > 0
};

struct SynthConfig {
    int days = 30;
    double base = 50.0;
    double daily_amplitude = 15.0;
    double noise_ar_coeff = 0.7;  // in (-1, 1)
    double noise_std = 3.0;       // >= 0
    double spike_prob = 0.0;      // in [0, 1]
    double spike_scale = 0.0;     // >= 0, mean of exponential spike size
    uint64_t seed = 0;
    int64_t start_hour = 473352;  // 2024-01-01T00:00:00Z
};

struct CsvColumns {
    std::string timestamp = "timestamp";
    std::string price = "price_usd_per_mwh";
};

enum class GapPolicy { Error, LinearFill };

// Loads an hourly price CSV. Rows are sorted by timestamp before validation;
// duplicates and hour gaps (unless gap-filling) are load errors that name
// the offending row or hour.
PriceSeries load_price_csv(const std::string& path, const CsvColumns& columns = {},
                           GapPolicy gaps = GapPolicy::Error);

// Writes the same format load_price_csv reads; values round-trip exactly.
void write_price_csv(const std::string& path, const PriceSeries& series,
                     const CsvColumns& columns = {});

// Mean and population std of the trailing `window` values. The scale is
// floored at 1e-6 so constant windows stay usable.
ScalerStats fit_scaler(const PriceSeries& series, size_t window);

double standardize(double x, const ScalerStats& stats);
double inverse_standardize(double z, const ScalerStats& stats);

// Daily sinusoid + AR(1) noise + occasional exponential spikes. Pure
// function of the config, seed included.
PriceSeries synth_prices(const SynthConfig& cfg);

}  // namespace dimpc
