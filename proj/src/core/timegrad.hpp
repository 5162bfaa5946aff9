#pragma once

#include <cstdint>
#include <vector>

#include "market_data.hpp"
#include "nn.hpp"
#include "schedule.hpp"

namespace dimpc {

struct TrainConfig {
    int epochs = 30;
    int batch_size = 32;
    double learning_rate = 1e-3;
    int hidden_size = 32;
    int diffusion_steps = 50;  // T
    double beta_min = 1e-4;
    double beta_max = 0.1;
    int context_len = 72;
    uint64_t seed = 0;

    void validate() const;
};

struct TrainMeta {
    std::vector<double> epoch_losses;
    double first_epoch_loss = 0.0;
    double final_epoch_loss = 0.0;
};

// Autoregressive diffusion forecaster: a scalar-input GRU summarizes the
// scaled price history, and a small MLP predicts the forward-process noise
// of the next scaled value, conditioned on the hidden state and a sinusoidal
// embedding of the diffusion step. Scaling is refit per forecast call on the
// trailing context window.
struct TimeGradModel {
    GruParams rnn;
    MlpParams denoiser;  // input [x_t, step embedding, h] -> predicted noise
    DiffusionSchedule schedule;
    int context_len = 72;
    int temb_dim = 16;
    uint64_t seed = 0;
    TrainMeta meta;

    std::vector<TensorRef> tensors();
    uint64_t checksum();
};

// M price trajectories of length N, row-major, in original price units.
struct ForecastEnsemble {
    int horizon = 0;    // N
    int num_paths = 0;  // M
    std::vector<double> paths;

    double at(int path, int hour) const {
        return paths[static_cast<size_t>(path) * static_cast<size_t>(horizon) +
                     static_cast<size_t>(hour)];
    }
};

enum class Aggregate { Median, Mean };

// Left-to-right fold of the recurrent cell over scaled history, zero initial
// state.
std::vector<double> encode_history(const GruParams& rnn, const std::vector<double>& scaled);

// One reverse-process update x_t -> x_{t-1}. The stochastic term is
// suppressed at t == 1 regardless of eps_draw.
double denoise_step(double x_t, int t, const std::vector<double>& h, const TimeGradModel& model,
                    double eps_draw);

// Joint noise-prediction training of denoiser and RNN. Deterministic:
// identical series, config and seed reproduce the model bit for bit.
TimeGradModel train_timegrad(const PriceSeries& series, const TrainConfig& cfg);

// One autoregressive trajectory of `horizon` prices.
std::vector<double> sample_path(const TimeGradModel& model, const PriceSeries& history,
                                int horizon, uint64_t seed);

// M sample_path calls with per-path derived seeds.
ForecastEnsemble sample_ensemble(const TimeGradModel& model, const PriceSeries& history,
                                 int horizon, int num_paths, uint64_t seed);

// Per-hour median or mean across paths. Values are sorted before
// accumulation so the result does not depend on path order.
std::vector<double> aggregate_point(const ForecastEnsemble& ensemble, Aggregate mode);

// Per-hour empirical quantile with linear interpolation between order
// statistics; quantile(0.5) is the aggregate_point median.
std::vector<double> ensemble_quantile(const ForecastEnsemble& ensemble, double q);

namespace detail {

// One training example in scaled space.
struct TrainSample {
    std::vector<double> context;
    double target = 0.0;
    int t = 1;
    double eps = 0.0;
};

// Mean squared noise-prediction error over the batch. When grad sinks are
// given, accumulates the exact gradient of the batch mean into them
// (backprop through the denoiser and the full context recurrence).
double timegrad_loss(const GruParams& rnn, const MlpParams& denoiser,
                     const DiffusionSchedule& sched, int temb_dim,
                     const std::vector<TrainSample>& batch, GruGrads* rnn_grads,
                     MlpGrads* denoiser_grads);

}  // namespace detail

}  // namespace dimpc
