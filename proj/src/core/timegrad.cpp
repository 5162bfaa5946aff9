#include "timegrad.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "errors.hpp"
#include "rng.hpp"

namespace dimpc {

void TrainConfig::validate() const {
    if (epochs < 1 || batch_size < 1 || hidden_size < 1 || diffusion_steps < 1 ||
        context_len < 2)
        throw std::invalid_argument("TrainConfig: counts must be positive (context_len >= 2)");
    if (!(learning_rate > 0.0)) throw std::invalid_argument("TrainConfig: learning_rate <= 0");
    if (!(beta_min > 0.0) || !(beta_min <= beta_max) || !(beta_max < 1.0))
        throw std::invalid_argument("TrainConfig: require 0 < beta_min <= beta_max < 1");
}

std::vector<TensorRef> TimeGradModel::tensors() {
    auto refs = tensor_refs(rnn, "rnn");
    for (auto& ref : tensor_refs(denoiser, "denoiser")) refs.push_back(ref);
    return refs;
}

uint64_t TimeGradModel::checksum() { return tensor_checksum(tensors()); }

std::vector<double> encode_history(const GruParams& rnn, const std::vector<double>& scaled) {
    if (scaled.empty()) throw std::invalid_argument("encode_history: empty history");
    std::vector<double> h(static_cast<size_t>(rnn.hidden), 0.0), next;
    for (double x : scaled) {
        gru_step(rnn, x, h, next, nullptr);
        h.swap(next);
    }
    return h;
}

namespace {

// Denoiser input layout: [x_t, step embedding, hidden state].
void denoiser_input(double x_t, int t, int temb_dim, const std::vector<double>& h,
                    std::vector<double>& u) {
    std::vector<double> temb;
    step_embedding(t, temb_dim, temb);
    u.clear();
    u.reserve(1 + temb.size() + h.size());
    u.push_back(x_t);
    u.insert(u.end(), temb.begin(), temb.end());
    u.insert(u.end(), h.begin(), h.end());
}

double predict_noise(const MlpParams& denoiser, int temb_dim, double x_t, int t,
                     const std::vector<double>& h) {
    std::vector<double> u, out;
    denoiser_input(x_t, t, temb_dim, h, u);
    mlp_forward(denoiser, u, out, nullptr);
    return out[0];
}

}  // namespace

double denoise_step(double x_t, int t, const std::vector<double>& h, const TimeGradModel& model,
                    double eps_draw) {
    const DiffusionSchedule& sched = model.schedule;
    if (t < 1 || t > sched.steps)
        throw std::invalid_argument("denoise_step: step " + std::to_string(t) + " outside 1.." +
                                    std::to_string(sched.steps));
    const double eps_hat = predict_noise(model.denoiser, model.temb_dim, x_t, t, h);
    const double beta = sched.beta(t);
    const double mu =
        (x_t - beta / std::sqrt(1.0 - sched.alpha_bar(t)) * eps_hat) / std::sqrt(sched.alpha(t));
    if (t == 1) return mu;
    return mu + std::sqrt(beta) * eps_draw;
}

namespace detail {

double timegrad_loss(const GruParams& rnn, const MlpParams& denoiser,
                     const DiffusionSchedule& sched, int temb_dim,
                     const std::vector<TrainSample>& batch, GruGrads* rnn_grads,
                     MlpGrads* denoiser_grads) {
    const bool want_grads = rnn_grads != nullptr;
    const double inv_batch = 1.0 / static_cast<double>(batch.size());
    const size_t hidden = static_cast<size_t>(rnn.hidden);
    double loss = 0.0;

    std::vector<GruStepCache> caches;
    std::vector<double> h, next, u, out, d_out(1), d_u, dh, dh_prev;
    for (const TrainSample& sample : batch) {
        // encode context, keeping per-step caches when backprop is needed
        const size_t steps = sample.context.size();
        if (want_grads) caches.resize(steps);
        h.assign(hidden, 0.0);
        for (size_t k = 0; k < steps; ++k) {
            gru_step(rnn, sample.context[k], h, next, want_grads ? &caches[k] : nullptr);
            h.swap(next);
        }

        const double x_t = forward_sample(sample.target, sample.t, sample.eps, sched);
        denoiser_input(x_t, sample.t, temb_dim, h, u);
        MlpCache mlp_cache;
        mlp_forward(denoiser, u, out, want_grads ? &mlp_cache : nullptr);
        const double err = out[0] - sample.eps;
        loss += err * err;

        if (want_grads) {
            d_out[0] = 2.0 * err * inv_batch;
            mlp_backward(denoiser, mlp_cache, d_out, *denoiser_grads, &d_u);
            // gradient w.r.t. the hidden state is the tail of the input grad
            dh.assign(d_u.end() - static_cast<long>(hidden), d_u.end());
            for (size_t k = steps; k-- > 0;) {
                gru_step_backward(rnn, caches[k], dh, *rnn_grads, dh_prev);
                dh.swap(dh_prev);
            }
        }
    }
    return loss * inv_batch;
}

}  // namespace detail

namespace {

detail::TrainSample make_sample(const PriceSeries& series, size_t target_index, int context_len,
                                int diffusion_steps, Rng& rng) {
    detail::TrainSample sample;
    const size_t first = target_index - static_cast<size_t>(context_len);
    double mean = 0.0;
    for (size_t i = first; i < target_index; ++i) mean += series.values[i];
    mean /= static_cast<double>(context_len);
    double var = 0.0;
    for (size_t i = first; i < target_index; ++i) {
        const double d = series.values[i] - mean;
        var += d * d;
    }
    var /= static_cast<double>(context_len);
    const double scale = std::max(std::sqrt(var), 1e-6);
    sample.context.resize(static_cast<size_t>(context_len));
    for (size_t i = first; i < target_index; ++i)
        sample.context[i - first] = (series.values[i] - mean) / scale;
    sample.target = (series.values[target_index] - mean) / scale;
    sample.t = 1 + static_cast<int>(rng.uniform_index(static_cast<uint64_t>(diffusion_steps)));
    sample.eps = rng.gaussian();
    return sample;
}

}  // namespace

TimeGradModel train_timegrad(const PriceSeries& series, const TrainConfig& cfg) {
    cfg.validate();
    if (series.size() < static_cast<size_t>(cfg.context_len) + 1)
        throw std::invalid_argument("train_timegrad: series length " +
                                    std::to_string(series.size()) + " < context_len+1 = " +
                                    std::to_string(cfg.context_len + 1));

    Rng rng(cfg.seed);
    TimeGradModel model;
    model.rnn = GruParams::init(cfg.hidden_size, rng);
    model.denoiser =
        MlpParams::init({1 + 16 + cfg.hidden_size, 64, 64, 1}, rng);
    model.schedule = make_schedule(cfg.diffusion_steps, cfg.beta_min, cfg.beta_max);
    model.context_len = cfg.context_len;
    model.temb_dim = 16;
    model.seed = cfg.seed;

    const size_t num_windows = series.size() - static_cast<size_t>(cfg.context_len);
    std::vector<size_t> order(num_windows);
    for (size_t i = 0; i < num_windows; ++i)
        order[i] = static_cast<size_t>(cfg.context_len) + i;

    const size_t batch_size = std::min<size_t>(static_cast<size_t>(cfg.batch_size), num_windows);
    const size_t num_batches = num_windows / batch_size;

    AdamOptimizer adam(cfg.learning_rate);
    GruGrads rnn_grads(model.rnn);
    MlpGrads den_grads(model.denoiser);
    auto params = model.tensors();
    std::vector<const std::vector<double>*> grad_list = {
        &rnn_grads.wr, &rnn_grads.wz, &rnn_grads.wn, &rnn_grads.ur, &rnn_grads.uz,
        &rnn_grads.un, &rnn_grads.br, &rnn_grads.bz, &rnn_grads.bn};
    for (size_t l = 0; l < den_grads.w.size(); ++l) {
        grad_list.push_back(&den_grads.w[l]);
        grad_list.push_back(&den_grads.b[l]);
    }

    std::vector<detail::TrainSample> batch;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        // Fisher-Yates shuffle of window positions
        for (size_t i = num_windows; i-- > 1;) {
            const size_t j = static_cast<size_t>(rng.uniform_index(i + 1));
            std::swap(order[i], order[j]);
        }
        double epoch_loss = 0.0;
        for (size_t b = 0; b < num_batches; ++b) {
            batch.clear();
            for (size_t s = 0; s < batch_size; ++s)
                batch.push_back(make_sample(series, order[b * batch_size + s], cfg.context_len,
                                            cfg.diffusion_steps, rng));
            for (auto& g : rnn_grads.wr) g = 0.0;
            rnn_grads = GruGrads(model.rnn);
            den_grads = MlpGrads(model.denoiser);
            grad_list = {&rnn_grads.wr, &rnn_grads.wz, &rnn_grads.wn,
                         &rnn_grads.ur, &rnn_grads.uz, &rnn_grads.un,
                         &rnn_grads.br, &rnn_grads.bz, &rnn_grads.bn};
            for (size_t l = 0; l < den_grads.w.size(); ++l) {
                grad_list.push_back(&den_grads.w[l]);
                grad_list.push_back(&den_grads.b[l]);
            }
            const double loss = detail::timegrad_loss(model.rnn, model.denoiser, model.schedule,
                                                      model.temb_dim, batch, &rnn_grads,
                                                      &den_grads);
            if (!std::isfinite(loss))
                throw numeric_error("train_timegrad: non-finite loss at epoch " +
                                    std::to_string(epoch) + ", batch " + std::to_string(b));
            adam.step(params, grad_list);
            epoch_loss += loss;
        }
        epoch_loss /= static_cast<double>(num_batches);
        model.meta.epoch_losses.push_back(epoch_loss);
    }
    model.meta.first_epoch_loss = model.meta.epoch_losses.front();
    model.meta.final_epoch_loss = model.meta.epoch_losses.back();
    return model;
}

std::vector<double> sample_path(const TimeGradModel& model, const PriceSeries& history,
                                int horizon, uint64_t seed) {
    if (horizon < 0) throw std::invalid_argument("sample_path: negative horizon");
    if (history.size() < static_cast<size_t>(model.context_len))
        throw std::invalid_argument("sample_path: history length " +
                                    std::to_string(history.size()) + " < context_len " +
                                    std::to_string(model.context_len));
    const PriceSeries context = history.tail(static_cast<size_t>(model.context_len));
    const ScalerStats stats = fit_scaler(context, context.size());

    std::vector<double> scaled(context.size());
    for (size_t i = 0; i < context.size(); ++i) scaled[i] = standardize(context.values[i], stats);
    std::vector<double> h = encode_history(model.rnn, scaled);

    Rng rng(seed);
    std::vector<double> trajectory;
    trajectory.reserve(static_cast<size_t>(horizon));
    std::vector<double> h_next;
    for (int j = 0; j < horizon; ++j) {
        double x = rng.gaussian();
        for (int t = model.schedule.steps; t >= 1; --t)
            x = denoise_step(x, t, h, model, t > 1 ? rng.gaussian() : 0.0);
        const double price = inverse_standardize(x, stats);
        if (!std::isfinite(price))
            throw numeric_error("sample_path: non-finite sample at hour " + std::to_string(j));
        trajectory.push_back(price);
        gru_step(model.rnn, standardize(price, stats), h, h_next, nullptr);
        h.swap(h_next);
    }
    return trajectory;
}

ForecastEnsemble sample_ensemble(const TimeGradModel& model, const PriceSeries& history,
                                 int horizon, int num_paths, uint64_t seed) {
    if (num_paths < 1) throw std::invalid_argument("sample_ensemble: need at least one path");
    ForecastEnsemble ensemble;
    ensemble.horizon = horizon;
    ensemble.num_paths = num_paths;
    ensemble.paths.reserve(static_cast<size_t>(horizon) * static_cast<size_t>(num_paths));
    for (int i = 0; i < num_paths; ++i) {
        const auto path =
            sample_path(model, history, horizon, derive_seed(seed, static_cast<uint64_t>(i)));
        ensemble.paths.insert(ensemble.paths.end(), path.begin(), path.end());
    }
    return ensemble;
}

std::vector<double> ensemble_quantile(const ForecastEnsemble& ensemble, double q) {
    if (ensemble.num_paths < 1)
        throw std::invalid_argument("ensemble_quantile: empty ensemble");
    if (!(q >= 0.0 && q <= 1.0))
        throw std::invalid_argument("ensemble_quantile: q outside [0,1]");
    const int m = ensemble.num_paths;
    std::vector<double> column(static_cast<size_t>(m));
    std::vector<double> out(static_cast<size_t>(ensemble.horizon));
    for (int hour = 0; hour < ensemble.horizon; ++hour) {
        for (int i = 0; i < m; ++i) column[static_cast<size_t>(i)] = ensemble.at(i, hour);
        std::sort(column.begin(), column.end());
        const double pos = q * static_cast<double>(m - 1);
        const size_t lo = static_cast<size_t>(pos);
        const size_t hi = std::min(lo + 1, static_cast<size_t>(m - 1));
        const double frac = pos - static_cast<double>(lo);
        out[static_cast<size_t>(hour)] = column[lo] + frac * (column[hi] - column[lo]);
    }
    return out;
}

std::vector<double> aggregate_point(const ForecastEnsemble& ensemble, Aggregate mode) {
    if (ensemble.num_paths < 1) throw std::invalid_argument("aggregate_point: empty ensemble");
    if (mode == Aggregate::Median) return ensemble_quantile(ensemble, 0.5);
    const int m = ensemble.num_paths;
    std::vector<double> column(static_cast<size_t>(m));
    std::vector<double> out(static_cast<size_t>(ensemble.horizon));
    for (int hour = 0; hour < ensemble.horizon; ++hour) {
        for (int i = 0; i < m; ++i) column[static_cast<size_t>(i)] = ensemble.at(i, hour);
        std::sort(column.begin(), column.end());
        double sum = 0.0;
        for (double v : column) sum += v;
        out[static_cast<size_t>(hour)] = sum / static_cast<double>(m);
    }
    return out;
}

}  // namespace dimpc
