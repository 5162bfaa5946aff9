#include "nn.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>

#include "rng.hpp"

namespace dimpc {

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

void fill_uniform(std::vector<double>& v, double bound, Rng& rng) {
    for (double& x : v) x = bound * (2.0 * rng.uniform() - 1.0);
}

}  // namespace

GruParams GruParams::init(int hidden, Rng& rng) {
    if (hidden < 1) throw std::invalid_argument("GruParams::init: hidden size must be >= 1");
    GruParams p;
    p.hidden = hidden;
    const size_t h = static_cast<size_t>(hidden);
    const double bound = 1.0 / std::sqrt(static_cast<double>(hidden));
    for (auto* vec : {&p.wr, &p.wz, &p.wn, &p.br, &p.bz, &p.bn}) vec->assign(h, 0.0);
    for (auto* vec : {&p.ur, &p.uz, &p.un}) vec->assign(h * h, 0.0);
    // draw in canonical tensor order so init is reproducible
    fill_uniform(p.wr, bound, rng);
    fill_uniform(p.wz, bound, rng);
    fill_uniform(p.wn, bound, rng);
    fill_uniform(p.ur, bound, rng);
    fill_uniform(p.uz, bound, rng);
    fill_uniform(p.un, bound, rng);
    fill_uniform(p.br, bound, rng);
    fill_uniform(p.bz, bound, rng);
    fill_uniform(p.bn, bound, rng);
    return p;
}

void gru_step(const GruParams& p, double x, const std::vector<double>& h_prev,
              std::vector<double>& h_next, GruStepCache* cache) {
    const size_t h = static_cast<size_t>(p.hidden);
    if (h_prev.size() != h)
        throw std::invalid_argument("gru_step: hidden state length " +
                                    std::to_string(h_prev.size()) + " != " + std::to_string(h));
    std::vector<double> r(h), z(h), n(h), rh(h);
    for (size_t i = 0; i < h; ++i) {
        double ar = p.wr[i] * x + p.br[i];
        double az = p.wz[i] * x + p.bz[i];
        const double* ur_row = &p.ur[i * h];
        const double* uz_row = &p.uz[i * h];
        for (size_t j = 0; j < h; ++j) {
            ar += ur_row[j] * h_prev[j];
            az += uz_row[j] * h_prev[j];
        }
        r[i] = sigmoid(ar);
        z[i] = sigmoid(az);
    }
    for (size_t j = 0; j < h; ++j) rh[j] = r[j] * h_prev[j];
    for (size_t i = 0; i < h; ++i) {
        double an = p.wn[i] * x + p.bn[i];
        const double* un_row = &p.un[i * h];
        for (size_t j = 0; j < h; ++j) an += un_row[j] * rh[j];
        n[i] = std::tanh(an);
    }
    h_next.resize(h);
    for (size_t i = 0; i < h; ++i) h_next[i] = (1.0 - z[i]) * n[i] + z[i] * h_prev[i];
    if (cache) {
        cache->x = x;
        cache->h_prev = h_prev;
        cache->r = std::move(r);
        cache->z = std::move(z);
        cache->n = std::move(n);
        cache->rh = std::move(rh);
    }
}

GruGrads::GruGrads(const GruParams& p) {
    const size_t h = static_cast<size_t>(p.hidden);
    for (auto* vec : {&wr, &wz, &wn, &br, &bz, &bn}) vec->assign(h, 0.0);
    for (auto* vec : {&ur, &uz, &un}) vec->assign(h * h, 0.0);
}

void gru_step_backward(const GruParams& p, const GruStepCache& cache,
                       const std::vector<double>& dh_next, GruGrads& grads,
                       std::vector<double>& dh_prev) {
    const size_t h = static_cast<size_t>(p.hidden);
    dh_prev.assign(h, 0.0);
    std::vector<double> dan(h), drh(h, 0.0), dar(h), daz(h);
    for (size_t i = 0; i < h; ++i) {
        const double dz = dh_next[i] * (cache.h_prev[i] - cache.n[i]);
        const double dn = dh_next[i] * (1.0 - cache.z[i]);
        dh_prev[i] += dh_next[i] * cache.z[i];
        dan[i] = dn * (1.0 - cache.n[i] * cache.n[i]);
        daz[i] = dz * cache.z[i] * (1.0 - cache.z[i]);
    }
    for (size_t i = 0; i < h; ++i) {
        grads.wn[i] += dan[i] * cache.x;
        grads.bn[i] += dan[i];
        double* dun_row = &grads.un[i * h];
        const double* un_row = &p.un[i * h];
        for (size_t j = 0; j < h; ++j) {
            dun_row[j] += dan[i] * cache.rh[j];
            drh[j] += un_row[j] * dan[i];
        }
    }
    for (size_t j = 0; j < h; ++j) {
        const double dr = drh[j] * cache.h_prev[j];
        dh_prev[j] += drh[j] * cache.r[j];
        dar[j] = dr * cache.r[j] * (1.0 - cache.r[j]);
    }
    for (size_t i = 0; i < h; ++i) {
        grads.wr[i] += dar[i] * cache.x;
        grads.br[i] += dar[i];
        grads.wz[i] += daz[i] * cache.x;
        grads.bz[i] += daz[i];
        double* dur_row = &grads.ur[i * h];
        double* duz_row = &grads.uz[i * h];
        const double* ur_row = &p.ur[i * h];
        const double* uz_row = &p.uz[i * h];
        for (size_t j = 0; j < h; ++j) {
            dur_row[j] += dar[i] * cache.h_prev[j];
            duz_row[j] += daz[i] * cache.h_prev[j];
            dh_prev[j] += ur_row[j] * dar[i] + uz_row[j] * daz[i];
        }
    }
}

MlpParams MlpParams::init(const std::vector<int>& dims, Rng& rng) {
    if (dims.size() < 2) throw std::invalid_argument("MlpParams::init: need >= 2 layer dims");
    MlpParams p;
    p.dims = dims;
    for (size_t l = 0; l + 1 < dims.size(); ++l) {
        const size_t fan_in = static_cast<size_t>(dims[l]);
        const size_t fan_out = static_cast<size_t>(dims[l + 1]);
        std::vector<double> w(fan_out * fan_in), b(fan_out, 0.0);
        fill_uniform(w, 1.0 / std::sqrt(static_cast<double>(fan_in)), rng);
        p.w.push_back(std::move(w));
        p.b.push_back(std::move(b));
    }
    return p;
}

void mlp_forward(const MlpParams& p, const std::vector<double>& input,
                 std::vector<double>& output, MlpCache* cache) {
    if (input.size() != static_cast<size_t>(p.in_dim()))
        throw std::invalid_argument("mlp_forward: input size mismatch");
    if (cache) {
        cache->activations.clear();
        cache->activations.push_back(input);
    }
    std::vector<double> cur = input;
    const size_t layers = p.w.size();
    for (size_t l = 0; l < layers; ++l) {
        const size_t rows = static_cast<size_t>(p.dims[l + 1]);
        const size_t cols = static_cast<size_t>(p.dims[l]);
        std::vector<double> next(rows);
        for (size_t i = 0; i < rows; ++i) {
            double acc = p.b[l][i];
            const double* w_row = &p.w[l][i * cols];
            for (size_t j = 0; j < cols; ++j) acc += w_row[j] * cur[j];
            next[i] = (l + 1 < layers) ? std::tanh(acc) : acc;
        }
        cur = std::move(next);
        if (cache) cache->activations.push_back(cur);
    }
    output = std::move(cur);
}

MlpGrads::MlpGrads(const MlpParams& p) {
    for (size_t l = 0; l < p.w.size(); ++l) {
        w.emplace_back(p.w[l].size(), 0.0);
        b.emplace_back(p.b[l].size(), 0.0);
    }
}

void mlp_backward(const MlpParams& p, const MlpCache& cache,
                  const std::vector<double>& d_output, MlpGrads& grads,
                  std::vector<double>* d_input) {
    const size_t layers = p.w.size();
    std::vector<double> delta = d_output;  // d(pre-activation) of the layer being processed
    for (size_t l = layers; l-- > 0;) {
        const size_t rows = static_cast<size_t>(p.dims[l + 1]);
        const size_t cols = static_cast<size_t>(p.dims[l]);
        if (l + 1 < layers) {
            // convert d(activation) into d(pre-activation) through tanh
            const auto& act = cache.activations[l + 1];
            for (size_t i = 0; i < rows; ++i) delta[i] *= 1.0 - act[i] * act[i];
        }
        const auto& below = cache.activations[l];
        std::vector<double> d_below(cols, 0.0);
        for (size_t i = 0; i < rows; ++i) {
            grads.b[l][i] += delta[i];
            double* gw_row = &grads.w[l][i * cols];
            const double* w_row = &p.w[l][i * cols];
            for (size_t j = 0; j < cols; ++j) {
                gw_row[j] += delta[i] * below[j];
                d_below[j] += w_row[j] * delta[i];
            }
        }
        delta = std::move(d_below);
    }
    if (d_input) *d_input = std::move(delta);
}

void step_embedding(int t, int dim, std::vector<double>& out) {
    const int half = dim / 2;
    out.resize(static_cast<size_t>(dim));
    for (int j = 0; j < half; ++j) {
        const double freq = std::pow(10000.0, -static_cast<double>(j) / half);
        out[static_cast<size_t>(2 * j)] = std::sin(t * freq);
        out[static_cast<size_t>(2 * j + 1)] = std::cos(t * freq);
    }
    if (dim % 2 == 1) out[static_cast<size_t>(dim - 1)] = 0.0;
}

std::vector<TensorRef> tensor_refs(GruParams& p, const std::string& prefix) {
    return {{prefix + ".wr", &p.wr}, {prefix + ".wz", &p.wz}, {prefix + ".wn", &p.wn},
            {prefix + ".ur", &p.ur}, {prefix + ".uz", &p.uz}, {prefix + ".un", &p.un},
            {prefix + ".br", &p.br}, {prefix + ".bz", &p.bz}, {prefix + ".bn", &p.bn}};
}

std::vector<TensorRef> tensor_refs(MlpParams& p, const std::string& prefix) {
    std::vector<TensorRef> refs;
    for (size_t l = 0; l < p.w.size(); ++l) {
        refs.push_back({prefix + ".w" + std::to_string(l), &p.w[l]});
        refs.push_back({prefix + ".b" + std::to_string(l), &p.b[l]});
    }
    return refs;
}

void AdamOptimizer::step(const std::vector<TensorRef>& params,
                         const std::vector<const std::vector<double>*>& grads) {
    if (params.size() != grads.size())
        throw std::invalid_argument("AdamOptimizer::step: tensor/grad count mismatch");
    if (m_.empty()) {
        for (const auto& ref : params) {
            m_.emplace_back(ref.data->size(), 0.0);
            v_.emplace_back(ref.data->size(), 0.0);
        }
    }
    ++t_;
    const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    for (size_t k = 0; k < params.size(); ++k) {
        auto& param = *params[k].data;
        const auto& grad = *grads[k];
        auto& m = m_[k];
        auto& v = v_[k];
        for (size_t i = 0; i < param.size(); ++i) {
            m[i] = beta1_ * m[i] + (1.0 - beta1_) * grad[i];
            v[i] = beta2_ * v[i] + (1.0 - beta2_) * grad[i] * grad[i];
            param[i] -= lr_ * (m[i] / bc1) / (std::sqrt(v[i] / bc2) + eps_);
        }
    }
}

uint64_t tensor_checksum(const std::vector<TensorRef>& refs) {
    uint64_t hash = 0xcbf29ce484222325ULL;
    auto mix_bytes = [&hash](const void* ptr, size_t len) {
        const unsigned char* bytes = static_cast<const unsigned char*>(ptr);
        for (size_t i = 0; i < len; ++i) {
            hash ^= bytes[i];
            hash *= 0x100000001b3ULL;
        }
    };
    for (const auto& ref : refs) {
        mix_bytes(ref.name.data(), ref.name.size());
        if (!ref.data->empty()) mix_bytes(ref.data->data(), ref.data->size() * sizeof(double));
    }
    return hash;
}

}  // namespace dimpc
