#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace dimpc {

class Rng;

// Minimal dense kernels for the two small networks in this project: a
// scalar-input gated recurrent cell and a tanh MLP. Gradients are exact
// hand-derived backprop; they are checked against finite differences in the
// test suite, so any change here must keep forward and backward in lockstep.

// Gated recurrent cell, input size 1:
//   r = sigmoid(wr*x + Ur h + br)
//   z = sigmoid(wz*x + Uz h + bz)
//   n = tanh(wn*x + Un (r o h) + bn)
//   h' = (1-z) o n + z o h
struct GruParams {
    int hidden = 0;
    std::vector<double> wr, wz, wn;  // hidden
    std::vector<double> ur, uz, un;  // hidden x hidden, row-major
    std::vector<double> br, bz, bn;  // hidden

    static GruParams init(int hidden, Rng& rng);
};

struct GruStepCache {
    double x = 0.0;
    std::vector<double> h_prev, r, z, n, rh;
};

// h_next may alias h_prev only if cache != nullptr is not needed; callers
// here always use distinct buffers.
void gru_step(const GruParams& p, double x, const std::vector<double>& h_prev,
              std::vector<double>& h_next, GruStepCache* cache);

struct GruGrads {
    std::vector<double> wr, wz, wn, ur, uz, un, br, bz, bn;
    explicit GruGrads(const GruParams& p);
    void zero();
};

// Backprop one step: consumes d(h_next), accumulates parameter grads,
// writes d(h_prev). dh_prev must not alias dh_next.
void gru_step_backward(const GruParams& p, const GruStepCache& cache,
                       const std::vector<double>& dh_next, GruGrads& grads,
                       std::vector<double>& dh_prev);

// Fully connected net, tanh hidden activations, linear output layer.
struct MlpParams {
    std::vector<int> dims;                   // e.g. {in, 64, 64, out}
    std::vector<std::vector<double>> w, b;   // w[l]: dims[l+1] x dims[l]

    static MlpParams init(const std::vector<int>& dims, Rng& rng);
    int in_dim() const { return dims.front(); }
    int out_dim() const { return dims.back(); }
};

struct MlpCache {
    std::vector<std::vector<double>> activations;  // activations[0] = input
};

void mlp_forward(const MlpParams& p, const std::vector<double>& input,
                 std::vector<double>& output, MlpCache* cache);

struct MlpGrads {
    std::vector<std::vector<double>> w, b;
    explicit MlpGrads(const MlpParams& p);
    void zero();
};

// Accumulates parameter grads; optionally writes d(input).
void mlp_backward(const MlpParams& p, const MlpCache& cache,
                  const std::vector<double>& d_output, MlpGrads& grads,
                  std::vector<double>* d_input);

// Sinusoidal embedding of an integer diffusion step.
void step_embedding(int t, int dim, std::vector<double>& out);

// Named view of every parameter tensor of a model; the listing order is the
// canonical order used by the optimizer, persistence and checksums.
struct TensorRef {
    std::string name;
    std::vector<double>* data;
};

std::vector<TensorRef> tensor_refs(GruParams& p, const std::string& prefix);
std::vector<TensorRef> tensor_refs(MlpParams& p, const std::string& prefix);

// Adam over a fixed tensor list. Moment buffers are allocated on first use
// and keyed by position, so the tensor list must stay stable across steps.
class AdamOptimizer {
  public:
    AdamOptimizer(double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8)
        : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {}

    void step(const std::vector<TensorRef>& params,
              const std::vector<const std::vector<double>*>& grads);

  private:
    double lr_, beta1_, beta2_, eps_;
    int64_t t_ = 0;
    std::vector<std::vector<double>> m_, v_;
};

// FNV-1a over the raw bytes of every tensor, in canonical order.
uint64_t tensor_checksum(const std::vector<TensorRef>& refs);

}  // namespace dimpc
