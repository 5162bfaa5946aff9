#pragma once

#include <vector>

namespace dimpc {

// Forward-process noise schedule. alphas[t-1] stores alpha_t for t = 1..T,
// alpha_bars the running product.
struct DiffusionSchedule {
    int steps = 0;  // T
    std::vector<double> alphas;
    std::vector<double> alpha_bars;

    double alpha(int t) const { return alphas[static_cast<size_t>(t - 1)]; }
    double alpha_bar(int t) const { return alpha_bars[static_cast<size_t>(t - 1)]; }
    double beta(int t) const { return 1.0 - alpha(t); }
};

// Linear beta ramp from beta_min (t=1) to beta_max (t=T).
DiffusionSchedule make_schedule(int steps, double beta_min, double beta_max);

// Closed-form forward marginal: sqrt(abar_t)*x0 + sqrt(1-abar_t)*eps.
double forward_sample(double x0, int t, double eps, const DiffusionSchedule& sched);

}  // namespace dimpc
