#include "schedule.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace dimpc {

DiffusionSchedule make_schedule(int steps, double beta_min, double beta_max) {
    if (steps < 1) throw std::invalid_argument("make_schedule: need at least one step");
    if (!(beta_min > 0.0) || !(beta_min <= beta_max) || !(beta_max < 1.0))
        throw std::invalid_argument("make_schedule: require 0 < beta_min <= beta_max < 1");
    DiffusionSchedule sched;
    sched.steps = steps;
    sched.alphas.reserve(static_cast<size_t>(steps));
    sched.alpha_bars.reserve(static_cast<size_t>(steps));
    double running = 1.0;
    for (int t = 1; t <= steps; ++t) {
        const double frac =
            steps == 1 ? 0.0 : static_cast<double>(t - 1) / static_cast<double>(steps - 1);
        const double beta = beta_min + (beta_max - beta_min) * frac;
        const double alpha = 1.0 - beta;
        running *= alpha;
        sched.alphas.push_back(alpha);
        sched.alpha_bars.push_back(running);
    }
    return sched;
}

double forward_sample(double x0, int t, double eps, const DiffusionSchedule& sched) {
    if (t < 1 || t > sched.steps)
        throw std::invalid_argument("forward_sample: step " + std::to_string(t) +
                                    " outside 1.." + std::to_string(sched.steps));
    const double abar = sched.alpha_bar(t);
    return std::sqrt(abar) * x0 + std::sqrt(1.0 - abar) * eps;
}

}  // namespace dimpc
