#ifndef TESTS_SUPPORT_GRADIENT_CHECK_HPP
#define TESTS_SUPPORT_GRADIENT_CHECK_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include "semfunc/training.hpp"

namespace semfunc::testsupport {

struct ParameterSlot {
  std::function<double&(WorldModel&)> ref;
  double analytic = 0.0;
};

// One slot per model parameter, paired with the analytic gradient entry in
// the same position.
inline std::vector<ParameterSlot> parameter_slots(const WorldModel& model,
                                                  const ModelGradient& grad) {
  std::vector<ParameterSlot> slots;
  const std::size_t dims = model.space.dims;
  for (std::size_t p = 0; p < model.vocab_size(); ++p) {
    for (std::size_t j = 0; j < dims; ++j) {
      slots.push_back({[p, j](WorldModel& m) -> double& {
                         return m.entry(p).function.weights[j];
                       },
                       grad.weights[p][j]});
    }
    slots.push_back(
        {[p](WorldModel& m) -> double& { return m.entry(p).function.bias; },
         grad.bias[p]});
  }
  for (const auto& [label, g] : grad.links) {
    for (std::size_t r = 0; r < dims; ++r) {
      for (std::size_t c = 0; c < dims; ++c) {
        slots.push_back({[label, r, c](WorldModel& m) -> double& {
                           return m.links.at(label)(r, c);
                         },
                         g(r, c)});
      }
    }
  }
  for (std::size_t j = 0; j < dims; ++j) {
    slots.push_back(
        {[j](WorldModel& m) -> double& { return m.node_bias[j]; },
         grad.node_bias[j]});
  }
  return slots;
}

// Largest relative error between the analytic gradient and central finite
// differences of the observation value, over every parameter. The
// workspace states are frozen, which is exactly the function the analytic
// gradient differentiates.
inline double max_gradient_error(const WorldModel& model,
                                 const Observation& observation,
                                 const ObservationWorkspace& workspace,
                                 double h = 1e-5) {
  ModelGradient grad = ModelGradient::zeros_like(model);
  observation_gradient(model, observation, workspace, grad);

  double worst = 0.0;
  for (const ParameterSlot& slot : parameter_slots(model, grad)) {
    WorldModel bumped = model;
    slot.ref(bumped) += h;
    const double up = observation_value(bumped, observation, workspace);
    WorldModel dipped = model;
    slot.ref(dipped) -= h;
    const double down = observation_value(dipped, observation, workspace);
    const double fd = (up - down) / (2.0 * h);
    const double scale =
        std::max({1.0, std::fabs(fd), std::fabs(slot.analytic)});
    worst = std::max(worst, std::fabs(fd - slot.analytic) / scale);
  }
  return worst;
}

}  // namespace semfunc::testsupport

#endif
