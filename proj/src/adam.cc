#include "marlte/adam.h"

#include <cmath>
#include <stdexcept>

namespace marlte {

AdamConfig AdamConfig::Preset(const std::string& name) {
  AdamConfig c;
  if (name == "default") return c;
  if (name == "reported-beta1") {
    c.epsilon = 0.9;
    return c;
  }
  if (name == "reported-both") {
    c.beta2 = 0.9;
    c.epsilon = 0.9;
    return c;
  }
  throw std::invalid_argument("unknown Adam preset '" + name + "'");
}

AdamState::AdamState(AdamConfig config, size_t param_count)
    : config_(config), m_(param_count, 0.0), v_(param_count, 0.0) {}

void AdamState::Step(ParamSet& params, std::span<const double> grads) {
  if (grads.size() != params.size() || m_.size() != params.size()) {
    throw std::invalid_argument("AdamState::Step: shape mismatch");
  }
  ++step_;
  const double b1 = config_.beta1;
  const double b2 = config_.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(step_));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(step_));
  std::span<double> p = params.flat();
  for (size_t i = 0; i < p.size(); ++i) {
    m_[i] = b1 * m_[i] + (1.0 - b1) * grads[i];
    v_[i] = b2 * v_[i] + (1.0 - b2) * grads[i] * grads[i];
    double m_hat = m_[i] / c1;
    double v_hat = v_[i] / c2;
    p[i] -= config_.learning_rate * m_hat / (std::sqrt(v_hat) + config_.epsilon);
  }
}

void AdamState::Restore(uint64_t step, std::vector<double> m,
                        std::vector<double> v) {
  if (m.size() != m_.size() || v.size() != v_.size()) {
    throw std::invalid_argument("AdamState::Restore: shape mismatch");
  }
  step_ = step;
  m_ = std::move(m);
  v_ = std::move(v);
}

}  // namespace marlte
