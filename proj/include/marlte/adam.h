#ifndef MARLTE_ADAM_H_
#define MARLTE_ADAM_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "marlte/param_set.h"

namespace marlte {

struct AdamConfig {
  double learning_rate = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  // Named presets. "default" is the conventional setting above;
  // "reported-beta1" reads the published "beta=0.9, eps=0.9" as beta1 only;
  // "reported-both" applies beta=0.9 to both moments.
  static AdamConfig Preset(const std::string& name);
};

class AdamState {
 public:
  AdamState() = default;
  AdamState(AdamConfig config, size_t param_count);

  const AdamConfig& config() const { return config_; }
  void set_learning_rate(double lr) { config_.learning_rate = lr; }
  uint64_t step() const { return step_; }
  const std::vector<double>& first_moment() const { return m_; }
  const std::vector<double>& second_moment() const { return v_; }

  // One bias-corrected Adam update of params in place.
  void Step(ParamSet& params, std::span<const double> grads);

  // Checkpoint restore.
  void Restore(uint64_t step, std::vector<double> m, std::vector<double> v);

 private:
  AdamConfig config_;
  uint64_t step_ = 0;
  std::vector<double> m_;
  std::vector<double> v_;
};

}  // namespace marlte

#endif  // MARLTE_ADAM_H_
