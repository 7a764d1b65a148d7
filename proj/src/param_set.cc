#include "marlte/param_set.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace marlte {

LayerId ParamSet::AddDense(std::string name, int out, int in) {
  if (out <= 0 || in <= 0) throw std::invalid_argument("layer dims must be > 0");
  if (Find(name)) throw std::invalid_argument("duplicate layer " + name);
  LayerSpec spec{std::move(name), out, in, values_.size(),
                 values_.size() + static_cast<size_t>(out) * in};
  values_.resize(spec.bias_offset + out, 0.0);
  layers_.push_back(std::move(spec));
  return static_cast<LayerId>(layers_.size() - 1);
}

std::optional<LayerId> ParamSet::Find(const std::string& name) const {
  for (size_t i = 0; i < layers_.size(); ++i) {
    if (layers_[i].name == name) return static_cast<LayerId>(i);
  }
  return std::nullopt;
}

Eigen::Map<RowMatrix> ParamSet::weight(LayerId id) {
  const LayerSpec& s = layers_[id];
  return {values_.data() + s.weight_offset, s.out, s.in};
}

Eigen::Map<const RowMatrix> ParamSet::weight(LayerId id) const {
  const LayerSpec& s = layers_[id];
  return {values_.data() + s.weight_offset, s.out, s.in};
}

Eigen::Map<Eigen::VectorXd> ParamSet::bias(LayerId id) {
  const LayerSpec& s = layers_[id];
  return {values_.data() + s.bias_offset, s.out};
}

Eigen::Map<const Eigen::VectorXd> ParamSet::bias(LayerId id) const {
  const LayerSpec& s = layers_[id];
  return {values_.data() + s.bias_offset, s.out};
}

void ParamSet::GlorotInit(Rng& rng) {
  for (const LayerSpec& s : layers_) {
    double limit = std::sqrt(6.0 / (s.in + s.out));
    std::uniform_real_distribution<double> dist(-limit, limit);
    for (size_t i = 0; i < static_cast<size_t>(s.out) * s.in; ++i) {
      values_[s.weight_offset + i] = dist(rng);
    }
    std::fill_n(values_.begin() + s.bias_offset, s.out, 0.0);
  }
}

void ParamSet::SetZero() { std::fill(values_.begin(), values_.end(), 0.0); }

bool ParamSet::SameLayout(const ParamSet& other) const {
  if (layers_.size() != other.layers_.size()) return false;
  for (size_t i = 0; i < layers_.size(); ++i) {
    const LayerSpec& a = layers_[i];
    const LayerSpec& b = other.layers_[i];
    if (a.name != b.name || a.out != b.out || a.in != b.in) return false;
  }
  return true;
}

}  // namespace marlte
