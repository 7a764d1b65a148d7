#ifndef MARLTE_PARAM_SET_H_
#define MARLTE_PARAM_SET_H_

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "marlte/topology.h"

namespace marlte {

using RowMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using LayerId = int;

struct LayerSpec {
  std::string name;
  int out;
  int in;
  size_t weight_offset;  // out*in row-major entries
  size_t bias_offset;    // out entries
};

// Named dense layers over one flat parameter vector. The Eigen views returned
// by weight()/bias() alias the flat storage, so an optimizer step on flat()
// is immediately visible through every layer view. Layers must all be added
// before views are taken.
// Eigen picks packet paths by runtime address, so storage that Eigen reads
// through a Map must be aligned for results to be reproducible bit for bit.
using AlignedDoubles = std::vector<double, Eigen::aligned_allocator<double>>;

class ParamSet {
 public:
  LayerId AddDense(std::string name, int out, int in);

  size_t size() const { return values_.size(); }
  int layer_count() const { return static_cast<int>(layers_.size()); }
  const LayerSpec& layer(LayerId id) const { return layers_[id]; }
  std::optional<LayerId> Find(const std::string& name) const;

  std::span<double> flat() { return values_; }
  std::span<const double> flat() const { return values_; }

  Eigen::Map<RowMatrix> weight(LayerId id);
  Eigen::Map<const RowMatrix> weight(LayerId id) const;
  Eigen::Map<Eigen::VectorXd> bias(LayerId id);
  Eigen::Map<const Eigen::VectorXd> bias(LayerId id) const;

  // Glorot-uniform weights, zero biases.
  void GlorotInit(Rng& rng);
  void SetZero();

  bool SameLayout(const ParamSet& other) const;

 private:
  std::vector<LayerSpec> layers_;
  AlignedDoubles values_;
};

}  // namespace marlte

#endif  // MARLTE_PARAM_SET_H_
