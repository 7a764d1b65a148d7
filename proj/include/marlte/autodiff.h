#ifndef MARLTE_AUTODIFF_H_
#define MARLTE_AUTODIFF_H_

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "marlte/param_set.h"

namespace marlte {

// Handle to a value recorded on a Tape.
struct Var {
  int id = -1;
};

using IndexList = std::shared_ptr<const std::vector<int>>;

inline IndexList MakeIndexList(std::vector<int> v) {
  return std::make_shared<const std::vector<int>>(std::move(v));
}

// Reverse-mode differentiation over row-major double matrices. Every op
// evaluates eagerly and records how to push gradients to its inputs;
// Backward() then walks the record in reverse. Parameter gradients land in a
// caller-provided flat vector laid out like the ParamSet the tape reads from.
//
// Rows are items (links, link pairs, samples); segment ops treat row ranges
// [offsets[i], offsets[i+1]) as independent groups.
class Tape {
 public:
  explicit Tape(const ParamSet* params = nullptr);
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var Constant(RowMatrix value);
  const RowMatrix& value(Var v) const { return nodes_[v.id].value; }
  double scalar(Var v) const;
  int size() const { return static_cast<int>(nodes_.size()); }

  // x * W^T + b for the ParamSet layer.
  Var Dense(Var x, LayerId layer);
  // x times the weight columns [col_begin, col_begin + x.cols()) of a layer,
  // plus the bias when with_bias. Splits a Dense over concatenated inputs.
  Var DensePart(Var x, LayerId layer, int col_begin, bool with_bias);

  Var Relu(Var x);
  Var Tanh(Var x);
  Var Exp(Var x);
  Var Square(Var x);
  Var Scale(Var x, double c);
  Var AddScalar(Var x, double c);
  Var Clamp(Var x, double lo, double hi);
  Var Add(Var a, Var b);
  Var Sub(Var a, Var b);
  Var Mul(Var a, Var b);
  Var Min(Var a, Var b);

  Var ConcatCols(Var a, Var b);
  // out.row(i) = x.row(idx[i]).
  Var GatherRows(Var x, IndexList idx);
  // out.row(idx[i]) += x.row(i), out has `rows` rows.
  Var ScatterAddRows(Var x, IndexList idx, int rows);

  Var SegmentSum(Var x, IndexList offsets);
  Var SegmentMean(Var x, IndexList offsets);
  // Column vector in, per-segment log-softmax out.
  Var SegmentLogSoftmax(Var x, IndexList offsets);

  // Scalar (1x1) reductions.
  Var Sum(Var x);
  Var Mean(Var x);

  // Accumulates d(root)/d(param) * seed into param_grads. Root must be 1x1.
  void Backward(Var root, std::span<double> param_grads, double seed = 1.0);

  // Branch decisions taken by Relu/Clamp/Min, in recording order, when
  // recording is enabled (off by default). Two forward passes with equal
  // patterns ran the same piecewise-smooth branch.
  void set_record_branches(bool on) { record_branches_ = on; }
  const std::vector<char>& branch_pattern() const { return pattern_; }

 private:
  struct Node {
    RowMatrix value;
    RowMatrix grad;
    std::function<void(Tape&, const RowMatrix&)> backward;
  };

  Var Push(RowMatrix value,
           std::function<void(Tape&, const RowMatrix&)> backward = nullptr);
  void Accumulate(Var v, const RowMatrix& g);
  template <typename Expr>
  void AccumulateExpr(Var v, const Expr& g);

  const ParamSet* params_;
  std::vector<Node> nodes_;
  std::vector<char> pattern_;
  bool record_branches_ = false;
  std::span<double> param_grads_;
};

}  // namespace marlte

#endif  // MARLTE_AUTODIFF_H_
