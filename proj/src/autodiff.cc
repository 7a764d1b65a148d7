#include "marlte/autodiff.h"

#include <cmath>
#include <mutex>
#include <stdexcept>
#include <string>

#ifdef __GLIBC__
#include <malloc.h>
#endif

namespace marlte {
namespace {

void CheckSameShape(const RowMatrix& a, const RowMatrix& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument(std::string(op) + ": shape mismatch " +
                                std::to_string(a.rows()) + "x" +
                                std::to_string(a.cols()) + " vs " +
                                std::to_string(b.rows()) + "x" +
                                std::to_string(b.cols()));
  }
}

void CheckOffsets(const std::vector<int>& offsets, Eigen::Index rows) {
  if (offsets.empty() || offsets.front() != 0 || offsets.back() != rows) {
    throw std::invalid_argument("segment offsets must span all rows");
  }
}

// A tape allocates and frees many same-sized matrices of a few hundred KB.
// glibc serves those with mmap by default, which costs a page fault per page
// on every reuse; keep them on the heap instead.
void KeepLargeBlocksOnHeap() {
#ifdef __GLIBC__
  static std::once_flag once;
  std::call_once(once, [] {
    mallopt(M_MMAP_THRESHOLD, 256 << 20);
    mallopt(M_TRIM_THRESHOLD, 512 << 20);
  });
#endif
}

}  // namespace

Tape::Tape(const ParamSet* params) : params_(params) { KeepLargeBlocksOnHeap(); }

Var Tape::Push(RowMatrix value,
               std::function<void(Tape&, const RowMatrix&)> backward) {
  nodes_.push_back({std::move(value), RowMatrix(), std::move(backward)});
  return Var{static_cast<int>(nodes_.size()) - 1};
}

void Tape::Accumulate(Var v, const RowMatrix& g) {
  RowMatrix& grad = nodes_[v.id].grad;
  if (grad.size() == 0) {
    grad = g;
  } else {
    grad += g;
  }
}

template <typename Expr>
void Tape::AccumulateExpr(Var v, const Expr& g) {
  RowMatrix& grad = nodes_[v.id].grad;
  if (grad.size() == 0) {
    grad = g.matrix();
  } else {
    grad += g.matrix();
  }
}

Var Tape::Constant(RowMatrix value) { return Push(std::move(value)); }

double Tape::scalar(Var v) const {
  const RowMatrix& m = nodes_[v.id].value;
  if (m.rows() != 1 || m.cols() != 1) {
    throw std::invalid_argument("scalar(): value is not 1x1");
  }
  return m(0, 0);
}

Var Tape::Dense(Var x, LayerId layer) {
  if (params_ == nullptr) throw std::logic_error("Dense on a tape without params");
  const LayerSpec& spec = params_->layer(layer);
  const RowMatrix& in = value(x);
  if (in.cols() != spec.in) {
    throw std::invalid_argument("Dense " + spec.name + ": expected " +
                                std::to_string(spec.in) + " inputs, got " +
                                std::to_string(in.cols()));
  }
  auto w = params_->weight(layer);
  auto b = params_->bias(layer);
  RowMatrix out = in * w.transpose();
  out.rowwise() += b.transpose();
  return Push(std::move(out), [x, layer](Tape& t, const RowMatrix& g) {
    const LayerSpec& s = t.params_->layer(layer);
    if (!t.param_grads_.empty()) {
      Eigen::Map<RowMatrix> dw(t.param_grads_.data() + s.weight_offset, s.out,
                               s.in);
      Eigen::Map<Eigen::VectorXd> db(t.param_grads_.data() + s.bias_offset,
                                     s.out);
      dw.noalias() += g.transpose() * t.value(x);
      db += g.colwise().sum().transpose();
    }
    t.AccumulateExpr(x, g * t.params_->weight(layer));
  });
}

Var Tape::DensePart(Var x, LayerId layer, int col_begin, bool with_bias) {
  if (params_ == nullptr) throw std::logic_error("Dense on a tape without params");
  const LayerSpec& spec = params_->layer(layer);
  const RowMatrix& in = value(x);
  int width = static_cast<int>(in.cols());
  if (col_begin < 0 || col_begin + width > spec.in) {
    throw std::invalid_argument("DensePart " + spec.name + ": columns out of range");
  }
  auto w = params_->weight(layer).middleCols(col_begin, width);
  RowMatrix out = in * w.transpose();
  if (with_bias) out.rowwise() += params_->bias(layer).transpose();
  return Push(std::move(out), [x, layer, col_begin, width, with_bias](
                                  Tape& t, const RowMatrix& g) {
    const LayerSpec& s = t.params_->layer(layer);
    if (!t.param_grads_.empty()) {
      Eigen::Map<RowMatrix> dw(t.param_grads_.data() + s.weight_offset, s.out,
                               s.in);
      dw.middleCols(col_begin, width).noalias() += g.transpose() * t.value(x);
      if (with_bias) {
        Eigen::Map<Eigen::VectorXd> db(t.param_grads_.data() + s.bias_offset,
                                       s.out);
        db += g.colwise().sum().transpose();
      }
    }
    t.AccumulateExpr(x, g * t.params_->weight(layer).middleCols(col_begin, width));
  });
}

Var Tape::Relu(Var x) {
  const RowMatrix& in = value(x);
  RowMatrix out = in.cwiseMax(0.0);
  if (record_branches_) {
    for (Eigen::Index i = 0; i < in.size(); ++i) {
      pattern_.push_back(in.data()[i] > 0.0);
    }
  }
  return Push(std::move(out), [x](Tape& t, const RowMatrix& g) {
    t.AccumulateExpr(x, (t.value(x).array() > 0.0).select(g.array(), 0.0));
  });
}

Var Tape::Tanh(Var x) {
  RowMatrix out = value(x).array().tanh();
  Var y = Push(std::move(out));
  nodes_[y.id].backward = [x, y](Tape& t, const RowMatrix& g) {
    t.AccumulateExpr(x, g.array() * (1.0 - t.value(y).array().square()));
  };
  return y;
}

Var Tape::Exp(Var x) {
  RowMatrix out = value(x).array().exp();
  Var y = Push(std::move(out));
  nodes_[y.id].backward = [x, y](Tape& t, const RowMatrix& g) {
    t.AccumulateExpr(x, g.array() * t.value(y).array());
  };
  return y;
}

Var Tape::Square(Var x) {
  RowMatrix out = value(x).array().square();
  return Push(std::move(out), [x](Tape& t, const RowMatrix& g) {
    t.AccumulateExpr(x, 2.0 * g.array() * t.value(x).array());
  });
}

Var Tape::Scale(Var x, double c) {
  RowMatrix out = value(x) * c;
  return Push(std::move(out), [x, c](Tape& t, const RowMatrix& g) {
    t.AccumulateExpr(x, g * c);
  });
}

Var Tape::AddScalar(Var x, double c) {
  RowMatrix out = value(x).array() + c;
  return Push(std::move(out),
              [x](Tape& t, const RowMatrix& g) { t.Accumulate(x, g); });
}

Var Tape::Clamp(Var x, double lo, double hi) {
  const RowMatrix& in = value(x);
  RowMatrix out = in.cwiseMax(lo).cwiseMin(hi);
  if (record_branches_) {
    for (Eigen::Index i = 0; i < in.size(); ++i) {
      double v = in.data()[i];
      pattern_.push_back(v < lo ? 0 : (v > hi ? 2 : 1));
    }
  }
  return Push(std::move(out), [x, lo, hi](Tape& t, const RowMatrix& g) {
    const RowMatrix& in = t.value(x);
    t.AccumulateExpr(x, (in.array() >= lo && in.array() <= hi)
                            .select(g, RowMatrix::Zero(g.rows(), g.cols())));
  });
}

Var Tape::Add(Var a, Var b) {
  CheckSameShape(value(a), value(b), "Add");
  RowMatrix out = value(a) + value(b);
  return Push(std::move(out), [a, b](Tape& t, const RowMatrix& g) {
    t.Accumulate(a, g);
    t.Accumulate(b, g);
  });
}

Var Tape::Sub(Var a, Var b) {
  CheckSameShape(value(a), value(b), "Sub");
  RowMatrix out = value(a) - value(b);
  return Push(std::move(out), [a, b](Tape& t, const RowMatrix& g) {
    t.Accumulate(a, g);
    t.AccumulateExpr(b, -g);
  });
}

Var Tape::Mul(Var a, Var b) {
  CheckSameShape(value(a), value(b), "Mul");
  RowMatrix out = value(a).cwiseProduct(value(b));
  return Push(std::move(out), [a, b](Tape& t, const RowMatrix& g) {
    t.AccumulateExpr(a, g.cwiseProduct(t.value(b)));
    t.AccumulateExpr(b, g.cwiseProduct(t.value(a)));
  });
}

Var Tape::Min(Var a, Var b) {
  CheckSameShape(value(a), value(b), "Min");
  const RowMatrix& va = value(a);
  const RowMatrix& vb = value(b);
  RowMatrix out = va.cwiseMin(vb);
  if (record_branches_) {
    for (Eigen::Index i = 0; i < va.size(); ++i) {
      pattern_.push_back(va.data()[i] <= vb.data()[i]);
    }
  }
  return Push(std::move(out), [a, b](Tape& t, const RowMatrix& g) {
    RowMatrix zero = RowMatrix::Zero(g.rows(), g.cols());
    auto take_a = t.value(a).array() <= t.value(b).array();
    t.AccumulateExpr(a, take_a.select(g, zero));
    t.AccumulateExpr(b, take_a.select(zero, g));
  });
}

Var Tape::ConcatCols(Var a, Var b) {
  const RowMatrix& va = value(a);
  const RowMatrix& vb = value(b);
  if (va.rows() != vb.rows()) {
    throw std::invalid_argument("ConcatCols: row count mismatch");
  }
  RowMatrix out(va.rows(), va.cols() + vb.cols());
  out << va, vb;
  Eigen::Index left = va.cols();
  return Push(std::move(out), [a, b, left](Tape& t, const RowMatrix& g) {
    t.AccumulateExpr(a, g.leftCols(left));
    t.AccumulateExpr(b, g.rightCols(g.cols() - left));
  });
}

Var Tape::GatherRows(Var x, IndexList idx) {
  const RowMatrix& in = value(x);
  RowMatrix out(static_cast<Eigen::Index>(idx->size()), in.cols());
  for (size_t i = 0; i < idx->size(); ++i) {
    int r = (*idx)[i];
    if (r < 0 || r >= in.rows()) throw std::out_of_range("GatherRows index");
    out.row(static_cast<Eigen::Index>(i)) = in.row(r);
  }
  return Push(std::move(out), [x, idx](Tape& t, const RowMatrix& g) {
    const RowMatrix& in = t.value(x);
    RowMatrix dx = RowMatrix::Zero(in.rows(), in.cols());
    for (size_t i = 0; i < idx->size(); ++i) {
      dx.row((*idx)[i]) += g.row(static_cast<Eigen::Index>(i));
    }
    t.Accumulate(x, dx);
  });
}

Var Tape::ScatterAddRows(Var x, IndexList idx, int rows) {
  const RowMatrix& in = value(x);
  if (static_cast<Eigen::Index>(idx->size()) != in.rows()) {
    throw std::invalid_argument("ScatterAddRows: index count != rows");
  }
  RowMatrix out = RowMatrix::Zero(rows, in.cols());
  for (size_t i = 0; i < idx->size(); ++i) {
    int r = (*idx)[i];
    if (r < 0 || r >= rows) throw std::out_of_range("ScatterAddRows index");
    out.row(r) += in.row(static_cast<Eigen::Index>(i));
  }
  return Push(std::move(out), [x, idx](Tape& t, const RowMatrix& g) {
    RowMatrix dx(static_cast<Eigen::Index>(idx->size()), g.cols());
    for (size_t i = 0; i < idx->size(); ++i) {
      dx.row(static_cast<Eigen::Index>(i)) = g.row((*idx)[i]);
    }
    t.Accumulate(x, dx);
  });
}

Var Tape::SegmentSum(Var x, IndexList offsets) {
  const RowMatrix& in = value(x);
  CheckOffsets(*offsets, in.rows());
  Eigen::Index segments = static_cast<Eigen::Index>(offsets->size()) - 1;
  RowMatrix out(segments, in.cols());
  for (Eigen::Index s = 0; s < segments; ++s) {
    int begin = (*offsets)[s];
    int end = (*offsets)[s + 1];
    out.row(s) = in.middleRows(begin, end - begin).colwise().sum();
  }
  return Push(std::move(out), [x, offsets](Tape& t, const RowMatrix& g) {
    RowMatrix dx(t.value(x).rows(), g.cols());
    for (Eigen::Index s = 0; s + 1 < static_cast<Eigen::Index>(offsets->size()); ++s) {
      for (int r = (*offsets)[s]; r < (*offsets)[s + 1]; ++r) dx.row(r) = g.row(s);
    }
    t.Accumulate(x, dx);
  });
}

Var Tape::SegmentMean(Var x, IndexList offsets) {
  const RowMatrix& in = value(x);
  CheckOffsets(*offsets, in.rows());
  Eigen::Index segments = static_cast<Eigen::Index>(offsets->size()) - 1;
  RowMatrix out(segments, in.cols());
  for (Eigen::Index s = 0; s < segments; ++s) {
    int begin = (*offsets)[s];
    int count = (*offsets)[s + 1] - begin;
    if (count <= 0) throw std::invalid_argument("SegmentMean: empty segment");
    out.row(s) = in.middleRows(begin, count).colwise().sum() / count;
  }
  return Push(std::move(out), [x, offsets](Tape& t, const RowMatrix& g) {
    RowMatrix dx(t.value(x).rows(), g.cols());
    for (Eigen::Index s = 0; s + 1 < static_cast<Eigen::Index>(offsets->size()); ++s) {
      int begin = (*offsets)[s];
      int end = (*offsets)[s + 1];
      for (int r = begin; r < end; ++r) dx.row(r) = g.row(s) / (end - begin);
    }
    t.Accumulate(x, dx);
  });
}

Var Tape::SegmentLogSoftmax(Var x, IndexList offsets) {
  const RowMatrix& in = value(x);
  if (in.cols() != 1) {
    throw std::invalid_argument("SegmentLogSoftmax expects a column vector");
  }
  CheckOffsets(*offsets, in.rows());
  RowMatrix out(in.rows(), 1);
  for (size_t s = 0; s + 1 < offsets->size(); ++s) {
    int begin = (*offsets)[s];
    int count = (*offsets)[s + 1] - begin;
    if (count <= 0) throw std::invalid_argument("SegmentLogSoftmax: empty segment");
    auto seg = in.middleRows(begin, count);
    double max = seg.maxCoeff();
    double lse = max + std::log((seg.array() - max).exp().sum());
    out.middleRows(begin, count) = seg.array() - lse;
  }
  Var y = Push(std::move(out));
  nodes_[y.id].backward = [x, y, offsets](Tape& t, const RowMatrix& g) {
    const RowMatrix& logp = t.value(y);
    RowMatrix dx(logp.rows(), 1);
    for (size_t s = 0; s + 1 < offsets->size(); ++s) {
      int begin = (*offsets)[s];
      int count = (*offsets)[s + 1] - begin;
      double gsum = g.middleRows(begin, count).sum();
      dx.middleRows(begin, count) =
          g.middleRows(begin, count).array() -
          logp.middleRows(begin, count).array().exp() * gsum;
    }
    t.Accumulate(x, dx);
  };
  return y;
}

Var Tape::Sum(Var x) {
  RowMatrix out(1, 1);
  out(0, 0) = value(x).sum();
  return Push(std::move(out), [x](Tape& t, const RowMatrix& g) {
    const RowMatrix& in = t.value(x);
    t.AccumulateExpr(x, RowMatrix::Constant(in.rows(), in.cols(), g(0, 0)));
  });
}

Var Tape::Mean(Var x) {
  const RowMatrix& in = value(x);
  if (in.size() == 0) throw std::invalid_argument("Mean of empty matrix");
  RowMatrix out(1, 1);
  out(0, 0) = in.sum() / static_cast<double>(in.size());
  return Push(std::move(out), [x](Tape& t, const RowMatrix& g) {
    const RowMatrix& in = t.value(x);
    t.AccumulateExpr(x, RowMatrix::Constant(in.rows(), in.cols(),
                                            g(0, 0) / static_cast<double>(in.size())));
  });
}

void Tape::Backward(Var root, std::span<double> param_grads, double seed) {
  const RowMatrix& r = value(root);
  if (r.rows() != 1 || r.cols() != 1) {
    throw std::invalid_argument("Backward: root is not a scalar");
  }
  if (params_ != nullptr && !param_grads.empty() &&
      param_grads.size() != params_->size()) {
    throw std::invalid_argument("Backward: gradient buffer size mismatch");
  }
  for (Node& n : nodes_) n.grad.resize(0, 0);
  param_grads_ = param_grads;
  nodes_[root.id].grad = RowMatrix::Constant(1, 1, seed);
  for (int i = root.id; i >= 0; --i) {
    Node& n = nodes_[i];
    if (n.grad.size() == 0 || !n.backward) continue;
    n.backward(*this, n.grad);
  }
  param_grads_ = {};
}

}  // namespace marlte
