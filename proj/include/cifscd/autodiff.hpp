// Copyright 2026 The cifscd Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Minimal tape-free reverse-mode differentiation.
//
// A Var is a handle to a graph node holding a value tensor, an optional
// gradient buffer and a closure that pushes the node's gradient into its
// inputs. Graphs are built by calling the free functions below and released
// when the last handle goes away. Parameters are long-lived leaf Vars whose
// gradients accumulate until zeroed by the optimizer.
//
// Everything is rank-2 ([rows, cols]); a scalar is [1, 1].

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <unordered_set>
#include <utility>
#include <vector>

#include "cifscd/errors.hpp"
#include "cifscd/tensor.hpp"

namespace cifscd::ad {

namespace detail {

struct Node {
  Tensor value;
  std::vector<double> grad;
  bool requires_grad = false;
  std::vector<std::shared_ptr<Node>> inputs;
  // Reads this node's grad and accumulates into inputs that require grad.
  std::function<void(Node&)> backprop;
};

}  // namespace detail

class Var {
 public:
  Var() = default;

  explicit Var(Tensor value, bool requires_grad = false)
      : node_(std::make_shared<detail::Node>()) {
    Require(value.rank() == 2, ErrorCode::kShapeMismatch,
            "autodiff values must be rank 2");
    node_->value = std::move(value);
    node_->requires_grad = requires_grad;
    if (requires_grad) node_->grad.assign(node_->value.size(), 0.0);
  }

  static Var Leaf(Tensor value) { return Var(std::move(value), true); }

  bool defined() const { return node_ != nullptr; }
  const Tensor& value() const { return node_->value; }
  // Direct access for optimizers and checkpoint loading on leaves.
  Tensor& mutable_value() { return node_->value; }
  const std::vector<double>& grad() const { return node_->grad; }
  std::vector<double>& mutable_grad() { return node_->grad; }
  bool requires_grad() const { return node_->requires_grad; }

  std::size_t rows() const { return node_->value.rows(); }
  std::size_t cols() const { return node_->value.cols(); }
  double scalar() const { return node_->value[0]; }

  void ZeroGrad() { std::fill(node_->grad.begin(), node_->grad.end(), 0.0); }

  // Same value, cut off from the graph.
  Var Detach() const { return Var(node_->value, false); }

  detail::Node* node() const { return node_.get(); }
  const std::shared_ptr<detail::Node>& shared() const { return node_; }

 private:
  std::shared_ptr<detail::Node> node_;
};

inline Var Constant(Tensor value) { return Var(std::move(value), false); }

namespace detail {

// Creates an op node. `backprop` is kept only if some input needs gradients.
inline Var MakeOp(Tensor value, const std::vector<Var>& inputs,
                  std::function<void(Node&)> backprop) {
  bool any = false;
  for (const Var& in : inputs) any = any || in.requires_grad();
  Var out(std::move(value), any);
  if (any) {
    Node* n = out.node();
    for (const Var& in : inputs) n->inputs.push_back(in.shared());
    n->backprop = std::move(backprop);
  }
  return out;
}

inline void CheckSame(const Var& a, const Var& b, const char* op) {
  Require(a.rows() == b.rows() && a.cols() == b.cols(), ErrorCode::kShapeMismatch,
          std::string(op) + ": " + a.value().ShapeString() + " vs " +
              b.value().ShapeString());
}

}  // namespace detail

// Reverse sweep from a scalar. Leaf gradients accumulate; intermediate
// gradients are reset first so a graph can be swept more than once.
inline void Backward(const Var& loss) {
  Require(loss.rows() == 1 && loss.cols() == 1, ErrorCode::kShapeMismatch,
          "Backward needs a [1, 1] loss");
  if (!loss.requires_grad()) return;

  std::vector<detail::Node*> order;
  std::unordered_set<detail::Node*> seen;
  // Iterative post-order DFS.
  std::vector<std::pair<detail::Node*, std::size_t>> stack{{loss.node(), 0}};
  seen.insert(loss.node());
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->inputs.size()) {
      detail::Node* child = node->inputs[next++].get();
      if (child->requires_grad && seen.insert(child).second) {
        stack.emplace_back(child, 0);
      }
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }
  for (detail::Node* n : order) {
    if (n->backprop) std::fill(n->grad.begin(), n->grad.end(), 0.0);
  }
  loss.node()->grad[0] += 1.0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    if ((*it)->backprop) (*it)->backprop(**it);
  }
}

// ---- Linear algebra -------------------------------------------------------

inline Var MatMul(const Var& a, const Var& b) {
  Require(a.cols() == b.rows(), ErrorCode::kShapeMismatch,
          "MatMul: " + a.value().ShapeString() + " x " + b.value().ShapeString());
  const std::size_t n = a.rows(), k = a.cols(), m = b.cols();
  Tensor out = Tensor::Matrix(n, m);
  const auto& av = a.value().values();
  const auto& bv = b.value().values();
  auto& ov = out.values();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t p = 0; p < k; ++p) {
      const double x = av[i * k + p];
      if (x == 0) continue;
      for (std::size_t j = 0; j < m; ++j) ov[i * m + j] += x * bv[p * m + j];
    }
  return detail::MakeOp(std::move(out), {a, b}, [n, k, m](detail::Node& self) {
    auto& an = *self.inputs[0];
    auto& bn = *self.inputs[1];
    const auto& g = self.grad;
    if (an.requires_grad) {
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t p = 0; p < k; ++p) {
          double s = 0;
          for (std::size_t j = 0; j < m; ++j) s += g[i * m + j] * bn.value[p * m + j];
          an.grad[i * k + p] += s;
        }
    }
    if (bn.requires_grad) {
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t p = 0; p < k; ++p) {
          const double x = an.value[i * k + p];
          if (x == 0) continue;
          for (std::size_t j = 0; j < m; ++j) bn.grad[p * m + j] += x * g[i * m + j];
        }
    }
  });
}

inline Var Transpose(const Var& a) {
  const std::size_t r = a.rows(), c = a.cols();
  Tensor out = Tensor::Matrix(c, r);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) out.at(j, i) = a.value().at(i, j);
  return detail::MakeOp(std::move(out), {a}, [r, c](detail::Node& self) {
    auto& in = *self.inputs[0];
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < c; ++j) in.grad[i * c + j] += self.grad[j * r + i];
  });
}

inline Var Add(const Var& a, const Var& b) {
  detail::CheckSame(a, b, "Add");
  Tensor out = a.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += b.value()[i];
  return detail::MakeOp(std::move(out), {a, b}, [](detail::Node& self) {
    for (auto& in : self.inputs) {
      if (!in->requires_grad) continue;
      for (std::size_t i = 0; i < self.grad.size(); ++i) in->grad[i] += self.grad[i];
    }
  });
}

inline Var Sub(const Var& a, const Var& b) {
  detail::CheckSame(a, b, "Sub");
  Tensor out = a.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= b.value()[i];
  return detail::MakeOp(std::move(out), {a, b}, [](detail::Node& self) {
    auto& x = *self.inputs[0];
    auto& y = *self.inputs[1];
    for (std::size_t i = 0; i < self.grad.size(); ++i) {
      if (x.requires_grad) x.grad[i] += self.grad[i];
      if (y.requires_grad) y.grad[i] -= self.grad[i];
    }
  });
}

inline Var Mul(const Var& a, const Var& b) {
  detail::CheckSame(a, b, "Mul");
  Tensor out = a.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= b.value()[i];
  return detail::MakeOp(std::move(out), {a, b}, [](detail::Node& self) {
    auto& x = *self.inputs[0];
    auto& y = *self.inputs[1];
    for (std::size_t i = 0; i < self.grad.size(); ++i) {
      if (x.requires_grad) x.grad[i] += self.grad[i] * y.value[i];
      if (y.requires_grad) y.grad[i] += self.grad[i] * x.value[i];
    }
  });
}

inline Var Scale(const Var& a, double factor) {
  Tensor out = a.value();
  for (double& v : out.values()) v *= factor;
  return detail::MakeOp(std::move(out), {a}, [factor](detail::Node& self) {
    auto& in = *self.inputs[0];
    for (std::size_t i = 0; i < self.grad.size(); ++i) in.grad[i] += factor * self.grad[i];
  });
}

// a[N, M] + bias[1, M] broadcast over rows.
inline Var AddRowBroadcast(const Var& a, const Var& bias) {
  Require(bias.rows() == 1 && bias.cols() == a.cols(), ErrorCode::kShapeMismatch,
          "AddRowBroadcast: bias " + bias.value().ShapeString() + " for " +
              a.value().ShapeString());
  const std::size_t n = a.rows(), m = a.cols();
  Tensor out = a.value();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) out.at(i, j) += bias.value()[j];
  return detail::MakeOp(std::move(out), {a, bias}, [n, m](detail::Node& self) {
    auto& x = *self.inputs[0];
    auto& b = *self.inputs[1];
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < m; ++j) {
        const double g = self.grad[i * m + j];
        if (x.requires_grad) x.grad[i * m + j] += g;
        if (b.requires_grad) b.grad[j] += g;
      }
  });
}

// ---- Elementwise nonlinearities -------------------------------------------

inline Var Relu(const Var& a) {
  Tensor out = a.value();
  for (double& v : out.values()) v = v > 0 ? v : 0.0;
  return detail::MakeOp(std::move(out), {a}, [](detail::Node& self) {
    auto& in = *self.inputs[0];
    for (std::size_t i = 0; i < self.grad.size(); ++i)
      if (in.value[i] > 0) in.grad[i] += self.grad[i];
  });
}

inline double SigmoidValue(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

inline Var Sigmoid(const Var& a) {
  Tensor out = a.value();
  for (double& v : out.values()) v = SigmoidValue(v);
  return detail::MakeOp(std::move(out), {a}, [](detail::Node& self) {
    auto& in = *self.inputs[0];
    for (std::size_t i = 0; i < self.grad.size(); ++i) {
      const double s = self.value[i];
      in.grad[i] += self.grad[i] * s * (1 - s);
    }
  });
}

// Row-wise softmax. With `causal`, entry (i, j) for j > i is masked out and
// exactly zero.
inline Var SoftmaxRows(const Var& a, bool causal = false) {
  const std::size_t n = a.rows(), m = a.cols();
  Tensor out = Tensor::Matrix(n, m);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t limit = causal ? std::min(m, i + 1) : m;
    double mx = -INFINITY;
    for (std::size_t j = 0; j < limit; ++j) mx = std::max(mx, a.value().at(i, j));
    double z = 0;
    for (std::size_t j = 0; j < limit; ++j) {
      out.at(i, j) = std::exp(a.value().at(i, j) - mx);
      z += out.at(i, j);
    }
    for (std::size_t j = 0; j < limit; ++j) out.at(i, j) /= z;
  }
  return detail::MakeOp(std::move(out), {a}, [n, m](detail::Node& self) {
    auto& in = *self.inputs[0];
    for (std::size_t i = 0; i < n; ++i) {
      double dot = 0;
      for (std::size_t j = 0; j < m; ++j) dot += self.grad[i * m + j] * self.value[i * m + j];
      for (std::size_t j = 0; j < m; ++j) {
        const double p = self.value[i * m + j];
        in.grad[i * m + j] += p * (self.grad[i * m + j] - dot);
      }
    }
  });
}

// Per-row normalization to zero mean and unit variance, then gain and bias
// ([1, M] each).
inline Var LayerNormRows(const Var& a, const Var& gain, const Var& bias,
                         double eps = 1e-5) {
  const std::size_t n = a.rows(), m = a.cols();
  Require(gain.rows() == 1 && gain.cols() == m && bias.rows() == 1 && bias.cols() == m,
          ErrorCode::kShapeMismatch, "LayerNormRows: gain/bias shape");
  Tensor normalized = Tensor::Matrix(n, m);
  std::vector<double> inv_std(n);
  for (std::size_t i = 0; i < n; ++i) {
    double mean = 0;
    for (std::size_t j = 0; j < m; ++j) mean += a.value().at(i, j);
    mean /= static_cast<double>(m);
    double var = 0;
    for (std::size_t j = 0; j < m; ++j) {
      const double d = a.value().at(i, j) - mean;
      var += d * d;
    }
    var /= static_cast<double>(m);
    inv_std[i] = 1.0 / std::sqrt(var + eps);
    for (std::size_t j = 0; j < m; ++j)
      normalized.at(i, j) = (a.value().at(i, j) - mean) * inv_std[i];
  }
  Tensor out = normalized;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j)
      out.at(i, j) = normalized.at(i, j) * gain.value()[j] + bias.value()[j];
  return detail::MakeOp(
      std::move(out), {a, gain, bias},
      [n, m, normalized = std::move(normalized), inv_std = std::move(inv_std)](
          detail::Node& self) {
        auto& x = *self.inputs[0];
        auto& g = *self.inputs[1];
        auto& b = *self.inputs[2];
        for (std::size_t i = 0; i < n; ++i) {
          double sum_dn = 0, sum_dn_n = 0;
          std::vector<double> dn(m);
          for (std::size_t j = 0; j < m; ++j) {
            const double go = self.grad[i * m + j];
            if (g.requires_grad) g.grad[j] += go * normalized.at(i, j);
            if (b.requires_grad) b.grad[j] += go;
            dn[j] = go * g.value[j];
            sum_dn += dn[j];
            sum_dn_n += dn[j] * normalized.at(i, j);
          }
          if (!x.requires_grad) continue;
          const double inv_m = 1.0 / static_cast<double>(m);
          for (std::size_t j = 0; j < m; ++j) {
            x.grad[i * m + j] += inv_std[i] * (dn[j] - inv_m * sum_dn -
                                               normalized.at(i, j) * inv_m * sum_dn_n);
          }
        }
      });
}

// Divides each row by its L2 norm (floored at eps).
inline Var L2NormalizeRows(const Var& a, double eps = 1e-12) {
  const std::size_t n = a.rows(), m = a.cols();
  Tensor out = a.value();
  std::vector<double> norms(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0;
    for (std::size_t j = 0; j < m; ++j) s += a.value().at(i, j) * a.value().at(i, j);
    norms[i] = std::max(std::sqrt(s), eps);
    for (std::size_t j = 0; j < m; ++j) out.at(i, j) /= norms[i];
  }
  return detail::MakeOp(std::move(out), {a}, [n, m, norms = std::move(norms)](
                                                 detail::Node& self) {
    auto& in = *self.inputs[0];
    for (std::size_t i = 0; i < n; ++i) {
      double dot = 0;
      for (std::size_t j = 0; j < m; ++j) dot += self.grad[i * m + j] * self.value[i * m + j];
      for (std::size_t j = 0; j < m; ++j) {
        in.grad[i * m + j] +=
            (self.grad[i * m + j] - self.value[i * m + j] * dot) / norms[i];
      }
    }
  });
}

// ---- Shape manipulation ---------------------------------------------------

inline Var ConcatCols(const std::vector<Var>& parts) {
  Require(!parts.empty(), ErrorCode::kShapeMismatch, "ConcatCols: no inputs");
  const std::size_t n = parts.front().rows();
  std::size_t total = 0;
  std::vector<std::size_t> offsets;
  for (const Var& p : parts) {
    Require(p.rows() == n, ErrorCode::kShapeMismatch, "ConcatCols: row mismatch");
    offsets.push_back(total);
    total += p.cols();
  }
  Tensor out = Tensor::Matrix(n, total);
  for (std::size_t k = 0; k < parts.size(); ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < parts[k].cols(); ++j)
        out.at(i, offsets[k] + j) = parts[k].value().at(i, j);
  return detail::MakeOp(std::move(out), parts, [n, total, offsets](detail::Node& self) {
    for (std::size_t k = 0; k < self.inputs.size(); ++k) {
      auto& in = *self.inputs[k];
      if (!in.requires_grad) continue;
      const std::size_t c = in.value.cols();
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < c; ++j)
          in.grad[i * c + j] += self.grad[i * total + offsets[k] + j];
    }
  });
}

inline Var SliceCols(const Var& a, std::size_t start, std::size_t count) {
  Require(start + count <= a.cols(), ErrorCode::kShapeMismatch, "SliceCols: out of range");
  const std::size_t n = a.rows(), m = a.cols();
  Tensor out = Tensor::Matrix(n, count);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < count; ++j) out.at(i, j) = a.value().at(i, start + j);
  return detail::MakeOp(std::move(out), {a}, [n, m, start, count](detail::Node& self) {
    auto& in = *self.inputs[0];
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < count; ++j)
        in.grad[i * m + start + j] += self.grad[i * count + j];
  });
}

// Unfolds windows of `kernel` rows into single rows:
// out[i, k*D + d] = a[i*stride + k - pad, d], zero outside the input.
// With stride 1 and pad = kernel/2 this is a "same" convolution layout; with
// stride = kernel and pad 0 it is non-overlapping downsampling (trailing rows
// that do not fill a window are dropped).
inline Var Unfold(const Var& a, std::size_t kernel, std::size_t stride, std::size_t pad) {
  Require(kernel >= 1 && stride >= 1, ErrorCode::kConfigError, "Unfold: bad kernel/stride");
  const std::size_t n = a.rows(), d = a.cols();
  const std::size_t padded = n + 2 * pad;
  const std::size_t out_rows = padded >= kernel ? (padded - kernel) / stride + 1 : 0;
  Require(out_rows >= 1, ErrorCode::kShapeMismatch, "Unfold: input shorter than kernel");
  Tensor out = Tensor::Matrix(out_rows, kernel * d);
  for (std::size_t i = 0; i < out_rows; ++i)
    for (std::size_t k = 0; k < kernel; ++k) {
      const auto src = static_cast<std::ptrdiff_t>(i * stride + k) -
                       static_cast<std::ptrdiff_t>(pad);
      if (src < 0 || src >= static_cast<std::ptrdiff_t>(n)) continue;
      for (std::size_t c = 0; c < d; ++c)
        out.at(i, k * d + c) = a.value().at(static_cast<std::size_t>(src), c);
    }
  return detail::MakeOp(std::move(out), {a}, [=](detail::Node& self) {
    auto& in = *self.inputs[0];
    const std::size_t w = kernel * d;
    for (std::size_t i = 0; i < out_rows; ++i)
      for (std::size_t k = 0; k < kernel; ++k) {
        const auto src = static_cast<std::ptrdiff_t>(i * stride + k) -
                         static_cast<std::ptrdiff_t>(pad);
        if (src < 0 || src >= static_cast<std::ptrdiff_t>(n)) continue;
        for (std::size_t c = 0; c < d; ++c)
          in.grad[static_cast<std::size_t>(src) * d + c] += self.grad[i * w + k * d + c];
      }
  });
}

// ---- Reductions -----------------------------------------------------------

inline Var MeanRows(const Var& a) {
  const std::size_t n = a.rows(), m = a.cols();
  Tensor out = Tensor::Matrix(1, m);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) out[j] += a.value().at(i, j);
  for (double& v : out.values()) v /= static_cast<double>(n);
  return detail::MakeOp(std::move(out), {a}, [n, m](detail::Node& self) {
    auto& in = *self.inputs[0];
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < m; ++j)
        in.grad[i * m + j] += self.grad[j] / static_cast<double>(n);
  });
}

inline Var Sum(const Var& a) {
  double s = 0;
  for (double v : a.value().values()) s += v;
  return detail::MakeOp(Tensor::Matrix(1, 1, s), {a}, [](detail::Node& self) {
    auto& in = *self.inputs[0];
    for (double& g : in.grad) g += self.grad[0];
  });
}

inline Var Mean(const Var& a) {
  return Scale(Sum(a), 1.0 / static_cast<double>(a.value().size()));
}

// ---- Losses ---------------------------------------------------------------

// Mean over rows of -log softmax(logits)[label].
inline Var CrossEntropyRows(const Var& logits, const std::vector<std::size_t>& labels) {
  const std::size_t n = logits.rows(), m = logits.cols();
  Require(labels.size() == n, ErrorCode::kShapeMismatch, "CrossEntropyRows: label count");
  for (std::size_t l : labels)
    Require(l < m, ErrorCode::kInvalidLabel,
            "label " + std::to_string(l) + " >= class count " + std::to_string(m));
  Tensor probs = Tensor::Matrix(n, m);
  double loss = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double mx = -INFINITY;
    for (std::size_t j = 0; j < m; ++j) mx = std::max(mx, logits.value().at(i, j));
    double z = 0;
    for (std::size_t j = 0; j < m; ++j) {
      probs.at(i, j) = std::exp(logits.value().at(i, j) - mx);
      z += probs.at(i, j);
    }
    for (std::size_t j = 0; j < m; ++j) probs.at(i, j) /= z;
    loss += -(logits.value().at(i, labels[i]) - mx - std::log(z));
  }
  loss /= static_cast<double>(n);
  return detail::MakeOp(Tensor::Matrix(1, 1, loss), {logits},
                        [n, m, labels, probs = std::move(probs)](detail::Node& self) {
                          auto& in = *self.inputs[0];
                          const double g = self.grad[0] / static_cast<double>(n);
                          for (std::size_t i = 0; i < n; ++i)
                            for (std::size_t j = 0; j < m; ++j) {
                              const double target = j == labels[i] ? 1.0 : 0.0;
                              in.grad[i * m + j] += g * (probs.at(i, j) - target);
                            }
                        });
}

inline constexpr double kBceClamp = 1e-7;

// Mean binary cross-entropy of probabilities (any shape) against 0/1
// targets. Probabilities are clamped to [1e-7, 1 - 1e-7]; the clamp has zero
// gradient where it is active.
inline Var BinaryCrossEntropy(const Var& probs, const std::vector<int>& targets) {
  const std::size_t n = probs.value().size();
  Require(targets.size() == n, ErrorCode::kShapeMismatch, "BCE: target count");
  double loss = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double p = std::clamp(probs.value()[i], kBceClamp, 1 - kBceClamp);
    const double t = targets[i] ? 1.0 : 0.0;
    loss += -(t * std::log(p) + (1 - t) * std::log(1 - p));
  }
  loss /= static_cast<double>(n);
  return detail::MakeOp(Tensor::Matrix(1, 1, loss), {probs}, [n, targets](detail::Node& self) {
    auto& in = *self.inputs[0];
    for (std::size_t i = 0; i < n; ++i) {
      const double raw = in.value[i];
      if (raw <= kBceClamp || raw >= 1 - kBceClamp) continue;
      const double t = targets[i] ? 1.0 : 0.0;
      in.grad[i] += self.grad[0] * (raw - t) / (raw * (1 - raw)) / static_cast<double>(n);
    }
  });
}

}  // namespace cifscd::ad
