#include "wavecast/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_set>

namespace wavecast::ad {

namespace {
thread_local bool g_grad_enabled = true;
}

bool grad_enabled() { return g_grad_enabled; }

NoGradGuard::NoGradGuard() : prev_(g_grad_enabled) { g_grad_enabled = false; }
NoGradGuard::~NoGradGuard() { g_grad_enabled = prev_; }

std::size_t numel(const std::vector<std::size_t>& shape) {
  std::size_t n = 1;
  for (auto d : shape) n *= d;
  return n;
}

std::string shape_str(const std::vector<std::size_t>& shape) {
  std::string s = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += " x ";
    s += std::to_string(shape[i]);
  }
  return s + "]";
}

double TensorNode::scalar() const {
  if (data.size() != 1)
    throw ShapeMismatch("scalar() on tensor of shape " + shape_str(shape));
  return data[0];
}

Tensor make_tensor(std::vector<std::size_t> shape, bool requires_grad) {
  auto t = std::make_shared<TensorNode>();
  const std::size_t n = numel(shape);
  t->shape = std::move(shape);
  t->data.assign(n, 0.0);
  t->grad.assign(n, 0.0);
  t->requires_grad = requires_grad;
  return t;
}

Tensor make_tensor(std::vector<std::size_t> shape, std::vector<double> data,
                   bool requires_grad) {
  if (numel(shape) != data.size())
    throw ShapeMismatch("data length " + std::to_string(data.size()) +
                        " does not fill shape " + shape_str(shape));
  auto t = std::make_shared<TensorNode>();
  t->shape = std::move(shape);
  t->data = std::move(data);
  t->grad.assign(t->data.size(), 0.0);
  t->requires_grad = requires_grad;
  return t;
}

std::vector<TensorNode*> topo_order(const Tensor& root) {
  std::vector<TensorNode*> order;
  std::unordered_set<const TensorNode*> seen;
  // Iterative post-order over parent edges; a node is emitted only after
  // all of its parents, so the list is parents-first with root at the end.
  struct Frame {
    TensorNode* node;
    std::size_t next = 0;
  };
  std::vector<Frame> stack;
  if (!root) return order;
  if (seen.insert(root.get()).second) stack.push_back({root.get()});
  while (!stack.empty()) {
    Frame& f = stack.back();
    if (f.next < f.node->parents.size()) {
      TensorNode* p = f.node->parents[f.next++].get();
      if (seen.insert(p).second) stack.push_back({p});
    } else {
      order.push_back(f.node);
      stack.pop_back();
    }
  }
  return order;
}

void backward(const Tensor& loss) {
  if (!loss || loss->size() != 1)
    throw NonScalarLoss("backward needs a single-element loss, got shape " +
                        (loss ? shape_str(loss->shape) : std::string("null")));
  if (!std::isfinite(loss->data[0]))
    throw NaNDetected("loss is not finite: " + std::to_string(loss->data[0]));

  auto order = topo_order(loss);
  loss->grad.assign(1, 1.0);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    TensorNode* node = *it;
    if (node->backward_fn && node->requires_grad) node->backward_fn(*node);
  }
}

GradCheckResult grad_check_detailed(const std::function<Tensor()>& fn,
                                    const std::vector<Tensor>& params,
                                    double eps) {
  for (const auto& p : params) p->zero_grad();
  Tensor loss = fn();
  if (!loss || loss->size() != 1)
    throw NonScalarLoss("grad_check function must return a scalar");
  if (!std::isfinite(loss->data[0]))
    throw NaNDetected("grad_check: loss is not finite");
  backward(loss);

  std::vector<std::vector<double>> analytic;
  analytic.reserve(params.size());
  for (const auto& p : params) analytic.push_back(p->grad);

  auto eval = [&fn]() {
    NoGradGuard guard;
    double v = fn()->scalar();
    if (!std::isfinite(v))
      throw NaNDetected("grad_check: perturbed loss is not finite");
    return v;
  };

  GradCheckResult res;
  res.per_param.assign(params.size(), 0.0);
  for (std::size_t pi = 0; pi < params.size(); ++pi) {
    auto& p = *params[pi];
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double orig = p.data[i];
      p.data[i] = orig + eps;
      const double fp = eval();
      p.data[i] = orig - eps;
      const double fm = eval();
      p.data[i] = orig;
      const double fd = (fp - fm) / (2.0 * eps);
      const double g = analytic[pi][i];
      const double rel =
          std::abs(g - fd) / std::max({1.0, std::abs(g), std::abs(fd)});
      res.per_param[pi] = std::max(res.per_param[pi], rel);
    }
    res.max_rel_error = std::max(res.max_rel_error, res.per_param[pi]);
  }
  return res;
}

double grad_check(const std::function<Tensor()>& fn,
                  const std::vector<Tensor>& params, double eps) {
  return grad_check_detailed(fn, params, eps).max_rel_error;
}

}  // namespace wavecast::ad
