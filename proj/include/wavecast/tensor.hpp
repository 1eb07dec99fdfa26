#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <vector>

#include "wavecast/error.hpp"

namespace wavecast::ad {

WAVECAST_DEFINE_ERROR(ShapeMismatch);
WAVECAST_DEFINE_ERROR(NonScalarLoss);
WAVECAST_DEFINE_ERROR(NaNDetected);
WAVECAST_DEFINE_ERROR(WindowTooShort);

class TensorNode;
using Tensor = std::shared_ptr<TensorNode>;

// One node of a define-by-run differentiation graph. data and grad are
// row-major flat buffers of identical length. parents keeps the inputs
// alive; backward_fn scatters this node's grad into the parents' grads.
// Everything is 64-bit: the downstream accuracy targets are out of reach
// in single precision.
class TensorNode {
public:
  std::vector<std::size_t> shape;
  std::vector<double> data;
  std::vector<double> grad;
  const char* op_tag = "leaf";
  bool requires_grad = false;
  std::vector<Tensor> parents;
  std::function<void(TensorNode&)> backward_fn;

  std::size_t size() const { return data.size(); }
  void zero_grad() { std::fill(grad.begin(), grad.end(), 0.0); }
  // Value of a single-element tensor.
  double scalar() const;
};

std::size_t numel(const std::vector<std::size_t>& shape);
std::string shape_str(const std::vector<std::size_t>& shape);

Tensor make_tensor(std::vector<std::size_t> shape, bool requires_grad = false);
Tensor make_tensor(std::vector<std::size_t> shape, std::vector<double> data,
                   bool requires_grad = false);

// Gradient recording is on by default and disabled inside a NoGradGuard
// scope (per thread). Evaluation passes use it to skip graph construction.
bool grad_enabled();
class NoGradGuard {
public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

private:
  bool prev_;
};

// Nodes reachable from root through parent edges, parents always before
// children; root is last.
std::vector<TensorNode*> topo_order(const Tensor& root);

// Reverse-mode sweep. Seeds loss grad with 1 and accumulates into every
// ancestor's grad buffer. Call zero_grad on persistent parameters first;
// freshly built intermediate nodes start with zero grads.
void backward(const Tensor& loss);

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::vector<double> per_param;  // worst relative error per parameter
};

// Compares backward() gradients of fn() against central finite differences
// over every entry of params. Relative error is
// |g_ad - g_fd| / max(1, |g_ad|, |g_fd|).
GradCheckResult grad_check_detailed(const std::function<Tensor()>& fn,
                                    const std::vector<Tensor>& params,
                                    double eps);
double grad_check(const std::function<Tensor()>& fn,
                  const std::vector<Tensor>& params, double eps);

}  // namespace wavecast::ad
