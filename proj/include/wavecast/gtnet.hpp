#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wavecast/ops.hpp"
#include "wavecast/tensor.hpp"

namespace wavecast::gtnet {

WAVECAST_DEFINE_ERROR(BadShape);

// One graph-temporal network: graph learning over node embeddings, blocks
// of dilated inception convolution (temporal) followed by mix-hop graph
// propagation (spatial) with residuals, per-block skip connections, and a
// dense head mapping to the forecast horizon.
struct GtNetConfig {
  std::size_t num_nodes = 3;    // graph nodes == input variables
  std::size_t window_len = 24;  // T, hours
  std::size_t horizon = 1;      // h, hours
  std::size_t num_blocks = 5;
  std::size_t dilation = 2;
  std::size_t hidden_channels = 16;
  std::size_t embed_dim = 8;
  std::size_t mixhop_depth = 2;  // K
  double retain_ratio = 0.05;    // beta
  std::size_t topk = 2;          // clamped to N-1 by callers that resize N
  double saturation = 3.0;       // alpha
  std::vector<std::size_t> kernel_sizes = {2, 3, 6, 7};

  // Throws on any inconsistent field, including a window too short for the
  // stacked receptive field of the smallest kernel.
  void validate() const;

  // Kernel sizes whose stacked receptive field num_blocks*(s-1)*dilation+1
  // fits within window_len, in ascending order.
  std::vector<std::size_t> effective_kernel_sizes() const;

  // Time steps remaining after all blocks.
  std::size_t final_time_len() const;
};

// A = relu(tanh(alpha * (E1 E2^T - E2 E1^T))), then keep the top-k entries
// per row. Entries lie in [0, 1); the diagonal is exactly zero by
// antisymmetry. The top-k selection acts as a constant mask: gradients flow
// through surviving entries only.
ad::Tensor learn_adjacency(const ad::Tensor& e1, const ad::Tensor& e2,
                           double alpha, std::size_t k);

// out = sum_j H^(j) W^(j) with H^(0) = H and
// H^(j) = beta * H + (1 - beta) * Atilde * H^(j-1), Atilde = D^-1 (A + I).
ad::Tensor mixhop_propagation(const ad::Tensor& h, const ad::Tensor& a,
                              std::size_t depth, double beta,
                              const std::vector<ad::Tensor>& hop_weights);

// Runs conv1d_dilated once per kernel size, truncates every branch to the
// length of the largest kernel's output (keeping the latest steps), and
// concatenates along the channel axis. Input is [C x T] or [B x C x T].
ad::Tensor dilated_inception(const ad::Tensor& x,
                             const std::vector<ad::Tensor>& kernels,
                             std::size_t dilation);

class GtNet {
public:
  GtNet(const GtNetConfig& config, std::uint64_t seed);

  const GtNetConfig& config() const { return cfg_; }

  // window is [N x T]; returns the [h] forecast. The graph is recorded
  // only while gradients are enabled.
  ad::Tensor forward(const ad::Tensor& window) const;

  // Parameters in a fixed declaration order (stable across runs).
  std::vector<ad::Tensor> parameters() const;
  std::vector<std::pair<std::string, ad::Tensor>> named_parameters() const;
  std::size_t parameter_count() const;
  void zero_grad();

private:
  struct Block {
    std::vector<ad::Tensor> kernels;  // one [branch x C x s] per kernel size
    ad::Tensor bias;                  // [C]
    std::vector<ad::Tensor> hop_weights;  // K+1 of [C x C]
    ad::Tensor skip_w;                    // [C x C]
  };

  GtNetConfig cfg_;
  std::vector<std::size_t> sizes_;  // effective kernel sizes
  ad::Tensor e1_, e2_;
  ad::Tensor input_w_;  // [C x 1 x 1]
  ad::Tensor input_b_;  // [C]
  std::vector<Block> blocks_;
  ad::Tensor head_w1_, head_b1_, head_w2_, head_b2_;
};

}  // namespace wavecast::gtnet
