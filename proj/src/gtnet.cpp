#include "wavecast/gtnet.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "wavecast/rng.hpp"

namespace wavecast::gtnet {

using ad::Tensor;

void GtNetConfig::validate() const {
  auto need = [](bool ok, const std::string& msg) {
    if (!ok) throw Error("GtNetConfig: " + msg);
  };
  need(num_nodes >= 1, "num_nodes must be >= 1");
  need(window_len >= 2, "window_len must be >= 2");
  need(horizon >= 1, "horizon must be >= 1");
  need(num_blocks >= 1, "num_blocks must be >= 1");
  need(dilation >= 1, "dilation must be >= 1");
  need(hidden_channels >= 1, "hidden_channels must be >= 1");
  need(embed_dim >= 1, "embed_dim must be >= 1");
  need(mixhop_depth >= 1, "mixhop_depth must be >= 1");
  need(retain_ratio >= 0.0 && retain_ratio <= 1.0,
       "retain_ratio must lie in [0, 1]");
  need(saturation > 0.0, "saturation must be positive");
  need(!kernel_sizes.empty(), "kernel_sizes must not be empty");
  for (auto s : kernel_sizes) need(s >= 2, "kernel sizes must be >= 2");
  if (num_nodes > 1)
    need(topk >= 1 && topk <= num_nodes - 1,
         "topk must lie in [1, num_nodes-1]");
  auto eff = effective_kernel_sizes();
  need(!eff.empty(),
       "window_len " + std::to_string(window_len) +
           " is too short for any kernel size at " +
           std::to_string(num_blocks) + " blocks and dilation " +
           std::to_string(dilation));
  need(hidden_channels >= eff.size(),
       "hidden_channels must cover one channel per inception branch");
}

std::vector<std::size_t> GtNetConfig::effective_kernel_sizes() const {
  std::set<std::size_t> uniq(kernel_sizes.begin(), kernel_sizes.end());
  std::vector<std::size_t> eff;
  for (auto s : uniq)
    if (num_blocks * (s - 1) * dilation + 1 <= window_len) eff.push_back(s);
  return eff;
}

std::size_t GtNetConfig::final_time_len() const {
  auto eff = effective_kernel_sizes();
  const std::size_t smax = eff.empty() ? kernel_sizes.front() : eff.back();
  return window_len - num_blocks * (smax - 1) * dilation;
}

Tensor learn_adjacency(const Tensor& e1, const Tensor& e2, double alpha,
                       std::size_t k) {
  if (e1->shape.size() != 2 || e1->shape != e2->shape)
    throw BadShape("learn_adjacency: embeddings " + ad::shape_str(e1->shape) +
                   " vs " + ad::shape_str(e2->shape));
  if (alpha <= 0.0) throw Error("learn_adjacency: alpha must be positive");
  const std::size_t n = e1->shape[0];
  if (n > 1 && (k < 1 || k > n - 1))
    throw Error("learn_adjacency: k must lie in [1, N-1]");

  // The difference of the two products is antisymmetric; its diagonal is
  // exactly zero in floating point because both products compute the same
  // dot product for entry (i, i).
  auto m = ad::sub(ad::matmul(e1, ad::transpose(e2)),
                   ad::matmul(e2, ad::transpose(e1)));
  auto a0 = ad::relu(ad::tanh(ad::scalar_mul(m, alpha)));
  if (n == 1) return a0;

  // Top-k per row as a constant mask; ties break toward the lower index.
  auto mask = ad::make_tensor({n, n});
  std::vector<std::size_t> idx(n);
  for (std::size_t r = 0; r < n; ++r) {
    std::iota(idx.begin(), idx.end(), 0);
    const double* row = &a0->data[r * n];
    std::stable_sort(idx.begin(), idx.end(), [row](std::size_t i,
                                                   std::size_t j) {
      return row[i] > row[j];
    });
    for (std::size_t i = 0; i < k; ++i) mask->data[r * n + idx[i]] = 1.0;
  }
  return ad::mul(a0, mask);
}

Tensor mixhop_propagation(const Tensor& h, const Tensor& a, std::size_t depth,
                          double beta,
                          const std::vector<Tensor>& hop_weights) {
  if (beta < 0.0 || beta > 1.0)
    throw Error("mixhop_propagation: beta must lie in [0, 1]");
  if (hop_weights.size() != depth + 1)
    throw BadShape("mixhop_propagation: expected " +
                   std::to_string(depth + 1) + " hop weights, got " +
                   std::to_string(hop_weights.size()));
  auto atilde = ad::normalize_adjacency(a);
  Tensor cur = h;
  Tensor out = ad::matmul(h, hop_weights[0]);
  for (std::size_t j = 1; j <= depth; ++j) {
    cur = ad::add(ad::scalar_mul(h, beta),
                  ad::scalar_mul(ad::matmul(atilde, cur), 1.0 - beta));
    out = ad::add(out, ad::matmul(cur, hop_weights[j]));
  }
  return out;
}

Tensor dilated_inception(const Tensor& x, const std::vector<Tensor>& kernels,
                         std::size_t dilation) {
  if (kernels.empty()) throw BadShape("dilated_inception: no kernels");
  const bool batched = x->shape.size() == 3;
  const std::size_t T = x->shape[batched ? 2 : 1];
  std::size_t span_max = 0;
  for (const auto& k : kernels) {
    if (k->shape.size() != 3)
      throw BadShape("dilated_inception: kernel " + ad::shape_str(k->shape));
    const std::size_t span = (k->shape[2] - 1) * dilation;
    if (T <= span)
      throw ad::WindowTooShort(
          "dilated_inception: kernel size " + std::to_string(k->shape[2]) +
          " needs more than " + std::to_string(span) + " steps, got " +
          std::to_string(T));
    span_max = std::max(span_max, span);
  }
  const std::size_t t_out = T - span_max;
  const std::size_t time_axis = batched ? 2 : 1;
  const std::size_t chan_axis = batched ? 1 : 0;

  std::vector<Tensor> branches;
  branches.reserve(kernels.size());
  for (const auto& k : kernels) {
    auto y = ad::conv1d_dilated(x, k, dilation);
    const std::size_t len = y->shape[time_axis];
    if (len != t_out) y = ad::slice(y, time_axis, len - t_out, t_out);
    branches.push_back(std::move(y));
  }
  return branches.size() == 1 ? branches.front()
                              : ad::concat(branches, chan_axis);
}

namespace {

Tensor init_uniform(Rng& rng, std::vector<std::size_t> shape,
                    std::size_t fan_in) {
  auto t = ad::make_tensor(std::move(shape), true);
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  for (auto& v : t->data) v = rng.uniform(-bound, bound);
  return t;
}

Tensor init_zero(std::vector<std::size_t> shape) {
  return ad::make_tensor(std::move(shape), true);
}

// Applies one [C x C] weight to the channel axis of [N x C x Tp].
Tensor mix_channels(const Tensor& h3, const Tensor& w) {
  const std::size_t N = h3->shape[0], C = h3->shape[1], Tp = h3->shape[2];
  auto fl = ad::reshape(ad::permute3(h3, 0, 2, 1), {N * Tp, C});
  auto mixed = ad::matmul(fl, w);
  return ad::permute3(ad::reshape(mixed, {N, Tp, w->shape[1]}), 0, 2, 1);
}

// Mix-hop propagation over a rank-3 hidden state [N x C x Tp] given the
// already-normalized adjacency.
Tensor mixhop3(const Tensor& h3, const Tensor& atilde, std::size_t depth,
               double beta, const std::vector<Tensor>& hop_weights) {
  const std::size_t N = h3->shape[0], C = h3->shape[1], Tp = h3->shape[2];
  auto flat = ad::reshape(h3, {N, C * Tp});
  Tensor cur = flat;
  Tensor out = mix_channels(h3, hop_weights[0]);
  for (std::size_t j = 1; j <= depth; ++j) {
    cur = ad::add(ad::scalar_mul(flat, beta),
                  ad::scalar_mul(ad::matmul(atilde, cur), 1.0 - beta));
    out = ad::add(out, mix_channels(ad::reshape(cur, {N, C, Tp}),
                                    hop_weights[j]));
  }
  return out;
}

}  // namespace

GtNet::GtNet(const GtNetConfig& config, std::uint64_t seed) : cfg_(config) {
  cfg_.validate();
  sizes_ = cfg_.effective_kernel_sizes();
  const std::size_t N = cfg_.num_nodes;
  const std::size_t C = cfg_.hidden_channels;

  Rng rng(seed);
  e1_ = init_uniform(rng, {N, cfg_.embed_dim}, cfg_.embed_dim);
  e2_ = init_uniform(rng, {N, cfg_.embed_dim}, cfg_.embed_dim);
  input_w_ = init_uniform(rng, {C, 1, 1}, 1);
  input_b_ = init_zero({C});

  const std::size_t nb = sizes_.size();
  blocks_.resize(cfg_.num_blocks);
  for (auto& block : blocks_) {
    for (std::size_t i = 0; i < nb; ++i) {
      const std::size_t branch_ch = C / nb + (i < C % nb ? 1 : 0);
      block.kernels.push_back(
          init_uniform(rng, {branch_ch, C, sizes_[i]}, C * sizes_[i]));
    }
    block.bias = init_zero({C});
    for (std::size_t j = 0; j <= cfg_.mixhop_depth; ++j)
      block.hop_weights.push_back(init_uniform(rng, {C, C}, C));
    block.skip_w = init_uniform(rng, {C, C}, C);
  }

  head_w1_ = init_uniform(rng, {N * C, C}, N * C);
  head_b1_ = init_zero({1, C});
  head_w2_ = init_uniform(rng, {C, cfg_.horizon}, C);
  head_b2_ = init_zero({1, cfg_.horizon});
}

Tensor GtNet::forward(const Tensor& window) const {
  const std::size_t N = cfg_.num_nodes;
  const std::size_t C = cfg_.hidden_channels;
  if (window->shape != std::vector<std::size_t>{N, cfg_.window_len})
    throw BadShape("gtnet forward: window " + ad::shape_str(window->shape) +
                   ", expected [" + std::to_string(N) + " x " +
                   std::to_string(cfg_.window_len) + "]");

  auto x3 = ad::reshape(window, {N, 1, cfg_.window_len});
  auto cur = ad::add_channel_bias(ad::conv1d_dilated(x3, input_w_, 1),
                                  input_b_);

  // One learned graph shared by every block.
  auto adj = learn_adjacency(e1_, e2_, cfg_.saturation,
                             std::min(cfg_.topk, N > 1 ? N - 1 : 1));
  auto atilde = ad::normalize_adjacency(adj);

  Tensor skip_sum;
  for (const auto& block : blocks_) {
    auto z = dilated_inception(cur, block.kernels, cfg_.dilation);
    z = ad::tanh(ad::add_channel_bias(z, block.bias));
    auto spatial = mixhop3(z, atilde, cfg_.mixhop_depth, cfg_.retain_ratio,
                           block.hop_weights);
    const std::size_t t_in = cur->shape[2];
    const std::size_t t_out = z->shape[2];
    auto residual = ad::slice(cur, 2, t_in - t_out, t_out);
    cur = ad::add(spatial, residual);

    auto last = ad::reshape(ad::slice(cur, 2, t_out - 1, 1), {N, C});
    auto sk = ad::matmul(last, block.skip_w);
    skip_sum = skip_sum ? ad::add(skip_sum, sk) : sk;
  }

  auto flat = ad::reshape(ad::relu(skip_sum), {1, N * C});
  auto hidden = ad::relu(ad::add(ad::matmul(flat, head_w1_), head_b1_));
  auto out = ad::add(ad::matmul(hidden, head_w2_), head_b2_);
  return ad::reshape(out, {cfg_.horizon});
}

std::vector<Tensor> GtNet::parameters() const {
  std::vector<Tensor> ps;
  for (auto& [name, t] : named_parameters()) ps.push_back(t);
  return ps;
}

std::vector<std::pair<std::string, Tensor>> GtNet::named_parameters() const {
  std::vector<std::pair<std::string, Tensor>> ps;
  ps.emplace_back("e1", e1_);
  ps.emplace_back("e2", e2_);
  ps.emplace_back("input.w", input_w_);
  ps.emplace_back("input.b", input_b_);
  for (std::size_t b = 0; b < blocks_.size(); ++b) {
    const auto& block = blocks_[b];
    const std::string prefix = "block" + std::to_string(b) + ".";
    for (std::size_t i = 0; i < block.kernels.size(); ++i)
      ps.emplace_back(prefix + "kernel" + std::to_string(sizes_[i]),
                      block.kernels[i]);
    ps.emplace_back(prefix + "bias", block.bias);
    for (std::size_t j = 0; j < block.hop_weights.size(); ++j)
      ps.emplace_back(prefix + "hop" + std::to_string(j),
                      block.hop_weights[j]);
    ps.emplace_back(prefix + "skip", block.skip_w);
  }
  ps.emplace_back("head.w1", head_w1_);
  ps.emplace_back("head.b1", head_b1_);
  ps.emplace_back("head.w2", head_w2_);
  ps.emplace_back("head.b2", head_b2_);
  return ps;
}

std::size_t GtNet::parameter_count() const {
  std::size_t n = 0;
  for (const auto& p : parameters()) n += p->size();
  return n;
}

void GtNet::zero_grad() {
  for (const auto& p : parameters()) p->zero_grad();
}

}  // namespace wavecast::gtnet
