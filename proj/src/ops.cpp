#include "wavecast/ops.hpp"

#include <algorithm>
#include <cmath>

namespace wavecast::ad {

namespace {

Tensor make_result(std::vector<std::size_t> shape, const char* tag,
                   std::vector<Tensor> parents,
                   std::function<void(TensorNode&)> backward_fn) {
  auto out = make_tensor(std::move(shape));
  out->op_tag = tag;
  bool req = false;
  for (const auto& p : parents) req = req || p->requires_grad;
  if (req && grad_enabled()) {
    out->requires_grad = true;
    out->parents = std::move(parents);
    out->backward_fn = std::move(backward_fn);
  }
  return out;
}

void require_same_shape(const char* op, const Tensor& a, const Tensor& b) {
  if (a->shape != b->shape)
    throw ShapeMismatch(std::string(op) + ": " + shape_str(a->shape) +
                        " vs " + shape_str(b->shape));
}

void require_rank(const char* op, const Tensor& a, std::size_t rank) {
  if (a->shape.size() != rank)
    throw ShapeMismatch(std::string(op) + ": expected rank " +
                        std::to_string(rank) + ", got " +
                        shape_str(a->shape));
}

// outer = product of dims before axis, inner = product after it.
void split_at_axis(const std::vector<std::size_t>& shape, std::size_t axis,
                   std::size_t& outer, std::size_t& inner) {
  outer = 1;
  inner = 1;
  for (std::size_t i = 0; i < axis; ++i) outer *= shape[i];
  for (std::size_t i = axis + 1; i < shape.size(); ++i) inner *= shape[i];
}

Tensor elementwise_binary(const char* tag, const Tensor& a, const Tensor& b,
                          double (*fwd)(double, double),
                          void (*bwd)(TensorNode&)) {
  require_same_shape(tag, a, b);
  auto out = make_result(a->shape, tag, {a, b}, bwd);
  for (std::size_t i = 0; i < out->size(); ++i)
    out->data[i] = fwd(a->data[i], b->data[i]);
  return out;
}

}  // namespace

Tensor add(const Tensor& a, const Tensor& b) {
  return elementwise_binary(
      "add", a, b, [](double x, double y) { return x + y; },
      [](TensorNode& self) {
        auto& ga = self.parents[0]->grad;
        auto& gb = self.parents[1]->grad;
        for (std::size_t i = 0; i < self.size(); ++i) {
          ga[i] += self.grad[i];
          gb[i] += self.grad[i];
        }
      });
}

Tensor sub(const Tensor& a, const Tensor& b) {
  return elementwise_binary(
      "sub", a, b, [](double x, double y) { return x - y; },
      [](TensorNode& self) {
        auto& ga = self.parents[0]->grad;
        auto& gb = self.parents[1]->grad;
        for (std::size_t i = 0; i < self.size(); ++i) {
          ga[i] += self.grad[i];
          gb[i] -= self.grad[i];
        }
      });
}

Tensor mul(const Tensor& a, const Tensor& b) {
  return elementwise_binary(
      "mul", a, b, [](double x, double y) { return x * y; },
      [](TensorNode& self) {
        auto& pa = *self.parents[0];
        auto& pb = *self.parents[1];
        for (std::size_t i = 0; i < self.size(); ++i) {
          pa.grad[i] += self.grad[i] * pb.data[i];
          pb.grad[i] += self.grad[i] * pa.data[i];
        }
      });
}

Tensor scalar_mul(const Tensor& a, double s) {
  auto out = make_result(a->shape, "scalar_mul", {a}, [s](TensorNode& self) {
    auto& ga = self.parents[0]->grad;
    for (std::size_t i = 0; i < self.size(); ++i) ga[i] += s * self.grad[i];
  });
  for (std::size_t i = 0; i < out->size(); ++i) out->data[i] = s * a->data[i];
  return out;
}

Tensor matmul(const Tensor& a, const Tensor& b) {
  require_rank("matmul", a, 2);
  require_rank("matmul", b, 2);
  if (a->shape[1] != b->shape[0])
    throw ShapeMismatch("matmul: " + shape_str(a->shape) + " vs " +
                        shape_str(b->shape));
  const std::size_t M = a->shape[0], K = a->shape[1], N = b->shape[1];
  auto out = make_result({M, N}, "matmul", {a, b}, [](TensorNode& self) {
    auto& pa = *self.parents[0];
    auto& pb = *self.parents[1];
    const std::size_t M = pa.shape[0], K = pa.shape[1], N = pb.shape[1];
    for (std::size_t i = 0; i < M; ++i) {
      const double* grow = &self.grad[i * N];
      for (std::size_t k = 0; k < K; ++k) {
        const double* brow = &pb.data[k * N];
        double acc = 0.0;
        for (std::size_t j = 0; j < N; ++j) acc += grow[j] * brow[j];
        pa.grad[i * K + k] += acc;
      }
      const double* arow = &pa.data[i * K];
      for (std::size_t k = 0; k < K; ++k) {
        double* gbrow = &pb.grad[k * N];
        const double aik = arow[k];
        for (std::size_t j = 0; j < N; ++j) gbrow[j] += aik * grow[j];
      }
    }
  });
  for (std::size_t i = 0; i < M; ++i) {
    double* crow = &out->data[i * N];
    const double* arow = &a->data[i * K];
    for (std::size_t k = 0; k < K; ++k) {
      const double aik = arow[k];
      const double* brow = &b->data[k * N];
      for (std::size_t j = 0; j < N; ++j) crow[j] += aik * brow[j];
    }
  }
  return out;
}

Tensor transpose(const Tensor& a) {
  require_rank("transpose", a, 2);
  const std::size_t R = a->shape[0], C = a->shape[1];
  auto out = make_result({C, R}, "transpose", {a}, [](TensorNode& self) {
    auto& pa = *self.parents[0];
    const std::size_t R = pa.shape[0], C = pa.shape[1];
    for (std::size_t i = 0; i < R; ++i)
      for (std::size_t j = 0; j < C; ++j)
        pa.grad[i * C + j] += self.grad[j * R + i];
  });
  for (std::size_t i = 0; i < R; ++i)
    for (std::size_t j = 0; j < C; ++j)
      out->data[j * R + i] = a->data[i * C + j];
  return out;
}

Tensor concat(const std::vector<Tensor>& parts, std::size_t axis) {
  if (parts.empty()) throw ShapeMismatch("concat: no inputs");
  const auto& first = parts.front()->shape;
  if (axis >= first.size())
    throw ShapeMismatch("concat: axis " + std::to_string(axis) +
                        " out of range for " + shape_str(first));
  std::size_t axis_total = 0;
  for (const auto& p : parts) {
    if (p->shape.size() != first.size())
      throw ShapeMismatch("concat: " + shape_str(first) + " vs " +
                          shape_str(p->shape));
    for (std::size_t i = 0; i < first.size(); ++i)
      if (i != axis && p->shape[i] != first[i])
        throw ShapeMismatch("concat: " + shape_str(first) + " vs " +
                            shape_str(p->shape));
    axis_total += p->shape[axis];
  }
  auto shape = first;
  shape[axis] = axis_total;
  std::size_t outer, inner;
  split_at_axis(shape, axis, outer, inner);

  auto backward_fn = [axis](TensorNode& self) {
    std::size_t outer, inner;
    split_at_axis(self.shape, axis, outer, inner);
    const std::size_t out_block = self.shape[axis] * inner;
    std::size_t part_off = 0;
    for (auto& parent : self.parents) {
      const std::size_t block = parent->shape[axis] * inner;
      for (std::size_t o = 0; o < outer; ++o) {
        const double* src = &self.grad[o * out_block + part_off];
        double* dst = &parent->grad[o * block];
        for (std::size_t i = 0; i < block; ++i) dst[i] += src[i];
      }
      part_off += block;
    }
  };
  auto out = make_result(shape, "concat", parts, backward_fn);

  const std::size_t out_block = axis_total * inner;
  std::size_t part_off = 0;
  for (const auto& p : parts) {
    const std::size_t block = p->shape[axis] * inner;
    for (std::size_t o = 0; o < outer; ++o)
      std::copy_n(&p->data[o * block], block,
                  &out->data[o * out_block + part_off]);
    part_off += block;
  }
  return out;
}

Tensor slice(const Tensor& a, std::size_t axis, std::size_t start,
             std::size_t len) {
  if (axis >= a->shape.size())
    throw ShapeMismatch("slice: axis " + std::to_string(axis) +
                        " out of range for " + shape_str(a->shape));
  if (len == 0 || start + len > a->shape[axis])
    throw ShapeMismatch("slice: [" + std::to_string(start) + ", " +
                        std::to_string(start + len) + ") out of range for " +
                        shape_str(a->shape) + " axis " + std::to_string(axis));
  auto shape = a->shape;
  shape[axis] = len;
  std::size_t outer, inner;
  split_at_axis(shape, axis, outer, inner);

  auto backward_fn = [axis, start, len](TensorNode& self) {
    auto& pa = *self.parents[0];
    std::size_t outer, inner;
    split_at_axis(pa.shape, axis, outer, inner);
    const std::size_t in_block = pa.shape[axis] * inner;
    const std::size_t out_block = len * inner;
    for (std::size_t o = 0; o < outer; ++o) {
      const double* src = &self.grad[o * out_block];
      double* dst = &pa.grad[o * in_block + start * inner];
      for (std::size_t i = 0; i < out_block; ++i) dst[i] += src[i];
    }
  };
  auto out = make_result(shape, "slice", {a}, backward_fn);

  const std::size_t in_block = a->shape[axis] * inner;
  const std::size_t out_block = len * inner;
  for (std::size_t o = 0; o < outer; ++o)
    std::copy_n(&a->data[o * in_block + start * inner], out_block,
                &out->data[o * out_block]);
  return out;
}

Tensor reshape(const Tensor& a, std::vector<std::size_t> shape) {
  if (numel(shape) != a->size())
    throw ShapeMismatch("reshape: " + shape_str(a->shape) + " to " +
                        shape_str(shape));
  auto out = make_result(std::move(shape), "reshape", {a},
                         [](TensorNode& self) {
                           auto& ga = self.parents[0]->grad;
                           for (std::size_t i = 0; i < self.size(); ++i)
                             ga[i] += self.grad[i];
                         });
  out->data = a->data;
  return out;
}

Tensor permute3(const Tensor& a, std::size_t p0, std::size_t p1,
                std::size_t p2) {
  require_rank("permute3", a, 3);
  if (p0 + p1 + p2 != 3 || p0 == p1 || p1 == p2 || p0 == p2)
    throw ShapeMismatch("permute3: invalid permutation");
  const auto& s = a->shape;
  const std::size_t perm[3] = {p0, p1, p2};
  std::vector<std::size_t> shape = {s[p0], s[p1], s[p2]};

  auto backward_fn = [p0, p1, p2](TensorNode& self) {
    auto& pa = *self.parents[0];
    const auto& s = pa.shape;
    const std::size_t perm[3] = {p0, p1, p2};
    const std::size_t os1 = self.shape[1], os2 = self.shape[2];
    for (std::size_t i0 = 0; i0 < s[0]; ++i0)
      for (std::size_t i1 = 0; i1 < s[1]; ++i1)
        for (std::size_t i2 = 0; i2 < s[2]; ++i2) {
          const std::size_t in_idx[3] = {i0, i1, i2};
          const std::size_t o =
              (in_idx[perm[0]] * os1 + in_idx[perm[1]]) * os2 +
              in_idx[perm[2]];
          pa.grad[(i0 * s[1] + i1) * s[2] + i2] += self.grad[o];
        }
  };
  auto out = make_result(std::move(shape), "permute3", {a}, backward_fn);

  const std::size_t os1 = out->shape[1], os2 = out->shape[2];
  for (std::size_t i0 = 0; i0 < s[0]; ++i0)
    for (std::size_t i1 = 0; i1 < s[1]; ++i1)
      for (std::size_t i2 = 0; i2 < s[2]; ++i2) {
        const std::size_t in_idx[3] = {i0, i1, i2};
        const std::size_t o = (in_idx[perm[0]] * os1 + in_idx[perm[1]]) * os2 +
                              in_idx[perm[2]];
        out->data[o] = a->data[(i0 * s[1] + i1) * s[2] + i2];
      }
  return out;
}

Tensor relu(const Tensor& a) {
  auto out = make_result(a->shape, "relu", {a}, [](TensorNode& self) {
    auto& pa = *self.parents[0];
    for (std::size_t i = 0; i < self.size(); ++i)
      if (pa.data[i] > 0.0) pa.grad[i] += self.grad[i];
  });
  for (std::size_t i = 0; i < out->size(); ++i)
    out->data[i] = a->data[i] > 0.0 ? a->data[i] : 0.0;
  return out;
}

Tensor tanh(const Tensor& a) {
  auto out = make_result(a->shape, "tanh", {a}, [](TensorNode& self) {
    auto& ga = self.parents[0]->grad;
    for (std::size_t i = 0; i < self.size(); ++i) {
      const double y = self.data[i];
      ga[i] += self.grad[i] * (1.0 - y * y);
    }
  });
  for (std::size_t i = 0; i < out->size(); ++i)
    out->data[i] = std::tanh(a->data[i]);
  return out;
}

Tensor sigmoid(const Tensor& a) {
  auto out = make_result(a->shape, "sigmoid", {a}, [](TensorNode& self) {
    auto& ga = self.parents[0]->grad;
    for (std::size_t i = 0; i < self.size(); ++i) {
      const double y = self.data[i];
      ga[i] += self.grad[i] * y * (1.0 - y);
    }
  });
  for (std::size_t i = 0; i < out->size(); ++i)
    out->data[i] = 1.0 / (1.0 + std::exp(-a->data[i]));
  return out;
}

Tensor row_softmax(const Tensor& a) {
  require_rank("row_softmax", a, 2);
  const std::size_t R = a->shape[0], C = a->shape[1];
  auto out = make_result(a->shape, "row_softmax", {a}, [](TensorNode& self) {
    auto& pa = *self.parents[0];
    const std::size_t R = pa.shape[0], C = pa.shape[1];
    for (std::size_t r = 0; r < R; ++r) {
      const double* y = &self.data[r * C];
      const double* g = &self.grad[r * C];
      double dot = 0.0;
      for (std::size_t c = 0; c < C; ++c) dot += g[c] * y[c];
      double* gx = &pa.grad[r * C];
      for (std::size_t c = 0; c < C; ++c) gx[c] += y[c] * (g[c] - dot);
    }
  });
  for (std::size_t r = 0; r < R; ++r) {
    const double* x = &a->data[r * C];
    double* y = &out->data[r * C];
    double mx = x[0];
    for (std::size_t c = 1; c < C; ++c) mx = std::max(mx, x[c]);
    double total = 0.0;
    for (std::size_t c = 0; c < C; ++c) {
      y[c] = std::exp(x[c] - mx);
      total += y[c];
    }
    for (std::size_t c = 0; c < C; ++c) y[c] /= total;
  }
  return out;
}

Tensor sum(const Tensor& a) {
  auto out = make_result({1}, "sum", {a}, [](TensorNode& self) {
    auto& ga = self.parents[0]->grad;
    const double g = self.grad[0];
    for (auto& v : ga) v += g;
  });
  double acc = 0.0;
  for (double v : a->data) acc += v;
  out->data[0] = acc;
  return out;
}

Tensor mean(const Tensor& a) {
  if (a->size() == 0) throw ShapeMismatch("mean: empty tensor");
  const double inv = 1.0 / static_cast<double>(a->size());
  auto out = make_result({1}, "mean", {a}, [inv](TensorNode& self) {
    auto& ga = self.parents[0]->grad;
    const double g = self.grad[0] * inv;
    for (auto& v : ga) v += g;
  });
  double acc = 0.0;
  for (double v : a->data) acc += v;
  out->data[0] = acc * inv;
  return out;
}

Tensor conv1d_dilated(const Tensor& input, const Tensor& kernels,
                      std::size_t dilation) {
  require_rank("conv1d_dilated kernels", kernels, 3);
  if (dilation < 1) throw Error("conv1d_dilated: dilation must be >= 1");
  const bool batched = input->shape.size() == 3;
  if (!batched) require_rank("conv1d_dilated input", input, 2);

  const std::size_t B = batched ? input->shape[0] : 1;
  const std::size_t Cin = input->shape[batched ? 1 : 0];
  const std::size_t T = input->shape[batched ? 2 : 1];
  const std::size_t Cout = kernels->shape[0];
  const std::size_t K = kernels->shape[2];
  if (kernels->shape[1] != Cin)
    throw ShapeMismatch("conv1d_dilated: input " + shape_str(input->shape) +
                        " vs kernels " + shape_str(kernels->shape));
  const std::size_t span = (K - 1) * dilation;
  if (T <= span)
    throw WindowTooShort("conv1d_dilated: kernel size " + std::to_string(K) +
                         " with dilation " + std::to_string(dilation) +
                         " needs more than " + std::to_string(span) +
                         " time steps, got " + std::to_string(T));
  const std::size_t Tout = T - span;

  std::vector<std::size_t> shape =
      batched ? std::vector<std::size_t>{B, Cout, Tout}
              : std::vector<std::size_t>{Cout, Tout};

  auto backward_fn = [dilation](TensorNode& self) {
    auto& in = *self.parents[0];
    auto& ker = *self.parents[1];
    const bool batched = in.shape.size() == 3;
    const std::size_t B = batched ? in.shape[0] : 1;
    const std::size_t Cin = in.shape[batched ? 1 : 0];
    const std::size_t T = in.shape[batched ? 2 : 1];
    const std::size_t Cout = ker.shape[0];
    const std::size_t K = ker.shape[2];
    const std::size_t Tout = T - (K - 1) * dilation;
    for (std::size_t b = 0; b < B; ++b) {
      const double* xb = &in.data[b * Cin * T];
      double* gxb = &in.grad[b * Cin * T];
      const double* gyb = &self.grad[b * Cout * Tout];
      for (std::size_t o = 0; o < Cout; ++o) {
        const double* gy = &gyb[o * Tout];
        for (std::size_t c = 0; c < Cin; ++c) {
          const double* kk = &ker.data[(o * Cin + c) * K];
          double* gk = &ker.grad[(o * Cin + c) * K];
          const double* x = &xb[c * T];
          double* gx = &gxb[c * T];
          for (std::size_t j = 0; j < K; ++j) {
            const std::size_t off = j * dilation;
            double acc = 0.0;
            for (std::size_t t = 0; t < Tout; ++t) {
              gx[t + off] += gy[t] * kk[j];
              acc += gy[t] * x[t + off];
            }
            gk[j] += acc;
          }
        }
      }
    }
  };
  auto out = make_result(std::move(shape), "conv1d_dilated", {input, kernels},
                         backward_fn);

  for (std::size_t b = 0; b < B; ++b) {
    const double* xb = &input->data[b * Cin * T];
    double* yb = &out->data[b * Cout * Tout];
    for (std::size_t o = 0; o < Cout; ++o) {
      double* y = &yb[o * Tout];
      for (std::size_t c = 0; c < Cin; ++c) {
        const double* kk = &kernels->data[(o * Cin + c) * K];
        const double* x = &xb[c * T];
        for (std::size_t j = 0; j < K; ++j) {
          const double kj = kk[j];
          const double* xs = x + j * dilation;
          for (std::size_t t = 0; t < Tout; ++t) y[t] += kj * xs[t];
        }
      }
    }
  }
  return out;
}

Tensor add_channel_bias(const Tensor& x, const Tensor& bias) {
  require_rank("add_channel_bias bias", bias, 1);
  const bool batched = x->shape.size() == 3;
  if (!batched) require_rank("add_channel_bias input", x, 2);
  const std::size_t C = x->shape[batched ? 1 : 0];
  const std::size_t T = x->shape[batched ? 2 : 1];
  const std::size_t B = batched ? x->shape[0] : 1;
  if (bias->shape[0] != C)
    throw ShapeMismatch("add_channel_bias: input " + shape_str(x->shape) +
                        " vs bias " + shape_str(bias->shape));

  auto out = make_result(x->shape, "add_channel_bias", {x, bias},
                         [](TensorNode& self) {
                           auto& px = *self.parents[0];
                           auto& pb = *self.parents[1];
                           const bool batched = px.shape.size() == 3;
                           const std::size_t C = px.shape[batched ? 1 : 0];
                           const std::size_t T = px.shape[batched ? 2 : 1];
                           const std::size_t B = batched ? px.shape[0] : 1;
                           for (std::size_t b = 0; b < B; ++b)
                             for (std::size_t c = 0; c < C; ++c) {
                               const double* g =
                                   &self.grad[(b * C + c) * T];
                               double* gx = &px.grad[(b * C + c) * T];
                               double acc = 0.0;
                               for (std::size_t t = 0; t < T; ++t) {
                                 gx[t] += g[t];
                                 acc += g[t];
                               }
                               pb.grad[c] += acc;
                             }
                         });
  for (std::size_t b = 0; b < B; ++b)
    for (std::size_t c = 0; c < C; ++c) {
      const double bc = bias->data[c];
      const double* src = &x->data[(b * C + c) * T];
      double* dst = &out->data[(b * C + c) * T];
      for (std::size_t t = 0; t < T; ++t) dst[t] = src[t] + bc;
    }
  return out;
}

Tensor normalize_adjacency(const Tensor& a) {
  require_rank("normalize_adjacency", a, 2);
  if (a->shape[0] != a->shape[1])
    throw ShapeMismatch("normalize_adjacency: " + shape_str(a->shape) +
                        " is not square");
  const std::size_t N = a->shape[0];

  auto out = make_result(a->shape, "normalize_adjacency", {a},
                         [](TensorNode& self) {
                           auto& pa = *self.parents[0];
                           const std::size_t N = pa.shape[0];
                           for (std::size_t r = 0; r < N; ++r) {
                             double s = 1.0;
                             for (std::size_t c = 0; c < N; ++c)
                               s += pa.data[r * N + c];
                             const double* g = &self.grad[r * N];
                             const double* y = &self.data[r * N];
                             double dot = 0.0;
                             for (std::size_t c = 0; c < N; ++c)
                               dot += g[c] * y[c];
                             double* gx = &pa.grad[r * N];
                             for (std::size_t c = 0; c < N; ++c)
                               gx[c] += (g[c] - dot) / s;
                           }
                         });
  for (std::size_t r = 0; r < N; ++r) {
    double s = 1.0;
    for (std::size_t c = 0; c < N; ++c) s += a->data[r * N + c];
    if (!(s > 0.0))
      throw Error("normalize_adjacency: nonpositive row sum " +
                  std::to_string(s) + " at row " + std::to_string(r));
    for (std::size_t c = 0; c < N; ++c)
      out->data[r * N + c] =
          (a->data[r * N + c] + (r == c ? 1.0 : 0.0)) / s;
  }
  return out;
}

}  // namespace wavecast::ad
