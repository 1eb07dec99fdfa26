#pragma once

#include "wavecast/tensor.hpp"

namespace wavecast::ad {

// Primitive catalog. Shapes are explicit; there is no broadcasting. Every
// op checks conformance and throws ShapeMismatch naming both shapes.

Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);  // elementwise
Tensor scalar_mul(const Tensor& a, double s);

Tensor matmul(const Tensor& a, const Tensor& b);  // [M x K] * [K x N]
Tensor transpose(const Tensor& a);                // rank 2

Tensor concat(const std::vector<Tensor>& parts, std::size_t axis);
Tensor slice(const Tensor& a, std::size_t axis, std::size_t start,
             std::size_t len);
Tensor reshape(const Tensor& a, std::vector<std::size_t> shape);
Tensor permute3(const Tensor& a, std::size_t p0, std::size_t p1,
                std::size_t p2);

Tensor relu(const Tensor& a);  // gradient at exactly 0 is 0
Tensor tanh(const Tensor& a);
Tensor sigmoid(const Tensor& a);
Tensor row_softmax(const Tensor& a);  // rank 2, softmax along each row

Tensor sum(const Tensor& a);   // -> shape [1]
Tensor mean(const Tensor& a);  // -> shape [1]

// Causal-window dilated convolution. input is [C_in x T] or [B x C_in x T],
// kernels is [C_out x C_in x K]; out[.., o, t] = sum_{c,j} k[o][c][j] *
// in[.., c, t + j*d]. Output time length is T - (K-1)*d.
Tensor conv1d_dilated(const Tensor& input, const Tensor& kernels,
                      std::size_t dilation);

// Adds bias[c] across the channel axis of [C x T] or [B x C x T].
Tensor add_channel_bias(const Tensor& x, const Tensor& bias);

// Atilde = D^-1 (A + I) where D = diag of row sums of (A + I). Defined for
// nonnegative square A; row sums are >= 1 so the division is safe. The
// gradient flows through the normalization.
Tensor normalize_adjacency(const Tensor& a);

}  // namespace wavecast::ad
