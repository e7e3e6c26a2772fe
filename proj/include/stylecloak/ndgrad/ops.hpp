#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "stylecloak/ndgrad/tensor.hpp"

// Fixed catalog of differentiable operators. Every operator comes as a pure
// forward function plus an explicit VJP (vector-Jacobian product) that maps
// an output cotangent back to input cotangents. Reductions and convolution
// accumulate in 64-bit.
namespace stylecloak::ndgrad {

// ---- elementwise binary ----
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor div(const Tensor& a, const Tensor& b);
// add/sub: cotangents are gy and +/-gy.
std::pair<Tensor, Tensor> mul_vjp(const Tensor& a, const Tensor& b, const Tensor& gy);
std::pair<Tensor, Tensor> div_vjp(const Tensor& a, const Tensor& b, const Tensor& gy);

// ---- scalar ops ----
Tensor add_scalar(const Tensor& a, double s);
Tensor mul_scalar(const Tensor& a, double s);
Tensor pow_scalar(const Tensor& a, double p);
Tensor pow_scalar_vjp(const Tensor& a, double p, const Tensor& gy);

// ---- elementwise unary ----
Tensor exp(const Tensor& a);
Tensor log(const Tensor& a);  // throws on non-positive values
Tensor abs(const Tensor& a);
Tensor relu(const Tensor& a);
Tensor sigmoid(const Tensor& a);
Tensor clamp(const Tensor& a, double lo, double hi);
Tensor exp_vjp(const Tensor& y, const Tensor& gy);  // takes forward output
Tensor log_vjp(const Tensor& a, const Tensor& gy);
Tensor abs_vjp(const Tensor& a, const Tensor& gy);  // subgradient 0 at 0
Tensor relu_vjp(const Tensor& a, const Tensor& gy);
Tensor sigmoid_vjp(const Tensor& y, const Tensor& gy);  // takes forward output
// Subgradient 1 inside [lo, hi] including the boundary, 0 outside.
Tensor clamp_vjp(const Tensor& a, double lo, double hi, const Tensor& gy);

// ---- softmax along an axis ----
Tensor softmax(const Tensor& a, std::size_t axis);
Tensor softmax_vjp(const Tensor& y, std::size_t axis, const Tensor& gy);

// ---- matrix multiply (rank-2) ----
Tensor matmul(const Tensor& a, const Tensor& b);
std::pair<Tensor, Tensor> matmul_vjp(const Tensor& a, const Tensor& b, const Tensor& gy);

// ---- 2-D convolution ----
// x: Cin x H x W, k: Cout x Cin x kh x kw, zero padding, square stride.
Tensor conv2d(const Tensor& x, const Tensor& k, std::size_t stride, std::size_t pad);
Tensor conv2d_bias(const Tensor& x, const Tensor& k, const Tensor& bias, std::size_t stride,
                   std::size_t pad);
std::pair<Tensor, Tensor> conv2d_vjp(const Tensor& x, const Tensor& k, std::size_t stride,
                                     std::size_t pad, const Tensor& gy);
Tensor conv2d_vjp_input(const Tensor& x, const Tensor& k, std::size_t stride, std::size_t pad,
                        const Tensor& gy);
Tensor conv2d_bias_vjp(const Tensor& gy);  // per-output-channel sum

// ---- pooling (window k, stride k, floor) ----
Tensor avg_pool(const Tensor& x, std::size_t k);
Tensor avg_pool_vjp(const std::vector<std::size_t>& in_shape, std::size_t k, const Tensor& gy);
Tensor max_pool(const Tensor& x, std::size_t k);
// Routes to the argmax; first occurrence wins on exact ties.
Tensor max_pool_vjp(const Tensor& x, std::size_t k, const Tensor& gy);

// ---- bilinear resize (rank-3 C x H x W; half-pixel centers, edge clamp) ----
Tensor bilinear_resize(const Tensor& x, std::size_t out_h, std::size_t out_w);
Tensor bilinear_resize_vjp(const std::vector<std::size_t>& in_shape, const Tensor& gy);

// ---- reductions ----
double sum(const Tensor& a);
double mean(const Tensor& a);
Tensor sum_vjp(const std::vector<std::size_t>& in_shape, double gy);
Tensor mean_vjp(const std::vector<std::size_t>& in_shape, double gy);

// ---- concatenation and slicing ----
Tensor concat(const std::vector<Tensor>& parts, std::size_t axis);
std::vector<Tensor> concat_vjp(const std::vector<Tensor>& parts, std::size_t axis,
                               const Tensor& gy);
Tensor slice(const Tensor& x, std::size_t axis, std::size_t start, std::size_t stop);
Tensor slice_vjp(const std::vector<std::size_t>& in_shape, std::size_t axis, std::size_t start,
                 const Tensor& gy);

// ---- misc helpers built on the catalog ----
double dot(const Tensor& a, const Tensor& b);
Tensor scale_add(const Tensor& acc, const Tensor& g, double s);  // acc + s*g
void axpy_inplace(Tensor& acc, const Tensor& g, double s);

}  // namespace stylecloak::ndgrad
