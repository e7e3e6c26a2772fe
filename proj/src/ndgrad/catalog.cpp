#include "stylecloak/ndgrad/catalog.hpp"

#include <cmath>

#include "stylecloak/ndgrad/ops.hpp"

namespace stylecloak::ndgrad {

namespace {

// Margin used by kink predicates; comfortably above the default FD step.
constexpr double kKinkMargin = 1e-3;

Tensor uniform_tensor(Rng& rng, std::vector<std::size_t> shape, double lo, double hi) {
    Tensor t(std::move(shape));
    for (std::size_t i = 0; i < t.numel(); ++i) t[i] = rng.uniform(lo, hi);
    return t;
}

bool away_from(const Tensor& t, double point, double margin) {
    for (std::size_t i = 0; i < t.numel(); ++i) {
        if (std::abs(t[i] - point) < margin) return false;
    }
    return true;
}

}  // namespace

std::vector<DifferentiableOp> op_set() {
    std::vector<DifferentiableOp> ops;
    using Inputs = std::vector<Tensor>;

    ops.push_back({"add",
                   [](Rng& r) {
                       return Inputs{uniform_tensor(r, {3, 4}, -1, 1),
                                     uniform_tensor(r, {3, 4}, -1, 1)};
                   },
                   [](const Inputs& in) { return add(in[0], in[1]); },
                   [](const Inputs&, const Tensor& gy) { return Inputs{gy, gy}; },
                   nullptr});
    ops.push_back({"sub",
                   [](Rng& r) {
                       return Inputs{uniform_tensor(r, {3, 4}, -1, 1),
                                     uniform_tensor(r, {3, 4}, -1, 1)};
                   },
                   [](const Inputs& in) { return sub(in[0], in[1]); },
                   [](const Inputs&, const Tensor& gy) {
                       return Inputs{gy, mul_scalar(gy, -1.0)};
                   },
                   nullptr});
    ops.push_back({"mul",
                   [](Rng& r) {
                       return Inputs{uniform_tensor(r, {3, 4}, -1, 1),
                                     uniform_tensor(r, {3, 4}, -1, 1)};
                   },
                   [](const Inputs& in) { return mul(in[0], in[1]); },
                   [](const Inputs& in, const Tensor& gy) {
                       auto [ga, gb] = mul_vjp(in[0], in[1], gy);
                       return Inputs{ga, gb};
                   },
                   nullptr});
    ops.push_back({"div",
                   [](Rng& r) {
                       Tensor b = uniform_tensor(r, {3, 4}, 0.5, 1.5);
                       for (std::size_t i = 0; i < b.numel(); ++i) {
                           if (r.uniform() < 0.5) b[i] = -b[i];
                       }
                       return Inputs{uniform_tensor(r, {3, 4}, -1, 1), b};
                   },
                   [](const Inputs& in) { return div(in[0], in[1]); },
                   [](const Inputs& in, const Tensor& gy) {
                       auto [ga, gb] = div_vjp(in[0], in[1], gy);
                       return Inputs{ga, gb};
                   },
                   nullptr});
    ops.push_back({"add_scalar_0.7",
                   [](Rng& r) { return Inputs{uniform_tensor(r, {2, 3, 4}, -1, 1)}; },
                   [](const Inputs& in) { return add_scalar(in[0], 0.7); },
                   [](const Inputs&, const Tensor& gy) { return Inputs{gy}; },
                   nullptr});
    ops.push_back({"mul_scalar_-1.3",
                   [](Rng& r) { return Inputs{uniform_tensor(r, {2, 3, 4}, -1, 1)}; },
                   [](const Inputs& in) { return mul_scalar(in[0], -1.3); },
                   [](const Inputs&, const Tensor& gy) { return Inputs{mul_scalar(gy, -1.3)}; },
                   nullptr});
    ops.push_back({"pow_1.7",
                   [](Rng& r) { return Inputs{uniform_tensor(r, {3, 4}, 0.3, 2.0)}; },
                   [](const Inputs& in) { return pow_scalar(in[0], 1.7); },
                   [](const Inputs& in, const Tensor& gy) {
                       return Inputs{pow_scalar_vjp(in[0], 1.7, gy)};
                   },
                   nullptr});
    ops.push_back({"pow_2",
                   [](Rng& r) { return Inputs{uniform_tensor(r, {3, 4}, -2.0, 2.0)}; },
                   [](const Inputs& in) { return pow_scalar(in[0], 2.0); },
                   [](const Inputs& in, const Tensor& gy) {
                       return Inputs{pow_scalar_vjp(in[0], 2.0, gy)};
                   },
                   nullptr});
    ops.push_back({"exp",
                   [](Rng& r) { return Inputs{uniform_tensor(r, {3, 4}, -2, 2)}; },
                   [](const Inputs& in) { return exp(in[0]); },
                   [](const Inputs& in, const Tensor& gy) {
                       return Inputs{exp_vjp(exp(in[0]), gy)};
                   },
                   nullptr});
    ops.push_back({"log",
                   [](Rng& r) { return Inputs{uniform_tensor(r, {3, 4}, 0.3, 3.0)}; },
                   [](const Inputs& in) { return log(in[0]); },
                   [](const Inputs& in, const Tensor& gy) { return Inputs{log_vjp(in[0], gy)}; },
                   nullptr});
    ops.push_back({"abs",
                   [](Rng& r) { return Inputs{uniform_tensor(r, {3, 4}, -1, 1)}; },
                   [](const Inputs& in) { return abs(in[0]); },
                   [](const Inputs& in, const Tensor& gy) { return Inputs{abs_vjp(in[0], gy)}; },
                   [](const Inputs& in) { return away_from(in[0], 0.0, kKinkMargin); }});
    ops.push_back({"relu",
                   [](Rng& r) { return Inputs{uniform_tensor(r, {2, 3, 4}, -1, 1)}; },
                   [](const Inputs& in) { return relu(in[0]); },
                   [](const Inputs& in, const Tensor& gy) { return Inputs{relu_vjp(in[0], gy)}; },
                   [](const Inputs& in) { return away_from(in[0], 0.0, kKinkMargin); }});
    ops.push_back({"sigmoid",
                   [](Rng& r) { return Inputs{uniform_tensor(r, {3, 4}, -3, 3)}; },
                   [](const Inputs& in) { return sigmoid(in[0]); },
                   [](const Inputs& in, const Tensor& gy) {
                       return Inputs{sigmoid_vjp(sigmoid(in[0]), gy)};
                   },
                   nullptr});
    ops.push_back({"clamp_0.2_0.8",
                   [](Rng& r) { return Inputs{uniform_tensor(r, {3, 4}, -0.2, 1.2)}; },
                   [](const Inputs& in) { return clamp(in[0], 0.2, 0.8); },
                   [](const Inputs& in, const Tensor& gy) {
                       return Inputs{clamp_vjp(in[0], 0.2, 0.8, gy)};
                   },
                   [](const Inputs& in) {
                       return away_from(in[0], 0.2, kKinkMargin) &&
                              away_from(in[0], 0.8, kKinkMargin);
                   }});
    ops.push_back({"softmax_axis1",
                   [](Rng& r) { return Inputs{uniform_tensor(r, {3, 4, 2}, -2, 2)}; },
                   [](const Inputs& in) { return softmax(in[0], 1); },
                   [](const Inputs& in, const Tensor& gy) {
                       return Inputs{softmax_vjp(softmax(in[0], 1), 1, gy)};
                   },
                   nullptr});
    ops.push_back({"softmax_axis0",
                   [](Rng& r) { return Inputs{uniform_tensor(r, {2, 6}, -2, 2)}; },
                   [](const Inputs& in) { return softmax(in[0], 0); },
                   [](const Inputs& in, const Tensor& gy) {
                       return Inputs{softmax_vjp(softmax(in[0], 0), 0, gy)};
                   },
                   nullptr});
    ops.push_back({"matmul",
                   [](Rng& r) {
                       return Inputs{uniform_tensor(r, {3, 4}, -1, 1),
                                     uniform_tensor(r, {4, 5}, -1, 1)};
                   },
                   [](const Inputs& in) { return matmul(in[0], in[1]); },
                   [](const Inputs& in, const Tensor& gy) {
                       auto [ga, gb] = matmul_vjp(in[0], in[1], gy);
                       return Inputs{ga, gb};
                   },
                   nullptr});
    ops.push_back({"conv2d_s1_p1",
                   [](Rng& r) {
                       return Inputs{uniform_tensor(r, {2, 5, 6}, -1, 1),
                                     uniform_tensor(r, {3, 2, 3, 3}, -1, 1)};
                   },
                   [](const Inputs& in) { return conv2d(in[0], in[1], 1, 1); },
                   [](const Inputs& in, const Tensor& gy) {
                       auto [gx, gk] = conv2d_vjp(in[0], in[1], 1, 1, gy);
                       return Inputs{gx, gk};
                   },
                   nullptr});
    ops.push_back({"conv2d_s2_p0",
                   [](Rng& r) {
                       return Inputs{uniform_tensor(r, {2, 6, 8}, -1, 1),
                                     uniform_tensor(r, {2, 2, 3, 3}, -1, 1)};
                   },
                   [](const Inputs& in) { return conv2d(in[0], in[1], 2, 0); },
                   [](const Inputs& in, const Tensor& gy) {
                       auto [gx, gk] = conv2d_vjp(in[0], in[1], 2, 0, gy);
                       return Inputs{gx, gk};
                   },
                   nullptr});
    ops.push_back({"conv2d_4x4",
                   [](Rng& r) {
                       return Inputs{uniform_tensor(r, {1, 4, 4}, -1, 1),
                                     uniform_tensor(r, {2, 1, 3, 3}, -1, 1)};
                   },
                   [](const Inputs& in) { return conv2d(in[0], in[1], 1, 1); },
                   [](const Inputs& in, const Tensor& gy) {
                       auto [gx, gk] = conv2d_vjp(in[0], in[1], 1, 1, gy);
                       return Inputs{gx, gk};
                   },
                   nullptr});
    ops.push_back({"avg_pool_2",
                   [](Rng& r) { return Inputs{uniform_tensor(r, {2, 4, 6}, -1, 1)}; },
                   [](const Inputs& in) { return avg_pool(in[0], 2); },
                   [](const Inputs& in, const Tensor& gy) {
                       return Inputs{avg_pool_vjp(in[0].shape(), 2, gy)};
                   },
                   nullptr});
    ops.push_back({"max_pool_2",
                   [](Rng& r) { return Inputs{uniform_tensor(r, {2, 4, 6}, -1, 1)}; },
                   [](const Inputs& in) { return max_pool(in[0], 2); },
                   [](const Inputs& in, const Tensor& gy) {
                       return Inputs{max_pool_vjp(in[0], 2, gy)};
                   },
                   [](const Inputs& in) {
                       // Reject windows whose top two values nearly tie.
                       const Tensor& x = in[0];
                       const std::size_t c = x.shape()[0], h = x.shape()[1], w = x.shape()[2];
                       for (std::size_t ci = 0; ci < c; ++ci) {
                           for (std::size_t oy = 0; oy + 1 < h; oy += 2) {
                               for (std::size_t ox = 0; ox + 1 < w; ox += 2) {
                                   double best = -1e300, second = -1e300;
                                   for (std::size_t dy = 0; dy < 2; ++dy) {
                                       for (std::size_t dx = 0; dx < 2; ++dx) {
                                           const double v = x.at3(ci, oy + dy, ox + dx);
                                           if (v > best) {
                                               second = best;
                                               best = v;
                                           } else if (v > second) {
                                               second = v;
                                           }
                                       }
                                   }
                                   if (best - second < kKinkMargin) return false;
                               }
                           }
                       }
                       return true;
                   }});
    ops.push_back({"bilinear_resize_up",
                   [](Rng& r) { return Inputs{uniform_tensor(r, {2, 3, 4}, -1, 1)}; },
                   [](const Inputs& in) { return bilinear_resize(in[0], 5, 7); },
                   [](const Inputs& in, const Tensor& gy) {
                       return Inputs{bilinear_resize_vjp(in[0].shape(), gy)};
                   },
                   nullptr});
    ops.push_back({"bilinear_resize_down",
                   [](Rng& r) { return Inputs{uniform_tensor(r, {2, 6, 7}, -1, 1)}; },
                   [](const Inputs& in) { return bilinear_resize(in[0], 3, 4); },
                   [](const Inputs& in, const Tensor& gy) {
                       return Inputs{bilinear_resize_vjp(in[0].shape(), gy)};
                   },
                   nullptr});
    ops.push_back({"sum",
                   [](Rng& r) { return Inputs{uniform_tensor(r, {3, 4, 2}, -1, 1)}; },
                   [](const Inputs& in) { return Tensor::scalar(sum(in[0])); },
                   [](const Inputs& in, const Tensor& gy) {
                       return Inputs{sum_vjp(in[0].shape(), gy[0])};
                   },
                   nullptr});
    ops.push_back({"mean",
                   [](Rng& r) { return Inputs{uniform_tensor(r, {3, 4, 2}, -1, 1)}; },
                   [](const Inputs& in) { return Tensor::scalar(mean(in[0])); },
                   [](const Inputs& in, const Tensor& gy) {
                       return Inputs{mean_vjp(in[0].shape(), gy[0])};
                   },
                   nullptr});
    ops.push_back({"concat_axis0",
                   [](Rng& r) {
                       return Inputs{uniform_tensor(r, {2, 3}, -1, 1),
                                     uniform_tensor(r, {4, 3}, -1, 1)};
                   },
                   [](const Inputs& in) { return concat(in, 0); },
                   [](const Inputs& in, const Tensor& gy) { return concat_vjp(in, 0, gy); },
                   nullptr});
    ops.push_back({"concat_axis1",
                   [](Rng& r) {
                       return Inputs{uniform_tensor(r, {3, 2, 2}, -1, 1),
                                     uniform_tensor(r, {3, 3, 2}, -1, 1)};
                   },
                   [](const Inputs& in) { return concat(in, 1); },
                   [](const Inputs& in, const Tensor& gy) { return concat_vjp(in, 1, gy); },
                   nullptr});
    ops.push_back({"slice_axis1",
                   [](Rng& r) { return Inputs{uniform_tensor(r, {3, 5, 4}, -1, 1)}; },
                   [](const Inputs& in) { return slice(in[0], 1, 1, 4); },
                   [](const Inputs& in, const Tensor& gy) {
                       return Inputs{slice_vjp(in[0].shape(), 1, 1, gy)};
                   },
                   nullptr});
    return ops;
}

}  // namespace stylecloak::ndgrad
