#pragma once

#include <cstddef>

#include "stylecloak/ndgrad/tensor.hpp"

namespace stylecloak::ndgrad {

/// Adam optimizer state for one parameter tensor.
struct AdamState {
    Tensor m;  // first moment
    Tensor v;  // second moment
    std::size_t step = 0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;

    static AdamState for_param(const Tensor& param);
};

/// Standard Adam update with bias correction. Zero gradients leave the
/// parameter unchanged for any state.
void adam_step(Tensor& param, const Tensor& grad, AdamState& state, double lr);

}  // namespace stylecloak::ndgrad
