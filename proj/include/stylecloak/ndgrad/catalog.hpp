#pragma once

#include <functional>
#include <string>
#include <vector>

#include "stylecloak/ndgrad/rng.hpp"
#include "stylecloak/ndgrad/tensor.hpp"

namespace stylecloak::ndgrad {

/// One registered differentiable operator: a forward map from inputs to one
/// output and the matching VJP. Instances in op_set() close over concrete
/// hyperparameters (stride, padding, axis, ...) so the gradient suite can
/// exercise each configuration.
struct DifferentiableOp {
    std::string name;
    std::function<std::vector<Tensor>(Rng&)> make_inputs;
    std::function<Tensor(const std::vector<Tensor>&)> forward;
    std::function<std::vector<Tensor>(const std::vector<Tensor>&, const Tensor&)> vjp;
    // Rejects inputs that sit within a finite-difference step of a kink
    // (relu/clamp boundaries, pooling ties). Inputs are resampled until it
    // accepts. Null means every draw is fine.
    std::function<bool(const std::vector<Tensor>&)> inputs_ok;
};

/// The full operator catalog with canonical check shapes (>= 2 per axis).
std::vector<DifferentiableOp> op_set();

}  // namespace stylecloak::ndgrad
