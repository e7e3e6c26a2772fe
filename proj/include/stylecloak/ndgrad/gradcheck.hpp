#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "stylecloak/ndgrad/catalog.hpp"
#include "stylecloak/ndgrad/rng.hpp"
#include "stylecloak/ndgrad/tensor.hpp"

namespace stylecloak::ndgrad {

struct GradCheckReport {
    std::string name;
    double max_rel_err = 0.0;
    bool pass = false;
    std::size_t coords_checked = 0;
};

/// Compares an analytic gradient of a scalar function against central finite
/// differences (f(x+h) - f(x-h)) / 2h, coordinate by coordinate. Relative
/// error uses max(1, |analytic|, |numeric|) as denominator. When max_coords
/// is nonzero only a seeded random subset of coordinates is probed (used for
/// large composite graphs).
GradCheckReport grad_check(const std::function<double(const Tensor&)>& f,
                           const Tensor& analytic_grad, const Tensor& x0, double step = 1e-5,
                           double tol = 1e-4, std::size_t max_coords = 0,
                           std::uint64_t coord_seed = 0);

/// Checks one catalog operator: composes it with a random linear functional
/// f(x) = <w, op(x)>, whose analytic gradient is vjp(x, w). Inputs are drawn
/// from op.make_inputs, resampling (bounded) while op.inputs_ok rejects them.
/// Every input of the operator is checked in turn.
GradCheckReport grad_check_op(const DifferentiableOp& op, Rng& rng, double step = 1e-5,
                              double tol = 1e-4, std::size_t max_coords = 0);

}  // namespace stylecloak::ndgrad
