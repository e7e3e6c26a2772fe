#include "stylecloak/ndgrad/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "stylecloak/ndgrad/ops.hpp"

namespace stylecloak::ndgrad {

GradCheckReport grad_check(const std::function<double(const Tensor&)>& f,
                           const Tensor& analytic_grad, const Tensor& x0, double step,
                           double tol, std::size_t max_coords, std::uint64_t coord_seed) {
    if (!analytic_grad.same_shape(x0)) throw_shape_error("grad_check", analytic_grad, x0);
    const double f0 = f(x0);
    if (!std::isfinite(f0)) throw std::runtime_error("grad_check: non-finite forward value");

    std::vector<std::size_t> coords(x0.numel());
    std::iota(coords.begin(), coords.end(), 0);
    if (max_coords != 0 && max_coords < coords.size()) {
        Rng rng(coord_seed ^ 0x5eedc0de5eedc0deULL);
        for (std::size_t i = 0; i < max_coords; ++i) {
            const std::size_t j = i + rng.uniform_index(coords.size() - i);
            std::swap(coords[i], coords[j]);
        }
        coords.resize(max_coords);
    }

    GradCheckReport report;
    Tensor x = x0;
    for (std::size_t idx : coords) {
        const double saved = x[idx];
        x[idx] = saved + step;
        const double fp = f(x);
        x[idx] = saved - step;
        const double fm = f(x);
        x[idx] = saved;
        if (!std::isfinite(fp) || !std::isfinite(fm)) {
            throw std::runtime_error("grad_check: non-finite forward value during probing");
        }
        const double numeric = (fp - fm) / (2.0 * step);
        const double analytic = analytic_grad[idx];
        const double denom = std::max({1.0, std::abs(analytic), std::abs(numeric)});
        const double rel = std::abs(analytic - numeric) / denom;
        report.max_rel_err = std::max(report.max_rel_err, rel);
        ++report.coords_checked;
    }
    report.pass = report.max_rel_err <= tol;
    return report;
}

GradCheckReport grad_check_op(const DifferentiableOp& op, Rng& rng, double step, double tol,
                              std::size_t max_coords) {
    constexpr int kMaxResample = 1000;
    std::vector<Tensor> inputs;
    for (int attempt = 0;; ++attempt) {
        inputs = op.make_inputs(rng);
        if (!op.inputs_ok || op.inputs_ok(inputs)) break;
        if (attempt + 1 >= kMaxResample) {
            throw std::runtime_error("grad_check_op(" + op.name +
                                     "): could not sample inputs away from kinks");
        }
    }

    const Tensor y0 = op.forward(inputs);
    if (!y0.all_finite()) {
        throw std::runtime_error("grad_check_op(" + op.name + "): non-finite forward value");
    }
    // Random linear probe; f(x) = <w, op(x)> is scalar-valued.
    Tensor w(y0.shape());
    for (std::size_t i = 0; i < w.numel(); ++i) w[i] = rng.normal();
    const std::vector<Tensor> cotangents = op.vjp(inputs, w);
    if (cotangents.size() != inputs.size()) {
        throw std::runtime_error("grad_check_op(" + op.name + "): vjp arity mismatch");
    }

    GradCheckReport report;
    report.name = op.name;
    report.pass = true;
    for (std::size_t which = 0; which < inputs.size(); ++which) {
        auto f = [&](const Tensor& x) {
            std::vector<Tensor> probe = inputs;
            probe[which] = x;
            return dot(w, op.forward(probe));
        };
        GradCheckReport r = grad_check(f, cotangents[which], inputs[which], step, tol,
                                       max_coords, rng.next_u64());
        report.max_rel_err = std::max(report.max_rel_err, r.max_rel_err);
        report.coords_checked += r.coords_checked;
        report.pass = report.pass && r.pass;
    }
    return report;
}

}  // namespace stylecloak::ndgrad
