#include "stylecloak/ndgrad/tensor.hpp"

#include <cmath>
#include <sstream>

namespace stylecloak::ndgrad {

Tensor::Tensor(std::vector<std::size_t> shape, double fill) : shape_(std::move(shape)) {
    for (std::size_t e : shape_) {
        if (e == 0) throw ShapeError("Tensor: zero extent in shape " + shape_to_string(shape_));
    }
    data_.assign(shape_numel(shape_), fill);
}

Tensor Tensor::from_data(std::vector<std::size_t> shape, std::vector<double> data) {
    if (shape_numel(shape) != data.size()) {
        throw ShapeError("Tensor::from_data: shape " + shape_to_string(shape) + " needs " +
                         std::to_string(shape_numel(shape)) + " values, got " +
                         std::to_string(data.size()));
    }
    Tensor t;
    t.shape_ = std::move(shape);
    t.data_ = std::move(data);
    return t;
}

std::size_t Tensor::extent(std::size_t axis) const {
    if (axis >= shape_.size()) {
        throw ShapeError("Tensor::extent: axis " + std::to_string(axis) + " out of range for " +
                         shape_str());
    }
    return shape_[axis];
}

bool Tensor::all_finite() const {
    for (double v : data_) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

void Tensor::fill(double v) {
    for (double& x : data_) x = v;
}

std::string Tensor::shape_str() const { return shape_to_string(shape_); }

std::size_t shape_numel(const std::vector<std::size_t>& shape) {
    std::size_t n = 1;
    for (std::size_t e : shape) n *= e;
    return shape.empty() ? 0 : n;
}

std::string shape_to_string(const std::vector<std::size_t>& shape) {
    std::ostringstream os;
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i) os << "x";
        os << shape[i];
    }
    if (shape.empty()) os << "()";
    return os.str();
}

void throw_shape_error(const std::string& op, const Tensor& a) {
    throw ShapeError(op + ": unsupported shape " + a.shape_str());
}

void throw_shape_error(const std::string& op, const Tensor& a, const Tensor& b) {
    throw ShapeError(op + ": shape mismatch " + a.shape_str() + " vs " + b.shape_str());
}

}  // namespace stylecloak::ndgrad
