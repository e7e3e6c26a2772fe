#pragma once

#include <string>

#include "stylecloak/ndgrad/tensor.hpp"

namespace stylecloak::imaging {

using ndgrad::Tensor;

// 8-bit PNG. Images store round(v * 255); load maps back to v / 255, so
// save-then-load is the identity on 8-bit-quantized data.
Tensor load_png(const std::string& path);
void save_png(const std::string& path, const Tensor& img);

// Masks are single-channel PNGs holding only {0, 255}; any other value is
// rejected on load.
Tensor load_mask(const std::string& path);
void save_mask(const std::string& path, const Tensor& mask);

/// Encodes with the reference JPEG codec at the given quality factor and
/// decodes back. Evaluation-only; not differentiable.
Tensor jpeg_roundtrip(const Tensor& img, int quality);

}  // namespace stylecloak::imaging
