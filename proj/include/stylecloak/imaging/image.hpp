#pragma once

#include "stylecloak/ndgrad/tensor.hpp"

// Images are rank-3 tensors in C x H x W layout with 3 (RGB) or 1 channel and
// values in [0,1]. Binary masks are rank-2 H x W tensors with values in {0,1}.
namespace stylecloak::imaging {

using ndgrad::Tensor;

void validate_image(const Tensor& img);
void validate_mask(const Tensor& mask);

Tensor clip01(const Tensor& img);

/// BT.601 full-range transform; chroma channels centered at 0.5.
Tensor rgb_to_ycbcr(const Tensor& img);
Tensor ycbcr_to_rgb(const Tensor& ycc);

/// Per-channel cumulative-histogram remap over 256 bins; output in [0,1].
Tensor histogram_equalize(const Tensor& img);

/// Rec.601 luma of an RGB image (1 x H x W result).
Tensor luminance(const Tensor& img);

Tensor mask_complement(const Tensor& mask);
double mask_area(const Tensor& mask);

double psnr(const Tensor& a, const Tensor& b);

}  // namespace stylecloak::imaging
