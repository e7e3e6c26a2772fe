#include "stylecloak/imaging/image.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "stylecloak/ndgrad/ops.hpp"

namespace stylecloak::imaging {

void validate_image(const Tensor& img) {
    if (img.rank() != 3 || (img.shape()[0] != 3 && img.shape()[0] != 1)) {
        throw ndgrad::ShapeError("image: expected 1xHxW or 3xHxW, got " + img.shape_str());
    }
}

void validate_mask(const Tensor& mask) {
    if (mask.rank() != 2) {
        throw ndgrad::ShapeError("mask: expected HxW, got " + mask.shape_str());
    }
    for (std::size_t i = 0; i < mask.numel(); ++i) {
        if (mask[i] != 0.0 && mask[i] != 1.0) {
            throw std::runtime_error("mask: value " + std::to_string(mask[i]) +
                                     " outside {0,1} at index " + std::to_string(i));
        }
    }
}

Tensor clip01(const Tensor& img) { return ndgrad::clamp(img, 0.0, 1.0); }

Tensor rgb_to_ycbcr(const Tensor& img) {
    validate_image(img);
    if (img.shape()[0] != 3) {
        throw ndgrad::ShapeError("rgb_to_ycbcr: expected 3 channels, got " + img.shape_str());
    }
    const std::size_t h = img.shape()[1], w = img.shape()[2], plane = h * w;
    Tensor out(img.shape());
    const double* r = img.data();
    const double* g = img.data() + plane;
    const double* b = img.data() + 2 * plane;
    double* y = out.data();
    double* cb = out.data() + plane;
    double* cr = out.data() + 2 * plane;
    for (std::size_t i = 0; i < plane; ++i) {
        y[i] = 0.299 * r[i] + 0.587 * g[i] + 0.114 * b[i];
        cb[i] = -0.168735891647846 * r[i] - 0.331264108352154 * g[i] + 0.5 * b[i] + 0.5;
        cr[i] = 0.5 * r[i] - 0.418687589158345 * g[i] - 0.081312410841655 * b[i] + 0.5;
    }
    return out;
}

Tensor ycbcr_to_rgb(const Tensor& ycc) {
    validate_image(ycc);
    if (ycc.shape()[0] != 3) {
        throw ndgrad::ShapeError("ycbcr_to_rgb: expected 3 channels, got " + ycc.shape_str());
    }
    const std::size_t plane = ycc.shape()[1] * ycc.shape()[2];
    Tensor out(ycc.shape());
    const double* y = ycc.data();
    const double* cb = ycc.data() + plane;
    const double* cr = ycc.data() + 2 * plane;
    double* r = out.data();
    double* g = out.data() + plane;
    double* b = out.data() + 2 * plane;
    for (std::size_t i = 0; i < plane; ++i) {
        const double u = cb[i] - 0.5, v = cr[i] - 0.5;
        r[i] = y[i] + 1.402 * v;
        g[i] = y[i] - 0.344136286201022 * u - 0.714136286201022 * v;
        b[i] = y[i] + 1.772 * u;
    }
    return out;
}

Tensor histogram_equalize(const Tensor& img) {
    validate_image(img);
    if (img.shape()[0] != 3) {
        throw ndgrad::ShapeError("histogram_equalize: expected 3 channels, got " +
                                 img.shape_str());
    }
    const std::size_t plane = img.shape()[1] * img.shape()[2];
    Tensor out(img.shape());
    for (std::size_t c = 0; c < 3; ++c) {
        const double* src = img.data() + c * plane;
        double* dst = out.data() + c * plane;
        std::array<std::size_t, 256> hist{};
        for (std::size_t i = 0; i < plane; ++i) {
            const int lvl = static_cast<int>(std::lround(std::clamp(src[i], 0.0, 1.0) * 255.0));
            hist[static_cast<std::size_t>(lvl)]++;
        }
        std::array<double, 256> cdf{};
        double acc = 0.0;
        for (std::size_t v = 0; v < 256; ++v) {
            acc += static_cast<double>(hist[v]);
            cdf[v] = acc / static_cast<double>(plane);
        }
        for (std::size_t i = 0; i < plane; ++i) {
            const int lvl = static_cast<int>(std::lround(std::clamp(src[i], 0.0, 1.0) * 255.0));
            dst[i] = cdf[static_cast<std::size_t>(lvl)];
        }
    }
    return out;
}

Tensor luminance(const Tensor& img) {
    validate_image(img);
    const std::size_t h = img.shape()[1], w = img.shape()[2], plane = h * w;
    Tensor out({1, h, w});
    if (img.shape()[0] == 1) {
        std::copy(img.data(), img.data() + plane, out.data());
        return out;
    }
    const double* r = img.data();
    const double* g = img.data() + plane;
    const double* b = img.data() + 2 * plane;
    for (std::size_t i = 0; i < plane; ++i) {
        out[i] = 0.299 * r[i] + 0.587 * g[i] + 0.114 * b[i];
    }
    return out;
}

Tensor mask_complement(const Tensor& mask) {
    validate_mask(mask);
    Tensor out(mask.shape());
    for (std::size_t i = 0; i < mask.numel(); ++i) out[i] = 1.0 - mask[i];
    return out;
}

double mask_area(const Tensor& mask) { return ndgrad::sum(mask); }

double psnr(const Tensor& a, const Tensor& b) {
    if (!a.same_shape(b)) ndgrad::throw_shape_error("psnr", a, b);
    double mse = 0.0;
    for (std::size_t i = 0; i < a.numel(); ++i) {
        const double d = a[i] - b[i];
        mse += d * d;
    }
    mse /= static_cast<double>(a.numel());
    if (mse <= 0.0) return 1e9;  // identical images
    return 10.0 * std::log10(1.0 / mse);
}

}  // namespace stylecloak::imaging
