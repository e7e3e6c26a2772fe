#include <cmath>
#include <cstdio>
#include <fstream>

#include "doctest.h"
#include "stylecloak/imaging/image.hpp"
#include "stylecloak/imaging/io.hpp"
#include "stylecloak/ndgrad/ops.hpp"
#include "stylecloak/ndgrad/rng.hpp"

using namespace stylecloak;
using imaging::Tensor;

namespace {

Tensor random_image(std::uint64_t seed, std::size_t h = 24, std::size_t w = 32) {
    ndgrad::Rng rng(seed);
    Tensor img({3, h, w});
    for (std::size_t i = 0; i < img.numel(); ++i) img[i] = rng.uniform();
    return img;
}

Tensor quantize8(const Tensor& img) {
    Tensor q(img.shape());
    for (std::size_t i = 0; i < img.numel(); ++i) {
        q[i] = std::round(img[i] * 255.0) / 255.0;
    }
    return q;
}

}  // namespace

TEST_CASE("ycbcr of white and black") {
    Tensor white({3, 2, 2}, 1.0);
    Tensor ycc = imaging::rgb_to_ycbcr(white);
    CHECK(ycc.at3(0, 0, 0) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(ycc.at3(1, 0, 0) == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(ycc.at3(2, 0, 0) == doctest::Approx(0.5).epsilon(1e-9));
    Tensor black({3, 2, 2}, 0.0);
    ycc = imaging::rgb_to_ycbcr(black);
    CHECK(ycc.at3(0, 0, 0) == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(ycc.at3(1, 0, 0) == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(ycc.at3(2, 0, 0) == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("ycbcr round trip within 1e-6") {
    Tensor img = random_image(1);
    Tensor back = imaging::ycbcr_to_rgb(imaging::rgb_to_ycbcr(img));
    double max_err = 0.0;
    for (std::size_t i = 0; i < img.numel(); ++i) {
        max_err = std::max(max_err, std::abs(back[i] - img[i]));
    }
    CHECK(max_err <= 1e-6);
}

TEST_CASE("ycbcr rejects wrong channel count") {
    Tensor gray({1, 4, 4}, 0.5);
    CHECK_THROWS(imaging::rgb_to_ycbcr(gray));
}

TEST_CASE("png round trip is bit exact on 8-bit data") {
    Tensor img = quantize8(random_image(2));
    const std::string path = "test_io_roundtrip.png";
    imaging::save_png(path, img);
    Tensor back = imaging::load_png(path);
    REQUIRE(back.shape() == img.shape());
    for (std::size_t i = 0; i < img.numel(); ++i) CHECK(back[i] == img[i]);
    std::remove(path.c_str());
}

TEST_CASE("mask io rejects non-binary values") {
    const std::string path = "test_io_mask.png";
    // Write a grayscale PNG with an out-of-range value through the image path.
    Tensor gray({1, 2, 2});
    gray[0] = 0.0;
    gray[1] = 1.0;
    gray[2] = 17.0 / 255.0;
    gray[3] = 1.0;
    imaging::save_png(path, gray);
    CHECK_THROWS_WITH_AS(imaging::load_mask(path), doctest::Contains("17"), std::runtime_error);
    std::remove(path.c_str());
}

TEST_CASE("mask round trip and algebra") {
    Tensor mask({8, 8}, 0.0);
    for (std::size_t y = 2; y < 6; ++y) {
        for (std::size_t x = 3; x < 7; ++x) mask.at2(y, x) = 1.0;
    }
    const std::string path = "test_io_mask_rt.png";
    imaging::save_mask(path, mask);
    Tensor back = imaging::load_mask(path);
    REQUIRE(back.shape() == mask.shape());
    for (std::size_t i = 0; i < mask.numel(); ++i) CHECK(back[i] == mask[i]);
    std::remove(path.c_str());

    Tensor comp = imaging::mask_complement(mask);
    for (std::size_t i = 0; i < mask.numel(); ++i) {
        CHECK(mask[i] + comp[i] == 1.0);
        CHECK(mask[i] * comp[i] == 0.0);
    }
}

TEST_CASE("zero-sized file gives structured io error") {
    const std::string path = "test_io_empty.png";
    std::ofstream(path).close();
    CHECK_THROWS_AS(imaging::load_png(path), std::runtime_error);
    CHECK_THROWS_AS(imaging::load_mask(path), std::runtime_error);
    std::remove(path.c_str());
}

TEST_CASE("jpeg qf 100 keeps smooth gradient above 40 dB") {
    Tensor img({3, 32, 32});
    for (std::size_t c = 0; c < 3; ++c) {
        for (std::size_t y = 0; y < 32; ++y) {
            for (std::size_t x = 0; x < 32; ++x) {
                img.at3(c, y, x) = (static_cast<double>(x) + static_cast<double>(y)) / 62.0;
            }
        }
    }
    Tensor out = imaging::jpeg_roundtrip(img, 100);
    CHECK(imaging::psnr(img, out) >= 40.0);
}

TEST_CASE("jpeg recompression at qf 10 changes less the second time") {
    Tensor img = random_image(3, 32, 32);
    Tensor once = imaging::jpeg_roundtrip(img, 10);
    Tensor twice = imaging::jpeg_roundtrip(once, 10);
    auto mad = [](const Tensor& a, const Tensor& b) {
        double acc = 0.0;
        for (std::size_t i = 0; i < a.numel(); ++i) acc += std::abs(a[i] - b[i]);
        return acc / static_cast<double>(a.numel());
    };
    CHECK(mad(once, img) > mad(twice, once));
}

TEST_CASE("jpeg constant image stays near constant at any qf") {
    Tensor img({3, 32, 32}, 0.42);
    for (int qf : {5, 20, 50, 90}) {
        Tensor out = imaging::jpeg_roundtrip(img, qf);
        double max_dev = 0.0;
        for (std::size_t i = 0; i < out.numel(); ++i) {
            max_dev = std::max(max_dev, std::abs(out[i] - img[i]));
        }
        CHECK(max_dev <= 2.0 / 255.0);
    }
}

TEST_CASE("jpeg rejects out-of-range quality") {
    Tensor img({3, 16, 16}, 0.5);
    CHECK_THROWS_AS(imaging::jpeg_roundtrip(img, 0), std::invalid_argument);
    CHECK_THROWS_AS(imaging::jpeg_roundtrip(img, 101), std::invalid_argument);
}

TEST_CASE("histogram equalization fixed points") {
    // Uniform-histogram image: every level exactly once.
    Tensor img({3, 16, 16});
    for (std::size_t c = 0; c < 3; ++c) {
        for (std::size_t i = 0; i < 256; ++i) {
            img[c * 256 + i] = static_cast<double>(i) / 255.0;
        }
    }
    Tensor eq = imaging::histogram_equalize(img);
    for (std::size_t i = 0; i < img.numel(); ++i) {
        CHECK(std::abs(eq[i] - img[i]) <= 1.0 / 255.0);
    }
    // Constant image maps to the top of the cdf, staying constant.
    Tensor flat({3, 8, 8}, 0.3);
    Tensor eq2 = imaging::histogram_equalize(flat);
    for (std::size_t i = 1; i < eq2.numel(); ++i) CHECK(eq2[i] == eq2[0]);
}

TEST_CASE("histogram equalization pushes two-level image to cdf values") {
    // 25% at 0.2, 75% at 0.8: cdf(0.2)=0.25, cdf(0.8)=1.0.
    Tensor img({3, 8, 8}, 0.8);
    for (std::size_t c = 0; c < 3; ++c) {
        for (std::size_t i = 0; i < 16; ++i) img[c * 64 + i] = 0.2;
    }
    Tensor eq = imaging::histogram_equalize(img);
    CHECK(eq[0] == doctest::Approx(0.25).epsilon(1e-9));
    CHECK(eq[63] == doctest::Approx(1.0).epsilon(1e-9));
    // Wider spread than the input's 0.6.
    CHECK(eq[63] - eq[0] > 0.6);
}
