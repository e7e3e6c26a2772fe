#include "stylecloak/imaging/io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <vector>

#include <jpeglib.h>

#include "stylecloak/imaging/image.hpp"

namespace stylecloak::imaging {

namespace {

std::vector<unsigned char> quantize_u8(const Tensor& img) {
    // C x H x W float -> interleaved 8-bit rows.
    const std::size_t c = img.shape()[0], h = img.shape()[1], w = img.shape()[2];
    const std::size_t plane = h * w;
    std::vector<unsigned char> buf(c * plane);
    for (std::size_t y = 0; y < h; ++y) {
        for (std::size_t x = 0; x < w; ++x) {
            for (std::size_t ch = 0; ch < c; ++ch) {
                const double v = std::clamp(img[ch * plane + y * w + x], 0.0, 1.0);
                buf[(y * w + x) * c + ch] = static_cast<unsigned char>(std::lround(v * 255.0));
            }
        }
    }
    return buf;
}

Tensor dequantize_u8(const unsigned char* buf, std::size_t c, std::size_t h, std::size_t w) {
    Tensor img({c, h, w});
    const std::size_t plane = h * w;
    for (std::size_t y = 0; y < h; ++y) {
        for (std::size_t x = 0; x < w; ++x) {
            for (std::size_t ch = 0; ch < c; ++ch) {
                img[ch * plane + y * w + x] =
                    static_cast<double>(buf[(y * w + x) * c + ch]) / 255.0;
            }
        }
    }
    return img;
}

struct JpegErrorTrap {
    jpeg_error_mgr mgr;
    std::jmp_buf jump;
    char message[JMSG_LENGTH_MAX] = {0};
};

void jpeg_error_trap(j_common_ptr cinfo) {
    auto* trap = reinterpret_cast<JpegErrorTrap*>(cinfo->err);
    (*cinfo->err->format_message)(cinfo, trap->message);
    std::longjmp(trap->jump, 1);
}

}  // namespace

Tensor load_png(const std::string& path) {
    png_image image;
    std::memset(&image, 0, sizeof(image));
    image.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_file(&image, path.c_str())) {
        throw std::runtime_error("load_png: " + path + ": " + image.message);
    }
    image.format = PNG_FORMAT_RGB;
    std::vector<unsigned char> buffer(PNG_IMAGE_SIZE(image));
    if (!png_image_finish_read(&image, nullptr, buffer.data(), 0, nullptr)) {
        const std::string msg = image.message;
        png_image_free(&image);
        throw std::runtime_error("load_png: " + path + ": " + msg);
    }
    return dequantize_u8(buffer.data(), 3, image.height, image.width);
}

void save_png(const std::string& path, const Tensor& img) {
    validate_image(img);
    const std::size_t c = img.shape()[0], h = img.shape()[1], w = img.shape()[2];
    std::vector<unsigned char> buffer = quantize_u8(img);
    png_image image;
    std::memset(&image, 0, sizeof(image));
    image.version = PNG_IMAGE_VERSION;
    image.width = static_cast<png_uint_32>(w);
    image.height = static_cast<png_uint_32>(h);
    image.format = c == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
    if (!png_image_write_to_file(&image, path.c_str(), 0, buffer.data(), 0, nullptr)) {
        throw std::runtime_error("save_png: " + path + ": " + image.message);
    }
}

Tensor load_mask(const std::string& path) {
    png_image image;
    std::memset(&image, 0, sizeof(image));
    image.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_file(&image, path.c_str())) {
        throw std::runtime_error("load_mask: " + path + ": " + image.message);
    }
    image.format = PNG_FORMAT_GRAY;
    std::vector<unsigned char> buffer(PNG_IMAGE_SIZE(image));
    if (!png_image_finish_read(&image, nullptr, buffer.data(), 0, nullptr)) {
        const std::string msg = image.message;
        png_image_free(&image);
        throw std::runtime_error("load_mask: " + path + ": " + msg);
    }
    Tensor mask({image.height, image.width});
    for (std::size_t i = 0; i < mask.numel(); ++i) {
        if (buffer[i] == 0) {
            mask[i] = 0.0;
        } else if (buffer[i] == 255) {
            mask[i] = 1.0;
        } else {
            throw std::runtime_error("load_mask: " + path + ": pixel value " +
                                     std::to_string(buffer[i]) + " is not in {0,255}");
        }
    }
    return mask;
}

void save_mask(const std::string& path, const Tensor& mask) {
    validate_mask(mask);
    const std::size_t h = mask.shape()[0], w = mask.shape()[1];
    std::vector<unsigned char> buffer(h * w);
    for (std::size_t i = 0; i < h * w; ++i) {
        buffer[i] = mask[i] == 1.0 ? 255 : 0;
    }
    png_image image;
    std::memset(&image, 0, sizeof(image));
    image.version = PNG_IMAGE_VERSION;
    image.width = static_cast<png_uint_32>(w);
    image.height = static_cast<png_uint_32>(h);
    image.format = PNG_FORMAT_GRAY;
    if (!png_image_write_to_file(&image, path.c_str(), 0, buffer.data(), 0, nullptr)) {
        throw std::runtime_error("save_mask: " + path + ": " + image.message);
    }
}

Tensor jpeg_roundtrip(const Tensor& img, int quality) {
    validate_image(img);
    if (img.shape()[0] != 3) {
        throw ndgrad::ShapeError("jpeg_roundtrip: expected 3 channels, got " + img.shape_str());
    }
    if (quality < 1 || quality > 100) {
        throw std::invalid_argument("jpeg_roundtrip: quality " + std::to_string(quality) +
                                    " outside [1,100]");
    }
    const std::size_t h = img.shape()[1], w = img.shape()[2];
    std::vector<unsigned char> rgb = quantize_u8(img);

    auto fail = [&](const char* stage, const char* msg) {
        throw std::runtime_error(std::string("jpeg_roundtrip: ") + stage + " failed at qf " +
                                 std::to_string(quality) + " on " + std::to_string(w) + "x" +
                                 std::to_string(h) + ": " + msg);
    };

    // Encode.
    unsigned char* encoded = nullptr;
    unsigned long encoded_size = 0;
    {
        jpeg_compress_struct cinfo;
        JpegErrorTrap trap;
        cinfo.err = jpeg_std_error(&trap.mgr);
        trap.mgr.error_exit = jpeg_error_trap;
        if (setjmp(trap.jump)) {
            jpeg_destroy_compress(&cinfo);
            if (encoded) free(encoded);
            fail("encode", trap.message);
        }
        jpeg_create_compress(&cinfo);
        jpeg_mem_dest(&cinfo, &encoded, &encoded_size);
        cinfo.image_width = static_cast<JDIMENSION>(w);
        cinfo.image_height = static_cast<JDIMENSION>(h);
        cinfo.input_components = 3;
        cinfo.in_color_space = JCS_RGB;
        jpeg_set_defaults(&cinfo);
        jpeg_set_quality(&cinfo, quality, TRUE);
        jpeg_start_compress(&cinfo, TRUE);
        while (cinfo.next_scanline < cinfo.image_height) {
            JSAMPROW row = rgb.data() + cinfo.next_scanline * w * 3;
            jpeg_write_scanlines(&cinfo, &row, 1);
        }
        jpeg_finish_compress(&cinfo);
        jpeg_destroy_compress(&cinfo);
    }

    // Decode.
    std::vector<unsigned char> decoded(h * w * 3);
    {
        jpeg_decompress_struct dinfo;
        JpegErrorTrap trap;
        dinfo.err = jpeg_std_error(&trap.mgr);
        trap.mgr.error_exit = jpeg_error_trap;
        if (setjmp(trap.jump)) {
            jpeg_destroy_decompress(&dinfo);
            free(encoded);
            fail("decode", trap.message);
        }
        jpeg_create_decompress(&dinfo);
        jpeg_mem_src(&dinfo, encoded, encoded_size);
        jpeg_read_header(&dinfo, TRUE);
        dinfo.out_color_space = JCS_RGB;
        jpeg_start_decompress(&dinfo);
        if (dinfo.output_width != w || dinfo.output_height != h) {
            jpeg_destroy_decompress(&dinfo);
            free(encoded);
            fail("decode", "unexpected output size");
        }
        while (dinfo.output_scanline < dinfo.output_height) {
            JSAMPROW row = decoded.data() + dinfo.output_scanline * w * 3;
            jpeg_read_scanlines(&dinfo, &row, 1);
        }
        jpeg_finish_decompress(&dinfo);
        jpeg_destroy_decompress(&dinfo);
    }
    free(encoded);
    return dequantize_u8(decoded.data(), 3, h, w);
}

}  // namespace stylecloak::imaging
