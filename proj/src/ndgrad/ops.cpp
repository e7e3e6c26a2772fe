#include "stylecloak/ndgrad/ops.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>

namespace stylecloak::ndgrad {

namespace {

void require_same_shape(const char* op, const Tensor& a, const Tensor& b) {
    if (!a.same_shape(b)) throw_shape_error(op, a, b);
}

void require_rank(const char* op, const Tensor& a, std::size_t rank) {
    if (a.rank() != rank) {
        throw ShapeError(std::string(op) + ": expected rank " + std::to_string(rank) +
                         ", got shape " + a.shape_str());
    }
}

// outer * extent(axis) * inner decomposition for axis-wise ops.
struct AxisSplit {
    std::size_t outer = 1, n = 1, inner = 1;
};

AxisSplit split_axis(const char* op, const Tensor& a, std::size_t axis) {
    if (axis >= a.rank()) {
        throw ShapeError(std::string(op) + ": axis " + std::to_string(axis) +
                         " out of range for shape " + a.shape_str());
    }
    AxisSplit s;
    for (std::size_t i = 0; i < axis; ++i) s.outer *= a.shape()[i];
    s.n = a.shape()[axis];
    for (std::size_t i = axis + 1; i < a.rank(); ++i) s.inner *= a.shape()[i];
    return s;
}

}  // namespace

// ---------------- elementwise binary ----------------

Tensor add(const Tensor& a, const Tensor& b) {
    require_same_shape("add", a, b);
    Tensor y(a.shape());
    for (std::size_t i = 0; i < a.numel(); ++i) y[i] = a[i] + b[i];
    return y;
}

Tensor sub(const Tensor& a, const Tensor& b) {
    require_same_shape("sub", a, b);
    Tensor y(a.shape());
    for (std::size_t i = 0; i < a.numel(); ++i) y[i] = a[i] - b[i];
    return y;
}

Tensor mul(const Tensor& a, const Tensor& b) {
    require_same_shape("mul", a, b);
    Tensor y(a.shape());
    for (std::size_t i = 0; i < a.numel(); ++i) y[i] = a[i] * b[i];
    return y;
}

Tensor div(const Tensor& a, const Tensor& b) {
    require_same_shape("div", a, b);
    Tensor y(a.shape());
    for (std::size_t i = 0; i < a.numel(); ++i) {
        y[i] = a[i] / b[i];
        if (!std::isfinite(y[i])) {
            throw std::runtime_error("div: non-finite result at index " + std::to_string(i) +
                                     " (denominator " + std::to_string(b[i]) + ")");
        }
    }
    return y;
}

std::pair<Tensor, Tensor> mul_vjp(const Tensor& a, const Tensor& b, const Tensor& gy) {
    require_same_shape("mul_vjp", a, gy);
    return {mul(gy, b), mul(gy, a)};
}

std::pair<Tensor, Tensor> div_vjp(const Tensor& a, const Tensor& b, const Tensor& gy) {
    require_same_shape("div_vjp", a, gy);
    Tensor ga(a.shape());
    Tensor gb(a.shape());
    for (std::size_t i = 0; i < a.numel(); ++i) {
        ga[i] = gy[i] / b[i];
        gb[i] = -gy[i] * a[i] / (b[i] * b[i]);
    }
    return {std::move(ga), std::move(gb)};
}

// ---------------- scalar ops ----------------

Tensor add_scalar(const Tensor& a, double s) {
    Tensor y(a.shape());
    for (std::size_t i = 0; i < a.numel(); ++i) y[i] = a[i] + s;
    return y;
}

Tensor mul_scalar(const Tensor& a, double s) {
    Tensor y(a.shape());
    for (std::size_t i = 0; i < a.numel(); ++i) y[i] = a[i] * s;
    return y;
}

Tensor pow_scalar(const Tensor& a, double p) {
    Tensor y(a.shape());
    for (std::size_t i = 0; i < a.numel(); ++i) {
        y[i] = std::pow(a[i], p);
        if (!std::isfinite(y[i])) {
            throw std::runtime_error("pow_scalar: non-finite result for base " +
                                     std::to_string(a[i]) + ", exponent " + std::to_string(p));
        }
    }
    return y;
}

Tensor pow_scalar_vjp(const Tensor& a, double p, const Tensor& gy) {
    require_same_shape("pow_scalar_vjp", a, gy);
    Tensor gx(a.shape());
    for (std::size_t i = 0; i < a.numel(); ++i) gx[i] = gy[i] * p * std::pow(a[i], p - 1.0);
    return gx;
}

// ---------------- elementwise unary ----------------

Tensor exp(const Tensor& a) {
    Tensor y(a.shape());
    for (std::size_t i = 0; i < a.numel(); ++i) {
        y[i] = std::exp(a[i]);
        if (!std::isfinite(y[i])) {
            throw std::runtime_error("exp: overflow for input " + std::to_string(a[i]));
        }
    }
    return y;
}

Tensor log(const Tensor& a) {
    Tensor y(a.shape());
    for (std::size_t i = 0; i < a.numel(); ++i) {
        if (!(a[i] > 0.0)) {
            throw std::runtime_error("log: non-positive input " + std::to_string(a[i]));
        }
        y[i] = std::log(a[i]);
    }
    return y;
}

Tensor abs(const Tensor& a) {
    Tensor y(a.shape());
    for (std::size_t i = 0; i < a.numel(); ++i) y[i] = std::abs(a[i]);
    return y;
}

Tensor relu(const Tensor& a) {
    Tensor y(a.shape());
    for (std::size_t i = 0; i < a.numel(); ++i) y[i] = a[i] > 0.0 ? a[i] : 0.0;
    return y;
}

Tensor sigmoid(const Tensor& a) {
    Tensor y(a.shape());
    for (std::size_t i = 0; i < a.numel(); ++i) {
        const double v = a[i];
        y[i] = v >= 0.0 ? 1.0 / (1.0 + std::exp(-v)) : std::exp(v) / (1.0 + std::exp(v));
    }
    return y;
}

Tensor clamp(const Tensor& a, double lo, double hi) {
    Tensor y(a.shape());
    for (std::size_t i = 0; i < a.numel(); ++i) y[i] = std::min(hi, std::max(lo, a[i]));
    return y;
}

Tensor exp_vjp(const Tensor& y, const Tensor& gy) { return mul(gy, y); }

Tensor log_vjp(const Tensor& a, const Tensor& gy) {
    Tensor gx(a.shape());
    for (std::size_t i = 0; i < a.numel(); ++i) gx[i] = gy[i] / a[i];
    return gx;
}

Tensor abs_vjp(const Tensor& a, const Tensor& gy) {
    Tensor gx(a.shape());
    for (std::size_t i = 0; i < a.numel(); ++i) {
        gx[i] = a[i] > 0.0 ? gy[i] : (a[i] < 0.0 ? -gy[i] : 0.0);
    }
    return gx;
}

Tensor relu_vjp(const Tensor& a, const Tensor& gy) {
    Tensor gx(a.shape());
    for (std::size_t i = 0; i < a.numel(); ++i) gx[i] = a[i] > 0.0 ? gy[i] : 0.0;
    return gx;
}

Tensor sigmoid_vjp(const Tensor& y, const Tensor& gy) {
    Tensor gx(y.shape());
    for (std::size_t i = 0; i < y.numel(); ++i) gx[i] = gy[i] * y[i] * (1.0 - y[i]);
    return gx;
}

Tensor clamp_vjp(const Tensor& a, double lo, double hi, const Tensor& gy) {
    Tensor gx(a.shape());
    for (std::size_t i = 0; i < a.numel(); ++i) {
        gx[i] = (a[i] >= lo && a[i] <= hi) ? gy[i] : 0.0;
    }
    return gx;
}

// ---------------- softmax ----------------

Tensor softmax(const Tensor& a, std::size_t axis) {
    const AxisSplit s = split_axis("softmax", a, axis);
    Tensor y(a.shape());
    for (std::size_t o = 0; o < s.outer; ++o) {
        for (std::size_t in = 0; in < s.inner; ++in) {
            const std::size_t base = o * s.n * s.inner + in;
            double mx = -1e300;
            for (std::size_t j = 0; j < s.n; ++j) mx = std::max(mx, a[base + j * s.inner]);
            double denom = 0.0;
            for (std::size_t j = 0; j < s.n; ++j) {
                const double e = std::exp(a[base + j * s.inner] - mx);
                y[base + j * s.inner] = e;
                denom += e;
            }
            for (std::size_t j = 0; j < s.n; ++j) y[base + j * s.inner] /= denom;
        }
    }
    return y;
}

Tensor softmax_vjp(const Tensor& y, std::size_t axis, const Tensor& gy) {
    require_same_shape("softmax_vjp", y, gy);
    const AxisSplit s = split_axis("softmax_vjp", y, axis);
    Tensor gx(y.shape());
    for (std::size_t o = 0; o < s.outer; ++o) {
        for (std::size_t in = 0; in < s.inner; ++in) {
            const std::size_t base = o * s.n * s.inner + in;
            double dotv = 0.0;
            for (std::size_t j = 0; j < s.n; ++j) {
                dotv += gy[base + j * s.inner] * y[base + j * s.inner];
            }
            for (std::size_t j = 0; j < s.n; ++j) {
                const std::size_t idx = base + j * s.inner;
                gx[idx] = y[idx] * (gy[idx] - dotv);
            }
        }
    }
    return gx;
}

// ---------------- matmul ----------------

Tensor matmul(const Tensor& a, const Tensor& b) {
    require_rank("matmul", a, 2);
    require_rank("matmul", b, 2);
    if (a.shape()[1] != b.shape()[0]) throw_shape_error("matmul", a, b);
    const std::size_t m = a.shape()[0], k = a.shape()[1], n = b.shape()[1];
    Tensor y({m, n});
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t p = 0; p < k; ++p) {
            const double av = a[i * k + p];
            const double* brow = b.data() + p * n;
            double* yrow = y.data() + i * n;
            for (std::size_t j = 0; j < n; ++j) yrow[j] += av * brow[j];
        }
    }
    return y;
}

std::pair<Tensor, Tensor> matmul_vjp(const Tensor& a, const Tensor& b, const Tensor& gy) {
    const std::size_t m = a.shape()[0], k = a.shape()[1], n = b.shape()[1];
    if (gy.rank() != 2 || gy.shape()[0] != m || gy.shape()[1] != n) {
        throw_shape_error("matmul_vjp", a, gy);
    }
    Tensor ga({m, k});
    Tensor gb({k, n});
    // ga = gy * b^T
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double g = gy[i * n + j];
            const double* brow = b.data() + j;  // b[p][j] strided
            for (std::size_t p = 0; p < k; ++p) ga[i * k + p] += g * brow[p * n];
        }
    }
    // gb = a^T * gy
    for (std::size_t p = 0; p < k; ++p) {
        for (std::size_t i = 0; i < m; ++i) {
            const double av = a[i * k + p];
            const double* grow = gy.data() + i * n;
            double* gbrow = gb.data() + p * n;
            for (std::size_t j = 0; j < n; ++j) gbrow[j] += av * grow[j];
        }
    }
    return {std::move(ga), std::move(gb)};
}

// ---------------- conv2d ----------------

namespace {

struct ConvDims {
    std::size_t cin, h, w, cout, kh, kw, ho, wo;
};

ConvDims conv_dims(const char* op, const Tensor& x, const Tensor& k, std::size_t stride,
                   std::size_t pad) {
    require_rank(op, x, 3);
    require_rank(op, k, 4);
    if (k.shape()[1] != x.shape()[0]) throw_shape_error(op, x, k);
    if (stride == 0) throw std::invalid_argument(std::string(op) + ": stride must be positive");
    ConvDims d{};
    d.cin = x.shape()[0];
    d.h = x.shape()[1];
    d.w = x.shape()[2];
    d.cout = k.shape()[0];
    d.kh = k.shape()[2];
    d.kw = k.shape()[3];
    if (d.h + 2 * pad < d.kh || d.w + 2 * pad < d.kw) throw_shape_error(op, x, k);
    d.ho = (d.h + 2 * pad - d.kh) / stride + 1;
    d.wo = (d.w + 2 * pad - d.kw) / stride + 1;
    return d;
}

}  // namespace

Tensor conv2d(const Tensor& x, const Tensor& k, std::size_t stride, std::size_t pad) {
    return conv2d_bias(x, k, Tensor(), stride, pad);
}

Tensor conv2d_bias(const Tensor& x, const Tensor& k, const Tensor& bias, std::size_t stride,
                   std::size_t pad) {
    const ConvDims d = conv_dims("conv2d", x, k, stride, pad);
    if (!bias.empty() && (bias.rank() != 1 || bias.shape()[0] != d.cout)) {
        throw_shape_error("conv2d: bias", bias, k);
    }
    Tensor y({d.cout, d.ho, d.wo});
    const double* xp = x.data();
    const double* kp = k.data();
    double* yp = y.data();
    const std::int64_t ip = static_cast<std::int64_t>(pad);
#pragma omp parallel for schedule(static)
    for (std::int64_t co = 0; co < static_cast<std::int64_t>(d.cout); ++co) {
        const double* kco = kp + co * d.cin * d.kh * d.kw;
        const double b = bias.empty() ? 0.0 : bias[static_cast<std::size_t>(co)];
        for (std::size_t oy = 0; oy < d.ho; ++oy) {
            const std::int64_t iy0 = static_cast<std::int64_t>(oy * stride) - ip;
            const std::size_t ky_lo = iy0 < 0 ? static_cast<std::size_t>(-iy0) : 0;
            const std::size_t ky_hi =
                std::min<std::int64_t>(d.kh, static_cast<std::int64_t>(d.h) - iy0);
            for (std::size_t ox = 0; ox < d.wo; ++ox) {
                const std::int64_t ix0 = static_cast<std::int64_t>(ox * stride) - ip;
                const std::size_t kx_lo = ix0 < 0 ? static_cast<std::size_t>(-ix0) : 0;
                const std::size_t kx_hi =
                    std::min<std::int64_t>(d.kw, static_cast<std::int64_t>(d.w) - ix0);
                double acc = b;
                for (std::size_t ci = 0; ci < d.cin; ++ci) {
                    const double* xci = xp + ci * d.h * d.w;
                    const double* kci = kco + ci * d.kh * d.kw;
                    for (std::size_t ky = ky_lo; ky < ky_hi; ++ky) {
                        const double* xrow = xci + (iy0 + ky) * d.w + ix0;
                        const double* krow = kci + ky * d.kw;
                        for (std::size_t kx = kx_lo; kx < kx_hi; ++kx) {
                            acc += xrow[kx] * krow[kx];
                        }
                    }
                }
                yp[(co * d.ho + oy) * d.wo + ox] = acc;
            }
        }
    }
    return y;
}

Tensor conv2d_vjp_input(const Tensor& x, const Tensor& k, std::size_t stride, std::size_t pad,
                        const Tensor& gy) {
    const ConvDims d = conv_dims("conv2d_vjp_input", x, k, stride, pad);
    if (gy.rank() != 3 || gy.shape()[0] != d.cout || gy.shape()[1] != d.ho ||
        gy.shape()[2] != d.wo) {
        throw_shape_error("conv2d_vjp_input: cotangent", gy, k);
    }
    Tensor gx(x.shape());
    const double* gp = gy.data();
    const double* kp = k.data();
    double* gxp = gx.data();
    const std::int64_t ip = static_cast<std::int64_t>(pad);
#pragma omp parallel for schedule(static)
    for (std::int64_t ci = 0; ci < static_cast<std::int64_t>(d.cin); ++ci) {
        double* gxci = gxp + ci * d.h * d.w;
        for (std::size_t co = 0; co < d.cout; ++co) {
            const double* kci = kp + (co * d.cin + ci) * d.kh * d.kw;
            const double* gco = gp + co * d.ho * d.wo;
            for (std::size_t oy = 0; oy < d.ho; ++oy) {
                const std::int64_t iy0 = static_cast<std::int64_t>(oy * stride) - ip;
                const std::size_t ky_lo = iy0 < 0 ? static_cast<std::size_t>(-iy0) : 0;
                const std::size_t ky_hi =
                    std::min<std::int64_t>(d.kh, static_cast<std::int64_t>(d.h) - iy0);
                for (std::size_t ox = 0; ox < d.wo; ++ox) {
                    const std::int64_t ix0 = static_cast<std::int64_t>(ox * stride) - ip;
                    const std::size_t kx_lo = ix0 < 0 ? static_cast<std::size_t>(-ix0) : 0;
                    const std::size_t kx_hi =
                        std::min<std::int64_t>(d.kw, static_cast<std::int64_t>(d.w) - ix0);
                    const double g = gco[oy * d.wo + ox];
                    if (g == 0.0) continue;
                    for (std::size_t ky = ky_lo; ky < ky_hi; ++ky) {
                        double* gxrow = gxci + (iy0 + ky) * d.w + ix0;
                        const double* krow = kci + ky * d.kw;
                        for (std::size_t kx = kx_lo; kx < kx_hi; ++kx) {
                            gxrow[kx] += g * krow[kx];
                        }
                    }
                }
            }
        }
    }
    return gx;
}

std::pair<Tensor, Tensor> conv2d_vjp(const Tensor& x, const Tensor& k, std::size_t stride,
                                     std::size_t pad, const Tensor& gy) {
    const ConvDims d = conv_dims("conv2d_vjp", x, k, stride, pad);
    Tensor gx = conv2d_vjp_input(x, k, stride, pad, gy);
    Tensor gk(k.shape());
    const double* xp = x.data();
    const double* gp = gy.data();
    double* gkp = gk.data();
    const std::int64_t ip = static_cast<std::int64_t>(pad);
#pragma omp parallel for schedule(static)
    for (std::int64_t co = 0; co < static_cast<std::int64_t>(d.cout); ++co) {
        const double* gco = gp + co * d.ho * d.wo;
        double* gkco = gkp + co * d.cin * d.kh * d.kw;
        for (std::size_t oy = 0; oy < d.ho; ++oy) {
            const std::int64_t iy0 = static_cast<std::int64_t>(oy * stride) - ip;
            const std::size_t ky_lo = iy0 < 0 ? static_cast<std::size_t>(-iy0) : 0;
            const std::size_t ky_hi =
                std::min<std::int64_t>(d.kh, static_cast<std::int64_t>(d.h) - iy0);
            for (std::size_t ox = 0; ox < d.wo; ++ox) {
                const std::int64_t ix0 = static_cast<std::int64_t>(ox * stride) - ip;
                const std::size_t kx_lo = ix0 < 0 ? static_cast<std::size_t>(-ix0) : 0;
                const std::size_t kx_hi =
                    std::min<std::int64_t>(d.kw, static_cast<std::int64_t>(d.w) - ix0);
                const double g = gco[oy * d.wo + ox];
                if (g == 0.0) continue;
                for (std::size_t ci = 0; ci < d.cin; ++ci) {
                    const double* xci = xp + ci * d.h * d.w;
                    double* gkci = gkco + ci * d.kh * d.kw;
                    for (std::size_t ky = ky_lo; ky < ky_hi; ++ky) {
                        const double* xrow = xci + (iy0 + ky) * d.w + ix0;
                        double* gkrow = gkci + ky * d.kw;
                        for (std::size_t kx = kx_lo; kx < kx_hi; ++kx) {
                            gkrow[kx] += g * xrow[kx];
                        }
                    }
                }
            }
        }
    }
    return {std::move(gx), std::move(gk)};
}

Tensor conv2d_bias_vjp(const Tensor& gy) {
    require_rank("conv2d_bias_vjp", gy, 3);
    const std::size_t cout = gy.shape()[0], plane = gy.shape()[1] * gy.shape()[2];
    Tensor gb({cout});
    for (std::size_t co = 0; co < cout; ++co) {
        double acc = 0.0;
        const double* row = gy.data() + co * plane;
        for (std::size_t i = 0; i < plane; ++i) acc += row[i];
        gb[co] = acc;
    }
    return gb;
}

// ---------------- pooling ----------------

Tensor avg_pool(const Tensor& x, std::size_t k) {
    require_rank("avg_pool", x, 3);
    if (k == 0 || x.shape()[1] < k || x.shape()[2] < k) throw_shape_error("avg_pool", x);
    const std::size_t c = x.shape()[0], h = x.shape()[1], w = x.shape()[2];
    const std::size_t ho = h / k, wo = w / k;
    Tensor y({c, ho, wo});
    const double inv = 1.0 / static_cast<double>(k * k);
    for (std::size_t ci = 0; ci < c; ++ci) {
        for (std::size_t oy = 0; oy < ho; ++oy) {
            for (std::size_t ox = 0; ox < wo; ++ox) {
                double acc = 0.0;
                for (std::size_t dy = 0; dy < k; ++dy) {
                    const double* row = x.data() + (ci * h + oy * k + dy) * w + ox * k;
                    for (std::size_t dx = 0; dx < k; ++dx) acc += row[dx];
                }
                y.at3(ci, oy, ox) = acc * inv;
            }
        }
    }
    return y;
}

Tensor avg_pool_vjp(const std::vector<std::size_t>& in_shape, std::size_t k, const Tensor& gy) {
    Tensor gx(in_shape);
    const std::size_t c = in_shape[0], h = in_shape[1], w = in_shape[2];
    const std::size_t ho = gy.shape()[1], wo = gy.shape()[2];
    const double inv = 1.0 / static_cast<double>(k * k);
    for (std::size_t ci = 0; ci < c; ++ci) {
        for (std::size_t oy = 0; oy < ho; ++oy) {
            for (std::size_t ox = 0; ox < wo; ++ox) {
                const double g = gy.at3(ci, oy, ox) * inv;
                for (std::size_t dy = 0; dy < k; ++dy) {
                    double* row = gx.data() + (ci * h + oy * k + dy) * w + ox * k;
                    for (std::size_t dx = 0; dx < k; ++dx) row[dx] += g;
                }
            }
        }
    }
    return gx;
}

Tensor max_pool(const Tensor& x, std::size_t k) {
    require_rank("max_pool", x, 3);
    if (k == 0 || x.shape()[1] < k || x.shape()[2] < k) throw_shape_error("max_pool", x);
    const std::size_t c = x.shape()[0], h = x.shape()[1], w = x.shape()[2];
    const std::size_t ho = h / k, wo = w / k;
    Tensor y({c, ho, wo});
    for (std::size_t ci = 0; ci < c; ++ci) {
        for (std::size_t oy = 0; oy < ho; ++oy) {
            for (std::size_t ox = 0; ox < wo; ++ox) {
                double best = -1e300;
                for (std::size_t dy = 0; dy < k; ++dy) {
                    for (std::size_t dx = 0; dx < k; ++dx) {
                        best = std::max(best, x.at3(ci, oy * k + dy, ox * k + dx));
                    }
                }
                y.at3(ci, oy, ox) = best;
            }
        }
    }
    return y;
}

Tensor max_pool_vjp(const Tensor& x, std::size_t k, const Tensor& gy) {
    const std::size_t c = x.shape()[0];
    const std::size_t ho = gy.shape()[1], wo = gy.shape()[2];
    Tensor gx(x.shape());
    for (std::size_t ci = 0; ci < c; ++ci) {
        for (std::size_t oy = 0; oy < ho; ++oy) {
            for (std::size_t ox = 0; ox < wo; ++ox) {
                double best = -1e300;
                std::size_t by = 0, bx = 0;
                for (std::size_t dy = 0; dy < k; ++dy) {
                    for (std::size_t dx = 0; dx < k; ++dx) {
                        const double v = x.at3(ci, oy * k + dy, ox * k + dx);
                        if (v > best) {  // strict: first occurrence wins ties
                            best = v;
                            by = oy * k + dy;
                            bx = ox * k + dx;
                        }
                    }
                }
                gx.at3(ci, by, bx) += gy.at3(ci, oy, ox);
            }
        }
    }
    return gx;
}

// ---------------- bilinear resize ----------------

namespace {

// Half-pixel source coordinate with edge clamp; returns floor index and blend.
inline void resize_coord(std::size_t out_i, std::size_t in_n, std::size_t out_n, std::size_t& i0,
                         std::size_t& i1, double& t) {
    const double scale = static_cast<double>(in_n) / static_cast<double>(out_n);
    double src = (static_cast<double>(out_i) + 0.5) * scale - 0.5;
    if (src < 0.0) src = 0.0;
    const double max_i = static_cast<double>(in_n - 1);
    if (src > max_i) src = max_i;
    i0 = static_cast<std::size_t>(src);
    if (i0 >= in_n - 1) {
        i0 = in_n - 1;
        i1 = i0;
        t = 0.0;
    } else {
        i1 = i0 + 1;
        t = src - static_cast<double>(i0);
    }
}

}  // namespace

Tensor bilinear_resize(const Tensor& x, std::size_t out_h, std::size_t out_w) {
    require_rank("bilinear_resize", x, 3);
    if (out_h == 0 || out_w == 0) {
        throw std::invalid_argument("bilinear_resize: zero output extent");
    }
    const std::size_t c = x.shape()[0], h = x.shape()[1], w = x.shape()[2];
    Tensor y({c, out_h, out_w});
    for (std::size_t oy = 0; oy < out_h; ++oy) {
        std::size_t y0, y1;
        double ty;
        resize_coord(oy, h, out_h, y0, y1, ty);
        for (std::size_t ox = 0; ox < out_w; ++ox) {
            std::size_t x0, x1;
            double tx;
            resize_coord(ox, w, out_w, x0, x1, tx);
            for (std::size_t ci = 0; ci < c; ++ci) {
                const double v00 = x.at3(ci, y0, x0), v01 = x.at3(ci, y0, x1);
                const double v10 = x.at3(ci, y1, x0), v11 = x.at3(ci, y1, x1);
                y.at3(ci, oy, ox) = (1.0 - ty) * ((1.0 - tx) * v00 + tx * v01) +
                                    ty * ((1.0 - tx) * v10 + tx * v11);
            }
        }
    }
    return y;
}

Tensor bilinear_resize_vjp(const std::vector<std::size_t>& in_shape, const Tensor& gy) {
    const std::size_t c = in_shape[0], h = in_shape[1], w = in_shape[2];
    const std::size_t out_h = gy.shape()[1], out_w = gy.shape()[2];
    Tensor gx(in_shape);
    for (std::size_t oy = 0; oy < out_h; ++oy) {
        std::size_t y0, y1;
        double ty;
        resize_coord(oy, h, out_h, y0, y1, ty);
        for (std::size_t ox = 0; ox < out_w; ++ox) {
            std::size_t x0, x1;
            double tx;
            resize_coord(ox, w, out_w, x0, x1, tx);
            for (std::size_t ci = 0; ci < c; ++ci) {
                const double g = gy.at3(ci, oy, ox);
                gx.at3(ci, y0, x0) += g * (1.0 - ty) * (1.0 - tx);
                gx.at3(ci, y0, x1) += g * (1.0 - ty) * tx;
                gx.at3(ci, y1, x0) += g * ty * (1.0 - tx);
                gx.at3(ci, y1, x1) += g * ty * tx;
            }
        }
    }
    return gx;
}

// ---------------- reductions ----------------

double sum(const Tensor& a) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.numel(); ++i) acc += a[i];
    return acc;
}

double mean(const Tensor& a) {
    if (a.numel() == 0) throw ShapeError("mean: empty tensor");
    return sum(a) / static_cast<double>(a.numel());
}

Tensor sum_vjp(const std::vector<std::size_t>& in_shape, double gy) {
    Tensor gx(in_shape);
    gx.fill(gy);
    return gx;
}

Tensor mean_vjp(const std::vector<std::size_t>& in_shape, double gy) {
    Tensor gx(in_shape);
    gx.fill(gy / static_cast<double>(shape_numel(in_shape)));
    return gx;
}

// ---------------- concat / slice ----------------

Tensor concat(const std::vector<Tensor>& parts, std::size_t axis) {
    if (parts.empty()) throw ShapeError("concat: no inputs");
    const std::size_t rank = parts[0].rank();
    if (axis >= rank) throw_shape_error("concat", parts[0]);
    std::size_t total = 0;
    for (const Tensor& p : parts) {
        if (p.rank() != rank) throw_shape_error("concat", parts[0], p);
        for (std::size_t a = 0; a < rank; ++a) {
            if (a != axis && p.shape()[a] != parts[0].shape()[a]) {
                throw_shape_error("concat", parts[0], p);
            }
        }
        total += p.shape()[axis];
    }
    std::vector<std::size_t> out_shape = parts[0].shape();
    out_shape[axis] = total;
    Tensor y(out_shape);
    std::size_t outer = 1, inner = 1;
    for (std::size_t a = 0; a < axis; ++a) outer *= out_shape[a];
    for (std::size_t a = axis + 1; a < rank; ++a) inner *= out_shape[a];
    std::size_t offset = 0;
    for (const Tensor& p : parts) {
        const std::size_t n = p.shape()[axis];
        for (std::size_t o = 0; o < outer; ++o) {
            const double* src = p.data() + o * n * inner;
            double* dst = y.data() + (o * total + offset) * inner;
            std::copy(src, src + n * inner, dst);
        }
        offset += n;
    }
    return y;
}

std::vector<Tensor> concat_vjp(const std::vector<Tensor>& parts, std::size_t axis,
                               const Tensor& gy) {
    std::vector<Tensor> grads;
    grads.reserve(parts.size());
    std::size_t offset = 0;
    for (const Tensor& p : parts) {
        grads.push_back(slice(gy, axis, offset, offset + p.shape()[axis]));
        offset += p.shape()[axis];
    }
    return grads;
}

Tensor slice(const Tensor& x, std::size_t axis, std::size_t start, std::size_t stop) {
    if (axis >= x.rank() || start >= stop || stop > x.shape()[axis]) {
        throw ShapeError("slice: invalid range [" + std::to_string(start) + ", " +
                         std::to_string(stop) + ") on axis " + std::to_string(axis) +
                         " of shape " + x.shape_str());
    }
    std::vector<std::size_t> out_shape = x.shape();
    out_shape[axis] = stop - start;
    Tensor y(out_shape);
    std::size_t outer = 1, inner = 1;
    for (std::size_t a = 0; a < axis; ++a) outer *= x.shape()[a];
    for (std::size_t a = axis + 1; a < x.rank(); ++a) inner *= x.shape()[a];
    const std::size_t n_in = x.shape()[axis], n_out = stop - start;
    for (std::size_t o = 0; o < outer; ++o) {
        const double* src = x.data() + (o * n_in + start) * inner;
        double* dst = y.data() + o * n_out * inner;
        std::copy(src, src + n_out * inner, dst);
    }
    return y;
}

Tensor slice_vjp(const std::vector<std::size_t>& in_shape, std::size_t axis, std::size_t start,
                 const Tensor& gy) {
    Tensor gx(in_shape);
    std::size_t outer = 1, inner = 1;
    for (std::size_t a = 0; a < axis; ++a) outer *= in_shape[a];
    for (std::size_t a = axis + 1; a < in_shape.size(); ++a) inner *= in_shape[a];
    const std::size_t n_in = in_shape[axis], n_out = gy.shape()[axis];
    for (std::size_t o = 0; o < outer; ++o) {
        const double* src = gy.data() + o * n_out * inner;
        double* dst = gx.data() + (o * n_in + start) * inner;
        std::copy(src, src + n_out * inner, dst);
    }
    return gx;
}

// ---------------- helpers ----------------

double dot(const Tensor& a, const Tensor& b) {
    require_same_shape("dot", a, b);
    double acc = 0.0;
    for (std::size_t i = 0; i < a.numel(); ++i) acc += a[i] * b[i];
    return acc;
}

Tensor scale_add(const Tensor& acc, const Tensor& g, double s) {
    require_same_shape("scale_add", acc, g);
    Tensor y(acc.shape());
    for (std::size_t i = 0; i < acc.numel(); ++i) y[i] = acc[i] + s * g[i];
    return y;
}

void axpy_inplace(Tensor& acc, const Tensor& g, double s) {
    require_same_shape("axpy_inplace", acc, g);
    for (std::size_t i = 0; i < acc.numel(); ++i) acc[i] += s * g[i];
}

}  // namespace stylecloak::ndgrad
