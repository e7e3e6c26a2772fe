#include "stylecloak/synthdata/synthdata.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "json.hpp"
#include "stylecloak/imaging/image.hpp"
#include "stylecloak/imaging/io.hpp"
#include "stylecloak/ndgrad/rng.hpp"

namespace stylecloak::synthdata {

namespace fs = std::filesystem;
using json = nlohmann::json;
using ndgrad::Rng;

double Box::iou(const Box& other) const {
    const double ix0 = std::max(x0, other.x0), iy0 = std::max(y0, other.y0);
    const double ix1 = std::min(x1, other.x1), iy1 = std::min(y1, other.y1);
    const double iw = std::max(0.0, ix1 - ix0), ih = std::max(0.0, iy1 - iy0);
    const double inter = iw * ih;
    const double uni = area() + other.area() - inter;
    return uni <= 0.0 ? 0.0 : inter / uni;
}

namespace {

struct Rgb {
    double r, g, b;
};

Rgb hsv_to_rgb(double h, double s, double v) {
    h = h - std::floor(h);
    const double c = v * s;
    const double hp = h * 6.0;
    const double x = c * (1.0 - std::abs(std::fmod(hp, 2.0) - 1.0));
    double r = 0, g = 0, b = 0;
    if (hp < 1) {
        r = c; g = x;
    } else if (hp < 2) {
        r = x; g = c;
    } else if (hp < 3) {
        g = c; b = x;
    } else if (hp < 4) {
        g = x; b = c;
    } else if (hp < 5) {
        r = x; b = c;
    } else {
        r = c; b = x;
    }
    const double m = v - c;
    return {r + m, g + m, b + m};
}

constexpr Rgb kSkinTones[] = {
    {0.96, 0.80, 0.69}, {0.87, 0.67, 0.53}, {0.76, 0.57, 0.42},
    {0.55, 0.38, 0.26}, {0.41, 0.28, 0.19},
};

void put_pixel(Tensor& img, std::size_t y, std::size_t x, const Rgb& c) {
    const std::size_t plane = img.shape()[1] * img.shape()[2];
    const std::size_t idx = y * img.shape()[2] + x;
    img[idx] = c.r;
    img[plane + idx] = c.g;
    img[2 * plane + idx] = c.b;
}

// Simple 2-color fabric patterns evaluated per pixel.
struct Fabric {
    int kind;  // 0 solid, 1 hstripe, 2 vstripe, 3 check, 4 diag
    Rgb a, b;
    int period;

    Rgb at(std::size_t y, std::size_t x) const {
        const int p = std::max(1, period);
        bool second = false;
        switch (kind) {
            case 1: second = (y / static_cast<std::size_t>(p)) % 2 == 1; break;
            case 2: second = (x / static_cast<std::size_t>(p)) % 2 == 1; break;
            case 3:
                second = ((y / static_cast<std::size_t>(p)) + (x / static_cast<std::size_t>(p))) %
                             2 ==
                         1;
                break;
            case 4: second = ((x + y) / static_cast<std::size_t>(p)) % 2 == 1; break;
            default: break;
        }
        return second ? b : a;
    }
};

Fabric random_fabric(Rng& rng) {
    Fabric f;
    f.kind = static_cast<int>(rng.uniform_index(5));
    f.a = hsv_to_rgb(rng.uniform(), rng.uniform(0.45, 0.95), rng.uniform(0.35, 0.95));
    f.b = hsv_to_rgb(rng.uniform(), rng.uniform(0.45, 0.95), rng.uniform(0.35, 0.95));
    f.period = 2 + static_cast<int>(rng.uniform_index(4));
    return f;
}

void fill_rect_mask(Tensor& mask, double x0, double y0, double x1, double y1) {
    const std::size_t h = mask.shape()[0], w = mask.shape()[1];
    const std::size_t ix0 = static_cast<std::size_t>(std::max(0.0, std::floor(x0)));
    const std::size_t iy0 = static_cast<std::size_t>(std::max(0.0, std::floor(y0)));
    const std::size_t ix1 = std::min<std::size_t>(w, static_cast<std::size_t>(std::max(0.0, std::ceil(x1))));
    const std::size_t iy1 = std::min<std::size_t>(h, static_cast<std::size_t>(std::max(0.0, std::ceil(y1))));
    for (std::size_t y = iy0; y < iy1; ++y) {
        for (std::size_t x = ix0; x < ix1; ++x) mask.at2(y, x) = 1.0;
    }
}

void fill_ellipse_mask(Tensor& mask, double cx, double cy, double rx, double ry) {
    const std::size_t h = mask.shape()[0], w = mask.shape()[1];
    const std::size_t iy0 = static_cast<std::size_t>(std::max(0.0, std::floor(cy - ry)));
    const std::size_t iy1 = std::min<std::size_t>(h, static_cast<std::size_t>(std::max(0.0, std::ceil(cy + ry + 1))));
    const std::size_t ix0 = static_cast<std::size_t>(std::max(0.0, std::floor(cx - rx)));
    const std::size_t ix1 = std::min<std::size_t>(w, static_cast<std::size_t>(std::max(0.0, std::ceil(cx + rx + 1))));
    for (std::size_t y = iy0; y < iy1; ++y) {
        for (std::size_t x = ix0; x < ix1; ++x) {
            const double dx = (static_cast<double>(x) + 0.5 - cx) / rx;
            const double dy = (static_cast<double>(y) + 0.5 - cy) / ry;
            if (dx * dx + dy * dy <= 1.0) mask.at2(y, x) = 1.0;
        }
    }
}

void paint_mask(Tensor& img, const Tensor& mask, const Fabric& fabric) {
    const std::size_t h = mask.shape()[0], w = mask.shape()[1];
    for (std::size_t y = 0; y < h; ++y) {
        for (std::size_t x = 0; x < w; ++x) {
            if (mask.at2(y, x) == 1.0) put_pixel(img, y, x, fabric.at(y, x));
        }
    }
}

void paint_mask_solid(Tensor& img, const Tensor& mask, const Rgb& color) {
    const std::size_t h = mask.shape()[0], w = mask.shape()[1];
    for (std::size_t y = 0; y < h; ++y) {
        for (std::size_t x = 0; x < w; ++x) {
            if (mask.at2(y, x) == 1.0) put_pixel(img, y, x, color);
        }
    }
}

Box mask_bbox(const Tensor& mask) {
    const std::size_t h = mask.shape()[0], w = mask.shape()[1];
    std::size_t x0 = w, y0 = h, x1 = 0, y1 = 0;
    for (std::size_t y = 0; y < h; ++y) {
        for (std::size_t x = 0; x < w; ++x) {
            if (mask.at2(y, x) == 1.0) {
                x0 = std::min(x0, x);
                y0 = std::min(y0, y);
                x1 = std::max(x1, x + 1);
                y1 = std::max(y1, y + 1);
            }
        }
    }
    return {static_cast<double>(x0), static_cast<double>(y0), static_cast<double>(x1),
            static_cast<double>(y1)};
}

struct PersonSprite {
    Tensor instance;
    Tensor clothing;
    Box box;
};

PersonSprite draw_person(Tensor& img, Rng& rng, double px, double py, double w, double h) {
    const std::size_t s = img.shape()[1];
    PersonSprite sprite;
    sprite.instance = Tensor({s, s});
    sprite.clothing = Tensor({s, s});

    const Rgb skin = kSkinTones[rng.uniform_index(std::size(kSkinTones))];
    const Fabric top = random_fabric(rng);
    Fabric pants = random_fabric(rng);
    pants.kind = rng.uniform() < 0.7 ? 0 : pants.kind;  // pants mostly solid

    // Head.
    const double head_cx = px + 0.5 * w;
    const double head_cy = py + 0.13 * h;
    const double head_rx = 0.115 * h, head_ry = 0.13 * h;
    Tensor head({s, s});
    fill_ellipse_mask(head, head_cx, head_cy, head_rx, head_ry);
    // Neck.
    Tensor neck({s, s});
    fill_rect_mask(neck, px + 0.42 * w, py + 0.22 * h, px + 0.58 * w, py + 0.28 * h);
    // Torso, full width of the sprite box.
    Tensor torso({s, s});
    fill_rect_mask(torso, px + 0.04 * w, py + 0.26 * h, px + 0.96 * w, py + 0.62 * h);
    // Legs.
    Tensor legs({s, s});
    fill_rect_mask(legs, px + 0.12 * w, py + 0.60 * h, px + 0.46 * w, py + h);
    fill_rect_mask(legs, px + 0.54 * w, py + 0.60 * h, px + 0.88 * w, py + h);

    paint_mask_solid(img, head, skin);
    paint_mask_solid(img, neck, skin);
    paint_mask(img, torso, top);
    paint_mask(img, legs, pants);

    for (std::size_t i = 0; i < sprite.instance.numel(); ++i) {
        const double inst =
            std::max(std::max(head[i], neck[i]), std::max(torso[i], legs[i]));
        const double cloth = std::max(torso[i], legs[i]);
        sprite.instance[i] = inst;
        sprite.clothing[i] = cloth;
    }
    sprite.box = mask_bbox(sprite.instance);
    return sprite;
}

void draw_background(Tensor& img, Rng& rng) {
    const std::size_t s = img.shape()[1];
    const Rgb c0 = hsv_to_rgb(rng.uniform(), rng.uniform(0.05, 0.35), rng.uniform(0.3, 0.8));
    const Rgb c1 = hsv_to_rgb(rng.uniform(), rng.uniform(0.05, 0.35), rng.uniform(0.3, 0.8));
    for (std::size_t y = 0; y < s; ++y) {
        const double t = static_cast<double>(y) / static_cast<double>(s - 1);
        const Rgb c{c0.r + t * (c1.r - c0.r), c0.g + t * (c1.g - c0.g),
                    c0.b + t * (c1.b - c0.b)};
        for (std::size_t x = 0; x < s; ++x) put_pixel(img, y, x, c);
    }
    // Clutter: muted rectangles and ellipses, some with fabric patterns so
    // texture alone does not give figures away.
    const std::size_t count = 4 + rng.uniform_index(6);
    for (std::size_t i = 0; i < count; ++i) {
        Tensor shape({s, s});
        const double cx = rng.uniform(0.0, static_cast<double>(s));
        const double cy = rng.uniform(0.0, static_cast<double>(s));
        const double ex = rng.uniform(4.0, 22.0), ey = rng.uniform(4.0, 22.0);
        if (rng.uniform() < 0.5) {
            fill_rect_mask(shape, cx - ex, cy - ey, cx + ex, cy + ey);
        } else {
            fill_ellipse_mask(shape, cx, cy, ex, ey);
        }
        if (rng.uniform() < 0.4) {
            Fabric f = random_fabric(rng);
            f.a.r *= 0.7; f.a.g *= 0.7; f.a.b *= 0.7;
            f.b.r *= 0.7; f.b.g *= 0.7; f.b.b *= 0.7;
            paint_mask(img, shape, f);
        } else {
            paint_mask_solid(
                img, shape,
                hsv_to_rgb(rng.uniform(), rng.uniform(0.05, 0.4), rng.uniform(0.2, 0.75)));
        }
    }
}

json box_to_json(const Box& b) { return json::array({b.x0, b.y0, b.x1, b.y1}); }

Box box_from_json(const json& j) {
    return Box{j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>(),
               j.at(3).get<double>()};
}

}  // namespace

Scene generate_scene(const SceneSpec& spec) {
    if (spec.person_min < 1 || spec.person_max < spec.person_min) {
        throw std::invalid_argument("generate_scene: invalid person count range");
    }
    if (spec.image_size < 48) {
        throw std::invalid_argument("generate_scene: image_size must be >= 48");
    }
    Rng rng(spec.seed);
    const std::size_t s = spec.image_size;
    Scene scene;
    scene.image = Tensor({3, s, s});
    draw_background(scene.image, rng);

    const std::size_t count =
        spec.person_min + rng.uniform_index(spec.person_max - spec.person_min + 1);
    // Shrink figures as the scene gets crowded so placement stays feasible.
    const double crowd = count == 1 ? 1.0 : (count == 2 ? 0.82 : 0.66);

    struct Placed {
        double x0, y0, x1, y1;
    };
    std::vector<Placed> placed;
    for (std::size_t p = 0; p < count; ++p) {
        bool ok = false;
        for (std::size_t attempt = 0; attempt < spec.max_place_attempts && !ok; ++attempt) {
            const double h =
                rng.uniform(spec.min_height_frac, spec.max_height_frac) * crowd * s;
            const double w = h * rng.uniform(0.44, 0.60);
            const double px = rng.uniform(1.0, static_cast<double>(s) - w - 1.0);
            const double py = rng.uniform(1.0, static_cast<double>(s) - h - 1.0);
            bool overlaps = false;
            for (const auto& q : placed) {
                const bool sep = px + w + 2 <= q.x0 || q.x1 + 2 <= px || py + h + 2 <= q.y0 ||
                                 q.y1 + 2 <= py;
                if (!sep) {
                    overlaps = true;
                    break;
                }
            }
            if (overlaps) continue;
            PersonSprite sprite = draw_person(scene.image, rng, px, py, w, h);
            scene.instance_masks.push_back(std::move(sprite.instance));
            scene.clothing_masks.push_back(std::move(sprite.clothing));
            scene.boxes.push_back(sprite.box);
            placed.push_back({px, py, px + w, py + h});
            ok = true;
        }
        if (!ok) {
            throw std::runtime_error("generate_scene: could not place figure " +
                                     std::to_string(p + 1) + " of " + std::to_string(count) +
                                     " after " + std::to_string(spec.max_place_attempts) +
                                     " attempts (seed " + std::to_string(spec.seed) + ")");
        }
    }

    // Light sensor-style noise over everything.
    for (std::size_t i = 0; i < scene.image.numel(); ++i) {
        scene.image[i] =
            std::clamp(scene.image[i] + rng.uniform(-0.015, 0.015), 0.0, 1.0);
    }
    return scene;
}

std::vector<const DatasetRecord*> DatasetManifest::split_records(const std::string& split) const {
    std::vector<const DatasetRecord*> out;
    for (const auto& r : records) {
        if (r.split == split) out.push_back(&r);
    }
    return out;
}

DatasetManifest generate_dataset(const SceneSpec& spec, std::size_t n_train, std::size_t n_test,
                                 std::uint64_t seed, const std::string& outdir) {
    if (n_train == 0 || n_test == 0) {
        throw std::invalid_argument("generate_dataset: n_train and n_test must be > 0");
    }
    fs::create_directories(fs::path(outdir) / "images");
    DatasetManifest manifest;
    manifest.root = outdir;

    auto emit = [&](const std::string& split, std::size_t index, std::uint64_t scene_seed) {
        SceneSpec s = spec;
        s.seed = scene_seed;
        Scene scene = generate_scene(s);
        char stem[64];
        std::snprintf(stem, sizeof(stem), "%s_%05zu", split.c_str(), index);
        DatasetRecord rec;
        rec.split = split;
        rec.image = std::string("images/") + stem + ".png";
        imaging::save_png((fs::path(outdir) / rec.image).string(), scene.image);
        for (std::size_t k = 0; k < scene.instance_masks.size(); ++k) {
            const std::string inst =
                std::string("images/") + stem + ".inst" + std::to_string(k) + ".mask.png";
            const std::string cloth =
                std::string("images/") + stem + ".cloth" + std::to_string(k) + ".mask.png";
            imaging::save_mask((fs::path(outdir) / inst).string(), scene.instance_masks[k]);
            imaging::save_mask((fs::path(outdir) / cloth).string(), scene.clothing_masks[k]);
            rec.instance_masks.push_back(inst);
            rec.clothing_masks.push_back(cloth);
        }
        rec.boxes = scene.boxes;
        manifest.records.push_back(std::move(rec));
    };

    for (std::size_t i = 0; i < n_train; ++i) {
        emit("train", i, Rng::derive(seed, i));
    }
    for (std::size_t i = 0; i < n_test; ++i) {
        emit("test", i, Rng::derive(seed, 0x8000000000000000ULL + i));
    }

    std::ofstream os(fs::path(outdir) / "manifest.jsonl");
    if (!os) throw std::runtime_error("generate_dataset: cannot write manifest in " + outdir);
    for (const auto& rec : manifest.records) {
        json j;
        j["split"] = rec.split;
        j["image"] = rec.image;
        j["instance_masks"] = rec.instance_masks;
        j["clothing_masks"] = rec.clothing_masks;
        json boxes = json::array();
        for (const auto& b : rec.boxes) boxes.push_back(box_to_json(b));
        j["boxes"] = boxes;
        os << j.dump() << "\n";
    }
    return manifest;
}

DatasetManifest load_manifest(const std::string& manifest_path) {
    std::ifstream is(manifest_path);
    if (!is) throw std::runtime_error("load_manifest: cannot open " + manifest_path);
    DatasetManifest manifest;
    manifest.root = fs::path(manifest_path).parent_path().string();
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        json j = json::parse(line);
        DatasetRecord rec;
        rec.split = j.at("split").get<std::string>();
        rec.image = j.at("image").get<std::string>();
        rec.instance_masks = j.at("instance_masks").get<std::vector<std::string>>();
        rec.clothing_masks = j.at("clothing_masks").get<std::vector<std::string>>();
        for (const auto& b : j.at("boxes")) rec.boxes.push_back(box_from_json(b));
        manifest.records.push_back(std::move(rec));
    }
    return manifest;
}

Scene load_scene(const DatasetManifest& manifest, const DatasetRecord& record) {
    Scene scene;
    scene.image = imaging::load_png((fs::path(manifest.root) / record.image).string());
    for (const auto& m : record.instance_masks) {
        scene.instance_masks.push_back(imaging::load_mask((fs::path(manifest.root) / m).string()));
    }
    for (const auto& m : record.clothing_masks) {
        scene.clothing_masks.push_back(imaging::load_mask((fs::path(manifest.root) / m).string()));
    }
    scene.boxes = record.boxes;
    return scene;
}

namespace {

// Smooth value noise with a few octaves, evaluated on a seeded lattice.
double value_noise(Rng& lattice_vals, std::vector<double>& lattice, std::size_t cells,
                   double fx, double fy) {
    if (lattice.empty()) {
        lattice.resize(cells * cells);
        for (auto& v : lattice) v = lattice_vals.uniform();
    }
    const double gx = fx * static_cast<double>(cells - 1);
    const double gy = fy * static_cast<double>(cells - 1);
    const std::size_t x0 = std::min<std::size_t>(cells - 2, static_cast<std::size_t>(gx));
    const std::size_t y0 = std::min<std::size_t>(cells - 2, static_cast<std::size_t>(gy));
    const double tx = gx - static_cast<double>(x0), ty = gy - static_cast<double>(y0);
    const double sx = tx * tx * (3 - 2 * tx), sy = ty * ty * (3 - 2 * ty);
    const double v00 = lattice[y0 * cells + x0], v01 = lattice[y0 * cells + x0 + 1];
    const double v10 = lattice[(y0 + 1) * cells + x0], v11 = lattice[(y0 + 1) * cells + x0 + 1];
    return (1 - sy) * ((1 - sx) * v00 + sx * v01) + sy * ((1 - sx) * v10 + sx * v11);
}

}  // namespace

std::vector<Tensor> generate_style_corpus(std::size_t n, std::uint64_t seed, std::size_t size) {
    if (n < 1) throw std::invalid_argument("generate_style_corpus: n must be >= 1");
    std::vector<Tensor> corpus;
    corpus.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        Rng rng(Rng::derive(seed, 0x57171e5ULL + i));
        Tensor img({3, size, size});
        const int family = static_cast<int>(i % 6);
        const Rgb a = hsv_to_rgb(rng.uniform(), rng.uniform(0.3, 1.0), rng.uniform(0.25, 1.0));
        const Rgb b = hsv_to_rgb(rng.uniform(), rng.uniform(0.3, 1.0), rng.uniform(0.25, 1.0));
        auto blend = [&](double t) {
            return Rgb{a.r + t * (b.r - a.r), a.g + t * (b.g - a.g), a.b + t * (b.b - a.b)};
        };
        switch (family) {
            case 0: {  // stripes at a random angle
                const double angle = rng.uniform(0.0, 3.14159265358979);
                const double period = rng.uniform(4.0, 14.0);
                const double cx = std::cos(angle), sx = std::sin(angle);
                for (std::size_t y = 0; y < size; ++y) {
                    for (std::size_t x = 0; x < size; ++x) {
                        const double u = cx * static_cast<double>(x) + sx * static_cast<double>(y);
                        const bool second = std::fmod(u, 2 * period) >= period;
                        put_pixel(img, y, x, second ? b : a);
                    }
                }
                break;
            }
            case 1: {  // checks
                const std::size_t p = 3 + rng.uniform_index(8);
                for (std::size_t y = 0; y < size; ++y) {
                    for (std::size_t x = 0; x < size; ++x) {
                        const bool second = ((y / p) + (x / p)) % 2 == 1;
                        put_pixel(img, y, x, second ? b : a);
                    }
                }
                break;
            }
            case 2: {  // polka dots
                const double spacing = rng.uniform(8.0, 16.0);
                const double radius = spacing * rng.uniform(0.2, 0.42);
                for (std::size_t y = 0; y < size; ++y) {
                    for (std::size_t x = 0; x < size; ++x) {
                        const double fx = std::fmod(static_cast<double>(x), spacing) - spacing / 2;
                        const double fy = std::fmod(static_cast<double>(y), spacing) - spacing / 2;
                        const bool dot = fx * fx + fy * fy <= radius * radius;
                        put_pixel(img, y, x, dot ? b : a);
                    }
                }
                break;
            }
            case 3: {  // octave value noise
                std::vector<double> l1, l2;
                Rng n1(rng.next_u64()), n2(rng.next_u64());
                for (std::size_t y = 0; y < size; ++y) {
                    for (std::size_t x = 0; x < size; ++x) {
                        const double fx = static_cast<double>(x) / static_cast<double>(size - 1);
                        const double fy = static_cast<double>(y) / static_cast<double>(size - 1);
                        double t = 0.65 * value_noise(n1, l1, 6, fx, fy) +
                                   0.35 * value_noise(n2, l2, 17, fx, fy);
                        put_pixel(img, y, x, blend(std::clamp(t, 0.0, 1.0)));
                    }
                }
                break;
            }
            case 4: {  // linear gradient
                const double angle = rng.uniform(0.0, 2 * 3.14159265358979);
                const double cx = std::cos(angle), sx = std::sin(angle);
                for (std::size_t y = 0; y < size; ++y) {
                    for (std::size_t x = 0; x < size; ++x) {
                        const double u =
                            (cx * static_cast<double>(x) + sx * static_cast<double>(y)) /
                            static_cast<double>(size);
                        put_pixel(img, y, x, blend(std::clamp(0.5 + 0.5 * u, 0.0, 1.0)));
                    }
                }
                break;
            }
            default: {  // herringbone-style zigzag stripes
                const std::size_t p = 4 + rng.uniform_index(7);
                for (std::size_t y = 0; y < size; ++y) {
                    for (std::size_t x = 0; x < size; ++x) {
                        const std::size_t zig = (x / p) % 2 == 0 ? (x + y) : (x + (size - y));
                        const bool second = (zig / p) % 2 == 1;
                        put_pixel(img, y, x, second ? b : a);
                    }
                }
                break;
            }
        }
        corpus.push_back(std::move(img));
    }
    return corpus;
}

std::vector<std::string> save_style_corpus(const std::vector<Tensor>& corpus,
                                           const std::string& outdir) {
    fs::create_directories(outdir);
    std::vector<std::string> paths;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof(name), "style_%03zu.png", i);
        const std::string path = (fs::path(outdir) / name).string();
        imaging::save_png(path, corpus[i]);
        paths.push_back(path);
    }
    return paths;
}

std::vector<Tensor> load_style_corpus(const std::string& dir) {
    std::vector<std::string> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.path().extension() == ".png") files.push_back(entry.path().string());
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) throw std::runtime_error("load_style_corpus: no .png files in " + dir);
    std::vector<Tensor> corpus;
    for (const auto& f : files) corpus.push_back(imaging::load_png(f));
    return corpus;
}

}  // namespace stylecloak::synthdata
