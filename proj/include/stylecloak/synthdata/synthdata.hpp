#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "stylecloak/ndgrad/tensor.hpp"

// Procedural stand-ins for a person dataset: simple sprite figures (head,
// torso, legs) on cluttered backgrounds, with ground-truth instance and
// clothing masks, plus a corpus of procedural fabric-style textures.
namespace stylecloak::synthdata {

using ndgrad::Tensor;

struct Box {
    double x0 = 0, y0 = 0, x1 = 0, y1 = 0;  // half-open pixel coords
    double area() const { return (x1 - x0) * (y1 - y0); }
    double iou(const Box& other) const;
};

struct SceneSpec {
    std::size_t image_size = 96;
    std::size_t person_min = 1;
    std::size_t person_max = 3;
    // Person heights are drawn as a fraction of the canvas and shrunk when
    // more figures have to fit.
    double min_height_frac = 0.36;
    double max_height_frac = 0.68;
    std::size_t max_place_attempts = 200;
    std::uint64_t seed = 0;
};

struct Scene {
    Tensor image;                        // 3 x S x S
    std::vector<Tensor> instance_masks;  // S x S, {0,1}
    std::vector<Tensor> clothing_masks;  // subset of the instance mask
    std::vector<Box> boxes;              // tight instance boxes
};

/// Deterministic per spec.seed. Throws if the requested figures cannot be
/// placed without overlap within the attempt budget.
Scene generate_scene(const SceneSpec& spec);

struct DatasetRecord {
    std::string split;  // "train" | "test"
    std::string image;  // path relative to the dataset root
    std::vector<std::string> instance_masks;
    std::vector<std::string> clothing_masks;
    std::vector<Box> boxes;
};

struct DatasetManifest {
    std::string root;  // directory containing manifest.jsonl
    std::vector<DatasetRecord> records;

    std::vector<const DatasetRecord*> split_records(const std::string& split) const;
};

/// Writes images, masks and a JSON-lines manifest under outdir. Scene seeds
/// derive from (seed, index), so regeneration is byte-for-byte reproducible.
DatasetManifest generate_dataset(const SceneSpec& spec, std::size_t n_train, std::size_t n_test,
                                 std::uint64_t seed, const std::string& outdir);

DatasetManifest load_manifest(const std::string& manifest_path);
Scene load_scene(const DatasetManifest& manifest, const DatasetRecord& record);

/// Distinct procedural fabric textures (stripes, checks, dots, noise octaves,
/// gradients) at a fixed square size; deterministic per seed.
std::vector<Tensor> generate_style_corpus(std::size_t n, std::uint64_t seed,
                                          std::size_t size = 64);

/// Writes the corpus as style_000.png ... under outdir and returns the paths.
std::vector<std::string> save_style_corpus(const std::vector<Tensor>& corpus,
                                           const std::string& outdir);
std::vector<Tensor> load_style_corpus(const std::string& dir);

}  // namespace stylecloak::synthdata
