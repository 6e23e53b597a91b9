#pragma once

#include <filesystem>
#include <optional>

#include "snnae/common.hpp"

namespace snnae::data {

enum class Split { train, test };

struct LabeledImage {
    Tensor3 pixels;     // values in [0,1]; c is 3 for color sources, 1 after grayscale
    int label = 0;      // class id >= 0
    int source_id = 0;  // index within its set
};

struct LabeledImageSet {
    std::vector<LabeledImage> images;
    Split split = Split::train;
    int n_classes = 0;
};

struct PatchOrigin {
    int image = 0;
    int row = 0;
    int col = 0;
};

struct Patch {
    Tensor3 values;  // w_p x w_p x C, values in [0,1]
    PatchOrigin origin;
};

/// CIFAR-10 binary batches under `path` (data_batch_1..5.bin / test_batch.bin).
/// Records are 1 label byte + 3072 pixel bytes (1024 R, 1024 G, 1024 B, row-major);
/// pixels are divided by 255 on load.
LabeledImageSet load_cifar10(const std::filesystem::path& path, Split split);

/// CIFAR-100 (train.bin / test.bin): 2 label bytes per record (coarse, fine);
/// the fine label is the class id.
LabeledImageSet load_cifar100(const std::filesystem::path& path, Split split);

/// STL-10 (train_X.bin + train_y.bin / test_X.bin + test_y.bin): 96x96x3 images,
/// channel-separated and column-major within each channel; labels are 1-indexed
/// bytes and get shifted to 0-indexed.
LabeledImageSet load_stl10(const std::filesystem::path& path, Split split);

/// Generic record layout shared with CIFAR: 1 label byte + side*side bytes per
/// channel (R plane, G plane, B plane, row-major). Used to persist synthetic
/// fixtures in a format the binary loaders understand.
LabeledImageSet load_cifar_records(const std::filesystem::path& file, int side, int n_classes,
                                   Split split, int label_bytes = 1, int first_image_id = 0);
void save_cifar_records(const LabeledImageSet& set, const std::filesystem::path& file);

/// ITU-R BT.601 luminance: 0.299 R + 0.587 G + 0.114 B.
LabeledImage to_grayscale(const LabeledImage& image);
LabeledImageSet to_grayscale(const LabeledImageSet& set);

/// n_p origins drawn uniformly over all (image, valid top-left) pairs, with
/// replacement. Deterministic given seed.
std::vector<PatchOrigin> sample_patch_origins(const LabeledImageSet& set, int n_p, int w_p,
                                              uint64_t seed);
std::vector<Patch> sample_patches(const LabeledImageSet& set, int n_p, int w_p, uint64_t seed);

/// Number of patch positions per axis for a side of `side` pixels: floor((side - w_p) / s) + 1.
int dense_grid_side(int side, int w_p, int s);

/// Dense w_p x w_p patches with stride s, row-major by top-left position.
std::vector<Patch> dense_patches(const LabeledImage& image, int w_p, int s);

Tensor3 crop(const Tensor3& t, int row, int col, int w_p);

/// Class-conditional toy set: one oriented bar per image, orientation and color
/// determined by the class, over a low-amplitude noise background. Linearly
/// separable enough for end-to-end smoke tests; byte-identical given a seed.
LabeledImageSet make_synthetic(int n_images, int side, int n_classes, uint64_t seed,
                               Split split = Split::train);

}  // namespace snnae::data
