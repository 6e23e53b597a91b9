#include "snnae/data.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

namespace snnae::data {

namespace fs = std::filesystem;

namespace {

std::vector<uint8_t> read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + p.string());
    in.seekg(0, std::ios::end);
    auto len = static_cast<size_t>(in.tellg());
    in.seekg(0);
    std::vector<uint8_t> buf(len);
    if (len > 0) in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(len));
    if (!in) throw std::runtime_error("short read on " + p.string());
    return buf;
}

// Planar record (R plane, G plane, B plane, row-major) -> interleaved [0,1] tensor.
Tensor3 planar_record_to_tensor(const uint8_t* px, int side) {
    Tensor3 t(side, side, 3);
    const int plane = side * side;
    for (int y = 0; y < side; ++y)
        for (int x = 0; x < side; ++x) {
            int i = y * side + x;
            t.at(y, x, 0) = static_cast<float>(px[i]) / 255.0f;
            t.at(y, x, 1) = static_cast<float>(px[i + plane]) / 255.0f;
            t.at(y, x, 2) = static_cast<float>(px[i + 2 * plane]) / 255.0f;
        }
    return t;
}

void append_records(LabeledImageSet& set, const fs::path& file, int side, int n_classes,
                    int label_bytes) {
    const auto buf = read_file(file);
    const size_t record = static_cast<size_t>(label_bytes) + 3u * side * side;
    if (buf.empty() || buf.size() % record != 0)
        throw std::runtime_error(file.string() + ": size " + std::to_string(buf.size()) +
                                 " is not a positive multiple of record size " +
                                 std::to_string(record));
    for (size_t off = 0; off < buf.size(); off += record) {
        // with two label bytes the first (coarse) one is ignored
        int label = buf[off + label_bytes - 1];
        if (label >= n_classes)
            throw std::runtime_error(file.string() + ": label " + std::to_string(label) +
                                     " out of range [0, " + std::to_string(n_classes) + ")");
        LabeledImage img;
        img.pixels = planar_record_to_tensor(buf.data() + off + label_bytes, side);
        img.label = label;
        img.source_id = static_cast<int>(set.images.size());
        set.images.push_back(std::move(img));
    }
}

}  // namespace

LabeledImageSet load_cifar_records(const fs::path& file, int side, int n_classes, Split split,
                                   int label_bytes, int first_image_id) {
    LabeledImageSet set;
    set.split = split;
    set.n_classes = n_classes;
    append_records(set, file, side, n_classes, label_bytes);
    for (auto& img : set.images) img.source_id += first_image_id;
    return set;
}

void save_cifar_records(const LabeledImageSet& set, const fs::path& file) {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + file.string());
    for (const auto& img : set.images) {
        if (img.pixels.c != 3)
            throw std::invalid_argument("save_cifar_records: images must have 3 channels");
        out.put(static_cast<char>(img.label));
        for (int ch = 0; ch < 3; ++ch)
            for (int y = 0; y < img.pixels.h; ++y)
                for (int x = 0; x < img.pixels.w; ++x) {
                    float v = img.pixels.at(y, x, ch);
                    out.put(static_cast<char>(std::lround(v * 255.0f)));
                }
    }
    if (!out) throw std::runtime_error("write failed on " + file.string());
}

LabeledImageSet load_cifar10(const fs::path& path, Split split) {
    LabeledImageSet set;
    set.split = split;
    set.n_classes = 10;
    if (fs::is_regular_file(path)) {
        append_records(set, path, 32, 10, 1);
        return set;
    }
    if (split == Split::train) {
        for (int b = 1; b <= 5; ++b)
            append_records(set, path / ("data_batch_" + std::to_string(b) + ".bin"), 32, 10, 1);
    } else {
        append_records(set, path / "test_batch.bin", 32, 10, 1);
    }
    return set;
}

LabeledImageSet load_cifar100(const fs::path& path, Split split) {
    LabeledImageSet set;
    set.split = split;
    set.n_classes = 100;
    fs::path file = fs::is_regular_file(path)
                        ? path
                        : path / (split == Split::train ? "train.bin" : "test.bin");
    append_records(set, file, 32, 100, 2);
    return set;
}

LabeledImageSet load_stl10(const fs::path& path, Split split) {
    const char* xname = split == Split::train ? "train_X.bin" : "test_X.bin";
    const char* yname = split == Split::train ? "train_y.bin" : "test_y.bin";
    const auto xbuf = read_file(path / xname);
    const auto ybuf = read_file(path / yname);
    constexpr int side = 96;
    constexpr size_t image_bytes = 3u * side * side;
    if (xbuf.size() % image_bytes != 0)
        throw std::runtime_error(std::string(xname) + ": truncated image data");
    const size_t n = xbuf.size() / image_bytes;
    if (ybuf.size() != n)
        throw std::runtime_error("image/label count mismatch: " + std::to_string(n) +
                                 " images vs " + std::to_string(ybuf.size()) + " labels");
    LabeledImageSet set;
    set.split = split;
    set.n_classes = 10;
    set.images.reserve(n);
    for (size_t i = 0; i < n; ++i) {
        int raw = ybuf[i];
        if (raw < 1 || raw > 10)
            throw std::runtime_error(std::string(yname) + ": label byte " + std::to_string(raw) +
                                     " outside [1, 10]");
        LabeledImage img;
        img.pixels = Tensor3(side, side, 3);
        const uint8_t* px = xbuf.data() + i * image_bytes;
        // each channel plane is column-major: byte (col * side + row)
        for (int ch = 0; ch < 3; ++ch)
            for (int x = 0; x < side; ++x)
                for (int y = 0; y < side; ++y)
                    img.pixels.at(y, x, ch) =
                        static_cast<float>(px[ch * side * side + x * side + y]) / 255.0f;
        img.label = raw - 1;
        img.source_id = static_cast<int>(i);
        set.images.push_back(std::move(img));
    }
    return set;
}

LabeledImage to_grayscale(const LabeledImage& image) {
    if (image.pixels.c != 3) throw std::invalid_argument("to_grayscale: expected 3 channels");
    LabeledImage out;
    out.label = image.label;
    out.source_id = image.source_id;
    out.pixels = Tensor3(image.pixels.h, image.pixels.w, 1);
    for (int y = 0; y < image.pixels.h; ++y)
        for (int x = 0; x < image.pixels.w; ++x)
            out.pixels.at(y, x, 0) = 0.299f * image.pixels.at(y, x, 0) +
                                     0.587f * image.pixels.at(y, x, 1) +
                                     0.114f * image.pixels.at(y, x, 2);
    return out;
}

LabeledImageSet to_grayscale(const LabeledImageSet& set) {
    LabeledImageSet out;
    out.split = set.split;
    out.n_classes = set.n_classes;
    out.images.reserve(set.images.size());
    for (const auto& img : set.images) out.images.push_back(to_grayscale(img));
    return out;
}

std::vector<PatchOrigin> sample_patch_origins(const LabeledImageSet& set, int n_p, int w_p,
                                              uint64_t seed) {
    if (set.images.empty()) throw std::invalid_argument("sample_patch_origins: empty set");
    if (n_p < 1) throw std::invalid_argument("sample_patch_origins: n_p must be >= 1");
    Rng rng(seed);
    std::vector<PatchOrigin> origins;
    origins.reserve(n_p);
    for (int i = 0; i < n_p; ++i) {
        auto img_idx = uniform_index(rng, set.images.size());
        const auto& px = set.images[img_idx].pixels;
        if (w_p > px.h || w_p > px.w)
            throw std::invalid_argument("sample_patch_origins: w_p larger than image");
        int max_r = px.h - w_p;
        int max_c = px.w - w_p;
        PatchOrigin o;
        o.image = static_cast<int>(img_idx);
        o.row = static_cast<int>(uniform_index(rng, static_cast<size_t>(max_r) + 1));
        o.col = static_cast<int>(uniform_index(rng, static_cast<size_t>(max_c) + 1));
        origins.push_back(o);
    }
    return origins;
}

Tensor3 crop(const Tensor3& t, int row, int col, int w_p) {
    if (row < 0 || col < 0 || row + w_p > t.h || col + w_p > t.w)
        throw std::invalid_argument("crop: window out of bounds");
    Tensor3 out(w_p, w_p, t.c);
    for (int y = 0; y < w_p; ++y)
        std::memcpy(&out.v[static_cast<size_t>(y) * w_p * t.c],
                    &t.v[(static_cast<size_t>(row + y) * t.w + col) * t.c],
                    sizeof(float) * w_p * t.c);
    return out;
}

std::vector<Patch> sample_patches(const LabeledImageSet& set, int n_p, int w_p, uint64_t seed) {
    auto origins = sample_patch_origins(set, n_p, w_p, seed);
    std::vector<Patch> patches;
    patches.reserve(origins.size());
    for (const auto& o : origins)
        patches.push_back({crop(set.images[o.image].pixels, o.row, o.col, w_p), o});
    return patches;
}

int dense_grid_side(int side, int w_p, int s) {
    if (s < 1) throw std::invalid_argument("dense_grid_side: stride must be >= 1");
    if (w_p > side) throw std::invalid_argument("dense_grid_side: w_p larger than side");
    return (side - w_p) / s + 1;
}

std::vector<Patch> dense_patches(const LabeledImage& image, int w_p, int s) {
    const int kh = dense_grid_side(image.pixels.h, w_p, s);
    const int kw = dense_grid_side(image.pixels.w, w_p, s);
    std::vector<Patch> patches;
    patches.reserve(static_cast<size_t>(kh) * kw);
    for (int i = 0; i < kh; ++i)
        for (int j = 0; j < kw; ++j)
            patches.push_back({crop(image.pixels, i * s, j * s, w_p),
                               {image.source_id, i * s, j * s}});
    return patches;
}

LabeledImageSet make_synthetic(int n_images, int side, int n_classes, uint64_t seed, Split split) {
    if (n_classes < 2) throw std::invalid_argument("make_synthetic: need at least 2 classes");
    Rng rng(seed);
    LabeledImageSet set;
    set.split = split;
    set.n_classes = n_classes;
    set.images.reserve(n_images);
    const double half = side / 2.0;
    for (int i = 0; i < n_images; ++i) {
        int label = i % n_classes;
        double angle = 3.14159265358979323846 * label / n_classes;
        double dx = std::cos(angle), dy = std::sin(angle);
        // bar through a jittered center, class-specific orientation and color
        double cx = half + uniform_range(rng, -0.15, 0.15) * side;
        double cy = half + uniform_range(rng, -0.15, 0.15) * side;
        double thickness = side / 10.0 + uniform_range(rng, 0.0, side / 20.0);
        float col_r = static_cast<float>(0.55 + 0.45 * std::cos(angle * 2.0));
        float col_g = static_cast<float>(0.55 + 0.45 * std::sin(angle * 2.0));
        float col_b = static_cast<float>(1.0 - 0.5 * label / (n_classes - 1.0));
        LabeledImage img;
        img.pixels = Tensor3(side, side, 3);
        img.label = label;
        img.source_id = i;
        for (int y = 0; y < side; ++y)
            for (int x = 0; x < side; ++x) {
                // distance from pixel center to the bar's axis
                double px = x + 0.5 - cx, py = y + 0.5 - cy;
                double dist = std::abs(px * dy - py * dx);
                bool on_bar = dist <= thickness;
                for (int ch = 0; ch < 3; ++ch) {
                    float noise = static_cast<float>(uniform_range(rng, 0.0, 0.18));
                    float base = on_bar ? (ch == 0 ? col_r : ch == 1 ? col_g : col_b) : 0.0f;
                    float val = base * 0.85f + noise;
                    img.pixels.at(y, x, ch) = std::min(1.0f, std::max(0.0f, val));
                }
            }
        set.images.push_back(std::move(img));
    }
    return set;
}

}  // namespace snnae::data
