#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace snnae {

/// Dense H x W x C tensor, row-major with interleaved channels:
/// element (y, x, ch) lives at v[(y * w + x) * c + ch].
struct Tensor3 {
    int h = 0;
    int w = 0;
    int c = 0;
    std::vector<float> v;

    Tensor3() = default;
    Tensor3(int h_, int w_, int c_, float fill = 0.0f)
        : h(h_), w(w_), c(c_), v(static_cast<size_t>(h_) * w_ * c_, fill) {}

    float& at(int y, int x, int ch) { return v[(static_cast<size_t>(y) * w + x) * c + ch]; }
    float at(int y, int x, int ch) const { return v[(static_cast<size_t>(y) * w + x) * c + ch]; }
    size_t size() const { return v.size(); }

    bool operator==(const Tensor3&) const = default;
};

// Reproducibility contract: all randomness flows through Rng (std::mt19937_64,
// fully specified by the C++ standard) and the helpers below. The helpers avoid
// std::uniform_*_distribution, whose output is implementation-defined, so seeded
// runs produce identical streams on any platform.
using Rng = std::mt19937_64;

/// Unbiased draw from {0, ..., n-1} via mask-and-reject on raw 64-bit output.
size_t uniform_index(Rng& rng, size_t n);

/// Uniform double in [0, 1) with 53 bits of randomness: (x >> 11) * 2^-53.
double uniform_real(Rng& rng);

/// Uniform double in [lo, hi).
double uniform_range(Rng& rng, double lo, double hi);

/// In-place Fisher-Yates shuffle driven by uniform_index.
template <typename T>
void shuffle(std::vector<T>& items, Rng& rng) {
    for (size_t i = items.size(); i > 1; --i) {
        size_t j = uniform_index(rng, i);
        std::swap(items[i - 1], items[j]);
    }
}

/// Runs fn(i) for i in [0, n) across worker threads. Each index is processed
/// exactly once; callers must make writes disjoint per index. Thread count 0
/// means hardware concurrency (overridable with the SNNAE_THREADS variable).
void parallel_for(size_t n, const std::function<void(size_t)>& fn, unsigned threads = 0);

unsigned effective_thread_count(unsigned requested);

}  // namespace snnae
