#pragma once

#include <filesystem>
#include <memory>

#include "snnae/classify.hpp"

namespace snnae::serialize {

// All binary formats are versioned, magic-tagged, little-endian; floats are
// IEEE-754 doubles unless noted.

/// Trained dictionary: kind tag + one config/parameter block per sub-network.
void save_dictionary(const classify::FeatureDictionary& dict, const std::filesystem::path& path);
classify::FeatureDictionary load_dictionary(const std::filesystem::path& path);

/// Descriptor cache: header (n, dim, n_classes), 32-bit reals row-major, then
/// 32-bit labels.
void save_descriptors(const classify::Descriptors& d, int n_classes,
                      const std::filesystem::path& path);
classify::Descriptors load_descriptors(const std::filesystem::path& path,
                                       int* n_classes = nullptr);

/// Linear model: standardization vectors plus per-class weights.
void save_model(const classify::LinearModel& m, const std::filesystem::path& path);
classify::LinearModel load_model(const std::filesystem::path& path);

struct StackShape {
    int h = 0;
    int w = 0;
    std::vector<std::pair<int, coding::Strategy>> parts;  // channel count + tag per sub-stack

    bool operator==(const StackShape&) const = default;
};

StackShape stack_shape(const std::vector<coding::ChannelStack>& stacks);

/// Container of coded stacks for a whole split, one fixed-size float32 record
/// per image, written by cmd_preprocess.
class StackCacheWriter {
  public:
    StackCacheWriter(const std::filesystem::path& path, const StackShape& shape, uint64_t count);
    ~StackCacheWriter();
    void append(const std::vector<coding::ChannelStack>& stacks);
    void close();

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Random-access reader over the cache; read() is thread-safe (pread).
class StackCacheReader {
  public:
    explicit StackCacheReader(const std::filesystem::path& path);
    ~StackCacheReader();
    StackCacheReader(StackCacheReader&&) noexcept;

    const StackShape& shape() const;
    uint64_t count() const;
    std::vector<coding::ChannelStack> read(uint64_t index) const;

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// True when the file exists and carries the expected shape and record count.
bool stack_cache_valid(const std::filesystem::path& path, const StackShape& shape, uint64_t count);

}  // namespace snnae::serialize
