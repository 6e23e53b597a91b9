#pragma once

#include <optional>

#include "snnae/common.hpp"
#include "snnae/data.hpp"

namespace snnae::coding {

/// Single-channel H x W map of doubles used by the filtering stages.
struct Map {
    int h = 0;
    int w = 0;
    std::vector<double> v;

    Map() = default;
    Map(int h_, int w_, double fill = 0.0) : h(h_), w(w_), v(static_cast<size_t>(h_) * w_, fill) {}
    double& at(int y, int x) { return v[static_cast<size_t>(y) * w + x]; }
    double at(int y, int x) const { return v[static_cast<size_t>(y) * w + x]; }
};

struct DogParams {
    int size = 7;                 // odd kernel side
    double center_sigma = 1.0;    // narrow Gaussian
    double surround_sigma = 2.0;  // wide Gaussian
    void validate() const;
};

enum class Strategy { grayscale, rgb_opponent, bio_color, gray_plus_color, raw };

Strategy strategy_from_string(const std::string& s);
std::string to_string(Strategy s);

/// Multi-channel coded representation of one image. For DoG strategies the
/// channels are on/off pairs per opponent map, jointly rescaled per image into
/// [0,1]; for Strategy::raw the pixels pass through untouched.
struct ChannelStack {
    Tensor3 data;  // H x W x C_in, interleaved channels
    Strategy strategy = Strategy::grayscale;
};

/// Normalized kernel: g_sigma(u,v) / sum over u,v in [-mu, mu], mu = S/2 (integer).
/// Entries sum to 1.
Map gaussian_kernel(int size, double sigma);

/// Convolution with (G_center - G_surround) under replicate-edge padding; the
/// output has the same extent as the input.
Map dog_filter(const Map& input, const DogParams& p);

/// (max(0, v), max(0, -v)) per element.
std::pair<Map, Map> on_off_split(const Map& dog_map);

/// Opponent maps fed to the DoG stage, before on/off splitting:
///   grayscale     -> [luminance]
///   rgb_opponent  -> [R-G, G-B, B-R]
///   bio_color     -> [R-G, 0.5R + 0.5G - B]
///   raw           -> pixel channels untouched (no DoG downstream)
std::vector<Map> color_transform(const data::LabeledImage& image, Strategy strategy);

/// Full per-image coding: opponent maps -> DoG -> on/off channels, then joint
/// rescaling of all channels of a stack by the largest absolute DoG response of
/// that image (an all-zero image stays all-zero). gray_plus_color yields two
/// independently scaled sub-stacks (2-channel grayscale + 4-channel bio_color);
/// every other strategy yields one.
std::vector<ChannelStack> encode_image(const data::LabeledImage& image, Strategy strategy,
                                       const DogParams& p);

/// Total input count per patch across sub-stacks: w_p * w_p * sum of C_in.
int inputs_per_patch(Strategy strategy, int w_p, int image_channels);

struct SpikeEvent {
    double t = 0.0;
    int input = 0;
};

/// Latency-coded input window: at most one spike per input, events sorted by
/// (timestamp, input index).
struct SpikeTrain {
    std::vector<SpikeEvent> events;
    double t_duration = 1.0;
    int n_inputs = 0;
};

/// t = (1 - x) * t_duration for every x > 0; x = 0 emits no spike. Values must
/// lie in [0,1].
SpikeTrain encode_latency(std::span<const float> values, double t_duration);

/// f_i = 1 - (t - t_min) / (t_max - t_min); a missing spike decodes to 0.
std::vector<double> decode_features(const std::vector<std::optional<double>>& spike_times,
                                    double t_min, double t_max);

}  // namespace snnae::coding
