#include "snnae/coding.hpp"

#include <algorithm>
#include <cmath>

namespace snnae::coding {

void DogParams::validate() const {
    if (size < 3 || size % 2 == 0)
        throw std::invalid_argument("DogParams: size must be odd and >= 3");
    if (!(center_sigma > 0.0) || !(center_sigma < surround_sigma))
        throw std::invalid_argument("DogParams: need 0 < center_sigma < surround_sigma");
}

Strategy strategy_from_string(const std::string& s) {
    if (s == "grayscale") return Strategy::grayscale;
    if (s == "rgb_opponent") return Strategy::rgb_opponent;
    if (s == "bio_color") return Strategy::bio_color;
    if (s == "grayscale_plus_color" || s == "gray_plus_color") return Strategy::gray_plus_color;
    if (s == "raw" || s == "raw_rgb") return Strategy::raw;
    throw std::invalid_argument("unknown coding strategy: " + s);
}

std::string to_string(Strategy s) {
    switch (s) {
        case Strategy::grayscale: return "grayscale";
        case Strategy::rgb_opponent: return "rgb_opponent";
        case Strategy::bio_color: return "bio_color";
        case Strategy::gray_plus_color: return "grayscale_plus_color";
        case Strategy::raw: return "raw";
    }
    throw std::logic_error("bad strategy");
}

Map gaussian_kernel(int size, double sigma) {
    if (size < 1 || size % 2 == 0) throw std::invalid_argument("gaussian_kernel: size must be odd");
    if (!(sigma > 0.0)) throw std::invalid_argument("gaussian_kernel: sigma must be positive");
    const int mu = size / 2;
    Map k(size, size);
    double sum = 0.0;
    for (int u = -mu; u <= mu; ++u)
        for (int v = -mu; v <= mu; ++v) {
            double g = std::exp(-(u * u + v * v) / (2.0 * sigma * sigma));
            k.at(u + mu, v + mu) = g;
            sum += g;
        }
    for (auto& e : k.v) e /= sum;
    return k;
}

Map dog_filter(const Map& input, const DogParams& p) {
    p.validate();
    const Map kc = gaussian_kernel(p.size, p.center_sigma);
    const Map ks = gaussian_kernel(p.size, p.surround_sigma);
    Map diff(p.size, p.size);
    for (size_t i = 0; i < diff.v.size(); ++i) diff.v[i] = kc.v[i] - ks.v[i];

    const int mu = p.size / 2;
    Map out(input.h, input.w);
    for (int y = 0; y < input.h; ++y)
        for (int x = 0; x < input.w; ++x) {
            double acc = 0.0;
            for (int u = -mu; u <= mu; ++u) {
                int yy = std::clamp(y + u, 0, input.h - 1);
                for (int v = -mu; v <= mu; ++v) {
                    int xx = std::clamp(x + v, 0, input.w - 1);
                    acc += input.at(yy, xx) * diff.at(u + mu, v + mu);
                }
            }
            out.at(y, x) = acc;
        }
    return out;
}

std::pair<Map, Map> on_off_split(const Map& dog_map) {
    Map on(dog_map.h, dog_map.w), off(dog_map.h, dog_map.w);
    for (size_t i = 0; i < dog_map.v.size(); ++i) {
        on.v[i] = std::max(0.0, dog_map.v[i]);
        off.v[i] = std::max(0.0, -dog_map.v[i]);
    }
    return {std::move(on), std::move(off)};
}

namespace {

Map luminance(const data::LabeledImage& image) {
    Map m(image.pixels.h, image.pixels.w);
    if (image.pixels.c == 1) {
        for (int y = 0; y < m.h; ++y)
            for (int x = 0; x < m.w; ++x) m.at(y, x) = image.pixels.at(y, x, 0);
    } else {
        for (int y = 0; y < m.h; ++y)
            for (int x = 0; x < m.w; ++x)
                m.at(y, x) = 0.299 * image.pixels.at(y, x, 0) + 0.587 * image.pixels.at(y, x, 1) +
                             0.114 * image.pixels.at(y, x, 2);
    }
    return m;
}

Map channel_combination(const data::LabeledImage& image, double cr, double cg, double cb) {
    Map m(image.pixels.h, image.pixels.w);
    for (int y = 0; y < m.h; ++y)
        for (int x = 0; x < m.w; ++x)
            m.at(y, x) = cr * image.pixels.at(y, x, 0) + cg * image.pixels.at(y, x, 1) +
                         cb * image.pixels.at(y, x, 2);
    return m;
}

// DoG + on/off over a list of opponent maps, jointly rescaled by the stack's
// largest response so every channel lands in [0,1].
ChannelStack coded_stack(const std::vector<Map>& opponents, Strategy tag, const DogParams& p) {
    std::vector<Map> channels;
    channels.reserve(opponents.size() * 2);
    double peak = 0.0;
    for (const auto& m : opponents) {
        auto [on, off] = on_off_split(dog_filter(m, p));
        for (const auto& ch : {std::cref(on), std::cref(off)})
            for (double v : ch.get().v) peak = std::max(peak, v);
        channels.push_back(std::move(on));
        channels.push_back(std::move(off));
    }
    const int h = channels.front().h, w = channels.front().w;
    ChannelStack stack;
    stack.strategy = tag;
    stack.data = Tensor3(h, w, static_cast<int>(channels.size()));
    // responses at rounding-noise scale mean a constant image; keep it silent
    // rather than amplifying the noise to full range
    if (peak > 1e-12) {
        for (int ch = 0; ch < stack.data.c; ++ch)
            for (int y = 0; y < h; ++y)
                for (int x = 0; x < w; ++x)
                    stack.data.at(y, x, ch) = static_cast<float>(channels[ch].at(y, x) / peak);
    }
    return stack;
}

}  // namespace

std::vector<Map> color_transform(const data::LabeledImage& image, Strategy strategy) {
    const int c = image.pixels.c;
    switch (strategy) {
        case Strategy::grayscale:
            return {luminance(image)};
        case Strategy::rgb_opponent:
            if (c != 3) throw std::invalid_argument("rgb_opponent needs 3 channels");
            return {channel_combination(image, 1, -1, 0), channel_combination(image, 0, 1, -1),
                    channel_combination(image, -1, 0, 1)};
        case Strategy::bio_color:
            if (c != 3) throw std::invalid_argument("bio_color needs 3 channels");
            return {channel_combination(image, 1, -1, 0),
                    channel_combination(image, 0.5, 0.5, -1)};
        case Strategy::raw: {
            std::vector<Map> maps;
            for (int ch = 0; ch < c; ++ch) {
                Map m(image.pixels.h, image.pixels.w);
                for (int y = 0; y < m.h; ++y)
                    for (int x = 0; x < m.w; ++x) m.at(y, x) = image.pixels.at(y, x, ch);
                maps.push_back(std::move(m));
            }
            return maps;
        }
        case Strategy::gray_plus_color:
            throw std::invalid_argument(
                "gray_plus_color is a compound strategy; use encode_image");
    }
    throw std::logic_error("bad strategy");
}

std::vector<ChannelStack> encode_image(const data::LabeledImage& image, Strategy strategy,
                                       const DogParams& p) {
    switch (strategy) {
        case Strategy::raw: {
            ChannelStack stack;
            stack.strategy = Strategy::raw;
            stack.data = image.pixels;
            return {std::move(stack)};
        }
        case Strategy::gray_plus_color: {
            if (image.pixels.c != 3)
                throw std::invalid_argument("gray_plus_color needs 3 channels");
            std::vector<ChannelStack> stacks;
            stacks.push_back(coded_stack(color_transform(image, Strategy::grayscale),
                                         Strategy::grayscale, p));
            stacks.push_back(coded_stack(color_transform(image, Strategy::bio_color),
                                         Strategy::bio_color, p));
            return stacks;
        }
        default:
            return {coded_stack(color_transform(image, strategy), strategy, p)};
    }
}

int inputs_per_patch(Strategy strategy, int w_p, int image_channels) {
    int c_in = 0;
    switch (strategy) {
        case Strategy::grayscale: c_in = 2; break;
        case Strategy::rgb_opponent: c_in = 6; break;
        case Strategy::bio_color: c_in = 4; break;
        case Strategy::gray_plus_color: c_in = 6; break;
        case Strategy::raw: c_in = image_channels; break;
    }
    return w_p * w_p * c_in;
}

SpikeTrain encode_latency(std::span<const float> values, double t_duration) {
    if (!(t_duration > 0.0)) throw std::invalid_argument("encode_latency: t_duration must be > 0");
    SpikeTrain train;
    train.t_duration = t_duration;
    train.n_inputs = static_cast<int>(values.size());
    train.events.reserve(values.size());
    for (size_t i = 0; i < values.size(); ++i) {
        float x = values[i];
        if (x < 0.0f || x > 1.0f)
            throw std::invalid_argument("encode_latency: value outside [0,1]");
        if (x > 0.0f)
            train.events.push_back({(1.0 - static_cast<double>(x)) * t_duration,
                                    static_cast<int>(i)});
    }
    std::sort(train.events.begin(), train.events.end(), [](const SpikeEvent& a, const SpikeEvent& b) {
        return a.t != b.t ? a.t < b.t : a.input < b.input;
    });
    return train;
}

std::vector<double> decode_features(const std::vector<std::optional<double>>& spike_times,
                                    double t_min, double t_max) {
    if (!(t_min < t_max)) throw std::invalid_argument("decode_features: need t_min < t_max");
    std::vector<double> f(spike_times.size(), 0.0);
    for (size_t i = 0; i < spike_times.size(); ++i) {
        if (!spike_times[i]) continue;  // no spike reads as t_max
        double t = *spike_times[i];
        if (t < t_min || t > t_max)
            throw std::invalid_argument("decode_features: timestamp outside window");
        f[i] = 1.0 - (t - t_min) / (t_max - t_min);
    }
    return f;
}

}  // namespace snnae::coding
