#include "snnae/config.hpp"

#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>

namespace snnae::config {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

long parse_long(const std::string& key, const std::string& value) {
    try {
        size_t pos = 0;
        long v = std::stol(value, &pos);
        if (pos != value.size()) throw std::invalid_argument("");
        return v;
    } catch (...) {
        throw std::invalid_argument("config key '" + key + "': expected integer, got '" + value +
                                    "'");
    }
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        size_t pos = 0;
        double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument("");
        return v;
    } catch (...) {
        throw std::invalid_argument("config key '" + key + "': expected number, got '" + value +
                                    "'");
    }
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "on" || value == "true" || value == "1") return true;
    if (value == "off" || value == "false" || value == "0") return false;
    throw std::invalid_argument("config key '" + key + "': expected on/off, got '" + value + "'");
}

std::string bool_str(bool b) { return b ? "on" : "off"; }

std::string double_str(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

}  // namespace

void RunConfig::set(const std::string& key, const std::string& value) {
    if (key == "dataset") dataset = value;
    else if (key == "variant") variant = value;
    else if (key == "data_root") data_root = value;
    else if (key == "out_dir") out_dir = value;
    else if (key == "extractor") extractor = value;
    else if (key == "color_mode") color_mode = value;
    else if (key == "w_p") w_p = static_cast<int>(parse_long(key, value));
    else if (key == "stride") stride = static_cast<int>(parse_long(key, value));
    else if (key == "r") r = static_cast<int>(parse_long(key, value));
    else if (key == "n_f") n_f = static_cast<int>(parse_long(key, value));
    else if (key == "n_p") n_p = parse_long(key, value);
    else if (key == "epochs") epochs = static_cast<int>(parse_long(key, value));
    else if (key == "n_runs") n_runs = static_cast<int>(parse_long(key, value));
    else if (key == "seed") seed = static_cast<uint64_t>(parse_long(key, value));
    else if (key == "threads") threads = static_cast<int>(parse_long(key, value));
    else if (key == "inhibition") inhibition = parse_bool(key, value);
    else if (key == "use_cache") use_cache = parse_bool(key, value);
    else if (key == "save_descriptors") save_descriptors = parse_bool(key, value);
    else if (key == "hist_bins") hist_bins = static_cast<int>(parse_long(key, value));
    else if (key == "dog_size") dog_size = static_cast<int>(parse_long(key, value));
    else if (key == "dog_center") dog_center = parse_double(key, value);
    else if (key == "dog_surround") dog_surround = parse_double(key, value);
    else if (key == "v_th0") v_th0 = parse_double(key, value);
    else if (key == "v_rest") v_rest = parse_double(key, value);
    else if (key == "w_min") w_min = parse_double(key, value);
    else if (key == "w_max") w_max = parse_double(key, value);
    else if (key == "d_min") d_min = parse_double(key, value);
    else if (key == "d_max") d_max = parse_double(key, value);
    else if (key == "alpha_plus") alpha_plus = parse_double(key, value);
    else if (key == "alpha_minus") alpha_minus = parse_double(key, value);
    else if (key == "beta_plus") beta_plus = parse_double(key, value);
    else if (key == "beta_minus") beta_minus = parse_double(key, value);
    else if (key == "t_obj") t_obj = parse_double(key, value);
    else if (key == "eta") eta = parse_double(key, value);
    else if (key == "t_duration") t_duration = parse_double(key, value);
    else if (key == "rho") rho = parse_double(key, value);
    else if (key == "gamma") gamma = parse_double(key, value);
    else if (key == "lambda") lambda = parse_double(key, value);
    else if (key == "lr") lr = parse_double(key, value);
    else if (key == "batch_size") batch_size = static_cast<int>(parse_long(key, value));
    else if (key == "rho_ada") rho_ada = parse_double(key, value);
    else if (key == "eps_ada") eps_ada = parse_double(key, value);
    else if (key == "svm_c") svm_c = parse_double(key, value);
    else if (key == "svm_eps") svm_eps = parse_double(key, value);
    else if (key == "synth_images") synth_images = static_cast<int>(parse_long(key, value));
    else if (key == "synth_test_images")
        synth_test_images = static_cast<int>(parse_long(key, value));
    else if (key == "synth_side") synth_side = static_cast<int>(parse_long(key, value));
    else if (key == "synth_classes") synth_classes = static_cast<int>(parse_long(key, value));
    else
        throw std::invalid_argument("unknown config key '" + key + "'");
}

RunConfig RunConfig::from_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config " + path.string());
    RunConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument(path.string() + ":" + std::to_string(lineno) +
                                        ": expected 'key = value'");
        cfg.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    cfg.resolve();
    return cfg;
}

void RunConfig::resolve() {
    if (dataset != "cifar10" && dataset != "cifar100" && dataset != "stl10" &&
        dataset != "synthetic")
        throw std::invalid_argument("config: unknown dataset '" + dataset + "'");
    if (variant != "color" && variant != "bw")
        throw std::invalid_argument("config: unknown variant '" + variant + "'");
    if (extractor != "snn" && extractor != "ae" && extractor != "pixels")
        throw std::invalid_argument("config: unknown extractor '" + extractor + "'");

    if (color_mode == "auto") {
        if (extractor == "ae" || extractor == "pixels") color_mode = "raw";
        else color_mode = variant == "bw" ? "grayscale" : "grayscale_plus_color";
    }
    coding::strategy_from_string(color_mode);  // validates the name

    if (n_p < 0) n_p = extractor == "ae" ? 200000 : 100000;
    if (epochs < 0) epochs = extractor == "ae" ? 1000 : 100;

    // sparse-AE constants by data variant and dictionary size
    const bool small = n_f <= 256;
    if (rho < 0.0) rho = (variant == "bw" && small) ? 0.01 : 0.005;
    if (gamma < 0.0) gamma = variant == "bw" ? (small ? 0.05 : 0.1) : (small ? 0.5 : 0.1);
    if (lambda < 0.0) lambda = (variant == "color" && small) ? 1e-4 : 1e-5;

    if (n_runs < 0) throw std::invalid_argument("config: n_runs must be >= 0");
    if (w_p < 1 || stride < 1 || r < 1) throw std::invalid_argument("config: bad protocol sizes");
}

coding::Strategy RunConfig::strategy() const { return coding::strategy_from_string(color_mode); }

std::filesystem::path RunConfig::resolved_data_root() const {
    if (!data_root.empty()) return data_root;
    if (const char* env = std::getenv("SNNAE_DATA_ROOT")) return env;
    return "data";
}

snn::SnnConfig RunConfig::snn_config(int n_inputs, uint64_t part_seed) const {
    snn::SnnConfig c;
    c.n_f = n_f;
    c.n_inputs = n_inputs;
    c.v_th0 = v_th0;
    c.v_rest = v_rest;
    c.w_min = w_min;
    c.w_max = w_max;
    c.d_min = d_min;
    c.d_max = d_max;
    c.alpha_plus = alpha_plus;
    c.alpha_minus = alpha_minus;
    c.beta_plus = beta_plus;
    c.beta_minus = beta_minus;
    c.t_obj = t_obj;
    c.eta = eta;
    c.t_duration = t_duration;
    c.seed = part_seed;
    return c;
}

ae::AeConfig RunConfig::ae_config(int n_inputs, uint64_t part_seed) const {
    ae::AeConfig c;
    c.n_f = n_f;
    c.n_inputs = n_inputs;
    c.rho = rho;
    c.gamma = gamma;
    c.lambda = lambda;
    c.lr = lr;
    c.epochs = epochs;
    c.batch_size = batch_size;
    c.rho_ada = rho_ada;
    c.eps_ada = eps_ada;
    c.seed = part_seed;
    return c;
}

std::map<std::string, std::string> RunConfig::items() const {
    RunConfig resolved = *this;
    resolved.resolve();
    std::map<std::string, std::string> m;
    m["dataset"] = resolved.dataset;
    m["variant"] = resolved.variant;
    m["data_root"] = resolved.data_root;
    m["out_dir"] = resolved.out_dir;
    m["extractor"] = resolved.extractor;
    m["color_mode"] = resolved.color_mode;
    m["w_p"] = std::to_string(resolved.w_p);
    m["stride"] = std::to_string(resolved.stride);
    m["r"] = std::to_string(resolved.r);
    m["n_f"] = std::to_string(resolved.n_f);
    m["n_p"] = std::to_string(resolved.n_p);
    m["epochs"] = std::to_string(resolved.epochs);
    m["n_runs"] = std::to_string(resolved.n_runs);
    m["seed"] = std::to_string(resolved.seed);
    m["threads"] = std::to_string(resolved.threads);
    m["inhibition"] = bool_str(resolved.inhibition);
    m["use_cache"] = bool_str(resolved.use_cache);
    m["save_descriptors"] = bool_str(resolved.save_descriptors);
    m["hist_bins"] = std::to_string(resolved.hist_bins);
    m["dog_size"] = std::to_string(resolved.dog_size);
    m["dog_center"] = double_str(resolved.dog_center);
    m["dog_surround"] = double_str(resolved.dog_surround);
    m["v_th0"] = double_str(resolved.v_th0);
    m["v_rest"] = double_str(resolved.v_rest);
    m["w_min"] = double_str(resolved.w_min);
    m["w_max"] = double_str(resolved.w_max);
    m["d_min"] = double_str(resolved.d_min);
    m["d_max"] = double_str(resolved.d_max);
    m["alpha_plus"] = double_str(resolved.alpha_plus);
    m["alpha_minus"] = double_str(resolved.alpha_minus);
    m["beta_plus"] = double_str(resolved.beta_plus);
    m["beta_minus"] = double_str(resolved.beta_minus);
    m["t_obj"] = double_str(resolved.t_obj);
    m["eta"] = double_str(resolved.eta);
    m["t_duration"] = double_str(resolved.t_duration);
    m["rho"] = double_str(resolved.rho);
    m["gamma"] = double_str(resolved.gamma);
    m["lambda"] = double_str(resolved.lambda);
    m["lr"] = double_str(resolved.lr);
    m["batch_size"] = std::to_string(resolved.batch_size);
    m["rho_ada"] = double_str(resolved.rho_ada);
    m["eps_ada"] = double_str(resolved.eps_ada);
    m["svm_c"] = double_str(resolved.svm_c);
    m["svm_eps"] = double_str(resolved.svm_eps);
    m["synth_images"] = std::to_string(resolved.synth_images);
    m["synth_test_images"] = std::to_string(resolved.synth_test_images);
    m["synth_side"] = std::to_string(resolved.synth_side);
    m["synth_classes"] = std::to_string(resolved.synth_classes);
    return m;
}

}  // namespace snnae::config
