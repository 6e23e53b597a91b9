#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "snnae/metrics.hpp"
#include "snnae/pipeline.hpp"

namespace py = pybind11;
using namespace snnae;

namespace {

data::LabeledImage image_from_array(py::array_t<float, py::array::c_style | py::array::forcecast> a,
                                    int label = 0) {
    if (a.ndim() != 3) throw std::invalid_argument("expected an (H, W, C) float array");
    data::LabeledImage img;
    img.pixels = Tensor3(static_cast<int>(a.shape(0)), static_cast<int>(a.shape(1)),
                         static_cast<int>(a.shape(2)));
    std::copy_n(a.data(), img.pixels.size(), img.pixels.v.data());
    img.label = label;
    return img;
}

py::array_t<float> tensor_to_array(const Tensor3& t) {
    py::array_t<float> a({t.h, t.w, t.c});
    std::copy_n(t.v.data(), t.v.size(), a.mutable_data());
    return a;
}

py::array_t<double> map_to_array(const coding::Map& m) {
    py::array_t<double> a({m.h, m.w});
    std::copy_n(m.v.data(), m.v.size(), a.mutable_data());
    return a;
}

coding::Map map_from_array(py::array_t<double, py::array::c_style | py::array::forcecast> a) {
    if (a.ndim() != 2) throw std::invalid_argument("expected an (H, W) array");
    coding::Map m(static_cast<int>(a.shape(0)), static_cast<int>(a.shape(1)));
    std::copy_n(a.data(), m.v.size(), m.v.data());
    return m;
}

std::vector<Tensor3> patches_from_array(
    py::array_t<float, py::array::c_style | py::array::forcecast> a) {
    if (a.ndim() != 2) throw std::invalid_argument("expected an (N, dim) float array");
    std::vector<Tensor3> patches(static_cast<size_t>(a.shape(0)));
    const int dim = static_cast<int>(a.shape(1));
    for (ssize_t i = 0; i < a.shape(0); ++i) {
        Tensor3 t(1, 1, dim);
        std::copy_n(a.data() + i * dim, dim, t.v.data());
        patches[static_cast<size_t>(i)] = std::move(t);
    }
    return patches;
}

py::tuple set_to_python(const data::LabeledImageSet& set) {
    if (set.images.empty()) return py::make_tuple(py::array_t<float>(), py::array_t<int>());
    const auto& first = set.images[0].pixels;
    py::array_t<float> images({static_cast<int>(set.images.size()), first.h, first.w, first.c});
    py::array_t<int> labels(static_cast<ssize_t>(set.images.size()));
    float* out = images.mutable_data();
    for (size_t i = 0; i < set.images.size(); ++i) {
        std::copy_n(set.images[i].pixels.v.data(), set.images[i].pixels.size(),
                    out + i * set.images[i].pixels.size());
        labels.mutable_data()[i] = set.images[i].label;
    }
    return py::make_tuple(images, labels);
}

coding::DogParams dog_from_kwargs(int size, double center, double surround) {
    coding::DogParams p;
    p.size = size;
    p.center_sigma = center;
    p.surround_sigma = surround;
    return p;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Spiking-network and sparse auto-encoder feature learning core";

    // ------------------------------------------------------------------ data
    m.def(
        "make_synthetic",
        [](int n, int side, int classes, uint64_t seed) {
            return set_to_python(data::make_synthetic(n, side, classes, seed));
        },
        py::arg("n_images"), py::arg("side"), py::arg("n_classes"), py::arg("seed"),
        "Class-conditional oriented-bar toy set; returns (images, labels).");

    m.def(
        "load_cifar10",
        [](const std::string& path, const std::string& split) {
            return set_to_python(
                data::load_cifar10(path, split == "train" ? data::Split::train : data::Split::test));
        },
        py::arg("path"), py::arg("split"));

    m.def(
        "to_grayscale",
        [](py::array_t<float, py::array::c_style | py::array::forcecast> a) {
            return tensor_to_array(data::to_grayscale(image_from_array(a)).pixels);
        },
        py::arg("image"));

    // ---------------------------------------------------------------- coding
    m.def(
        "gaussian_kernel",
        [](int size, double sigma) { return map_to_array(coding::gaussian_kernel(size, sigma)); },
        py::arg("size"), py::arg("sigma"));

    m.def(
        "dog_filter",
        [](py::array_t<double, py::array::c_style | py::array::forcecast> a, int size,
           double center, double surround) {
            return map_to_array(coding::dog_filter(map_from_array(a),
                                                   dog_from_kwargs(size, center, surround)));
        },
        py::arg("map"), py::arg("size") = 7, py::arg("center_sigma") = 1.0,
        py::arg("surround_sigma") = 2.0);

    m.def(
        "encode_image",
        [](py::array_t<float, py::array::c_style | py::array::forcecast> a,
           const std::string& strategy, int size, double center, double surround) {
            const auto stacks = coding::encode_image(image_from_array(a),
                                                     coding::strategy_from_string(strategy),
                                                     dog_from_kwargs(size, center, surround));
            py::list out;
            for (const auto& s : stacks) out.append(tensor_to_array(s.data));
            return out;
        },
        py::arg("image"), py::arg("strategy"), py::arg("dog_size") = 7,
        py::arg("dog_center") = 1.0, py::arg("dog_surround") = 2.0,
        "Coded channel stacks of one image (a list, two entries for "
        "grayscale_plus_color).");

    m.def(
        "encode_latency",
        [](py::array_t<float, py::array::c_style | py::array::forcecast> a, double t_duration) {
            if (a.ndim() != 1) throw std::invalid_argument("expected a flat value array");
            const auto train = coding::encode_latency(
                std::span<const float>(a.data(), static_cast<size_t>(a.shape(0))), t_duration);
            py::list events;
            for (const auto& ev : train.events) events.append(py::make_tuple(ev.t, ev.input));
            return events;
        },
        py::arg("values"), py::arg("t_duration") = 1.0);

    m.def(
        "decode_features",
        [](const std::vector<std::optional<double>>& times, double t_min, double t_max) {
            return coding::decode_features(times, t_min, t_max);
        },
        py::arg("spike_times"), py::arg("t_min"), py::arg("t_max"));

    // ------------------------------------------------------------------- snn
    py::class_<snn::SnnState>(m, "Snn")
        .def(py::init([](int n_f, int n_inputs, uint64_t seed, double v_th0, double d_max,
                         double alpha, double beta, double t_obj, double eta) {
                 snn::SnnConfig cfg;
                 cfg.n_f = n_f;
                 cfg.n_inputs = n_inputs;
                 cfg.seed = seed;
                 cfg.v_th0 = v_th0;
                 cfg.d_max = d_max;
                 cfg.alpha_plus = cfg.alpha_minus = alpha;
                 cfg.beta_plus = cfg.beta_minus = beta;
                 cfg.t_obj = t_obj;
                 cfg.eta = eta;
                 return snn::init_network(cfg);
             }),
             py::arg("n_f"), py::arg("n_inputs"), py::arg("seed") = 0, py::arg("v_th0") = 0.02,
             py::arg("d_max") = 0.01, py::arg("alpha") = 0.001, py::arg("beta") = 1.0,
             py::arg("t_obj") = 0.7, py::arg("eta") = 0.001)
        .def(
            "train",
            [](snn::SnnState& s,
               py::array_t<float, py::array::c_style | py::array::forcecast> patches, int epochs) {
                const auto log = snn::train(s, patches_from_array(patches), epochs);
                py::dict d;
                d["win_counts"] = log.win_counts;
                std::vector<int> fired;
                for (const auto& e : log.epochs) fired.push_back(e.fired);
                d["fired_per_epoch"] = fired;
                return d;
            },
            py::arg("patches"), py::arg("epochs"),
            "Presents every row of (N, n_inputs) once per epoch, in place.")
        .def(
            "extract",
            [](const snn::SnnState& s,
               py::array_t<float, py::array::c_style | py::array::forcecast> patch,
               bool inhibition) {
                if (patch.ndim() != 1) throw std::invalid_argument("expected a flat patch");
                return snn::extract_features(
                    s, std::span<const float>(patch.data(), static_cast<size_t>(patch.shape(0))),
                    inhibition);
            },
            py::arg("patch"), py::arg("inhibition") = true)
        .def_property_readonly("weights",
                               [](const snn::SnnState& s) {
                                   py::array_t<double> a({s.config.n_f, s.config.n_inputs});
                                   std::copy_n(s.weights.data(), s.weights.size(),
                                               a.mutable_data());
                                   return a;
                               })
        .def_property_readonly("thresholds",
                               [](const snn::SnnState& s) { return s.thresholds; })
        .def_property_readonly("n_f", [](const snn::SnnState& s) { return s.config.n_f; });

    // -------------------------------------------------------------------- ae
    py::class_<ae::AeState>(m, "SparseAutoencoder")
        .def(py::init([](int n_f, int n_inputs, double rho, double gamma, double lambda,
                         int batch_size, uint64_t seed) {
                 ae::AeConfig cfg;
                 cfg.n_f = n_f;
                 cfg.n_inputs = n_inputs;
                 cfg.rho = rho;
                 cfg.gamma = gamma;
                 cfg.lambda = lambda;
                 cfg.batch_size = batch_size;
                 cfg.seed = seed;
                 return ae::init_ae(cfg);
             }),
             py::arg("n_f"), py::arg("n_inputs"), py::arg("rho") = 0.01, py::arg("gamma") = 0.05,
             py::arg("lambda_") = 1e-5, py::arg("batch_size") = 128, py::arg("seed") = 0)
        .def(
            "train",
            [](ae::AeState& s,
               py::array_t<double, py::array::c_style | py::array::forcecast> samples,
               int epochs) {
                if (samples.ndim() != 2 || samples.shape(1) != s.config.n_inputs)
                    throw std::invalid_argument("expected an (N, n_inputs) array");
                const auto log = ae::train(
                    s,
                    std::span<const double>(samples.data(),
                                            static_cast<size_t>(samples.size())),
                    static_cast<size_t>(samples.shape(0)), epochs);
                return log.epoch_loss;
            },
            py::arg("samples"), py::arg("epochs"))
        .def(
            "encode",
            [](const ae::AeState& s,
               py::array_t<double, py::array::c_style | py::array::forcecast> x) {
                if (x.ndim() != 1) throw std::invalid_argument("expected a flat sample");
                return ae::encode(s, std::span<const double>(x.data(),
                                                             static_cast<size_t>(x.shape(0))));
            },
            py::arg("x"))
        .def(
            "reconstruct",
            [](const ae::AeState& s,
               py::array_t<double, py::array::c_style | py::array::forcecast> x) {
                if (x.ndim() != 1) throw std::invalid_argument("expected a flat sample");
                return ae::decode(
                    s, ae::encode(s, std::span<const double>(x.data(),
                                                             static_cast<size_t>(x.shape(0)))));
            },
            py::arg("x"))
        .def(
            "loss",
            [](const ae::AeState& s,
               py::array_t<double, py::array::c_style | py::array::forcecast> batch) {
                if (batch.ndim() != 2) throw std::invalid_argument("expected an (N, dim) batch");
                const auto parts = ae::loss(
                    s,
                    std::span<const double>(batch.data(), static_cast<size_t>(batch.size())),
                    static_cast<int>(batch.shape(0)));
                py::dict d;
                d["total"] = parts.total;
                d["mse"] = parts.mse;
                d["l2"] = parts.l2;
                d["kl"] = parts.kl;
                return d;
            },
            py::arg("batch"))
        .def_property_readonly("encoder_weights", [](const ae::AeState& s) {
            py::array_t<double> a({s.config.n_f, s.config.n_inputs});
            std::copy_n(s.w_enc.data(), s.w_enc.size(), a.mutable_data());
            return a;
        });

    // -------------------------------------------------------------- classify
    py::class_<classify::LinearModel>(m, "LinearModel")
        .def_property_readonly("n_classes",
                               [](const classify::LinearModel& m_) { return m_.n_classes; })
        .def(
            "predict",
            [](const classify::LinearModel& model,
               py::array_t<double, py::array::c_style | py::array::forcecast> x) {
                if (x.ndim() == 1)
                    return py::cast(model.predict(std::span<const double>(
                        x.data(), static_cast<size_t>(x.shape(0)))));
                std::vector<int> out(static_cast<size_t>(x.shape(0)));
                for (ssize_t i = 0; i < x.shape(0); ++i)
                    out[static_cast<size_t>(i)] = model.predict(std::span<const double>(
                        x.data() + i * x.shape(1), static_cast<size_t>(x.shape(1))));
                return py::cast(out);
            },
            py::arg("x"));

    m.def(
        "train_linear",
        [](py::array_t<double, py::array::c_style | py::array::forcecast> x,
           const std::vector<int>& y, int n_classes, double c, double eps, uint64_t seed) {
            if (x.ndim() != 2 || static_cast<size_t>(x.shape(0)) != y.size())
                throw std::invalid_argument("expected (N, dim) features and N labels");
            classify::Descriptors d;
            d.n = y.size();
            d.dim = static_cast<int>(x.shape(1));
            d.x.assign(x.data(), x.data() + x.size());
            d.y = y;
            return classify::train_linear(d, n_classes, c, eps, seed);
        },
        py::arg("x"), py::arg("y"), py::arg("n_classes"), py::arg("c") = 1.0,
        py::arg("eps") = 0.1, py::arg("seed") = 1);

    m.def(
        "sum_pool",
        [](py::array_t<double, py::array::c_style | py::array::forcecast> maps, int r) {
            if (maps.ndim() != 3 || maps.shape(0) != maps.shape(1))
                throw std::invalid_argument("expected a (k, k, n_f) array");
            classify::FeatureMaps fm;
            fm.k = static_cast<int>(maps.shape(0));
            fm.n_f = static_cast<int>(maps.shape(2));
            fm.values.assign(maps.data(), maps.data() + maps.size());
            return classify::sum_pool(fm, r);
        },
        py::arg("maps"), py::arg("r"));

    // --------------------------------------------------------------- metrics
    m.def(
        "sparseness",
        [](py::array_t<double, py::array::c_style | py::array::forcecast> f) {
            return metrics::sparseness(
                std::span<const double>(f.data(), static_cast<size_t>(f.size())));
        },
        py::arg("f"));

    m.def(
        "coherence",
        [](py::array_t<double, py::array::c_style | py::array::forcecast> rows) {
            if (rows.ndim() != 2) throw std::invalid_argument("expected an (n_f, dim) array");
            const auto rep = metrics::coherence_matrix(
                std::span<const double>(rows.data(), static_cast<size_t>(rows.size())),
                static_cast<int>(rows.shape(0)), static_cast<int>(rows.shape(1)));
            py::dict d;
            py::array_t<double> mu({rep.n_f, rep.n_f});
            std::copy_n(rep.mu.data(), rep.mu.size(), mu.mutable_data());
            d["mu"] = mu;
            d["mean"] = rep.mean;
            d["std"] = rep.stddev;
            d["max_offdiag"] = rep.max_offdiag;
            d["dead_units"] = rep.dead_units;
            return d;
        },
        py::arg("rows"));
}
