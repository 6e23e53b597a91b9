#include "snnae/serialize.hpp"

#include <bit>
#include <cstring>
#include <fcntl.h>
#include <fstream>
#include <unistd.h>

static_assert(std::endian::native == std::endian::little,
              "file formats are little-endian; big-endian hosts are unsupported");

namespace snnae::serialize {

namespace fs = std::filesystem;

namespace {

constexpr char kDictMagic[8] = {'S', 'N', 'A', 'E', 'D', 'I', 'C', 'T'};
constexpr char kDescMagic[8] = {'S', 'N', 'A', 'E', 'D', 'E', 'S', 'C'};
constexpr char kModelMagic[8] = {'S', 'N', 'A', 'E', 'M', 'O', 'D', 'L'};
constexpr char kStackMagic[8] = {'S', 'N', 'A', 'E', 'S', 'T', 'A', 'K'};
constexpr uint32_t kVersion = 1;

template <typename T>
void write_pod(std::ostream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::istream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in) throw std::runtime_error("truncated file");
    return v;
}

void write_vec(std::ostream& out, const std::vector<double>& v) {
    out.write(reinterpret_cast<const char*>(v.data()),
              static_cast<std::streamsize>(v.size() * sizeof(double)));
}

void read_vec(std::istream& in, std::vector<double>& v, size_t n) {
    v.resize(n);
    in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(n * sizeof(double)));
    if (!in) throw std::runtime_error("truncated file");
}

void check_magic(std::istream& in, const char (&magic)[8], const fs::path& path) {
    char buf[8];
    in.read(buf, 8);
    if (!in || std::memcmp(buf, magic, 8) != 0)
        throw std::runtime_error(path.string() + ": bad magic");
    const auto version = read_pod<uint32_t>(in);
    if (version != kVersion)
        throw std::runtime_error(path.string() + ": unsupported version " +
                                 std::to_string(version));
}

void write_snn_part(std::ostream& out, const snn::SnnState& s) {
    const auto& c = s.config;
    write_pod<int32_t>(out, c.n_f);
    write_pod<int32_t>(out, c.n_inputs);
    for (double v : {c.v_th0, c.v_rest, c.w_min, c.w_max, c.d_min, c.d_max, c.alpha_plus,
                     c.alpha_minus, c.beta_plus, c.beta_minus, c.t_obj, c.eta, c.t_duration})
        write_pod(out, v);
    write_pod<uint64_t>(out, c.seed);
    write_vec(out, s.weights);
    write_vec(out, s.delays);
    write_vec(out, s.thresholds);
}

snn::SnnState read_snn_part(std::istream& in) {
    snn::SnnState s;
    auto& c = s.config;
    c.n_f = read_pod<int32_t>(in);
    c.n_inputs = read_pod<int32_t>(in);
    for (double* v : {&c.v_th0, &c.v_rest, &c.w_min, &c.w_max, &c.d_min, &c.d_max, &c.alpha_plus,
                      &c.alpha_minus, &c.beta_plus, &c.beta_minus, &c.t_obj, &c.eta, &c.t_duration})
        *v = read_pod<double>(in);
    c.seed = read_pod<uint64_t>(in);
    const size_t n = static_cast<size_t>(c.n_f) * c.n_inputs;
    read_vec(in, s.weights, n);
    read_vec(in, s.delays, n);
    read_vec(in, s.thresholds, static_cast<size_t>(c.n_f));
    s.rng.seed(c.seed);
    return s;
}

void write_ae_part(std::ostream& out, const ae::AeState& s) {
    const auto& c = s.config;
    write_pod<int32_t>(out, c.n_f);
    write_pod<int32_t>(out, c.n_inputs);
    for (double v : {c.rho, c.gamma, c.lambda, c.lr, c.rho_ada, c.eps_ada}) write_pod(out, v);
    write_pod<int32_t>(out, c.epochs);
    write_pod<int32_t>(out, c.batch_size);
    write_pod<uint64_t>(out, c.seed);
    write_vec(out, s.w_enc);
    write_vec(out, s.b_enc);
    write_vec(out, s.w_dec);
    write_vec(out, s.b_dec);
}

ae::AeState read_ae_part(std::istream& in) {
    ae::AeConfig c;
    c.n_f = read_pod<int32_t>(in);
    c.n_inputs = read_pod<int32_t>(in);
    for (double* v : {&c.rho, &c.gamma, &c.lambda, &c.lr, &c.rho_ada, &c.eps_ada})
        *v = read_pod<double>(in);
    c.epochs = read_pod<int32_t>(in);
    c.batch_size = read_pod<int32_t>(in);
    c.seed = read_pod<uint64_t>(in);
    ae::AeState s = ae::init_ae(c);  // sized state; parameters overwritten below
    const size_t n = static_cast<size_t>(c.n_f) * c.n_inputs;
    read_vec(in, s.w_enc, n);
    read_vec(in, s.b_enc, static_cast<size_t>(c.n_f));
    read_vec(in, s.w_dec, n);
    read_vec(in, s.b_dec, static_cast<size_t>(c.n_inputs));
    return s;
}

}  // namespace

void save_dictionary(const classify::FeatureDictionary& dict, const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out.write(kDictMagic, 8);
    write_pod<uint32_t>(out, kVersion);
    const bool is_snn = dict.kind == classify::FeatureDictionary::Kind::snn;
    write_pod<uint32_t>(out, is_snn ? 1u : 2u);
    write_pod<uint32_t>(out, static_cast<uint32_t>(dict.n_parts()));
    if (is_snn)
        for (const auto& p : dict.snn_parts) write_snn_part(out, p);
    else
        for (const auto& p : dict.ae_parts) write_ae_part(out, p);
    if (!out) throw std::runtime_error("write failed on " + path.string());
}

classify::FeatureDictionary load_dictionary(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    check_magic(in, kDictMagic, path);
    const auto kind = read_pod<uint32_t>(in);
    const auto parts = read_pod<uint32_t>(in);
    classify::FeatureDictionary dict;
    if (kind == 1) {
        dict.kind = classify::FeatureDictionary::Kind::snn;
        for (uint32_t i = 0; i < parts; ++i) dict.snn_parts.push_back(read_snn_part(in));
    } else if (kind == 2) {
        dict.kind = classify::FeatureDictionary::Kind::ae;
        for (uint32_t i = 0; i < parts; ++i) dict.ae_parts.push_back(read_ae_part(in));
    } else {
        throw std::runtime_error(path.string() + ": unknown dictionary kind");
    }
    return dict;
}

void save_descriptors(const classify::Descriptors& d, int n_classes, const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out.write(kDescMagic, 8);
    write_pod<uint32_t>(out, kVersion);
    write_pod<uint64_t>(out, d.n);
    write_pod<int32_t>(out, d.dim);
    write_pod<int32_t>(out, n_classes);
    for (double v : d.x) write_pod<float>(out, static_cast<float>(v));
    for (int label : d.y) write_pod<int32_t>(out, label);
    if (!out) throw std::runtime_error("write failed on " + path.string());
}

classify::Descriptors load_descriptors(const fs::path& path, int* n_classes) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    check_magic(in, kDescMagic, path);
    classify::Descriptors d;
    d.n = read_pod<uint64_t>(in);
    d.dim = read_pod<int32_t>(in);
    const auto nc = read_pod<int32_t>(in);
    if (n_classes) *n_classes = nc;
    d.x.resize(d.n * static_cast<size_t>(d.dim));
    std::vector<float> buf(d.x.size());
    in.read(reinterpret_cast<char*>(buf.data()),
            static_cast<std::streamsize>(buf.size() * sizeof(float)));
    if (!in) throw std::runtime_error("truncated descriptor file");
    for (size_t i = 0; i < buf.size(); ++i) d.x[i] = buf[i];
    d.y.resize(d.n);
    in.read(reinterpret_cast<char*>(d.y.data()),
            static_cast<std::streamsize>(d.y.size() * sizeof(int32_t)));
    if (!in) throw std::runtime_error("truncated descriptor file");
    return d;
}

void save_model(const classify::LinearModel& m, const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out.write(kModelMagic, 8);
    write_pod<uint32_t>(out, kVersion);
    write_pod<int32_t>(out, m.n_classes);
    write_pod<int32_t>(out, m.dim);
    write_vec(out, m.mean);
    write_vec(out, m.scale);
    write_vec(out, m.w);
    if (!out) throw std::runtime_error("write failed on " + path.string());
}

classify::LinearModel load_model(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    check_magic(in, kModelMagic, path);
    classify::LinearModel m;
    m.n_classes = read_pod<int32_t>(in);
    m.dim = read_pod<int32_t>(in);
    read_vec(in, m.mean, static_cast<size_t>(m.dim));
    read_vec(in, m.scale, static_cast<size_t>(m.dim));
    read_vec(in, m.w, static_cast<size_t>(m.n_classes) * (m.dim + 1));
    return m;
}

StackShape stack_shape(const std::vector<coding::ChannelStack>& stacks) {
    StackShape shape;
    if (stacks.empty()) throw std::invalid_argument("stack_shape: empty stack list");
    shape.h = stacks[0].data.h;
    shape.w = stacks[0].data.w;
    for (const auto& s : stacks) shape.parts.emplace_back(s.data.c, s.strategy);
    return shape;
}

namespace {

size_t record_floats(const StackShape& shape) {
    size_t n = 0;
    for (const auto& [c, _] : shape.parts) n += static_cast<size_t>(shape.h) * shape.w * c;
    return n;
}

size_t header_bytes(const StackShape& shape) {
    return 8 + 4 + 8 + 4 + 4 + 4 + shape.parts.size() * 8;
}

void write_stack_header(std::ostream& out, const StackShape& shape, uint64_t count) {
    out.write(kStackMagic, 8);
    write_pod<uint32_t>(out, kVersion);
    write_pod<uint64_t>(out, count);
    write_pod<int32_t>(out, shape.h);
    write_pod<int32_t>(out, shape.w);
    write_pod<int32_t>(out, static_cast<int32_t>(shape.parts.size()));
    for (const auto& [c, strat] : shape.parts) {
        write_pod<int32_t>(out, c);
        write_pod<int32_t>(out, static_cast<int32_t>(strat));
    }
}

}  // namespace

struct StackCacheWriter::Impl {
    std::ofstream out;
    StackShape shape;
    uint64_t expected = 0;
    uint64_t written = 0;
    fs::path path;
};

StackCacheWriter::StackCacheWriter(const fs::path& path, const StackShape& shape, uint64_t count)
    : impl_(std::make_unique<Impl>()) {
    impl_->out.open(path, std::ios::binary);
    if (!impl_->out) throw std::runtime_error("cannot write " + path.string());
    impl_->shape = shape;
    impl_->expected = count;
    impl_->path = path;
    write_stack_header(impl_->out, shape, count);
}

StackCacheWriter::~StackCacheWriter() = default;

void StackCacheWriter::append(const std::vector<coding::ChannelStack>& stacks) {
    if (stack_shape(stacks) != impl_->shape)
        throw std::invalid_argument("stack cache: shape mismatch on append");
    for (const auto& s : stacks)
        impl_->out.write(reinterpret_cast<const char*>(s.data.v.data()),
                         static_cast<std::streamsize>(s.data.v.size() * sizeof(float)));
    ++impl_->written;
}

void StackCacheWriter::close() {
    if (impl_->written != impl_->expected)
        throw std::runtime_error("stack cache: wrote " + std::to_string(impl_->written) +
                                 " of " + std::to_string(impl_->expected) + " records");
    impl_->out.flush();
    if (!impl_->out) throw std::runtime_error("write failed on " + impl_->path.string());
    impl_->out.close();
}

struct StackCacheReader::Impl {
    int fd = -1;
    StackShape shape;
    uint64_t count = 0;
    size_t header = 0;
    size_t record = 0;  // bytes

    ~Impl() {
        if (fd >= 0) ::close(fd);
    }
};

StackCacheReader::StackCacheReader(const fs::path& path) : impl_(std::make_unique<Impl>()) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    check_magic(in, kStackMagic, path);
    impl_->count = read_pod<uint64_t>(in);
    impl_->shape.h = read_pod<int32_t>(in);
    impl_->shape.w = read_pod<int32_t>(in);
    const auto parts = read_pod<int32_t>(in);
    for (int i = 0; i < parts; ++i) {
        const auto c = read_pod<int32_t>(in);
        const auto strat = read_pod<int32_t>(in);
        impl_->shape.parts.emplace_back(c, static_cast<coding::Strategy>(strat));
    }
    impl_->header = header_bytes(impl_->shape);
    impl_->record = record_floats(impl_->shape) * sizeof(float);
    const auto size = fs::file_size(path);
    if (size != impl_->header + impl_->record * impl_->count)
        throw std::runtime_error(path.string() + ": truncated stack cache");
    impl_->fd = ::open(path.c_str(), O_RDONLY);
    if (impl_->fd < 0) throw std::runtime_error("cannot open " + path.string());
}

StackCacheReader::~StackCacheReader() = default;
StackCacheReader::StackCacheReader(StackCacheReader&&) noexcept = default;

const StackShape& StackCacheReader::shape() const { return impl_->shape; }
uint64_t StackCacheReader::count() const { return impl_->count; }

std::vector<coding::ChannelStack> StackCacheReader::read(uint64_t index) const {
    if (index >= impl_->count) throw std::out_of_range("stack cache: record out of range");
    std::vector<float> buf(impl_->record / sizeof(float));
    const off_t off = static_cast<off_t>(impl_->header + impl_->record * index);
    size_t done = 0;
    while (done < impl_->record) {
        const ssize_t got = ::pread(impl_->fd, reinterpret_cast<char*>(buf.data()) + done,
                                    impl_->record - done, off + static_cast<off_t>(done));
        if (got <= 0) throw std::runtime_error("stack cache: read failed");
        done += static_cast<size_t>(got);
    }
    std::vector<coding::ChannelStack> stacks;
    size_t cursor = 0;
    for (const auto& [c, strat] : impl_->shape.parts) {
        coding::ChannelStack s;
        s.strategy = strat;
        s.data = Tensor3(impl_->shape.h, impl_->shape.w, c);
        std::copy_n(buf.begin() + cursor, s.data.v.size(), s.data.v.begin());
        cursor += s.data.v.size();
        stacks.push_back(std::move(s));
    }
    return stacks;
}

bool stack_cache_valid(const fs::path& path, const StackShape& shape, uint64_t count) {
    if (!fs::exists(path)) return false;
    try {
        StackCacheReader reader(path);
        return reader.shape() == shape && reader.count() == count;
    } catch (const std::exception&) {
        return false;
    }
}

}  // namespace snnae::serialize
