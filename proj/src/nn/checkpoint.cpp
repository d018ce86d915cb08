#include "pcgdn/nn/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <map>

#include "pcgdn/errors.hpp"

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes little-endian");

namespace pcgdn::nn {

namespace {

constexpr char kMagic[4] = {'P', 'C', 'G', 'U'};
constexpr const char* kOptPrefix = "__opt__/";

template <typename T>
void write_le(std::ofstream& f, T v) {
    f.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

template <typename T>
T read_le(std::ifstream& f, const std::string& path) {
    T v;
    f.read(reinterpret_cast<char*>(&v), sizeof(v));
    if (!f) throw CheckpointError("truncated checkpoint: " + path);
    return v;
}

} // namespace

void save_checkpoint(const std::string& path, const std::vector<TensorRecord>& tensors) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open checkpoint for writing: " + path);
    f.write(kMagic, 4);
    write_le<uint32_t>(f, kCheckpointVersion);
    write_le<uint32_t>(f, static_cast<uint32_t>(tensors.size()));
    for (const auto& t : tensors) {
        if (t.name.size() > UINT16_MAX) throw CheckpointError("tensor name too long: " + t.name);
        write_le<uint16_t>(f, static_cast<uint16_t>(t.name.size()));
        f.write(t.name.data(), static_cast<std::streamsize>(t.name.size()));
        write_le<uint8_t>(f, static_cast<uint8_t>(t.dims.size()));
        size_t n = 1;
        for (const int d : t.dims) {
            write_le<uint32_t>(f, static_cast<uint32_t>(d));
            n *= static_cast<size_t>(d);
        }
        if (n != t.data.size()) throw CheckpointError("dims/payload mismatch for " + t.name);
        f.write(reinterpret_cast<const char*>(t.data.data()),
                static_cast<std::streamsize>(t.data.size() * sizeof(float)));
    }
    if (!f) throw IoError("short write: " + path);
}

std::vector<TensorRecord> load_checkpoint(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open checkpoint: " + path);
    char magic[4];
    f.read(magic, 4);
    if (!f || std::memcmp(magic, kMagic, 4) != 0)
        throw CheckpointError("bad magic (not a checkpoint): " + path);
    const auto version = read_le<uint32_t>(f, path);
    if (version != kCheckpointVersion)
        throw CheckpointError("unsupported checkpoint version " + std::to_string(version) + ": " +
                              path);
    const auto count = read_le<uint32_t>(f, path);
    std::vector<TensorRecord> out;
    out.reserve(count);
    for (uint32_t i = 0; i < count; ++i) {
        TensorRecord t;
        const auto name_len = read_le<uint16_t>(f, path);
        t.name.resize(name_len);
        f.read(t.name.data(), name_len);
        if (!f) throw CheckpointError("truncated checkpoint: " + path);
        const auto ndim = read_le<uint8_t>(f, path);
        size_t n = 1;
        for (int d = 0; d < ndim; ++d) {
            const auto dim = read_le<uint32_t>(f, path);
            if (dim == 0) throw CheckpointError("zero dimension in checkpoint: " + path);
            t.dims.push_back(static_cast<int>(dim));
            n *= dim;
        }
        t.data.resize(n);
        f.read(reinterpret_cast<char*>(t.data.data()),
               static_cast<std::streamsize>(n * sizeof(float)));
        if (!f) throw CheckpointError("truncated checkpoint: " + path);
        out.push_back(std::move(t));
    }
    return out;
}

void save_model_checkpoint(const std::string& path, Model& model, const NadamState<float>* opt) {
    std::vector<TensorRecord> records;
    for (const auto& [name, tensor] : model.state_tensors())
        records.push_back({name, tensor->shape, tensor->data});
    if (opt) {
        const auto params = model.trainable_params();
        if (opt->m.size() != params.size())
            throw CheckpointError("optimizer state does not match model parameters");
        records.push_back({std::string(kOptPrefix) + "step",
                           {1},
                           {static_cast<float>(opt->step)}});
        for (size_t i = 0; i < params.size(); ++i) {
            records.push_back(
                {std::string(kOptPrefix) + "m/" + params[i].name, opt->m[i].shape, opt->m[i].data});
            records.push_back(
                {std::string(kOptPrefix) + "v/" + params[i].name, opt->v[i].shape, opt->v[i].data});
        }
    }
    save_checkpoint(path, records);
}

void load_model_checkpoint(const std::string& path, Model& model, NadamState<float>* opt) {
    const auto records = load_checkpoint(path);
    std::map<std::string, const TensorRecord*> by_name;
    for (const auto& r : records) by_name[r.name] = &r;

    auto restore = [&](const std::string& name, Tensor& dst) {
        const auto it = by_name.find(name);
        if (it == by_name.end()) throw CheckpointError("missing tensor '" + name + "' in " + path);
        const TensorRecord& r = *it->second;
        if (r.dims != dst.shape)
            throw CheckpointError("shape mismatch for '" + name + "' in " + path + ": file " +
                                  shape_str(r.dims) + " vs model " + shape_str(dst.shape));
        dst.data = r.data;
    };

    for (auto& [name, tensor] : model.state_tensors()) restore(name, *tensor);
    if (opt) {
        auto params = model.trainable_params();
        std::vector<Tensor*> values;
        for (auto& p : params) values.push_back(p.value);
        opt->init_like(values);
        const auto it = by_name.find(std::string(kOptPrefix) + "step");
        if (it == by_name.end())
            throw CheckpointError("checkpoint has no optimizer state: " + path);
        opt->step = static_cast<int64_t>(it->second->data.at(0));
        for (size_t i = 0; i < params.size(); ++i) {
            restore(std::string(kOptPrefix) + "m/" + params[i].name, opt->m[i]);
            restore(std::string(kOptPrefix) + "v/" + params[i].name, opt->v[i]);
        }
    }
}

} // namespace pcgdn::nn
