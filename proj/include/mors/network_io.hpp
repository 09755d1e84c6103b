#pragma once

#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mors/network.hpp"
#include "mors/quantize.hpp"

namespace mors {

// All on-disk artifacts follow the same scheme: a JSON manifest next to a
// raw little-endian float32 blob. The manifest records the blob by file
// name, resolved relative to the manifest's directory.

inline void write_f32_blob(const std::filesystem::path& path, const std::vector<float>& v) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write blob: " + path.string());
    out.write(reinterpret_cast<const char*>(v.data()),
              static_cast<std::streamsize>(v.size() * sizeof(float)));
}

inline std::vector<float> read_f32_blob(const std::filesystem::path& path, std::size_t count) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open blob: " + path.string());
    std::vector<float> v(count);
    in.read(reinterpret_cast<char*>(v.data()),
            static_cast<std::streamsize>(count * sizeof(float)));
    if (static_cast<std::size_t>(in.gcount()) != count * sizeof(float))
        throw ParseError("blob too short: " + path.string());
    return v;
}

// A standalone weight tensor: the pre-quantization source of truth handed
// to the injection pipeline, and the format injected weights come back in.
struct WeightTensorFile {
    std::string name;
    std::vector<std::size_t> shape;
    std::string precision = "fp32";
    std::vector<float> values;
};

inline void save_weight_tensor(const WeightTensorFile& w, const std::filesystem::path& json_path) {
    std::filesystem::path blob = json_path;
    blob.replace_extension(".bin");
    write_f32_blob(blob, w.values);
    nlohmann::json j = {{"name", w.name},
                        {"shape", w.shape},
                        {"precision", w.precision},
                        {"blob", blob.filename().string()},
                        {"count", w.values.size()}};
    std::ofstream out(json_path, std::ios::binary);
    if (!out) throw Error("cannot write manifest: " + json_path.string());
    out << j.dump(2) << '\n';
}

inline WeightTensorFile load_weight_tensor(const std::filesystem::path& json_path) {
    std::ifstream in(json_path);
    if (!in) throw ParseError("cannot open manifest: " + json_path.string());
    nlohmann::json j;
    try {
        in >> j;
        WeightTensorFile w;
        w.name = j.at("name").get<std::string>();
        w.shape = j.at("shape").get<std::vector<std::size_t>>();
        w.precision = j.value("precision", "fp32");
        const auto count = j.at("count").get<std::size_t>();
        w.values = read_f32_blob(json_path.parent_path() / j.at("blob").get<std::string>(), count);
        return w;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("bad weight manifest " + json_path.string() + ": " + e.what());
    }
}

namespace detail {

inline std::string layer_kind_name(LayerKind k) {
    switch (k) {
        case LayerKind::Dense: return "dense";
        case LayerKind::Conv2D: return "conv2d";
        case LayerKind::MaxPool: return "maxpool";
        case LayerKind::AvgPool: return "avgpool";
        case LayerKind::ReLU: return "relu";
        case LayerKind::Softmax: return "softmax";
    }
    return "relu";
}

inline LayerKind layer_kind_from_name(const std::string& s) {
    if (s == "dense") return LayerKind::Dense;
    if (s == "conv2d") return LayerKind::Conv2D;
    if (s == "maxpool") return LayerKind::MaxPool;
    if (s == "avgpool") return LayerKind::AvgPool;
    if (s == "relu") return LayerKind::ReLU;
    if (s == "softmax") return LayerKind::Softmax;
    throw ParseError("unknown layer kind: " + s);
}

} // namespace detail

// Network manifest: layer descriptors in JSON, all parameters (weights then
// bias, per layer, in order) in one float32 blob.
inline void save_network(const Network& net, const std::filesystem::path& json_path) {
    nlohmann::json layers = nlohmann::json::array();
    std::vector<float> blob;
    for (const Layer& l : net.layers) {
        nlohmann::json jl = {{"kind", detail::layer_kind_name(l.kind)}};
        if (l.has_params()) {
            jl["weights_shape"] = l.weights.shape;
            jl["bias_shape"] = l.bias.shape;
            blob.insert(blob.end(), l.weights.data.begin(), l.weights.data.end());
            blob.insert(blob.end(), l.bias.data.begin(), l.bias.data.end());
        }
        if (l.kind == LayerKind::Conv2D || l.kind == LayerKind::MaxPool ||
            l.kind == LayerKind::AvgPool) {
            jl["kernel"] = l.kernel;
            jl["stride"] = l.stride;
            if (l.kind == LayerKind::Conv2D) jl["pad"] = l.pad;
        }
        layers.push_back(jl);
    }
    std::filesystem::path blob_path = json_path;
    blob_path.replace_extension(".bin");
    write_f32_blob(blob_path, blob);
    nlohmann::json j = {{"name", net.name},
                        {"input_shape", net.input_shape},
                        {"layers", layers},
                        {"blob", blob_path.filename().string()},
                        {"param_count", blob.size()}};
    std::ofstream out(json_path, std::ios::binary);
    if (!out) throw Error("cannot write network manifest: " + json_path.string());
    out << j.dump(2) << '\n';
}

inline Network load_network(const std::filesystem::path& json_path) {
    std::ifstream in(json_path);
    if (!in) throw ParseError("cannot open network manifest: " + json_path.string());
    nlohmann::json j;
    try {
        in >> j;
        Network net;
        net.name = j.at("name").get<std::string>();
        net.input_shape = j.at("input_shape").get<std::vector<std::size_t>>();
        std::size_t param_count = 0;
        for (const auto& jl : j.at("layers")) {
            Layer l;
            l.kind = detail::layer_kind_from_name(jl.at("kind").get<std::string>());
            if (l.has_params()) {
                l.weights.shape = jl.at("weights_shape").get<std::vector<std::size_t>>();
                l.bias.shape = jl.at("bias_shape").get<std::vector<std::size_t>>();
                param_count += Tensor::element_count(l.weights.shape) +
                               Tensor::element_count(l.bias.shape);
            }
            l.kernel = jl.value("kernel", 0u);
            l.stride = jl.value("stride", 1u);
            l.pad = jl.value("pad", 0u);
            net.layers.push_back(std::move(l));
        }
        const std::vector<float> blob = read_f32_blob(
            json_path.parent_path() / j.at("blob").get<std::string>(), param_count);
        std::size_t off = 0;
        for (Layer& l : net.layers) {
            if (!l.has_params()) continue;
            const std::size_t wn = Tensor::element_count(l.weights.shape);
            const std::size_t bn = Tensor::element_count(l.bias.shape);
            l.weights.data.assign(blob.begin() + off, blob.begin() + off + wn);
            off += wn;
            l.bias.data.assign(blob.begin() + off, blob.begin() + off + bn);
            off += bn;
        }
        return net;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("bad network manifest " + json_path.string() + ": " + e.what());
    }
}

// Dataset manifest: inputs concatenated in one blob, labels inline.
inline void save_dataset(const LabeledData& data, const std::vector<std::size_t>& input_shape,
                         const std::filesystem::path& json_path) {
    std::vector<float> blob;
    for (const Tensor& t : data.inputs)
        blob.insert(blob.end(), t.data.begin(), t.data.end());
    std::filesystem::path blob_path = json_path;
    blob_path.replace_extension(".bin");
    write_f32_blob(blob_path, blob);
    nlohmann::json j = {{"count", data.inputs.size()},
                        {"input_shape", input_shape},
                        {"labels", data.labels},
                        {"blob", blob_path.filename().string()}};
    std::ofstream out(json_path, std::ios::binary);
    if (!out) throw Error("cannot write dataset manifest: " + json_path.string());
    out << j.dump(2) << '\n';
}

inline LabeledData load_dataset(const std::filesystem::path& json_path,
                                std::vector<std::size_t>* input_shape = nullptr) {
    std::ifstream in(json_path);
    if (!in) throw ParseError("cannot open dataset manifest: " + json_path.string());
    nlohmann::json j;
    try {
        in >> j;
        const auto count = j.at("count").get<std::size_t>();
        const auto shape = j.at("input_shape").get<std::vector<std::size_t>>();
        const std::size_t per = Tensor::element_count(shape);
        LabeledData data;
        data.labels = j.at("labels").get<std::vector<std::uint32_t>>();
        if (data.labels.size() != count)
            throw ParseError("dataset label count mismatch in " + json_path.string());
        const std::vector<float> blob = read_f32_blob(
            json_path.parent_path() / j.at("blob").get<std::string>(), count * per);
        data.inputs.reserve(count);
        for (std::size_t i = 0; i < count; ++i)
            data.inputs.emplace_back(shape, std::vector<float>(blob.begin() + i * per,
                                                               blob.begin() + (i + 1) * per));
        if (input_shape) *input_shape = shape;
        return data;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("bad dataset manifest " + json_path.string() + ": " + e.what());
    }
}

} // namespace mors
