#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "mors/tensor.hpp"

namespace mors {

enum class LayerKind { Dense, Conv2D, MaxPool, AvgPool, ReLU, Softmax };

struct Layer {
    LayerKind kind = LayerKind::ReLU;
    Tensor weights; // Dense: [out, in]; Conv2D: [oc, ic, k, k]
    Tensor bias;    // Dense: [out]; Conv2D: [oc]
    std::uint32_t kernel = 0;
    std::uint32_t stride = 1;
    std::uint32_t pad = 0;

    bool has_params() const {
        return kind == LayerKind::Dense || kind == LayerKind::Conv2D;
    }
};

// Feed-forward network: an ordered layer list plus the canonical flattening
// of its parameters (layer-major, then row-major within each tensor). That
// flattening is the exact array handed to the fault-injection pipeline.
struct Network {
    std::string name;
    std::vector<std::size_t> input_shape;
    std::vector<Layer> layers;

    std::size_t weight_count(bool include_biases = false) const {
        std::size_t n = 0;
        for (const Layer& l : layers)
            if (l.has_params()) {
                n += l.weights.size();
                if (include_biases) n += l.bias.size();
            }
        return n;
    }

    std::vector<double> flatten_weights(bool include_biases = false) const {
        std::vector<double> out;
        out.reserve(weight_count(include_biases));
        for (const Layer& l : layers)
            if (l.has_params()) {
                out.insert(out.end(), l.weights.data.begin(), l.weights.data.end());
                if (include_biases)
                    out.insert(out.end(), l.bias.data.begin(), l.bias.data.end());
            }
        return out;
    }

    void load_weights(std::span<const double> flat, bool include_biases = false) {
        if (flat.size() != weight_count(include_biases))
            throw ShapeMismatch("flattened weight array has the wrong length");
        std::size_t i = 0;
        for (Layer& l : layers)
            if (l.has_params()) {
                for (float& w : l.weights.data) w = static_cast<float>(flat[i++]);
                if (include_biases)
                    for (float& b : l.bias.data) b = static_cast<float>(flat[i++]);
            }
    }
};

namespace detail {

inline Tensor dense_forward(const Layer& l, const Tensor& in) {
    const std::size_t out_n = l.weights.shape.at(0);
    const std::size_t in_n = l.weights.shape.at(1);
    if (in.size() != in_n)
        throw ShapeMismatch("dense layer expects " + std::to_string(in_n) +
                            " inputs, got " + std::to_string(in.size()));
    Tensor out({out_n});
    for (std::size_t o = 0; o < out_n; ++o) {
        float acc = l.bias.size() ? l.bias.data[o] : 0.0f;
        const float* w = &l.weights.data[o * in_n];
        for (std::size_t i = 0; i < in_n; ++i) acc += w[i] * in.data[i];
        out.data[o] = acc;
    }
    return out;
}

inline Tensor conv2d_forward(const Layer& l, const Tensor& in) {
    if (in.shape.size() != 3)
        throw ShapeMismatch("conv2d expects a [C,H,W] input");
    const std::size_t oc = l.weights.shape.at(0);
    const std::size_t ic = l.weights.shape.at(1);
    const std::size_t k = l.weights.shape.at(2);
    const std::size_t c = in.shape[0], h = in.shape[1], w = in.shape[2];
    if (c != ic) throw ShapeMismatch("conv2d channel mismatch");
    const std::size_t s = l.stride, p = l.pad;
    if (h + 2 * p < k || w + 2 * p < k)
        throw ShapeMismatch("conv2d kernel larger than padded input");
    const std::size_t oh = (h + 2 * p - k) / s + 1;
    const std::size_t ow = (w + 2 * p - k) / s + 1;
    Tensor out({oc, oh, ow});
    for (std::size_t o = 0; o < oc; ++o)
        for (std::size_t y = 0; y < oh; ++y)
            for (std::size_t x = 0; x < ow; ++x) {
                float acc = l.bias.size() ? l.bias.data[o] : 0.0f;
                for (std::size_t i = 0; i < ic; ++i)
                    for (std::size_t ky = 0; ky < k; ++ky)
                        for (std::size_t kx = 0; kx < k; ++kx) {
                            const std::ptrdiff_t iy = static_cast<std::ptrdiff_t>(y * s + ky) -
                                                      static_cast<std::ptrdiff_t>(p);
                            const std::ptrdiff_t ix = static_cast<std::ptrdiff_t>(x * s + kx) -
                                                      static_cast<std::ptrdiff_t>(p);
                            if (iy < 0 || ix < 0 || iy >= static_cast<std::ptrdiff_t>(h) ||
                                ix >= static_cast<std::ptrdiff_t>(w))
                                continue;
                            acc += l.weights.data[((o * ic + i) * k + ky) * k + kx] *
                                   in.data[(i * h + iy) * w + ix];
                        }
                out.data[(o * oh + y) * ow + x] = acc;
            }
    return out;
}

template <bool kMax>
inline Tensor pool_forward(const Layer& l, const Tensor& in) {
    if (in.shape.size() != 3)
        throw ShapeMismatch("pooling expects a [C,H,W] input");
    const std::size_t c = in.shape[0], h = in.shape[1], w = in.shape[2];
    const std::size_t k = l.kernel, s = l.stride;
    if (k == 0 || h < k || w < k) throw ShapeMismatch("pool kernel larger than input");
    const std::size_t oh = (h - k) / s + 1;
    const std::size_t ow = (w - k) / s + 1;
    Tensor out({c, oh, ow});
    for (std::size_t i = 0; i < c; ++i)
        for (std::size_t y = 0; y < oh; ++y)
            for (std::size_t x = 0; x < ow; ++x) {
                float acc = kMax ? -std::numeric_limits<float>::infinity() : 0.0f;
                for (std::size_t ky = 0; ky < k; ++ky)
                    for (std::size_t kx = 0; kx < k; ++kx) {
                        const float v = in.data[(i * h + y * s + ky) * w + x * s + kx];
                        if constexpr (kMax) acc = std::max(acc, v);
                        else acc += v;
                    }
                out.data[(i * oh + y) * ow + x] =
                    kMax ? acc : acc / static_cast<float>(k * k);
            }
    return out;
}

inline Tensor softmax_forward(const Tensor& in) {
    Tensor out({in.size()});
    float peak = -std::numeric_limits<float>::infinity();
    for (float v : in.data) peak = std::max(peak, v);
    float sum = 0.0f;
    for (std::size_t i = 0; i < in.size(); ++i) {
        out.data[i] = std::exp(in.data[i] - peak);
        sum += out.data[i];
    }
    for (float& v : out.data) v /= sum;
    return out;
}

} // namespace detail

inline Tensor forward(const Network& net, const Tensor& input) {
    if (input.shape != net.input_shape)
        throw ShapeMismatch("input shape does not match the network's");
    Tensor t = input;
    for (const Layer& l : net.layers) {
        switch (l.kind) {
            case LayerKind::Dense: {
                if (t.shape.size() != 1) t = Tensor({t.size()}, std::move(t.data));
                t = detail::dense_forward(l, t);
                break;
            }
            case LayerKind::Conv2D: t = detail::conv2d_forward(l, t); break;
            case LayerKind::MaxPool: t = detail::pool_forward<true>(l, t); break;
            case LayerKind::AvgPool: t = detail::pool_forward<false>(l, t); break;
            case LayerKind::ReLU:
                for (float& v : t.data) v = v > 0.0f ? v : 0.0f;
                break;
            case LayerKind::Softmax: t = detail::softmax_forward(t); break;
        }
    }
    return t;
}

// Forward pass + argmax; ties break to the lowest class index. NaN scores
// never win the scan, so a fully poisoned output still yields class 0.
inline std::size_t infer(const Network& net, const Tensor& input) {
    const Tensor out = forward(net, input);
    std::size_t best = 0;
    float best_v = out.data.empty() ? 0.0f : out.data[0];
    for (std::size_t i = 1; i < out.size(); ++i)
        if (out.data[i] > best_v) {
            best = i;
            best_v = out.data[i];
        }
    return best;
}

struct LabeledData {
    std::vector<Tensor> inputs;
    std::vector<std::uint32_t> labels;
};

inline double accuracy(const Network& net, const LabeledData& data) {
    if (data.inputs.empty()) throw ShapeMismatch("empty evaluation dataset");
    std::size_t hits = 0;
    for (std::size_t i = 0; i < data.inputs.size(); ++i)
        if (infer(net, data.inputs[i]) == data.labels[i]) ++hits;
    return static_cast<double>(hits) / static_cast<double>(data.inputs.size());
}

} // namespace mors
