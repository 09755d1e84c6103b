#pragma once

#include <cstddef>
#include <numeric>
#include <vector>

#include "mors/errors.hpp"

namespace mors {

// Dense row-major tensor of float32. Evaluation arithmetic stays in
// float32 end to end so results are reproducible bit for bit.
struct Tensor {
    std::vector<std::size_t> shape;
    std::vector<float> data;

    Tensor() = default;
    Tensor(std::vector<std::size_t> s) : shape(std::move(s)), data(element_count(shape), 0.0f) {}
    Tensor(std::vector<std::size_t> s, std::vector<float> d)
        : shape(std::move(s)), data(std::move(d)) {
        if (data.size() != element_count(shape))
            throw ShapeMismatch("tensor data size does not match its shape");
    }

    static std::size_t element_count(const std::vector<std::size_t>& s) {
        std::size_t n = 1;
        for (std::size_t d : s) n *= d;
        return s.empty() ? 0 : n;
    }

    std::size_t size() const { return data.size(); }

    bool operator==(const Tensor&) const = default;
};

} // namespace mors
