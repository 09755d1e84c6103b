#pragma once

#include <optional>

#include "mors/quantize.hpp"
#include "mors/weight_image.hpp"

namespace mors {

enum class SweepModel { Real, Mixed, Random };

// One point of the evaluation option grid.
struct EvalOptions {
    Precision precision{};
    BitMapping mapping = BitMapping::MSB;
    std::optional<MaskPolicy> masking;
    bool include_biases = false;
};

} // namespace mors
