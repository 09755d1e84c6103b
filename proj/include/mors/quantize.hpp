#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mors/errors.hpp"

namespace mors {

enum class PrecisionKind { FP32, FP16, Q4_4, Q2_2, Binary };

// The two concrete values a binary weight can take. {-1, 1} is the default;
// {-1, 0} and {0, 1} are the alternative sets.
struct BinaryValueSet {
    double low = -1.0;
    double high = 1.0;
    bool operator==(const BinaryValueSet&) const = default;
};

struct Precision {
    PrecisionKind kind = PrecisionKind::FP32;
    BinaryValueSet binary_values{};

    unsigned width() const {
        switch (kind) {
            case PrecisionKind::FP32: return 32;
            case PrecisionKind::FP16: return 16;
            case PrecisionKind::Q4_4: return 8;
            case PrecisionKind::Q2_2: return 4;
            case PrecisionKind::Binary: return 1;
        }
        return 32;
    }

    bool is_float() const {
        return kind == PrecisionKind::FP32 || kind == PrecisionKind::FP16;
    }

    bool operator==(const Precision&) const = default;
};

// float -> IEEE-754 binary16, round to nearest even.
inline std::uint16_t float_to_half(float f) {
    const std::uint32_t x = std::bit_cast<std::uint32_t>(f);
    const std::uint32_t sign = (x >> 16) & 0x8000u;
    const std::uint32_t exp = (x >> 23) & 0xFFu;
    std::uint32_t man = x & 0x7FFFFFu;
    if (exp == 255) // inf or nan; keep nan payload nonzero
        return static_cast<std::uint16_t>(sign | 0x7C00u | (man ? 0x200u | (man >> 13) : 0u));
    const int e = static_cast<int>(exp) - 127 + 15;
    if (e >= 31) return static_cast<std::uint16_t>(sign | 0x7C00u); // overflow
    if (e <= 0) {
        if (e < -10) return static_cast<std::uint16_t>(sign); // underflow to zero
        man |= 0x800000u;
        const unsigned shift = static_cast<unsigned>(14 - e);
        std::uint32_t half_man = man >> shift;
        const std::uint32_t rem = man & ((1u << shift) - 1);
        const std::uint32_t halfway = 1u << (shift - 1);
        if (rem > halfway || (rem == halfway && (half_man & 1))) ++half_man;
        // a mantissa carry lands in the exponent field, which is exactly right
        return static_cast<std::uint16_t>(sign | half_man);
    }
    std::uint16_t h = static_cast<std::uint16_t>(
        sign | (static_cast<std::uint32_t>(e) << 10) | (man >> 13));
    const std::uint32_t rem = man & 0x1FFFu;
    if (rem > 0x1000u || (rem == 0x1000u && (h & 1))) ++h;
    return h;
}

inline float half_to_float(std::uint16_t h) {
    const std::uint32_t sign = static_cast<std::uint32_t>(h & 0x8000u) << 16;
    const std::uint32_t exp = (h >> 10) & 0x1Fu;
    std::uint32_t man = h & 0x3FFu;
    std::uint32_t x;
    if (exp == 0) {
        if (man == 0) {
            x = sign;
        } else { // subnormal half: renormalize
            int shifts = 0;
            while (!(man & 0x400u)) {
                man <<= 1;
                ++shifts;
            }
            man &= 0x3FFu;
            x = sign | (static_cast<std::uint32_t>(113 - shifts) << 23) | (man << 13);
        }
    } else if (exp == 31) {
        x = sign | 0x7F800000u | (man << 13);
    } else {
        x = sign | ((exp + 112) << 23) | (man << 13);
    }
    return std::bit_cast<float>(x);
}

namespace detail {

// Round half to even without touching the FP environment.
inline long long round_half_even(double v) {
    const double fl = std::floor(v);
    const double frac = v - fl;
    auto r = static_cast<long long>(fl);
    if (frac > 0.5 || (frac == 0.5 && (r & 1))) ++r;
    return r;
}

// Two's-complement fixed point with saturation. width counts all bits,
// frac_bits of them fractional.
inline std::uint32_t quantize_fixed(double x, unsigned width, unsigned frac_bits) {
    const long long lo = -(1LL << (width - 1));
    const long long hi = (1LL << (width - 1)) - 1;
    long long q = round_half_even(x * static_cast<double>(1u << frac_bits));
    q = std::max(lo, std::min(hi, q));
    return static_cast<std::uint32_t>(q) & ((width == 32) ? 0xFFFFFFFFu : ((1u << width) - 1));
}

inline double decode_fixed(std::uint32_t raw, unsigned width, unsigned frac_bits) {
    const std::uint32_t mask = (1u << width) - 1;
    std::uint32_t v = raw & mask;
    long long s = v;
    if (v & (1u << (width - 1))) s = static_cast<long long>(v) - (1LL << width);
    return static_cast<double>(s) / static_cast<double>(1u << frac_bits);
}

} // namespace detail

struct QuantizedWeights {
    Precision precision;
    std::vector<double> values;         // quantized numeric values
    std::vector<std::uint32_t> raw_bits; // bit patterns, width() low bits used
};

// Decodes one raw pattern back to its numeric value. Float patterns may
// decode to inf/nan after fault injection; fixed point and binary cannot.
inline double decode_weight(std::uint32_t raw, const Precision& p) {
    switch (p.kind) {
        case PrecisionKind::FP32: return std::bit_cast<float>(raw);
        case PrecisionKind::FP16: return half_to_float(static_cast<std::uint16_t>(raw));
        case PrecisionKind::Q4_4: return detail::decode_fixed(raw, 8, 4);
        case PrecisionKind::Q2_2: return detail::decode_fixed(raw, 4, 2);
        case PrecisionKind::Binary:
            return (raw & 1u) ? p.binary_values.high : p.binary_values.low;
    }
    return 0.0;
}

// Reduces weight precision. FP32 passes through, FP16 rounds to nearest
// even, the Q formats saturate to their representable range, and binary
// thresholds at zero (>= 0 maps to the high element of the value set).
inline QuantizedWeights quantize(std::span<const double> weights, const Precision& p) {
    QuantizedWeights q;
    q.precision = p;
    q.values.reserve(weights.size());
    q.raw_bits.reserve(weights.size());
    for (double w : weights) {
        if (!std::isfinite(w))
            throw NonFiniteInput("cannot quantize non-finite weight " + std::to_string(w));
        std::uint32_t raw = 0;
        switch (p.kind) {
            case PrecisionKind::FP32:
                raw = std::bit_cast<std::uint32_t>(static_cast<float>(w));
                break;
            case PrecisionKind::FP16:
                raw = float_to_half(static_cast<float>(w));
                break;
            case PrecisionKind::Q4_4:
                raw = detail::quantize_fixed(w, 8, 4);
                break;
            case PrecisionKind::Q2_2:
                raw = detail::quantize_fixed(w, 4, 2);
                break;
            case PrecisionKind::Binary:
                raw = w >= 0.0 ? 1u : 0u;
                break;
        }
        q.raw_bits.push_back(raw);
        q.values.push_back(decode_weight(raw, p));
    }
    return q;
}

inline std::string precision_name(const Precision& p) {
    switch (p.kind) {
        case PrecisionKind::FP32: return "fp32";
        case PrecisionKind::FP16: return "fp16";
        case PrecisionKind::Q4_4: return "q4.4";
        case PrecisionKind::Q2_2: return "q2.2";
        case PrecisionKind::Binary: {
            if (p.binary_values == BinaryValueSet{-1.0, 1.0}) return "binary";
            if (p.binary_values == BinaryValueSet{-1.0, 0.0}) return "binary-neg0";
            return "binary-01";
        }
    }
    return "fp32";
}

inline Precision precision_from_name(const std::string& name) {
    if (name == "fp32") return {PrecisionKind::FP32, {}};
    if (name == "fp16") return {PrecisionKind::FP16, {}};
    if (name == "q4.4") return {PrecisionKind::Q4_4, {}};
    if (name == "q2.2") return {PrecisionKind::Q2_2, {}};
    if (name == "binary") return {PrecisionKind::Binary, {-1.0, 1.0}};
    if (name == "binary-neg0") return {PrecisionKind::Binary, {-1.0, 0.0}};
    if (name == "binary-01") return {PrecisionKind::Binary, {0.0, 1.0}};
    throw Error("unknown precision name: " + name);
}

} // namespace mors
