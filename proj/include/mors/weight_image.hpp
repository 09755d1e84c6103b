#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mors/geometry.hpp"
#include "mors/quantize.hpp"

namespace mors {

// Order in which a weight's bits occupy consecutive cells. MSB puts the
// most significant bit in the first cell, LSB the least. The split-half
// variants keep one half of the bit string in MSB order and mirror the
// other: for an 8-bit weight b7..b0,
//   MsbLsb -> b7 b6 b5 b4 b0 b1 b2 b3
//   LsbMsb -> b0 b1 b2 b3 b7 b6 b5 b4
enum class BitMapping { MSB, LSB, MsbLsb, LsbMsb };

// What to write over a float weight that decodes to inf or nan after
// injection. Fixed-point and binary weights never need masking.
enum class MaskPolicy { ToZero, ToOne };

namespace detail {

// Bit significance stored in mapped slot j of a width-w weight.
inline unsigned slot_significance(BitMapping m, unsigned width, unsigned j) {
    const unsigned h = width / 2;
    switch (m) {
        case BitMapping::MSB: return width - 1 - j;
        case BitMapping::LSB: return j;
        case BitMapping::MsbLsb: return j < h ? width - 1 - j : j - h;
        case BitMapping::LsbMsb: return j < h ? j : width - 1 - (j - h);
    }
    return 0;
}

} // namespace detail

// Packing parameters for one (precision, geometry) pair. Narrow weights sit
// side by side in a row (16/X weights per row for X-bit precision); weights
// wider than a row span consecutive whole rows of one block.
struct PackingRule {
    unsigned width = 0;
    std::uint32_t weights_per_row = 0; // when width <= cols
    std::uint32_t rows_per_weight = 0; // when width > cols
    std::uint64_t weights_per_block = 0;

    static PackingRule for_precision(const Precision& p, const SramGeometry& g) {
        PackingRule r;
        r.width = p.width();
        if (r.width <= g.cols) {
            if (g.cols % r.width != 0)
                throw Error("column count must be a multiple of the weight width");
            r.weights_per_row = g.cols / r.width;
            r.weights_per_block = static_cast<std::uint64_t>(r.weights_per_row) * g.rows;
        } else {
            if (r.width % g.cols != 0)
                throw Error("weight width must be a multiple of the column count");
            r.rows_per_weight = r.width / g.cols;
            r.weights_per_block = g.rows / r.rows_per_weight;
            if (r.weights_per_block == 0)
                throw Error("block has fewer rows than one weight needs");
        }
        return r;
    }

    std::uint64_t blocks_required(std::uint64_t weight_count) const {
        return (weight_count + weights_per_block - 1) / weights_per_block;
    }

    bool operator==(const PackingRule&) const = default;
};

// Blocks needed to hold `count` weights of precision `p`.
inline std::uint64_t required_blocks(std::uint64_t count, const Precision& p,
                                     const SramGeometry& g) {
    return PackingRule::for_precision(p, g).blocks_required(count);
}

// Quantized weights laid out bit-exactly on SRAM blocks. The bit grid is
// dense (one bit per cell, unmapped tail cells zero); the weight->cell
// layout is closed-form from (precision, mapping, geometry), so it is
// computed on demand rather than stored.
class WeightImage {
  public:
    WeightImage() = default;

    WeightImage(SramGeometry geometry, Precision precision, BitMapping mapping,
                std::size_t weight_count)
        : geometry_(geometry), precision_(precision), mapping_(mapping),
          weight_count_(weight_count),
          rule_(PackingRule::for_precision(precision, geometry)),
          bits_((geometry.total_cells() + 63) / 64, 0) {
        const std::uint64_t need = rule_.blocks_required(weight_count);
        if (need > geometry.blocks)
            throw CapacityExceeded("layout needs " + std::to_string(need) +
                                   " blocks but the geometry has " +
                                   std::to_string(geometry.blocks));
    }

    const SramGeometry& geometry() const { return geometry_; }
    const Precision& precision() const { return precision_; }
    BitMapping mapping() const { return mapping_; }
    std::size_t weight_count() const { return weight_count_; }

    bool bit(const CellAddress& a) const {
        const std::uint64_t i = flat_index(a);
        return (bits_[i >> 6] >> (i & 63)) & 1;
    }

    void set_bit(const CellAddress& a, bool v) {
        const std::uint64_t i = flat_index(a);
        if (v) bits_[i >> 6] |= (1ULL << (i & 63));
        else bits_[i >> 6] &= ~(1ULL << (i & 63));
    }

    void flip_bit(const CellAddress& a) {
        const std::uint64_t i = flat_index(a);
        bits_[i >> 6] ^= (1ULL << (i & 63));
    }

    // Cell holding mapped slot j of weight k.
    CellAddress cell_of(std::uint64_t k, unsigned j) const {
        CellAddress a;
        if (rule_.width <= geometry_.cols) {
            const std::uint64_t global_row = k / rule_.weights_per_row;
            a.block = static_cast<std::uint32_t>(global_row / geometry_.rows);
            a.row = static_cast<std::uint32_t>(global_row % geometry_.rows);
            a.col = static_cast<std::uint32_t>((k % rule_.weights_per_row) * rule_.width + j);
        } else {
            const std::uint64_t within = k % rule_.weights_per_block;
            a.block = static_cast<std::uint32_t>(k / rule_.weights_per_block);
            a.row = static_cast<std::uint32_t>(within * rule_.rows_per_weight + j / geometry_.cols);
            a.col = static_cast<std::uint32_t>(j % geometry_.cols);
        }
        return a;
    }

    // Cells of weight k in canonical bit order (entry 0 holds the MSB).
    std::vector<CellAddress> cells_of(std::uint64_t k) const {
        std::vector<CellAddress> cells(rule_.width);
        for (unsigned j = 0; j < rule_.width; ++j) {
            const unsigned sig = detail::slot_significance(mapping_, rule_.width, j);
            cells[rule_.width - 1 - sig] = cell_of(k, j);
        }
        return cells;
    }

    void store_weight(std::uint64_t k, std::uint32_t raw) {
        for (unsigned j = 0; j < rule_.width; ++j) {
            const unsigned sig = detail::slot_significance(mapping_, rule_.width, j);
            set_bit(cell_of(k, j), (raw >> sig) & 1u);
        }
    }

    std::uint32_t load_weight(std::uint64_t k) const {
        std::uint32_t raw = 0;
        for (unsigned j = 0; j < rule_.width; ++j) {
            const unsigned sig = detail::slot_significance(mapping_, rule_.width, j);
            if (bit(cell_of(k, j))) raw |= (1u << sig);
        }
        return raw;
    }

    bool operator==(const WeightImage&) const = default;

  private:
    std::uint64_t flat_index(const CellAddress& a) const {
        return (static_cast<std::uint64_t>(a.block) * geometry_.rows + a.row) *
                   geometry_.cols + a.col;
    }

    SramGeometry geometry_;
    Precision precision_;
    BitMapping mapping_ = BitMapping::MSB;
    std::size_t weight_count_ = 0;
    PackingRule rule_;
    std::vector<std::uint64_t> bits_;
};

// Packs quantized weights onto the geometry, filling block 0 row 0 first.
// Throws CapacityExceeded when the geometry is too small.
inline WeightImage layout(const QuantizedWeights& q, BitMapping m, const SramGeometry& g) {
    WeightImage img(g, q.precision, m, q.raw_bits.size());
    for (std::uint64_t k = 0; k < q.raw_bits.size(); ++k)
        img.store_weight(k, q.raw_bits[k]);
    return img;
}

// Flips the image's bit at every faulty cell. Cells without mapped weights
// are flipped too; they simply never surface in readback.
inline WeightImage inject(const WeightImage& img, const FaultMap& faults) {
    if (faults.geometry() != img.geometry())
        throw GeometryMismatch("fault map geometry differs from the weight image's");
    WeightImage out = img;
    for (const CellAddress& a : faults.faults()) out.flip_bit(a);
    return out;
}

// Decodes every weight from the image. Float values that come back inf or
// nan are replaced per the mask policy; without a policy they raise
// MaskRequired. Fixed point and binary decode as-is.
inline std::vector<double> readback(const WeightImage& img,
                                    std::optional<MaskPolicy> mask = std::nullopt) {
    std::vector<double> values;
    values.reserve(img.weight_count());
    for (std::uint64_t k = 0; k < img.weight_count(); ++k) {
        double v = decode_weight(img.load_weight(k), img.precision());
        if (img.precision().is_float() && !std::isfinite(v)) {
            if (!mask)
                throw MaskRequired("weight " + std::to_string(k) +
                                   " decoded non-finite and no mask policy was given");
            v = (*mask == MaskPolicy::ToZero) ? 0.0 : 1.0;
        }
        values.push_back(v);
    }
    return values;
}

inline std::string mapping_name(BitMapping m) {
    switch (m) {
        case BitMapping::MSB: return "msb";
        case BitMapping::LSB: return "lsb";
        case BitMapping::MsbLsb: return "msblsb";
        case BitMapping::LsbMsb: return "lsbmsb";
    }
    return "msb";
}

inline BitMapping mapping_from_name(const std::string& name) {
    if (name == "msb") return BitMapping::MSB;
    if (name == "lsb") return BitMapping::LSB;
    if (name == "msblsb") return BitMapping::MsbLsb;
    if (name == "lsbmsb") return BitMapping::LsbMsb;
    throw Error("unknown bit mapping: " + name);
}

inline std::string mask_name(MaskPolicy m) {
    return m == MaskPolicy::ToZero ? "zero" : "one";
}

inline MaskPolicy mask_from_name(const std::string& name) {
    if (name == "zero") return MaskPolicy::ToZero;
    if (name == "one") return MaskPolicy::ToOne;
    throw Error("unknown mask policy: " + name);
}

} // namespace mors
