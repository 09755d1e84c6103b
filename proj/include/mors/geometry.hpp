#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <tuple>
#include <vector>

#include "mors/errors.hpp"

namespace mors {

// Dimensions of the SRAM under test. The default block is 16 Kbit laid out
// as 1024 rows by 16 columns; a map spans `blocks` such blocks.
struct SramGeometry {
    std::uint32_t rows = 1024;
    std::uint32_t cols = 16;
    std::uint32_t blocks = 1;

    std::uint64_t bits_per_block() const {
        return static_cast<std::uint64_t>(rows) * cols;
    }
    std::uint64_t total_cells() const { return bits_per_block() * blocks; }

    bool operator==(const SramGeometry&) const = default;

    void validate() const {
        if (rows < 1 || cols < 1 || blocks < 1)
            throw Error("geometry dimensions must all be >= 1");
    }
};

struct CellAddress {
    std::uint32_t block = 0;
    std::uint32_t row = 0;
    std::uint32_t col = 0;

    bool operator==(const CellAddress&) const = default;
    auto operator<=>(const CellAddress& o) const {
        return std::tie(block, row, col) <=> std::tie(o.block, o.row, o.col);
    }

    bool in_range(const SramGeometry& g) const {
        return block < g.blocks && row < g.rows && col < g.cols;
    }
};

// A fault map: the set of bitcells that flip at one voltage level.
// Faults are kept as a sorted, duplicate-free sparse set; observed fault
// rates are well below 0.1%, so dense grids are only materialized where
// the injector needs them.
class FaultMap {
  public:
    FaultMap() = default;

    FaultMap(SramGeometry geometry, std::vector<CellAddress> faults,
             std::optional<std::uint32_t> voltage_mv = std::nullopt)
        : geometry_(geometry), faults_(std::move(faults)), voltage_mv_(voltage_mv) {
        geometry_.validate();
        for (const CellAddress& a : faults_) {
            if (!a.in_range(geometry_))
                throw CoordinateOutOfRange("fault coordinate outside geometry");
        }
        std::sort(faults_.begin(), faults_.end());
        faults_.erase(std::unique(faults_.begin(), faults_.end()), faults_.end());
    }

    const SramGeometry& geometry() const { return geometry_; }
    const std::vector<CellAddress>& faults() const { return faults_; }
    std::optional<std::uint32_t> voltage_mv() const { return voltage_mv_; }
    std::size_t fault_count() const { return faults_.size(); }

    bool operator==(const FaultMap&) const = default;

  private:
    SramGeometry geometry_;
    std::vector<CellAddress> faults_;
    std::optional<std::uint32_t> voltage_mv_;
};

// Fraction of faulty bitcells over all cells of the map.
inline double fault_rate(const FaultMap& map) {
    return static_cast<double>(map.fault_count()) /
           static_cast<double>(map.geometry().total_cells());
}

// Per-voltage fault maps for one device, highest voltage first. All entries
// must share a geometry and voltages must strictly decrease; fault counts
// are deliberately not checked (real data may be non-monotone).
class FaultDataset {
  public:
    FaultDataset() = default;

    explicit FaultDataset(std::vector<FaultMap> entries) : entries_(std::move(entries)) {
        std::sort(entries_.begin(), entries_.end(),
                  [](const FaultMap& a, const FaultMap& b) {
                      return a.voltage_mv().value_or(0) > b.voltage_mv().value_or(0);
                  });
        for (std::size_t i = 0; i < entries_.size(); ++i) {
            if (!entries_[i].voltage_mv())
                throw Error("dataset entries must carry a voltage tag");
            if (entries_[i].geometry() != entries_.front().geometry())
                throw GeometryMismatch("dataset entries must share one geometry");
            if (i > 0 && *entries_[i].voltage_mv() >= *entries_[i - 1].voltage_mv())
                throw Error("dataset voltages must be strictly decreasing");
        }
    }

    const std::vector<FaultMap>& entries() const { return entries_; }
    bool empty() const { return entries_.empty(); }

    const FaultMap& at_voltage(std::uint32_t mv) const {
        for (const FaultMap& m : entries_)
            if (m.voltage_mv() == mv) return m;
        throw MissingProfile("no fault map for voltage " + std::to_string(mv) + " mV");
    }

  private:
    std::vector<FaultMap> entries_;
};

} // namespace mors
