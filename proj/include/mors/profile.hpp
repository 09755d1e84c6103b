#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "mors/geometry.hpp"
#include "mors/histogram.hpp"

namespace mors {

// Coarse features: the two numbers a naive random-injection campaign uses.
struct CoarseProfile {
    double p_f = 0.0; // faulty bitcells / all bitcells
    double p_s = 0.0; // faulty blocks / all blocks
};

// Row-based fine-grained features, sampled over faulty blocks only:
//  - faulty_rows_per_block: rows with >=1 fault, one sample per faulty block
//  - bitfaults_per_row: fault count of every row of a faulty block
//    (zero-fault rows included, so the 0 bin carries most of the mass)
//  - row_distances: |col_i+1 - col_i| between consecutive faults of a row,
//    after sorting by column
struct RowFeatures {
    Histogram faulty_rows_per_block; // domain 0..rows
    Histogram bitfaults_per_row;     // domain 0..cols
    Histogram row_distances;         // domain 0..cols-1, mass only at >=1
};

// Column-based mirror of RowFeatures.
struct ColumnFeatures {
    Histogram faulty_cols_per_block; // domain 0..cols
    Histogram bitfaults_per_col;     // domain 0..rows
    Histogram col_distances;         // domain 0..rows-1, mass only at >=1
};

struct FaultProfile {
    SramGeometry geometry;
    std::optional<std::uint32_t> voltage_mv;
    CoarseProfile coarse;
    RowFeatures rows;
    ColumnFeatures cols;
};

namespace detail {

// Cells of one block as (row, col) pairs; order does not matter.
using BlockCells = std::span<const std::pair<std::uint32_t, std::uint32_t>>;

inline void accumulate_row_features(BlockCells cells, const SramGeometry& g,
                                    RowFeatures& out) {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> sorted(cells.begin(), cells.end());
    std::sort(sorted.begin(), sorted.end());
    std::uint32_t faulty_rows = 0;
    std::size_t i = 0;
    while (i < sorted.size()) {
        std::size_t j = i;
        while (j < sorted.size() && sorted[j].first == sorted[i].first) ++j;
        ++faulty_rows;
        out.bitfaults_per_row.add(j - i);
        for (std::size_t k = i + 1; k < j; ++k)
            out.row_distances.add(sorted[k].second - sorted[k - 1].second);
        i = j;
    }
    out.faulty_rows_per_block.add(faulty_rows);
    out.bitfaults_per_row.add(0, g.rows - faulty_rows);
}

inline void accumulate_col_features(BlockCells cells, const SramGeometry& g,
                                    ColumnFeatures& out) {
    // flip to (col, row) and reuse the row logic's shape
    std::vector<std::pair<std::uint32_t, std::uint32_t>> sorted;
    sorted.reserve(cells.size());
    for (const auto& [r, c] : cells) sorted.emplace_back(c, r);
    std::sort(sorted.begin(), sorted.end());
    std::uint32_t faulty_cols = 0;
    std::size_t i = 0;
    while (i < sorted.size()) {
        std::size_t j = i;
        while (j < sorted.size() && sorted[j].first == sorted[i].first) ++j;
        ++faulty_cols;
        out.bitfaults_per_col.add(j - i);
        for (std::size_t k = i + 1; k < j; ++k)
            out.col_distances.add(sorted[k].second - sorted[k - 1].second);
        i = j;
    }
    out.faulty_cols_per_block.add(faulty_cols);
    out.bitfaults_per_col.add(0, g.cols - faulty_cols);
}

// Invokes fn(block_cells) for every faulty block of the map.
template <typename Fn>
inline void for_each_faulty_block(const FaultMap& map, Fn&& fn) {
    const auto& faults = map.faults();
    std::vector<std::pair<std::uint32_t, std::uint32_t>> cells;
    std::size_t i = 0;
    while (i < faults.size()) {
        std::size_t j = i;
        cells.clear();
        while (j < faults.size() && faults[j].block == faults[i].block) {
            cells.emplace_back(faults[j].row, faults[j].col);
            ++j;
        }
        fn(BlockCells(cells));
        i = j;
    }
}

} // namespace detail

inline RowFeatures make_row_features(const SramGeometry& g) {
    RowFeatures f;
    f.faulty_rows_per_block = Histogram(g.rows);
    f.bitfaults_per_row = Histogram(g.cols);
    f.row_distances = Histogram(g.cols - 1);
    return f;
}

inline ColumnFeatures make_col_features(const SramGeometry& g) {
    ColumnFeatures f;
    f.faulty_cols_per_block = Histogram(g.cols);
    f.bitfaults_per_col = Histogram(g.rows);
    f.col_distances = Histogram(g.rows - 1);
    return f;
}

inline CoarseProfile extract_coarse(const FaultMap& map) {
    std::uint64_t faulty_blocks = 0;
    detail::for_each_faulty_block(map, [&](detail::BlockCells) { ++faulty_blocks; });
    CoarseProfile c;
    c.p_f = fault_rate(map);
    c.p_s = static_cast<double>(faulty_blocks) /
            static_cast<double>(map.geometry().blocks);
    return c;
}

inline RowFeatures extract_row_features(const FaultMap& map) {
    RowFeatures f = make_row_features(map.geometry());
    detail::for_each_faulty_block(map, [&](detail::BlockCells cells) {
        detail::accumulate_row_features(cells, map.geometry(), f);
    });
    return f;
}

inline ColumnFeatures extract_col_features(const FaultMap& map) {
    ColumnFeatures f = make_col_features(map.geometry());
    detail::for_each_faulty_block(map, [&](detail::BlockCells cells) {
        detail::accumulate_col_features(cells, map.geometry(), f);
    });
    return f;
}

// Column features of a single candidate block, used by the generator's
// similarity gate without building a FaultMap per candidate.
inline ColumnFeatures column_features_of_block(detail::BlockCells cells,
                                               const SramGeometry& g) {
    ColumnFeatures f = make_col_features(g);
    if (!cells.empty()) detail::accumulate_col_features(cells, g, f);
    return f;
}

inline FaultProfile extract_profile(const FaultMap& map) {
    FaultProfile p;
    p.geometry = map.geometry();
    p.voltage_mv = map.voltage_mv();
    p.coarse = extract_coarse(map);
    p.rows = extract_row_features(map);
    p.cols = extract_col_features(map);
    return p;
}

} // namespace mors
