#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <unordered_set>
#include <utility>
#include <vector>

#include "mors/geometry.hpp"
#include "mors/parallel.hpp"
#include "mors/profile.hpp"
#include "mors/rng.hpp"
#include "mors/sampler.hpp"

namespace mors {

enum class ModelKind { Mixed, Random };

struct GenerationConfig {
    std::uint32_t n_blocks = 1;
    std::uint64_t seed = 0;
    double similarity_threshold = 0.80;
    std::uint32_t max_retries_per_block = 1000;
    ModelKind model = ModelKind::Mixed;
};

// Observability of the generation loop: how many blocks were accepted, how
// hard the similarity gate fought, and how the fault budget was spent.
struct GenerationReport {
    std::uint64_t target_blocks = 0;
    std::uint64_t target_faults = 0;
    std::uint64_t accepted_blocks = 0;
    std::uint64_t placed_faults = 0;
    std::uint64_t total_retries = 0;
    std::vector<double> best_similarity_per_block; // one entry per accepted block
    std::vector<std::uint32_t> flagged_blocks;     // retry cap hit; best candidate kept
};

// round(n * p_s), clamped to n.
inline std::uint64_t faulty_block_target(std::uint32_t n_blocks, double p_s) {
    const auto t = static_cast<std::uint64_t>(
        std::llround(static_cast<double>(n_blocks) * p_s));
    return std::min<std::uint64_t>(t, n_blocks);
}

// floor(n * rows * cols * p_f). The epsilon keeps products that are exact
// integers in real arithmetic from dropping a unit to floating-point error.
inline std::uint64_t fault_budget(std::uint32_t n_blocks, const SramGeometry& g,
                                  double p_f) {
    const double cells = static_cast<double>(n_blocks) *
                         static_cast<double>(g.rows) * static_cast<double>(g.cols);
    return static_cast<std::uint64_t>(std::floor(cells * p_f + 1e-6));
}

namespace detail {

inline constexpr std::uint64_t kTagBlockSelect = 0x626c6f636b73ULL; // "blocks"
inline constexpr std::uint64_t kTagRandomCells = 0x63656c6c73ULL;   // "cells"
inline constexpr std::uint64_t kTagCandidate = 0x63616e64ULL;       // "cand"

// Draws `count` distinct block indices from [0, n) by partial Fisher-Yates.
inline std::vector<std::uint32_t> pick_distinct_blocks(std::uint32_t n,
                                                       std::uint64_t count,
                                                       Rng& rng) {
    std::vector<std::uint32_t> all(n);
    for (std::uint32_t i = 0; i < n; ++i) all[i] = i;
    for (std::uint64_t i = 0; i < count; ++i) {
        const std::uint64_t j = i + rng.next_below(n - i);
        std::swap(all[i], all[j]);
    }
    all.resize(count);
    return all;
}

} // namespace detail

// Baseline model: coarse features only. Selects round(n * p_s) distinct
// blocks, then spreads floor(n * rows * cols * p_f) faults uniformly over
// their cells. Placement is constructive: every selected block receives at
// least one fault, so re-profiling reproduces both targets exactly.
inline FaultMap generate_random(const FaultProfile& profile, const GenerationConfig& cfg) {
    SramGeometry g{profile.geometry.rows, profile.geometry.cols, cfg.n_blocks};
    g.validate();
    const std::uint64_t target_blocks = faulty_block_target(cfg.n_blocks, profile.coarse.p_s);
    const std::uint64_t target_faults = fault_budget(cfg.n_blocks, g, profile.coarse.p_f);
    if (target_faults == 0)
        return FaultMap(g, {}, profile.voltage_mv);
    const std::uint64_t capacity = target_blocks * g.bits_per_block();
    if (target_faults > capacity)
        throw InfeasibleTarget("fault target " + std::to_string(target_faults) +
                               " exceeds the " + std::to_string(capacity) +
                               " cells available in " + std::to_string(target_blocks) +
                               " faulty blocks");

    Rng rng = derive_rng(cfg.seed, {detail::kTagBlockSelect});
    const std::vector<std::uint32_t> blocks =
        detail::pick_distinct_blocks(cfg.n_blocks, target_blocks, rng);

    const std::uint64_t bits = g.bits_per_block();
    Rng cell_rng = derive_rng(cfg.seed, {detail::kTagRandomCells});
    std::unordered_set<std::uint64_t> taken;
    taken.reserve(static_cast<std::size_t>(target_faults) * 2);
    std::vector<std::uint64_t> chosen;
    chosen.reserve(static_cast<std::size_t>(target_faults));

    // one fault per block first, so p_s survives re-extraction
    const std::uint64_t seeds = std::min(target_blocks, target_faults);
    for (std::uint64_t b = 0; b < seeds; ++b) {
        const std::uint64_t idx = b * bits + cell_rng.next_below(bits);
        taken.insert(idx);
        chosen.push_back(idx);
    }
    while (chosen.size() < target_faults) {
        const std::uint64_t idx = cell_rng.next_below(capacity);
        if (taken.insert(idx).second) chosen.push_back(idx);
    }

    std::vector<CellAddress> faults;
    faults.reserve(chosen.size());
    for (std::uint64_t idx : chosen) {
        const std::uint64_t within = idx % bits;
        faults.push_back(CellAddress{blocks[static_cast<std::size_t>(idx / bits)],
                                     static_cast<std::uint32_t>(within / g.cols),
                                     static_cast<std::uint32_t>(within % g.cols)});
    }
    return FaultMap(g, std::move(faults), profile.voltage_mv);
}

// Mean total-variation similarity over the three column-feature histograms.
// An empty pair of histograms counts as fully similar, an empty-vs-nonempty
// pair as fully dissimilar. Symmetric, in [0, 1].
inline double similarity(const ColumnFeatures& a, const ColumnFeatures& b) {
    if (a.faulty_cols_per_block.counts().size() != b.faulty_cols_per_block.counts().size() ||
        a.bitfaults_per_col.counts().size() != b.bitfaults_per_col.counts().size() ||
        a.col_distances.counts().size() != b.col_distances.counts().size())
        throw GeometryMismatch("column features come from different geometries");
    const auto component = [](const Histogram& x, const Histogram& y) {
        if (x.total() == 0 && y.total() == 0) return 1.0;
        if (x.total() == 0 || y.total() == 0) return 0.0;
        return 1.0 - total_variation(x, y);
    };
    return (component(a.faulty_cols_per_block, b.faulty_cols_per_block) +
            component(a.bitfaults_per_col, b.bitfaults_per_col) +
            component(a.col_distances, b.col_distances)) / 3.0;
}

namespace detail {

using Cell = std::pair<std::uint32_t, std::uint32_t>; // (row, col)

struct RowSamplers {
    EmpiricalDist faulty_rows;   // F_SR over 0..rows
    EmpiricalDist faults_in_row; // F_FR restricted to >= 1
    EmpiricalDist distance;      // F_FDR restricted to >= 1
};

// One candidate block. Row positions are distinct; each selected row gets
// its fault count and inter-fault gaps sampled first, then a start column
// uniform over the placements where the whole run fits. Observed distances
// therefore equal the sampled ones, and never leave the sampler's support.
inline std::vector<Cell> sample_candidate_block(const RowSamplers& s,
                                                const SramGeometry& g, Rng& rng) {
    const std::uint64_t faulty_rows = s.faulty_rows.sample(rng);
    std::vector<Cell> cells;
    if (faulty_rows == 0) return cells;

    std::unordered_set<std::uint32_t> used_rows;
    used_rows.reserve(faulty_rows * 2);
    for (std::uint64_t r = 0; r < faulty_rows && r < g.rows; ++r) {
        std::uint32_t row = 0;
        for (int attempt = 0;; ++attempt) {
            row = static_cast<std::uint32_t>(rng.next_below(g.rows));
            if (!used_rows.contains(row)) break;
            if (attempt >= 64) { // nearly full: take the first free row
                while (used_rows.contains(row)) row = (row + 1) % g.rows;
                break;
            }
        }
        used_rows.insert(row);

        std::uint64_t k = s.faults_in_row.sample(rng);
        std::vector<std::uint32_t> gaps;
        for (;;) {
            bool fits = false;
            for (int attempt = 0; attempt < 16 && !fits; ++attempt) {
                gaps.clear();
                std::uint64_t span = 0;
                for (std::uint64_t i = 0; i + 1 < k; ++i) {
                    const auto d = static_cast<std::uint32_t>(s.distance.sample(rng));
                    gaps.push_back(d);
                    span += d;
                }
                fits = span <= g.cols - 1;
            }
            if (fits) break;
            --k; // run cannot fit at this length; rare unless support is coarse
        }
        std::uint64_t span = 0;
        for (std::uint32_t d : gaps) span += d;
        std::uint32_t col = static_cast<std::uint32_t>(rng.next_below(g.cols - span));
        cells.emplace_back(row, col);
        for (std::uint32_t d : gaps) {
            col += d;
            cells.emplace_back(row, col);
        }
    }
    return cells;
}

struct CandidateResult {
    std::vector<Cell> cells;
    double similarity = -1.0;
    std::uint64_t retries = 0;
    bool flagged = false;
};

inline CandidateResult generate_block_candidate(const RowSamplers& samplers,
                                                const FaultProfile& profile,
                                                const GenerationConfig& cfg,
                                                const SramGeometry& g,
                                                std::uint32_t block_index) {
    Rng rng = derive_rng(cfg.seed, {kTagCandidate, block_index});
    CandidateResult best;
    for (std::uint64_t attempt = 0; attempt <= cfg.max_retries_per_block; ++attempt) {
        std::vector<Cell> cells = sample_candidate_block(samplers, g, rng);
        const ColumnFeatures cf = column_features_of_block(
            detail::BlockCells(cells.data(), cells.size()), g);
        const double sim = similarity(cf, profile.cols);
        if (sim > best.similarity) {
            best.cells = std::move(cells);
            best.similarity = sim;
        }
        if (sim > cfg.similarity_threshold) {
            best.retries = attempt;
            return best;
        }
    }
    best.retries = cfg.max_retries_per_block;
    best.flagged = true;
    return best;
}

} // namespace detail

// The structured model. Follows the generation loop: spend a faulty-block
// budget of round(n * p_s) and a fault budget of floor(n * rows * cols * p_f);
// per block, sample row count from F_SR, per-row fault count from F_FR and
// inter-fault distances from F_FDR; keep a candidate block only when its
// column features are similar enough to the profile's. Blocks that exhaust
// the retry budget keep their best candidate and are flagged in the report.
//
// Deterministic for a given (profile, cfg): every candidate block draws from
// a substream derived from (seed, block index), and the budget bookkeeping
// runs in a fixed order, so the thread count cannot change the output.
inline std::pair<FaultMap, GenerationReport>
generate_mixed(const FaultProfile& profile, const GenerationConfig& cfg,
               unsigned threads = 1) {
    SramGeometry g{profile.geometry.rows, profile.geometry.cols, cfg.n_blocks};
    g.validate();
    GenerationReport report;
    report.target_blocks = faulty_block_target(cfg.n_blocks, profile.coarse.p_s);
    report.target_faults = fault_budget(cfg.n_blocks, g, profile.coarse.p_f);
    if (report.target_blocks == 0 || report.target_faults == 0)
        return {FaultMap(g, {}, profile.voltage_mv), report};

    detail::RowSamplers samplers;
    samplers.faulty_rows = make_sampler(profile.rows.faulty_rows_per_block);
    if (samplers.faulty_rows.degenerate_at_zero()) // all blocks sampled empty
        return {FaultMap(g, {}, profile.voltage_mv), report};
    samplers.faults_in_row = make_positive_sampler(profile.rows.bitfaults_per_row);
    samplers.distance = make_positive_sampler(profile.rows.row_distances);

    Rng select_rng = derive_rng(cfg.seed, {detail::kTagBlockSelect});
    const std::vector<std::uint32_t> blocks =
        detail::pick_distinct_blocks(cfg.n_blocks, report.target_blocks, select_rng);

    std::vector<detail::CandidateResult> results(blocks.size());
    parallel_for(blocks.size(), threads, [&](std::size_t i) {
        results[i] = detail::generate_block_candidate(samplers, profile, cfg, g, blocks[i]);
    });

    std::vector<CellAddress> faults;
    for (std::size_t i = 0; i < blocks.size() && report.placed_faults < report.target_faults; ++i) {
        detail::CandidateResult& r = results[i];
        const std::uint64_t remaining = report.target_faults - report.placed_faults;
        if (r.cells.size() > remaining) r.cells.resize(remaining);
        if (r.cells.empty()) continue; // degenerate draw; spends no budget
        for (const auto& [row, col] : r.cells)
            faults.push_back(CellAddress{blocks[i], row, col});
        report.placed_faults += r.cells.size();
        report.accepted_blocks += 1;
        report.total_retries += r.retries;
        report.best_similarity_per_block.push_back(r.similarity);
        if (r.flagged) report.flagged_blocks.push_back(blocks[i]);
    }
    return {FaultMap(g, std::move(faults), profile.voltage_mv), report};
}

} // namespace mors
