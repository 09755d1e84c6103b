#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "mors/generator.hpp"
#include "mors/geometry.hpp"
#include "mors/network.hpp"
#include "mors/profile.hpp"
#include "mors/rng.hpp"

namespace mors {

// Synthetic "ground truth" with strong within-block structure: per-row
// fault counts concentrate at 2-3, inter-fault row distances live on
// {2,4,6,8} with the mode at 8, and faulty rows cluster inside a block.
// Profiling such a map gives the fine-grained features the generator is
// tested against without needing real device data.
struct StructuredConfig {
    SramGeometry geometry{32, 16, 1}; // blocks overridden per call
    double p_s = 0.10;                // chance a block is faulty
    std::uint32_t min_faulty_rows = 6;
    std::uint32_t max_faulty_rows = 10;
    double third_fault_prob = 0.40;   // rows get 2 faults, sometimes 3
    bool even_row_spacing = false;    // cluster faulty rows two apart
};

namespace detail {

inline RowSamplers structured_samplers(const StructuredConfig& cfg) {
    RowSamplers s;
    {
        std::vector<std::uint64_t> support, counts;
        for (std::uint32_t k = cfg.min_faulty_rows; k <= cfg.max_faulty_rows; ++k) {
            support.push_back(k);
            counts.push_back(1);
        }
        s.faulty_rows = EmpiricalDist::from_counts(std::move(support), std::move(counts));
    }
    {
        const auto third = static_cast<std::uint64_t>(cfg.third_fault_prob * 1000.0);
        s.faults_in_row = EmpiricalDist::from_counts({2, 3}, {1000 - third, third});
    }
    // distances on {2,4,6,8}, mode at 8
    s.distance = EmpiricalDist::from_counts({2, 4, 6, 8}, {15, 15, 20, 50});
    return s;
}

} // namespace detail

// Generates one structured fault map. Each block is faulty with probability
// p_s; faulty blocks draw their row count, per-row fault counts and fault
// spacings from the fixed structured distributions above.
inline FaultMap make_structured_map(const StructuredConfig& cfg, std::uint32_t n_blocks,
                                    std::uint64_t seed,
                                    std::optional<std::uint32_t> voltage_mv = std::nullopt) {
    SramGeometry g = cfg.geometry;
    g.blocks = n_blocks;
    g.validate();
    const detail::RowSamplers samplers = detail::structured_samplers(cfg);
    std::vector<CellAddress> faults;
    for (std::uint32_t b = 0; b < n_blocks; ++b) {
        Rng rng = derive_rng(seed, {0x66697874ULL /* "fixt" */, b});
        if (rng.next_double() >= cfg.p_s) continue;
        std::vector<detail::Cell> cells;
        if (cfg.even_row_spacing) {
            // faulty rows at base, base+2, ...: column distances between
            // vertically repeated faults come out even
            const auto k = static_cast<std::uint32_t>(samplers.faulty_rows.sample(rng));
            const std::uint32_t span = 2 * (k - 1);
            const auto base = static_cast<std::uint32_t>(rng.next_below(g.rows - span));
            for (std::uint32_t i = 0; i < k; ++i) {
                const std::uint32_t row = base + 2 * i;
                std::uint64_t m = samplers.faults_in_row.sample(rng);
                std::vector<std::uint32_t> gaps;
                std::uint64_t gap_span = 0;
                for (std::uint64_t f = 0; f + 1 < m; ++f) {
                    const auto d = static_cast<std::uint32_t>(samplers.distance.sample(rng));
                    gaps.push_back(d);
                    gap_span += d;
                }
                if (gap_span > g.cols - 1) { gaps.resize(1); gap_span = gaps[0]; }
                auto col = static_cast<std::uint32_t>(rng.next_below(g.cols - gap_span));
                cells.emplace_back(row, col);
                for (std::uint32_t d : gaps) {
                    col += d;
                    cells.emplace_back(row, col);
                }
            }
        } else {
            cells = detail::sample_candidate_block(samplers, g, rng);
        }
        for (const auto& [row, col] : cells)
            faults.push_back(CellAddress{b, row, col});
    }
    return FaultMap(g, std::move(faults), voltage_mv);
}

// Even-spaced variant on the paper-scale block shape, for exercising the
// profiler's fine-grained features (mode-8 row distances, even column
// distances) on a full 1024x16 geometry.
inline StructuredConfig profiler_fixture_config() {
    StructuredConfig cfg;
    cfg.geometry = SramGeometry{1024, 16, 1};
    cfg.p_s = 0.10;
    cfg.min_faulty_rows = 4;
    cfg.max_faulty_rows = 8;
    cfg.third_fault_prob = 0.40;
    cfg.even_row_spacing = true;
    return cfg;
}

// One synthetic voltage step: the structured config to draw ground truth
// from, tagged with its voltage.
struct FixtureLevel {
    std::uint32_t voltage_mv;
    StructuredConfig config;
};

// Seven synthetic voltage steps with monotonically rising fault density
// (p_s grows as the voltage drops; the per-block structure stays fixed).
inline std::vector<FixtureLevel> fixture_voltage_levels() {
    const std::uint32_t voltages[7] = {600, 590, 580, 570, 560, 550, 540};
    const double p_s[7] = {0.010, 0.020, 0.032, 0.046, 0.062, 0.080, 0.100};
    std::vector<FixtureLevel> levels;
    for (int i = 0; i < 7; ++i) {
        FixtureLevel lv;
        lv.voltage_mv = voltages[i];
        lv.config.p_s = p_s[i];
        levels.push_back(lv);
    }
    return levels;
}

inline constexpr std::uint32_t kFixtureGroundTruthBlocks = 2048;

// Two-layer MLP over 8 gaussian-blob classes. Weights are constructed, not
// trained: hidden units are noisy copies of class centroids and the output
// layer sums each class's units. Entries sit on the fixed-point grids so
// reduced precision keeps the classifier intact.
inline Network make_fixture_network(std::uint64_t seed = 41) {
    constexpr std::size_t kIn = 64, kHidden = 256, kClasses = 8;
    Rng rng = derive_rng(seed, {0x6e6574ULL /* "net" */});

    std::vector<std::vector<float>> centroids(kClasses, std::vector<float>(kIn));
    for (auto& c : centroids)
        for (float& v : c) v = rng.next_below(2) ? 0.5f : -0.5f;

    Network net;
    net.name = "fixture_mlp";
    net.input_shape = {kIn};

    Layer dense1;
    dense1.kind = LayerKind::Dense;
    dense1.weights = Tensor({kHidden, kIn});
    dense1.bias = Tensor({kHidden});
    for (std::size_t j = 0; j < kHidden; ++j)
        for (std::size_t i = 0; i < kIn; ++i) {
            const float perturb = rng.next_below(2) ? 0.125f : -0.125f;
            dense1.weights.data[j * kIn + i] = centroids[j % kClasses][i] + perturb;
        }

    Layer relu;
    relu.kind = LayerKind::ReLU;

    Layer dense2;
    dense2.kind = LayerKind::Dense;
    dense2.weights = Tensor({kClasses, kHidden});
    dense2.bias = Tensor({kClasses});
    for (std::size_t c = 0; c < kClasses; ++c)
        for (std::size_t j = 0; j < kHidden; ++j)
            dense2.weights.data[c * kHidden + j] = (j % kClasses == c) ? 0.25f : -0.25f;

    Layer softmax;
    softmax.kind = LayerKind::Softmax;

    net.layers = {dense1, relu, dense2, softmax};
    return net;
}

// 200 labelled samples drawn around the same centroids the network was
// built from. The noise scale is calibrated so the clean fixture network
// scores 0.95 on it.
inline LabeledData make_fixture_dataset(std::uint64_t seed = 41, std::size_t count = 200) {
    constexpr std::size_t kIn = 64, kClasses = 8;
    Rng cen_rng = derive_rng(seed, {0x6e6574ULL /* "net" */});
    std::vector<std::vector<float>> centroids(kClasses, std::vector<float>(kIn));
    for (auto& c : centroids)
        for (float& v : c) v = cen_rng.next_below(2) ? 0.5f : -0.5f;

    constexpr double kNoise = 1.45;
    Rng rng = derive_rng(seed, {0x64617461ULL /* "data" */});
    auto normal = [&rng]() {
        // Box-Muller; u1 in (0,1]
        const double u1 = (static_cast<double>(rng.next() >> 11) + 1.0) * 0x1.0p-53;
        const double u2 = rng.next_double();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
    };

    LabeledData data;
    data.inputs.reserve(count);
    data.labels.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const auto label = static_cast<std::uint32_t>(i % kClasses);
        Tensor x({kIn});
        for (std::size_t d = 0; d < kIn; ++d)
            x.data[d] = centroids[label][d] + static_cast<float>(kNoise * normal());
        data.inputs.push_back(std::move(x));
        data.labels.push_back(label);
    }
    return data;
}

} // namespace mors
