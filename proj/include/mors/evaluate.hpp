#pragma once

#include <cmath>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mors/evaluate_fwd.hpp"
#include "mors/format.hpp"
#include "mors/generator.hpp"
#include "mors/network.hpp"
#include "mors/parallel.hpp"
#include "mors/weight_image.hpp"

namespace mors {

// Full single-shot pipeline: quantize the network's flattened weights, lay
// them onto the fault map's geometry, flip faulty cells, read back (masking
// non-finite floats), rebuild the network and score it. With an empty fault
// map this returns the clean quantized accuracy exactly.
inline double evaluate(const Network& net, const LabeledData& data,
                       const FaultMap& faults, const EvalOptions& opts) {
    const std::vector<double> flat = net.flatten_weights(opts.include_biases);
    const QuantizedWeights q = quantize(flat, opts.precision);
    const WeightImage clean = layout(q, opts.mapping, faults.geometry());
    const WeightImage faulty = inject(clean, faults);
    const std::vector<double> back = readback(faulty, opts.masking);
    Network patched = net;
    patched.load_weights(back, opts.include_biases);
    return accuracy(patched, data);
}

namespace detail {

inline constexpr std::uint64_t kTagIteration = 0x69746572ULL; // "iter"

inline std::uint64_t model_tag(SweepModel m) {
    switch (m) {
        case SweepModel::Real: return 1;
        case SweepModel::Mixed: return 2;
        case SweepModel::Random: return 3;
    }
    return 0;
}

// Uniform subset of `count` blocks of a real map, renumbered to a compact
// geometry. This is how a network that needs fewer blocks than the device
// provides samples its share of real faults each iteration.
inline FaultMap subset_blocks(const FaultMap& map, std::uint32_t count, Rng& rng) {
    const std::uint32_t have = map.geometry().blocks;
    if (count > have)
        throw EvaluationError("network needs " + std::to_string(count) +
                              " blocks but the fault map has " + std::to_string(have));
    std::vector<std::uint32_t> pick(have);
    for (std::uint32_t i = 0; i < have; ++i) pick[i] = i;
    for (std::uint32_t i = 0; i < count; ++i) {
        const std::uint64_t j = i + rng.next_below(have - i);
        std::swap(pick[i], pick[j]);
    }
    pick.resize(count);
    std::sort(pick.begin(), pick.end());
    std::vector<std::uint32_t> renumber(have, UINT32_MAX);
    for (std::uint32_t i = 0; i < count; ++i) renumber[pick[i]] = i;

    SramGeometry g = map.geometry();
    g.blocks = count;
    std::vector<CellAddress> faults;
    for (const CellAddress& a : map.faults())
        if (renumber[a.block] != UINT32_MAX)
            faults.push_back(CellAddress{renumber[a.block], a.row, a.col});
    return FaultMap(g, std::move(faults), map.voltage_mv());
}

} // namespace detail

inline std::string model_name(SweepModel m) {
    switch (m) {
        case SweepModel::Real: return "real";
        case SweepModel::Mixed: return "mixed";
        case SweepModel::Random: return "random";
    }
    return "real";
}

inline SweepModel model_from_name(const std::string& s) {
    if (s == "real") return SweepModel::Real;
    if (s == "mixed") return SweepModel::Mixed;
    if (s == "random") return SweepModel::Random;
    throw Error("unknown model name: " + s);
}

// The fault sources a sweep can draw from. Real needs per-voltage maps;
// Mixed/Random need per-voltage profiles.
struct SweepSource {
    const FaultDataset* real = nullptr;
    const std::vector<FaultProfile>* profiles = nullptr;

    const FaultProfile& profile_at(std::uint32_t mv) const {
        if (profiles)
            for (const FaultProfile& p : *profiles)
                if (p.voltage_mv == mv) return p;
        throw MissingProfile("no profile for voltage " + std::to_string(mv) + " mV");
    }
};

struct SweepConfig {
    std::vector<std::uint32_t> voltages_mv;
    std::vector<SweepModel> models;
    std::vector<EvalOptions> grid;
    std::uint32_t iterations = 300;
    std::uint64_t seed = 0;
    unsigned threads = 1;
    double similarity_threshold = 0.80;
    std::uint32_t max_retries_per_block = 1000;
};

// Builds the per-iteration fault map for one cell of the sweep. The RNG
// stream is derived from (seed, voltage, model, grid point, iteration), so
// every map is independent of scheduling.
inline FaultMap iteration_fault_map(const SweepSource& src, SweepModel model,
                                    std::uint32_t voltage_mv, std::uint32_t n_blocks,
                                    const SweepConfig& cfg, std::size_t grid_index,
                                    std::uint32_t iteration) {
    const std::uint64_t seed = derive_seed(
        cfg.seed, {detail::kTagIteration, voltage_mv, detail::model_tag(model),
                   static_cast<std::uint64_t>(grid_index), iteration});
    switch (model) {
        case SweepModel::Real: {
            if (!src.real) throw MissingProfile("real model requested without a fault dataset");
            Rng rng(seed);
            return detail::subset_blocks(src.real->at_voltage(voltage_mv), n_blocks, rng);
        }
        case SweepModel::Mixed: {
            GenerationConfig gc;
            gc.n_blocks = n_blocks;
            gc.seed = seed;
            gc.model = ModelKind::Mixed;
            gc.similarity_threshold = cfg.similarity_threshold;
            gc.max_retries_per_block = cfg.max_retries_per_block;
            return generate_mixed(src.profile_at(voltage_mv), gc).first;
        }
        case SweepModel::Random: {
            GenerationConfig gc;
            gc.n_blocks = n_blocks;
            gc.seed = seed;
            gc.model = ModelKind::Random;
            return generate_random(src.profile_at(voltage_mv), gc);
        }
    }
    throw EvaluationError("unreachable model kind");
}

struct EvalRow {
    std::uint32_t voltage_mv = 0;
    SweepModel model = SweepModel::Real;
    EvalOptions options;
    std::uint32_t iterations = 0;
    double mean_accuracy = 0.0;
    double stddev = 0.0;
};

struct EvalReport {
    std::vector<EvalRow> rows;
};

// Runs the whole grid: voltages x models x options, `iterations` runs each.
// Iterations run in parallel; accuracies land in a slot vector and are
// reduced in index order, so the report does not depend on thread count.
inline EvalReport sweep(const Network& net, const LabeledData& data,
                        const SweepSource& src, const SweepConfig& cfg) {
    EvalReport report;
    const SramGeometry base; // rows/cols defaults; block count varies per precision
    for (std::uint32_t mv : cfg.voltages_mv) {
        for (SweepModel model : cfg.models) {
            for (std::size_t gi = 0; gi < cfg.grid.size(); ++gi) {
                const EvalOptions& opts = cfg.grid[gi];
                SramGeometry g = base;
                if (src.profiles && !(*src.profiles).empty()) {
                    g.rows = (*src.profiles)[0].geometry.rows;
                    g.cols = (*src.profiles)[0].geometry.cols;
                } else if (src.real && !src.real->entries().empty()) {
                    g.rows = src.real->entries()[0].geometry().rows;
                    g.cols = src.real->entries()[0].geometry().cols;
                }
                const auto n_blocks = static_cast<std::uint32_t>(required_blocks(
                    net.weight_count(opts.include_biases), opts.precision, g));

                std::vector<double> acc(cfg.iterations, 0.0);
                std::vector<std::exception_ptr> errors(cfg.iterations);
                parallel_for(cfg.iterations, cfg.threads, [&](std::size_t it) {
                    try {
                        const FaultMap map = iteration_fault_map(
                            src, model, mv, n_blocks, cfg, gi,
                            static_cast<std::uint32_t>(it));
                        acc[it] = evaluate(net, data, map, opts);
                    } catch (...) {
                        errors[it] = std::current_exception();
                    }
                });
                for (const std::exception_ptr& e : errors)
                    if (e) std::rethrow_exception(e);

                double mean = 0.0;
                for (double a : acc) mean += a;
                mean /= cfg.iterations;
                double var = 0.0;
                for (double a : acc) var += (a - mean) * (a - mean);
                var /= cfg.iterations;

                EvalRow row;
                row.voltage_mv = mv;
                row.model = model;
                row.options = opts;
                row.iterations = cfg.iterations;
                row.mean_accuracy = mean;
                row.stddev = std::sqrt(var);
                report.rows.push_back(row);
            }
        }
    }
    return report;
}

inline std::string report_csv(const EvalReport& report) {
    std::string out = "voltage_mv,model,precision,mapping,masking,iterations,mean_accuracy,stddev\n";
    for (const EvalRow& r : report.rows) {
        out += std::to_string(r.voltage_mv) + ',' + model_name(r.model) + ',' +
               precision_name(r.options.precision) + ',' + mapping_name(r.options.mapping) + ',' +
               (r.options.masking ? mask_name(*r.options.masking) : std::string("none")) + ',' +
               std::to_string(r.iterations) + ',' + format_g6(r.mean_accuracy) + ',' +
               format_g6(r.stddev) + '\n';
    }
    return out;
}

inline nlohmann::json report_to_json(const EvalReport& report) {
    nlohmann::json rows = nlohmann::json::array();
    for (const EvalRow& r : report.rows) {
        rows.push_back({{"voltage_mv", r.voltage_mv},
                        {"model", model_name(r.model)},
                        {"precision", precision_name(r.options.precision)},
                        {"mapping", mapping_name(r.options.mapping)},
                        {"masking", r.options.masking ? mask_name(*r.options.masking)
                                                      : std::string("none")},
                        {"iterations", r.iterations},
                        {"mean_accuracy", round_g6(r.mean_accuracy)},
                        {"stddev", round_g6(r.stddev)}});
    }
    return {{"rows", rows}};
}

inline EvalReport report_from_json(const nlohmann::json& j) {
    EvalReport report;
    for (const auto& jr : j.at("rows")) {
        EvalRow r;
        r.voltage_mv = jr.at("voltage_mv").get<std::uint32_t>();
        r.model = model_from_name(jr.at("model").get<std::string>());
        r.options.precision = precision_from_name(jr.at("precision").get<std::string>());
        r.options.mapping = mapping_from_name(jr.at("mapping").get<std::string>());
        const std::string mask = jr.at("masking").get<std::string>();
        if (mask != "none") r.options.masking = mask_from_name(mask);
        r.iterations = jr.at("iterations").get<std::uint32_t>();
        r.mean_accuracy = jr.at("mean_accuracy").get<double>();
        r.stddev = jr.at("stddev").get<double>();
        report.rows.push_back(r);
    }
    return report;
}

inline void save_report(const EvalReport& report, const std::filesystem::path& stem) {
    {
        std::ofstream out(stem.string() + ".csv", std::ios::binary);
        if (!out) throw Error("cannot write report CSV at " + stem.string());
        out << report_csv(report);
    }
    {
        std::ofstream out(stem.string() + ".json", std::ios::binary);
        if (!out) throw Error("cannot write report JSON at " + stem.string());
        out << report_to_json(report).dump(2) << '\n';
    }
}

inline EvalReport load_report(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open report: " + path.string());
    nlohmann::json j;
    try {
        in >> j;
        return report_from_json(j);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("bad report JSON " + path.string() + ": " + e.what());
    }
}

} // namespace mors
