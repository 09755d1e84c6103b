#pragma once

#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "mors/profile.hpp"

namespace mors {

namespace detail {

inline nlohmann::json histogram_to_json(const Histogram& h) {
    return {{"counts", h.counts()}, {"total", h.total()}};
}

inline Histogram histogram_from_json(const nlohmann::json& j) {
    Histogram h(j.at("counts").get<std::vector<std::uint64_t>>());
    if (h.total() != j.at("total").get<std::uint64_t>())
        throw ParseError("profile histogram total does not match counts");
    return h;
}

} // namespace detail

inline nlohmann::json profile_to_json(const FaultProfile& p) {
    nlohmann::json j;
    j["geometry"] = {{"blocks", p.geometry.blocks},
                     {"rows", p.geometry.rows},
                     {"cols", p.geometry.cols}};
    if (p.voltage_mv) j["voltage_mv"] = *p.voltage_mv;
    j["coarse"] = {{"p_f", p.coarse.p_f}, {"p_s", p.coarse.p_s}};
    j["rows"] = {{"faulty_rows_per_block", detail::histogram_to_json(p.rows.faulty_rows_per_block)},
                 {"bitfaults_per_row", detail::histogram_to_json(p.rows.bitfaults_per_row)},
                 {"row_distances", detail::histogram_to_json(p.rows.row_distances)}};
    j["cols"] = {{"faulty_cols_per_block", detail::histogram_to_json(p.cols.faulty_cols_per_block)},
                 {"bitfaults_per_col", detail::histogram_to_json(p.cols.bitfaults_per_col)},
                 {"col_distances", detail::histogram_to_json(p.cols.col_distances)}};
    return j;
}

inline FaultProfile profile_from_json(const nlohmann::json& j) {
    FaultProfile p;
    p.geometry.blocks = j.at("geometry").at("blocks").get<std::uint32_t>();
    p.geometry.rows = j.at("geometry").at("rows").get<std::uint32_t>();
    p.geometry.cols = j.at("geometry").at("cols").get<std::uint32_t>();
    p.geometry.validate();
    if (j.contains("voltage_mv")) p.voltage_mv = j.at("voltage_mv").get<std::uint32_t>();
    p.coarse.p_f = j.at("coarse").at("p_f").get<double>();
    p.coarse.p_s = j.at("coarse").at("p_s").get<double>();
    const auto& r = j.at("rows");
    p.rows.faulty_rows_per_block = detail::histogram_from_json(r.at("faulty_rows_per_block"));
    p.rows.bitfaults_per_row = detail::histogram_from_json(r.at("bitfaults_per_row"));
    p.rows.row_distances = detail::histogram_from_json(r.at("row_distances"));
    const auto& c = j.at("cols");
    p.cols.faulty_cols_per_block = detail::histogram_from_json(c.at("faulty_cols_per_block"));
    p.cols.bitfaults_per_col = detail::histogram_from_json(c.at("bitfaults_per_col"));
    p.cols.col_distances = detail::histogram_from_json(c.at("col_distances"));
    return p;
}

inline void save_profile(const FaultProfile& p, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write profile file: " + path.string());
    out << profile_to_json(p).dump(2) << '\n';
}

inline FaultProfile load_profile(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open profile file: " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("bad profile JSON in " + path.string() + ": " + e.what());
    }
    try {
        return profile_from_json(j);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("bad profile schema in " + path.string() + ": " + e.what());
    }
}

} // namespace mors
