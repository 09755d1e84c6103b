#pragma once

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "mors/geometry.hpp"

namespace mors {

// Non-fatal findings collected while parsing a fault-map file. Duplicate
// records are deduplicated and reported here instead of rejected, since
// merged experiment runs repeat most fault locations.
struct ParseReport {
    std::size_t duplicate_count = 0;
    std::vector<std::size_t> duplicate_lines;
};

namespace detail {

inline bool parse_u32(std::string_view s, std::uint32_t& out) {
    if (s.empty()) return false;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size();
}

} // namespace detail

// Reads the text fault-map format:
//
//   # blocks=<u32> rows=<u32> cols=<u32> voltage=<u32 mV>
//   block,row,col
//   0,5,3
//   ...
//
// The `voltage=` key is optional. Records must be bare decimal triples.
// Throws MalformedHeader / CoordinateOutOfRange / ParseError with the
// offending line number in the message.
inline FaultMap parse_faultmap(std::istream& in, ParseReport* report = nullptr) {
    std::string line;
    if (!std::getline(in, line) || line.empty() || line[0] != '#')
        throw MalformedHeader("line 1: expected '# blocks=... rows=... cols=...' header");

    SramGeometry geom{0, 0, 0};
    std::optional<std::uint32_t> voltage;
    bool have_blocks = false, have_rows = false, have_cols = false;
    {
        std::istringstream hs(line.substr(1));
        std::string tok;
        while (hs >> tok) {
            const auto eq = tok.find('=');
            if (eq == std::string::npos)
                throw MalformedHeader("line 1: bad header token '" + tok + "'");
            const std::string key = tok.substr(0, eq);
            std::uint32_t value = 0;
            if (!detail::parse_u32(tok.substr(eq + 1), value))
                throw MalformedHeader("line 1: bad value in '" + tok + "'");
            if (key == "blocks") { geom.blocks = value; have_blocks = true; }
            else if (key == "rows") { geom.rows = value; have_rows = true; }
            else if (key == "cols") { geom.cols = value; have_cols = true; }
            else if (key == "voltage") { voltage = value; }
            else throw MalformedHeader("line 1: unknown header key '" + key + "'");
        }
    }
    if (!have_blocks || !have_rows || !have_cols)
        throw MalformedHeader("line 1: header must set blocks, rows and cols");
    if (geom.rows < 1 || geom.cols < 1 || geom.blocks < 1)
        throw MalformedHeader("line 1: geometry dimensions must all be >= 1");

    if (!std::getline(in, line) || line != "block,row,col")
        throw MalformedHeader("line 2: expected literal column header 'block,row,col'");

    std::vector<CellAddress> faults;
    std::set<CellAddress> seen;
    std::size_t line_no = 2;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue; // tolerate a trailing blank line
        const auto c1 = line.find(',');
        const auto c2 = c1 == std::string::npos ? std::string::npos : line.find(',', c1 + 1);
        CellAddress a;
        if (c2 == std::string::npos ||
            !detail::parse_u32(std::string_view(line).substr(0, c1), a.block) ||
            !detail::parse_u32(std::string_view(line).substr(c1 + 1, c2 - c1 - 1), a.row) ||
            !detail::parse_u32(std::string_view(line).substr(c2 + 1), a.col))
            throw ParseError("line " + std::to_string(line_no) + ": malformed record '" + line + "'");
        if (!a.in_range(geom))
            throw CoordinateOutOfRange("line " + std::to_string(line_no) +
                                       ": coordinate out of range '" + line + "'");
        if (!seen.insert(a).second) {
            if (report) {
                ++report->duplicate_count;
                report->duplicate_lines.push_back(line_no);
            }
            continue;
        }
        faults.push_back(a);
    }
    return FaultMap(geom, std::move(faults), voltage);
}

// Writes the format read by parse_faultmap. Records come out sorted by
// (block, row, col), so serialization is canonical: equal maps produce
// byte-identical files.
inline void serialize_faultmap(const FaultMap& map, std::ostream& out) {
    const SramGeometry& g = map.geometry();
    out << "# blocks=" << g.blocks << " rows=" << g.rows << " cols=" << g.cols;
    if (map.voltage_mv()) out << " voltage=" << *map.voltage_mv();
    out << "\nblock,row,col\n";
    for (const CellAddress& a : map.faults())
        out << a.block << ',' << a.row << ',' << a.col << '\n';
}

inline FaultMap load_faultmap(const std::filesystem::path& path, ParseReport* report = nullptr) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open fault map file: " + path.string());
    return parse_faultmap(in, report);
}

inline void save_faultmap(const FaultMap& map, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write fault map file: " + path.string());
    serialize_faultmap(map, out);
}

// Loads every `faults_<voltage>mV.csv` in a directory into a dataset.
inline FaultDataset load_fault_dataset(const std::filesystem::path& dir) {
    std::vector<FaultMap> maps;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        const std::string name = entry.path().filename().string();
        if (name.starts_with("faults_") && name.ends_with("mV.csv"))
            maps.push_back(load_faultmap(entry.path()));
    }
    if (maps.empty())
        throw ParseError("no faults_<voltage>mV.csv files in " + dir.string());
    return FaultDataset(std::move(maps));
}

} // namespace mors
