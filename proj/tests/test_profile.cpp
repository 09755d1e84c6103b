#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "mors/faultmap_io.hpp"
#include "mors/fixture.hpp"
#include "mors/profile.hpp"
#include "mors/profile_io.hpp"
#include "mors/rng.hpp"

using namespace mors;

namespace {

// Brute-force reference extractor: materializes each block as a dense grid
// and counts with straight loops. Deliberately independent of the library's
// sparse implementation.
struct BruteProfile {
    double p_f = 0.0, p_s = 0.0;
    std::vector<std::uint64_t> faulty_rows_per_block, bitfaults_per_row, row_distances;
    std::vector<std::uint64_t> faulty_cols_per_block, bitfaults_per_col, col_distances;
};

BruteProfile brute_force_profile(const FaultMap& map) {
    const SramGeometry& g = map.geometry();
    BruteProfile out;
    out.faulty_rows_per_block.assign(g.rows + 1, 0);
    out.bitfaults_per_row.assign(g.cols + 1, 0);
    out.row_distances.assign(g.cols, 0);
    out.faulty_cols_per_block.assign(g.cols + 1, 0);
    out.bitfaults_per_col.assign(g.rows + 1, 0);
    out.col_distances.assign(g.rows, 0);

    std::size_t faulty_blocks = 0;
    for (std::uint32_t b = 0; b < g.blocks; ++b) {
        std::vector<std::vector<bool>> grid(g.rows, std::vector<bool>(g.cols, false));
        std::size_t in_block = 0;
        for (const CellAddress& a : map.faults())
            if (a.block == b) {
                grid[a.row][a.col] = true;
                ++in_block;
            }
        if (in_block == 0) continue;
        ++faulty_blocks;

        std::size_t faulty_rows = 0;
        for (std::uint32_t r = 0; r < g.rows; ++r) {
            std::size_t count = 0;
            int prev = -1;
            for (std::uint32_t c = 0; c < g.cols; ++c)
                if (grid[r][c]) {
                    ++count;
                    if (prev >= 0) ++out.row_distances[c - prev];
                    prev = static_cast<int>(c);
                }
            ++out.bitfaults_per_row[count];
            if (count > 0) ++faulty_rows;
        }
        ++out.faulty_rows_per_block[faulty_rows];

        std::size_t faulty_cols = 0;
        for (std::uint32_t c = 0; c < g.cols; ++c) {
            std::size_t count = 0;
            int prev = -1;
            for (std::uint32_t r = 0; r < g.rows; ++r)
                if (grid[r][c]) {
                    ++count;
                    if (prev >= 0) ++out.col_distances[r - prev];
                    prev = static_cast<int>(r);
                }
            ++out.bitfaults_per_col[count];
            if (count > 0) ++faulty_cols;
        }
        ++out.faulty_cols_per_block[faulty_cols];
    }
    out.p_f = static_cast<double>(map.fault_count()) /
              (static_cast<double>(g.blocks) * g.rows * g.cols);
    out.p_s = static_cast<double>(faulty_blocks) / g.blocks;
    return out;
}

FaultMap random_small_map(Rng& rng) {
    SramGeometry g{static_cast<std::uint32_t>(2 + rng.next_below(14)),
                   static_cast<std::uint32_t>(2 + rng.next_below(10)),
                   static_cast<std::uint32_t>(1 + rng.next_below(4))};
    std::vector<CellAddress> faults;
    const std::uint64_t n = rng.next_below(30);
    for (std::uint64_t i = 0; i < n; ++i)
        faults.push_back(CellAddress{static_cast<std::uint32_t>(rng.next_below(g.blocks)),
                                     static_cast<std::uint32_t>(rng.next_below(g.rows)),
                                     static_cast<std::uint32_t>(rng.next_below(g.cols))});
    return FaultMap(g, std::move(faults));
}

FaultMap single_block_map(SramGeometry g, std::vector<CellAddress> faults) {
    return FaultMap(g, std::move(faults));
}

} // namespace

TEST_CASE("coarse profile matches a device-shaped map exactly") {
    // 2500 blocks, 255 of them faulty, 28672 faults total: p_f = 0.0007 and
    // p_s = 0.102 with no rounding slack
    const SramGeometry g{1024, 16, 2500};
    std::vector<CellAddress> faults;
    for (std::uint32_t b = 0; b < 255; ++b) {
        const std::uint32_t count = b < 112 ? 113 : 112;
        for (std::uint32_t i = 0; i < count; ++i)
            faults.push_back(CellAddress{b, i / 16, i % 16});
    }
    const FaultMap map(g, std::move(faults));
    REQUIRE(map.fault_count() == 28672);
    const CoarseProfile c = extract_coarse(map);
    CHECK(c.p_f == 0.0007);
    CHECK(c.p_s == 0.102);
}

TEST_CASE("coarse profile of trivial maps") {
    CHECK(extract_coarse(FaultMap(SramGeometry{8, 8, 2}, {})).p_f == 0.0);
    CHECK(extract_coarse(FaultMap(SramGeometry{8, 8, 2}, {})).p_s == 0.0);

    const FaultMap one(SramGeometry{1024, 16, 10}, {{3, 0, 0}});
    const CoarseProfile c = extract_coarse(one);
    CHECK(c.p_s == 0.1);
    CHECK(c.p_f == 1.0 / 163840.0);
}

TEST_CASE("row features: distances are sorted column differences") {
    const SramGeometry g{8, 8, 1};

    const RowFeatures two = extract_row_features(single_block_map(g, {{0, 0, 2}, {0, 0, 7}}));
    CHECK(two.row_distances.counts()[5] == 1);
    CHECK(two.row_distances.total() == 1);

    const SramGeometry wide{8, 16, 1};
    const RowFeatures mode =
        extract_row_features(single_block_map(wide, {{0, 3, 0}, {0, 3, 8}}));
    CHECK(mode.row_distances.counts()[8] == 1);

    const RowFeatures empty = extract_row_features(FaultMap(g, {}));
    CHECK(empty.faulty_rows_per_block.total() == 0);
    CHECK(empty.bitfaults_per_row.total() == 0);
    CHECK(empty.row_distances.total() == 0);
}

TEST_CASE("row features count zero-fault rows of faulty blocks") {
    const SramGeometry g{8, 8, 2}; // block 1 stays healthy
    const RowFeatures f =
        extract_row_features(single_block_map(g, {{0, 1, 0}, {0, 1, 4}, {0, 5, 2}}));
    CHECK(f.faulty_rows_per_block.counts()[2] == 1);
    CHECK(f.faulty_rows_per_block.total() == 1); // healthy block contributes nothing
    CHECK(f.bitfaults_per_row.counts()[0] == 6); // rows of the faulty block only
    CHECK(f.bitfaults_per_row.counts()[2] == 1);
    CHECK(f.bitfaults_per_row.counts()[1] == 1);
    CHECK(f.bitfaults_per_row.total() == 8);
}

TEST_CASE("column features mirror the row logic") {
    const SramGeometry g{8, 8, 1};

    const ColumnFeatures two =
        extract_col_features(single_block_map(g, {{0, 1, 3}, {0, 7, 3}}));
    CHECK(two.col_distances.counts()[6] == 1);
    CHECK(two.bitfaults_per_col.counts()[2] == 1);

    const ColumnFeatures single = extract_col_features(single_block_map(g, {{0, 4, 2}}));
    CHECK(single.col_distances.total() == 0);
}

TEST_CASE("profile extraction is deterministic and stable across IO") {
    Rng rng(7);
    const FaultMap map = random_small_map(rng);
    const FaultProfile a = extract_profile(map);
    const FaultProfile b = extract_profile(map);
    CHECK(a.rows.bitfaults_per_row == b.rows.bitfaults_per_row);
    CHECK(a.cols.col_distances == b.cols.col_distances);

    std::ostringstream out;
    serialize_faultmap(map, out);
    std::istringstream in(out.str());
    const FaultProfile c = extract_profile(parse_faultmap(in));
    CHECK(a.coarse.p_f == c.coarse.p_f);
    CHECK(a.rows.row_distances == c.rows.row_distances);
    CHECK(a.cols.bitfaults_per_col == c.cols.bitfaults_per_col);
}

TEST_CASE("profile matches the brute-force oracle on random maps") {
    Rng rng(99);
    for (int i = 0; i < 120; ++i) {
        const FaultMap map = random_small_map(rng);
        const FaultProfile p = extract_profile(map);
        const BruteProfile o = brute_force_profile(map);
        CHECK(p.coarse.p_f == o.p_f);
        CHECK(p.coarse.p_s == o.p_s);
        CHECK(p.rows.faulty_rows_per_block.counts() == o.faulty_rows_per_block);
        CHECK(p.rows.bitfaults_per_row.counts() == o.bitfaults_per_row);
        CHECK(p.rows.row_distances.counts() == o.row_distances);
        CHECK(p.cols.faulty_cols_per_block.counts() == o.faulty_cols_per_block);
        CHECK(p.cols.bitfaults_per_col.counts() == o.bitfaults_per_col);
        CHECK(p.cols.col_distances.counts() == o.col_distances);
    }
}

TEST_CASE("bitfault histogram mass is consistent with the fault count") {
    Rng rng(123);
    for (int i = 0; i < 50; ++i) {
        const FaultMap map = random_small_map(rng);
        const FaultProfile p = extract_profile(map);
        std::uint64_t weighted = 0;
        for (std::size_t k = 0; k < p.rows.bitfaults_per_row.counts().size(); ++k)
            weighted += k * p.rows.bitfaults_per_row.counts()[k];
        CHECK(weighted == map.fault_count()); // every fault lives in a faulty block

        std::uint64_t faulty_blocks = 0;
        for (std::uint64_t c : p.rows.faulty_rows_per_block.counts()) faulty_blocks += c;
        CHECK(p.rows.bitfaults_per_row.total() == faulty_blocks * map.geometry().rows);
    }
}

TEST_CASE("distance histograms have no mass at zero or beyond the dimension") {
    Rng rng(321);
    for (int i = 0; i < 50; ++i) {
        const FaultMap map = random_small_map(rng);
        const FaultProfile p = extract_profile(map);
        CHECK(p.rows.row_distances.counts()[0] == 0);
        CHECK(p.rows.row_distances.counts().size() == map.geometry().cols);
        CHECK(p.cols.col_distances.counts()[0] == 0);
        CHECK(p.cols.col_distances.counts().size() == map.geometry().rows);
    }
}

TEST_CASE("structured fixture concentrates row distances at 8") {
    const FaultMap map = make_structured_map(profiler_fixture_config(), 400, 17);
    const FaultProfile p = extract_profile(map);
    const auto& d = p.rows.row_distances.counts();
    REQUIRE(p.rows.row_distances.total() > 0);
    for (std::size_t i = 0; i < d.size(); ++i)
        if (i != 8) CHECK(d[8] >= d[i]);
    for (std::size_t i = 9; i < d.size(); ++i) CHECK(d[i] == 0);

    // even column bias: even distances dominate odd ones
    std::uint64_t even = 0, odd = 0;
    const auto& cd = p.cols.col_distances.counts();
    for (std::size_t i = 1; i < cd.size(); ++i)
        (i % 2 == 0 ? even : odd) += cd[i];
    CHECK(even > odd);
}

TEST_CASE("profile JSON round trips") {
    Rng rng(5);
    const FaultMap map = random_small_map(rng);
    const FaultProfile p = extract_profile(map);
    const FaultProfile q = profile_from_json(profile_to_json(p));
    CHECK(q.geometry == p.geometry);
    CHECK(q.coarse.p_f == p.coarse.p_f);
    CHECK(q.coarse.p_s == p.coarse.p_s);
    CHECK(q.rows.faulty_rows_per_block == p.rows.faulty_rows_per_block);
    CHECK(q.rows.bitfaults_per_row == p.rows.bitfaults_per_row);
    CHECK(q.rows.row_distances == p.rows.row_distances);
    CHECK(q.cols.faulty_cols_per_block == p.cols.faulty_cols_per_block);
    CHECK(q.cols.bitfaults_per_col == p.cols.bitfaults_per_col);
    CHECK(q.cols.col_distances == p.cols.col_distances);
}
