#include <catch2/catch_amalgamated.hpp>

#include "mors/fixture.hpp"
#include "mors/generator.hpp"
#include "mors/profile.hpp"

using namespace mors;

namespace {

FaultProfile structured_profile(std::uint32_t blocks = 1024, std::uint64_t seed = 11) {
    return extract_profile(make_structured_map(StructuredConfig{}, blocks, seed));
}

} // namespace

TEST_CASE("budget arithmetic") {
    CHECK(fault_budget(1000, SramGeometry{1024, 16, 1}, 0.0007) == 11468);
    CHECK(faulty_block_target(1000, 0.102) == 102);
    CHECK(faulty_block_target(10, 0.0) == 0);
    // products that are integers in exact arithmetic survive rounding
    const double p_f = 28672.0 / (2500.0 * 16384.0);
    CHECK(fault_budget(2500, SramGeometry{1024, 16, 1}, p_f) == 28672);
}

TEST_CASE("random model hits its coarse targets exactly") {
    const FaultProfile p = structured_profile();
    GenerationConfig cfg;
    cfg.n_blocks = 1000;
    cfg.seed = 99;
    cfg.model = ModelKind::Random;
    const FaultMap map = generate_random(p, cfg);

    const std::uint64_t want_blocks = faulty_block_target(cfg.n_blocks, p.coarse.p_s);
    const std::uint64_t want_faults = fault_budget(cfg.n_blocks, map.geometry(), p.coarse.p_f);
    CHECK(map.fault_count() == want_faults);

    const CoarseProfile c = extract_coarse(map);
    CHECK(c.p_s == static_cast<double>(want_blocks) / cfg.n_blocks);
    CHECK(c.p_f == static_cast<double>(want_faults) /
                       static_cast<double>(map.geometry().total_cells()));
}

TEST_CASE("random model with a 10.2% block rate marks 102 of 1000 blocks") {
    FaultProfile p = structured_profile();
    p.coarse.p_s = 0.102;
    GenerationConfig cfg;
    cfg.n_blocks = 1000;
    cfg.seed = 4;
    cfg.model = ModelKind::Random;
    const FaultMap map = generate_random(p, cfg);
    CHECK(extract_coarse(map).p_s == 0.102);
}

TEST_CASE("random model edge cases") {
    FaultProfile p = structured_profile();

    SECTION("zero fault rate gives an empty map") {
        p.coarse.p_f = 0.0;
        GenerationConfig cfg;
        cfg.n_blocks = 50;
        cfg.model = ModelKind::Random;
        CHECK(generate_random(p, cfg).fault_count() == 0);
    }

    SECTION("determinism per seed") {
        GenerationConfig cfg;
        cfg.n_blocks = 200;
        cfg.seed = 1234;
        cfg.model = ModelKind::Random;
        CHECK(generate_random(p, cfg) == generate_random(p, cfg));
        GenerationConfig other = cfg;
        other.seed = 1235;
        CHECK_FALSE(generate_random(p, cfg) == generate_random(p, other));
    }

    SECTION("infeasible targets are rejected") {
        p.coarse.p_s = 0.01; // one faulty block per 100
        p.coarse.p_f = 0.5;  // half of all cells faulty
        GenerationConfig cfg;
        cfg.n_blocks = 100;
        cfg.model = ModelKind::Random;
        CHECK_THROWS_AS(generate_random(p, cfg), InfeasibleTarget);
    }
}

TEST_CASE("similarity spot values") {
    const auto features = [](std::vector<std::uint64_t> fc, std::vector<std::uint64_t> bc,
                             std::vector<std::uint64_t> cd) {
        ColumnFeatures f;
        f.faulty_cols_per_block = Histogram(std::move(fc));
        f.bitfaults_per_col = Histogram(std::move(bc));
        f.col_distances = Histogram(std::move(cd));
        return f;
    };

    const ColumnFeatures x = features({1, 1, 0}, {1, 1, 0, 0}, {1, 1, 0});
    CHECK(similarity(x, x) == 1.0);

    // disjoint single bins everywhere
    const ColumnFeatures a = features({1, 0, 0}, {1, 0, 0, 0}, {1, 0, 0});
    const ColumnFeatures b = features({0, 1, 0}, {0, 1, 0, 0}, {0, 1, 0});
    CHECK(similarity(a, b) == 0.0);

    // one shared half-mass bin per component
    const ColumnFeatures c = features({1, 1, 0}, {1, 1, 0, 0}, {1, 1, 0});
    const ColumnFeatures d = features({1, 0, 1}, {1, 0, 1, 0}, {1, 0, 1});
    CHECK(similarity(c, d) == 0.5);
    CHECK(similarity(d, c) == 0.5);

    // empty-vs-empty components count as fully similar
    const ColumnFeatures e1 = features({1, 1, 0}, {1, 1, 0, 0}, {0, 0, 0});
    const ColumnFeatures e2 = features({1, 1, 0}, {1, 1, 0, 0}, {0, 0, 0});
    CHECK(similarity(e1, e2) == 1.0);

    const ColumnFeatures other = extract_col_features(FaultMap(SramGeometry{4, 4, 1}, {}));
    CHECK_THROWS_AS(similarity(x, other), GeometryMismatch);
}

TEST_CASE("mixed model respects a degenerate row histogram") {
    FaultProfile p = structured_profile();
    Histogram zero_rows(p.geometry.rows);
    zero_rows.add(0, 5); // every block reports zero faulty rows
    p.rows.faulty_rows_per_block = zero_rows;
    GenerationConfig cfg;
    cfg.n_blocks = 100;
    cfg.seed = 5;
    const auto [map, report] = generate_mixed(p, cfg);
    CHECK(map.fault_count() == 0);
    CHECK(report.accepted_blocks == 0);
}

TEST_CASE("mixed model rejects empty row histograms") {
    FaultProfile p = structured_profile();
    p.rows.bitfaults_per_row = Histogram(p.geometry.cols);
    GenerationConfig cfg;
    cfg.n_blocks = 10;
    CHECK_THROWS_AS(generate_mixed(p, cfg), EmptyHistogram);
}

TEST_CASE("mixed model is deterministic across seeds and thread counts") {
    const FaultProfile p = structured_profile();
    GenerationConfig cfg;
    cfg.n_blocks = 300;
    cfg.seed = 77;
    const auto [map1, rep1] = generate_mixed(p, cfg, 1);
    const auto [map2, rep2] = generate_mixed(p, cfg, 8);
    CHECK(map1 == map2);
    CHECK(rep1.placed_faults == rep2.placed_faults);
    CHECK(rep1.total_retries == rep2.total_retries);
    CHECK(rep1.best_similarity_per_block == rep2.best_similarity_per_block);

    GenerationConfig reseeded = cfg;
    reseeded.seed = 78;
    const auto [map3, rep3] = generate_mixed(p, reseeded, 1);
    CHECK_FALSE(map1 == map3);
}

TEST_CASE("mixed model stays inside budgets and the similarity gate") {
    const FaultProfile p = structured_profile();
    GenerationConfig cfg;
    cfg.n_blocks = 500;
    cfg.seed = 21;
    const auto [map, report] = generate_mixed(p, cfg);

    CHECK(report.placed_faults == map.fault_count());
    CHECK(report.placed_faults <= report.target_faults);
    CHECK(report.accepted_blocks <=
          static_cast<std::uint64_t>(std::ceil(cfg.n_blocks * p.coarse.p_s)));

    // every accepted, non-flagged block passed the gate
    REQUIRE(report.best_similarity_per_block.size() == report.accepted_blocks);
    std::size_t above = 0;
    for (double s : report.best_similarity_per_block)
        if (s > cfg.similarity_threshold) ++above;
    CHECK(above + report.flagged_blocks.size() >= report.accepted_blocks);
    CHECK(report.flagged_blocks.size() < report.accepted_blocks / 2); // gate must be passable
}

TEST_CASE("mixed model reproduces the fixture's fine-grained row features") {
    const FaultProfile p = structured_profile(2048);
    GenerationConfig cfg;
    cfg.n_blocks = 2000;
    cfg.seed = 31;
    const auto [map, report] = generate_mixed(p, cfg, 4);
    const FaultProfile q = extract_profile(map);

    CHECK(total_variation(p.rows.bitfaults_per_row, q.rows.bitfaults_per_row) <= 0.1);
    CHECK(total_variation(p.rows.row_distances, q.rows.row_distances) <= 0.1);
}

TEST_CASE("mixed model never leaves the distance support") {
    const FaultProfile p = structured_profile(); // fixture support is {2,4,6,8}
    GenerationConfig cfg;
    cfg.n_blocks = 800;
    cfg.seed = 13;
    const auto [map, report] = generate_mixed(p, cfg);
    const FaultProfile q = extract_profile(map);
    const auto& d = q.rows.row_distances.counts();
    for (std::size_t i = 9; i < d.size(); ++i) CHECK(d[i] == 0);
    CHECK(q.rows.row_distances.total() > 0);
}

TEST_CASE("tighter similarity thresholds cost more retries") {
    const FaultProfile p = structured_profile();
    GenerationConfig loose;
    loose.n_blocks = 300;
    loose.seed = 55;
    loose.similarity_threshold = 0.80;
    GenerationConfig tight = loose;
    tight.similarity_threshold = 0.95;
    const auto [m1, r1] = generate_mixed(p, loose);
    const auto [m2, r2] = generate_mixed(p, tight);
    CHECK(r2.total_retries > r1.total_retries);
}
