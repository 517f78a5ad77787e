#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <random>

#include "pairclust/density.hpp"
#include "pairclust/error.hpp"
#include "pairclust/knn.hpp"

#include "oracles.hpp"

using namespace pairclust;

namespace {

KnnGraph graph_with_rows(std::int32_t n, std::int32_t k,
                         const std::vector<std::vector<std::pair<std::int32_t, float>>>& rows) {
    KnnGraph g(n, k);
    for (std::int32_t i = 0; i < n; ++i) {
        for (std::int32_t j = 0; j < k; ++j) {
            g.neighbors[static_cast<std::size_t>(i) * k + j] = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)].first;
            g.sims[static_cast<std::size_t>(i) * k + j] = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)].second;
        }
    }
    g.validate();
    return g;
}

}  // namespace

TEST_CASE("power weighting follows (k-j)^p with the 0^0 convention") {
    const PowerWeighting w{3, 5.0};
    CHECK(w.weight(1) == 32.0);
    CHECK(w.weight(2) == 1.0);
    CHECK(w.weight(3) == 0.0);
    const PowerWeighting flat{3, 0.0};
    CHECK(flat.weight(1) == 1.0);
    CHECK(flat.weight(3) == 1.0);  // 0^0 = 1
}

TEST_CASE("constant sims give density k") {
    std::vector<std::vector<std::pair<std::int32_t, float>>> rows;
    for (std::int32_t i = 0; i < 4; ++i) {
        std::vector<std::pair<std::int32_t, float>> row;
        for (std::int32_t j = 0; j < 4; ++j) {
            if (j != i) row.emplace_back(j, 1.0f);
        }
        rows.push_back(row);
    }
    const KnnGraph g = graph_with_rows(4, 3, rows);
    const DensityScores scores = original_density(g);
    CHECK(scores.mode == DensityMode::Original);
    for (double v : scores.values) CHECK(v == 3.0);
}

TEST_CASE("two unit vectors at 60 degrees have density 0.5 under k=1") {
    FeatureMatrix f(2, 2);
    f.row(0)[0] = 1.0f;
    f.row(1)[0] = 0.5f;
    f.row(1)[1] = static_cast<float>(std::sqrt(3.0) / 2.0);
    const KnnGraph g = build_knn(f, 1);
    const DensityScores scores = original_density(g);
    CHECK(scores.values[0] == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(scores.values[1] == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("k=2 sims (0.9, 0.8) with p=1 scores 0.9") {
    const KnnGraph g = graph_with_rows(
        3, 2, {{{1, 0.9f}, {2, 0.8f}}, {{0, 0.5f}, {2, 0.4f}}, {{0, 0.5f}, {1, 0.4f}}});
    const DensityScores scores = rank_weighted_density(g, PowerWeighting{2, 1.0});
    // weight(1) = 1, weight(2) = 0: only the top neighbor counts.
    CHECK(scores.values[0] == static_cast<double>(0.9f));
    CHECK(scores.values[0] == doctest::Approx(0.9).epsilon(1e-6));
}

TEST_CASE("outlier scenario: rank weighting flips the density order") {
    // Sample 0 sits next to a tight pair plus one stray hit; sample 1 has
    // three moderate neighbors. Plain summation ranks 1 above 0, p=5 flips it.
    const KnnGraph g = graph_with_rows(4, 3,
                                       {{{1, 0.9f}, {2, 0.9f}, {3, 0.2f}},
                                        {{0, 0.7f}, {2, 0.7f}, {3, 0.7f}},
                                        {{0, 0.1f}, {1, 0.1f}, {3, 0.1f}},
                                        {{0, 0.1f}, {1, 0.1f}, {2, 0.1f}}});
    const DensityScores original = original_density(g);
    CHECK(original.values[0] == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(original.values[1] == doctest::Approx(2.1).epsilon(1e-6));
    CHECK(original.values[1] > original.values[0]);

    const DensityScores weighted = rank_weighted_density(g, PowerWeighting{3, 5.0});
    CHECK(weighted.values[0] == doctest::Approx(29.7).epsilon(1e-6));
    CHECK(weighted.values[1] == doctest::Approx(23.1).epsilon(1e-6));
    CHECK(weighted.values[0] > weighted.values[1]);
}

TEST_CASE("p=0 is bit-identical to original density") {
    for (std::uint64_t seed : {1ull, 2ull, 3ull, 4ull, 5ull}) {
        const KnnGraph g = oracle::random_graph(120, 10, seed);
        const DensityScores original = original_density(g);
        const DensityScores degenerate = rank_weighted_density(g, PowerWeighting{10, 0.0});
        REQUIRE(original.values.size() == degenerate.values.size());
        CHECK(std::memcmp(original.values.data(), degenerate.values.data(),
                          original.values.size() * sizeof(double)) == 0);
    }
}

TEST_CASE("densities match the re-summation oracle to 1e-9") {
    const KnnGraph g = oracle::random_graph(100, 10, 42);
    const DensityScores original = original_density(g);
    const auto originalOracle = oracle::resum_original_density(g);
    for (std::size_t i = 0; i < originalOracle.size(); ++i) {
        CHECK(std::abs(original.values[i] - originalOracle[i]) < 1e-9);
    }
    for (double p : {0.5, 1.0, 2.0, 5.0}) {
        const DensityScores weighted = rank_weighted_density(g, PowerWeighting{10, p});
        const auto weightedOracle = oracle::resum_density(g, p);
        for (std::size_t i = 0; i < weightedOracle.size(); ++i) {
            CHECK(std::abs(weighted.values[i] - weightedOracle[i]) <
                  1e-9 * std::max(1.0, std::abs(weightedOracle[i])));
        }
    }
}

TEST_CASE("weight ratios never shift toward lower ranks as p grows") {
    for (std::int32_t k : {3, 5, 8}) {
        for (std::int32_t j = 1; j < k; ++j) {
            for (std::int32_t j2 = j + 1; j2 < k; ++j2) {  // j2 < k keeps both weights positive
                double previous = 0.0;
                for (double p : {0.0, 0.5, 1.0, 2.0, 5.0}) {
                    const PowerWeighting w{k, p};
                    const double ratio = w.weight(j) / w.weight(j2);
                    CHECK(ratio >= previous);
                    previous = ratio;
                }
            }
        }
    }
}

TEST_CASE("rank_weighted_density rejects a mismatched k") {
    const KnnGraph g = oracle::random_graph(20, 4, 9);
    try {
        rank_weighted_density(g, PowerWeighting{5, 1.0});
        FAIL("expected throw");
    } catch (const PcError& e) {
        CHECK(e.code() == ErrorCode::WeightingMismatch);
    }
}

TEST_CASE("pair selection: the global maximum emits no pair") {
    const KnnGraph g = oracle::random_graph(50, 6, 31);
    const DensityScores scores = original_density(g);
    const PairSet pairs = find_pairs_via_density(g, scores);
    const auto top = static_cast<std::int32_t>(
        std::max_element(scores.values.begin(), scores.values.end()) - scores.values.begin());
    for (const auto& [x, y] : pairs.pairs) CHECK(x != top);
}

TEST_CASE("pair selection on an empty single-sample graph") {
    const KnnGraph g(1, 0);
    DensityScores scores;
    scores.values = {1.0};
    const PairSet pairs = find_pairs_via_density(g, scores);
    CHECK(pairs.pairs.empty());
}

TEST_CASE("pair selection equals the naive scan oracle on random densities") {
    std::mt19937_64 rng(808);
    for (int trial = 0; trial < 10; ++trial) {
        const KnnGraph g = oracle::random_graph(200, 8, rng());
        DensityScores scores;
        scores.values.reserve(200);
        for (int i = 0; i < 200; ++i) scores.values.push_back(oracle::unit(rng) * 10.0);
        const PairSet pairs = find_pairs_via_density(g, scores);
        CHECK(pairs.pairs == oracle::scan_pairs(g, scores.values));
        CHECK(pairs.size() <= g.n);
        for (std::size_t i = 1; i < pairs.pairs.size(); ++i) {
            CHECK(pairs.pairs[i - 1].first < pairs.pairs[i].first);  // canonical order
        }
    }
}

TEST_CASE("equal densities fall back to the index order") {
    // All densities equal: a pair goes to the first neighbor with a smaller
    // index, and sample 0 emits nothing.
    const KnnGraph g = oracle::random_graph(30, 4, 5);
    DensityScores scores;
    scores.values.assign(30, 2.5);
    const PairSet pairs = find_pairs_via_density(g, scores);
    for (const auto& [x, y] : pairs.pairs) CHECK(y < x);
    for (const auto& [x, y] : pairs.pairs) CHECK(x != 0);
    CHECK(pairs.pairs == oracle::scan_pairs(g, scores.values));
}

TEST_CASE("every emitted pair points to a listed neighbor ranked above the source") {
    const KnnGraph g = oracle::random_graph(150, 7, 61);
    DensityScores scores;
    std::mt19937_64 rng(62);
    for (int i = 0; i < 150; ++i) scores.values.push_back(oracle::unit(rng));
    const PairSet pairs = find_pairs_via_density(g, scores);
    for (const auto& [x, y] : pairs.pairs) {
        const auto row = g.row_neighbors(x);
        CHECK(std::find(row.begin(), row.end(), y) != row.end());
        const double dx = scores.values[static_cast<std::size_t>(x)];
        const double dy = scores.values[static_cast<std::size_t>(y)];
        CHECK((dy > dx || (dy == dx && y < x)));
    }
}

TEST_CASE("pair selection rejects a density vector of the wrong length") {
    const KnnGraph g = oracle::random_graph(10, 3, 1);
    DensityScores scores;
    scores.values.assign(9, 1.0);
    try {
        find_pairs_via_density(g, scores);
        FAIL("expected throw");
    } catch (const PcError& e) {
        CHECK(e.code() == ErrorCode::LengthMismatch);
    }
}
