#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <random>
#include <set>
#include <vector>

#include "pairclust/error.hpp"
#include "pairclust/metrics.hpp"
#include "pairclust/pipeline.hpp"
#include "pairclust/synth.hpp"

#include "oracles.hpp"

using namespace pairclust;

namespace {

EdgeList random_edges(std::int32_t n, std::int32_t count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::set<std::pair<std::int32_t, std::int32_t>> seen;
    while (std::cmp_less(seen.size(), count)) {
        auto a = static_cast<std::int32_t>(rng() % static_cast<std::uint64_t>(n));
        auto b = static_cast<std::int32_t>(rng() % static_cast<std::uint64_t>(n));
        if (a == b) continue;
        seen.emplace(std::min(a, b), std::max(a, b));
    }
    EdgeList edges;
    edges.edges.assign(seen.begin(), seen.end());
    return edges;
}

// Accepts a pair iff both endpoints carry the same sign pattern in their
// first original coordinate. Works on any mode whose first half starts with
// the original embedding of a.
MlpClassifier always_same_model(std::int32_t inputDim) {
    MlpClassifier model({inputDim, 1, 1, 2});
    auto p = model.parameters();
    std::fill(p.begin(), p.end(), 0.0);
    p[p.size() - 1] = 1.0;  // b3 "same"
    return model;
}

MlpClassifier never_same_model(std::int32_t inputDim) {
    MlpClassifier model({inputDim, 1, 1, 2});
    auto p = model.parameters();
    std::fill(p.begin(), p.end(), 0.0);
    p[p.size() - 2] = 1.0;  // b3 "different"
    return model;
}

}  // namespace

TEST_CASE("edge list validation") {
    EdgeList edges;
    edges.edges = {{0, 1}, {1, 2}};
    edges.validate(3);
    edges.edges.push_back({2, 2});
    CHECK_THROWS_AS(edges.validate(3), PcError);
    edges.edges.back() = {0, 3};
    CHECK_THROWS_AS(edges.validate(3), PcError);
    edges.edges.back() = {0, 1};
    CHECK_THROWS_AS(edges.validate(3), PcError);  // duplicate
}

TEST_CASE("component ids follow each component's smallest member") {
    EdgeList edges;
    edges.edges = {{3, 4}, {0, 5}};
    const ClusterAssignment a = connected_components(6, edges);
    // components: {0,5} -> 0, {1} -> 1, {2} -> 2, {3,4} -> 3
    CHECK(a.ids == std::vector<std::int32_t>{0, 1, 2, 3, 3, 0});
    CHECK(a.numClusters == 4);
    CHECK(a.numSingletons() == 2);
}

TEST_CASE("no edges means all singletons, a chain means one cluster") {
    const ClusterAssignment lonely = connected_components(4, EdgeList{});
    CHECK(lonely.ids == std::vector<std::int32_t>{0, 1, 2, 3});
    CHECK(lonely.numClusters == 4);

    EdgeList chain;
    chain.edges = {{0, 1}, {1, 2}, {2, 3}};
    const ClusterAssignment joined = connected_components(4, chain);
    CHECK(joined.ids == std::vector<std::int32_t>{0, 0, 0, 0});
    CHECK(joined.numClusters == 1);
}

TEST_CASE("components agree with union-find on random graphs") {
    std::mt19937_64 rng(515);
    for (int trial = 0; trial < 110; ++trial) {
        const auto n = static_cast<std::int32_t>(2 + rng() % 999);
        const auto count = static_cast<std::int32_t>(rng() % static_cast<std::uint64_t>(2 * n));
        const EdgeList edges = random_edges(n, count, rng());
        const ClusterAssignment bfs = connected_components(n, edges);
        const ClusterAssignment ref = oracle::components_via_union_find(n, edges.edges);
        CAPTURE(trial);
        CAPTURE(n);
        REQUIRE(bfs.ids == ref.ids);
        CHECK(bfs.numClusters == ref.numClusters);
    }
}

TEST_CASE("components are invariant under edge permutation") {
    EdgeList edges = random_edges(200, 150, 616);
    const ClusterAssignment a = connected_components(200, edges);
    std::mt19937_64 rng(617);
    for (std::size_t i = edges.edges.size(); i > 1; --i) {
        std::swap(edges.edges[i - 1], edges.edges[rng() % i]);
    }
    const ClusterAssignment b = connected_components(200, edges);
    CHECK(a.ids == b.ids);
}

TEST_CASE("cluster() recovers tight blobs with a permissive model") {
    BlobSpec spec;
    spec.numClasses = 8;
    spec.samplesPerClassMin = 12;
    spec.samplesPerClassMax = 12;
    spec.d = 16;
    spec.intraClassStd = 0.03;
    spec.seed = 31;
    const BlobData data = generate_blobs(spec);

    PipelineOptions options;
    options.k = 8;
    options.power = 2.0;
    options.mode = FeatureMode::Combined;
    const MlpClassifier model = always_same_model(pair_feature_dim(options.mode, spec.d));
    const PipelineResult result = cluster(data.features, model, options);

    result.assignment.validate();
    result.edges.validate(data.features.n);
    CHECK(result.summary.n == 96);
    CHECK(result.summary.k == 8);
    CHECK(result.summary.power == 2.0);
    CHECK(result.summary.mode == "combined");
    CHECK(result.summary.pairsProposed <= 96);
    CHECK(result.summary.pairsProposed == result.pairs.size());
    CHECK(result.summary.pairsAccepted == static_cast<std::int64_t>(result.edges.edges.size()));
    CHECK(result.summary.numClusters == result.assignment.numClusters);

    // accept-all on tight blobs: every class collapses to one cluster
    const PrfScore pw = pairwise_fscore(result.assignment, data.labels);
    CHECK(pw.f > 0.99);
    CHECK(result.summary.numClusters == 8);

    const std::set<std::string> expected{"normalize", "knn",      "density", "pairs",
                                         "context",   "classify", "components"};
    std::set<std::string> seen;
    for (const auto& t : result.summary.timings) {
        CHECK(t.seconds >= 0.0);
        seen.insert(t.stage);
    }
    CHECK(seen == expected);
    CHECK(result.summary.peakMemoryBytesEstimate > 0);
}

TEST_CASE("a rejecting model leaves every sample alone") {
    BlobSpec spec;
    spec.numClasses = 4;
    spec.samplesPerClassMin = 10;
    spec.samplesPerClassMax = 10;
    spec.d = 8;
    spec.seed = 32;
    const BlobData data = generate_blobs(spec);
    PipelineOptions options;
    options.k = 4;
    options.mode = FeatureMode::Original;
    const MlpClassifier model = never_same_model(pair_feature_dim(options.mode, spec.d));
    const PipelineResult result = cluster(data.features, model, options);
    CHECK(result.edges.edges.empty());
    CHECK(result.summary.pairsAccepted == 0);
    CHECK(result.summary.numClusters == 40);
    CHECK(result.summary.numSingletons == 40);
    CHECK(result.summary.pairsProposed > 0);  // pairs were still proposed
}

TEST_CASE("accepted edges are the canonical form of the accepted pairs") {
    BlobSpec spec;
    spec.numClasses = 5;
    spec.samplesPerClassMin = 8;
    spec.samplesPerClassMax = 8;
    spec.d = 8;
    spec.seed = 33;
    const BlobData data = generate_blobs(spec);
    PipelineOptions options;
    options.k = 6;
    options.mode = FeatureMode::WeightedNeighbor;
    const MlpClassifier model = always_same_model(pair_feature_dim(options.mode, spec.d));
    const PipelineResult result = cluster(data.features, model, options);
    // accept-all: every proposed pair lands in the edge list exactly once
    std::set<std::pair<std::int32_t, std::int32_t>> canonical;
    for (const auto& [x, y] : result.pairs.pairs) {
        canonical.emplace(std::min(x, y), std::max(x, y));
    }
    CHECK(result.edges.edges == std::vector<std::pair<std::int32_t, std::int32_t>>(
                                    canonical.begin(), canonical.end()));
    CHECK(std::is_sorted(result.edges.edges.begin(), result.edges.edges.end()));
}

TEST_CASE("pipeline output is identical across batch sizes and thread counts") {
    BlobSpec spec;
    spec.numClasses = 6;
    spec.samplesPerClassMin = 10;
    spec.samplesPerClassMax = 10;
    spec.d = 12;
    spec.intraClassStd = 0.08;
    spec.seed = 34;
    const BlobData data = generate_blobs(spec);
    PipelineOptions options;
    options.k = 8;
    options.power = 5.0;
    const MlpClassifier model = always_same_model(pair_feature_dim(options.mode, spec.d));

    const PipelineResult base = cluster(data.features, model, options);
    options.batchSize = 7;
    const PipelineResult oddBatch = cluster(data.features, model, options);
    options.batchSize = 2048;
    options.threads = 4;
    const PipelineResult threaded = cluster(data.features, model, options);

    CHECK(base.assignment.ids == oddBatch.assignment.ids);
    CHECK(base.assignment.ids == threaded.assignment.ids);
    CHECK(base.pairs.pairs == oddBatch.pairs.pairs);
    CHECK(base.edges.edges == threaded.edges.edges);
}

TEST_CASE("unnormalized input changes nothing when rows are already unit") {
    BlobSpec spec;
    spec.numClasses = 3;
    spec.samplesPerClassMin = 8;
    spec.samplesPerClassMax = 8;
    spec.d = 8;
    spec.seed = 35;
    const BlobData data = generate_blobs(spec);  // rows come out unit-norm
    PipelineOptions options;
    options.k = 4;
    const MlpClassifier model = always_same_model(pair_feature_dim(options.mode, spec.d));
    const PipelineResult normalized = cluster(data.features, model, options);
    options.normalizeInput = false;
    const PipelineResult raw = cluster(data.features, model, options);
    CHECK(normalized.assignment.ids == raw.assignment.ids);
    CHECK(normalized.pairs.pairs == raw.pairs.pairs);
}

TEST_CASE("model input dim must match the mode") {
    const FeatureMatrix f = oracle::random_features(30, 8, 36);
    PipelineOptions options;
    options.k = 4;
    options.mode = FeatureMode::Combined;  // wants 32 inputs
    const MlpClassifier model = always_same_model(16);
    try {
        cluster(f, model, options);
        FAIL("expected throw");
    } catch (const PcError& e) {
        CHECK(e.code() == ErrorCode::ModelMismatch);
    }
}

TEST_CASE("k out of range surfaces from the knn stage") {
    const FeatureMatrix f = oracle::random_features(10, 4, 37);
    PipelineOptions options;
    options.k = 10;
    const MlpClassifier model = always_same_model(pair_feature_dim(options.mode, 4));
    try {
        cluster(f, model, options);
        FAIL("expected throw");
    } catch (const PcError& e) {
        CHECK(e.code() == ErrorCode::KTooLarge);
    }
}
