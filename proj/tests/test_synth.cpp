#include <doctest.h>

#include <cmath>
#include <cstring>
#include <map>
#include <set>

#include "pairclust/error.hpp"
#include "pairclust/knn.hpp"
#include "pairclust/metrics.hpp"
#include "pairclust/synth.hpp"

using namespace pairclust;

TEST_CASE("blob shape follows the spec fields") {
    BlobSpec spec;
    spec.numClasses = 6;
    spec.samplesPerClassMin = 10;
    spec.samplesPerClassMax = 10;
    spec.d = 16;
    spec.seed = 1;
    const BlobData data = generate_blobs(spec);
    CHECK(data.features.n == 60);
    CHECK(data.features.d == 16);
    CHECK(data.labels.size() == 60);
    CHECK(data.centroids.n == 6);
    CHECK(data.centroids.d == 16);
    CHECK(data.outliers.empty());

    // class-contiguous labels 0..5, ten each
    for (std::int32_t i = 0; i < 60; ++i) {
        CHECK(data.labels.labels[static_cast<std::size_t>(i)] == i / 10);
    }
}

TEST_CASE("variable class sizes stay inside the configured range") {
    BlobSpec spec;
    spec.numClasses = 8;
    spec.samplesPerClassMin = 5;
    spec.samplesPerClassMax = 12;
    spec.d = 8;
    spec.seed = 21;
    const BlobData data = generate_blobs(spec);
    CHECK(data.features.n >= 8 * 5);
    CHECK(data.features.n <= 8 * 12);
    std::map<std::int64_t, std::int32_t> sizes;
    for (std::int64_t label : data.labels.labels) ++sizes[label];
    CHECK(sizes.size() == 8);
    for (const auto& [label, count] : sizes) {
        CHECK(count >= 5);
        CHECK(count <= 12);
    }
}

TEST_CASE("rows and centroids are unit-norm, centroids well separated") {
    BlobSpec spec;
    spec.numClasses = 10;
    spec.samplesPerClassMin = 4;
    spec.samplesPerClassMax = 4;
    spec.d = 32;
    spec.seed = 3;
    const BlobData data = generate_blobs(spec);
    for (std::int32_t i = 0; i < data.features.n; ++i) {
        double norm = 0.0;
        for (float v : data.features.row(i)) norm += static_cast<double>(v) * v;
        CHECK(std::sqrt(norm) == doctest::Approx(1.0).epsilon(1e-4));
    }
    for (std::int32_t a = 0; a < data.centroids.n; ++a) {
        for (std::int32_t b = a + 1; b < data.centroids.n; ++b) {
            double dot = 0.0;
            for (std::int32_t c = 0; c < data.centroids.d; ++c) {
                dot += static_cast<double>(data.centroids.row(a)[static_cast<std::size_t>(c)]) *
                       data.centroids.row(b)[static_cast<std::size_t>(c)];
            }
            CHECK(dot < 0.5);
        }
    }
}

TEST_CASE("tight blobs sit close to their centroid") {
    BlobSpec spec;
    spec.numClasses = 5;
    spec.samplesPerClassMin = 20;
    spec.samplesPerClassMax = 20;
    spec.d = 64;
    spec.intraClassStd = 0.02;
    spec.seed = 4;
    const BlobData data = generate_blobs(spec);
    for (std::int32_t i = 0; i < data.features.n; ++i) {
        const auto label = static_cast<std::int32_t>(data.labels.labels[static_cast<std::size_t>(i)]);
        double dot = 0.0;
        for (std::int32_t c = 0; c < spec.d; ++c) {
            dot += static_cast<double>(data.features.row(i)[static_cast<std::size_t>(c)]) *
                   data.centroids.row(label)[static_cast<std::size_t>(c)];
        }
        CHECK(dot > 0.9);
    }
}

TEST_CASE("equal seeds are bit-identical, different seeds are not") {
    BlobSpec spec;
    spec.numClasses = 7;
    spec.samplesPerClassMin = 6;
    spec.samplesPerClassMax = 9;
    spec.d = 12;
    spec.outlierFraction = 0.1;
    spec.seed = 99;
    const BlobData a = generate_blobs(spec);
    const BlobData b = generate_blobs(spec);
    REQUIRE(a.features.n == b.features.n);
    CHECK(std::memcmp(a.features.data.data(), b.features.data.data(),
                      a.features.data.size() * sizeof(float)) == 0);
    CHECK(a.labels.labels == b.labels.labels);
    CHECK(a.outliers == b.outliers);

    spec.seed = 100;
    const BlobData c = generate_blobs(spec);
    const bool sameSize = c.features.n == a.features.n;
    CHECK((!sameSize || std::memcmp(a.features.data.data(), c.features.data.data(),
                                    a.features.data.size() * sizeof(float)) != 0));
}

TEST_CASE("outlier picks are distinct, ascending, and floor(n * fraction) many") {
    BlobSpec spec;
    spec.numClasses = 6;
    spec.samplesPerClassMin = 15;
    spec.samplesPerClassMax = 15;
    spec.d = 16;
    spec.outlierFraction = 0.1;
    spec.seed = 7;
    const BlobData data = generate_blobs(spec);
    CHECK(data.outliers.size() == 9);  // floor(90 * 0.1)
    std::set<std::int32_t> seen;
    std::int32_t previous = -1;
    for (std::int32_t idx : data.outliers) {
        CHECK(idx > previous);
        previous = idx;
        CHECK(idx >= 0);
        CHECK(idx < data.features.n);
        seen.insert(idx);
    }
    CHECK(seen.size() == data.outliers.size());
}

TEST_CASE("outliers drift further from their centroid than clean samples") {
    BlobSpec spec;
    spec.numClasses = 4;
    spec.samplesPerClassMin = 50;
    spec.samplesPerClassMax = 50;
    spec.d = 32;
    spec.intraClassStd = 0.05;
    spec.outlierFraction = 0.15;
    spec.seed = 11;
    const BlobData data = generate_blobs(spec);
    std::set<std::int32_t> outlierSet(data.outliers.begin(), data.outliers.end());
    double cleanSum = 0.0, outlierSum = 0.0;
    std::int64_t cleanCount = 0, outlierCount = 0;
    for (std::int32_t i = 0; i < data.features.n; ++i) {
        const auto label = static_cast<std::int32_t>(data.labels.labels[static_cast<std::size_t>(i)]);
        double dot = 0.0;
        for (std::int32_t c = 0; c < spec.d; ++c) {
            dot += static_cast<double>(data.features.row(i)[static_cast<std::size_t>(c)]) *
                   data.centroids.row(label)[static_cast<std::size_t>(c)];
        }
        if (outlierSet.count(i)) {
            outlierSum += dot;
            ++outlierCount;
        } else {
            cleanSum += dot;
            ++cleanCount;
        }
    }
    REQUIRE(outlierCount == 30);
    CHECK(outlierSum / static_cast<double>(outlierCount) < cleanSum / static_cast<double>(cleanCount));
}

TEST_CASE("a clean benchmark is recoverable by its own construction") {
    // Sanity gate on the generator: tight well-separated blobs must be
    // clusterable by a nearest-centroid readout.
    BlobSpec spec;
    spec.numClasses = 12;
    spec.samplesPerClassMin = 10;
    spec.samplesPerClassMax = 10;
    spec.d = 64;
    spec.intraClassStd = 0.05;
    spec.seed = 13;
    const BlobData data = generate_blobs(spec);
    ClusterAssignment nearest;
    for (std::int32_t i = 0; i < data.features.n; ++i) {
        std::int32_t best = 0;
        double bestDot = -2.0;
        for (std::int32_t m = 0; m < data.centroids.n; ++m) {
            double dot = 0.0;
            for (std::int32_t c = 0; c < spec.d; ++c) {
                dot += static_cast<double>(data.features.row(i)[static_cast<std::size_t>(c)]) *
                       data.centroids.row(m)[static_cast<std::size_t>(c)];
            }
            if (dot > bestDot) {
                bestDot = dot;
                best = m;
            }
        }
        nearest.ids.push_back(best);
    }
    nearest.numClusters = data.centroids.n;
    const PrfScore pw = pairwise_fscore(nearest, data.labels);
    CHECK(pw.f > 0.99);
}

TEST_CASE("invalid blob specs are rejected") {
    BlobSpec bad;
    bad.numClasses = 1;
    CHECK_THROWS_AS(bad.validate(), PcError);
    bad = BlobSpec{};
    bad.outlierFraction = 0.3;
    CHECK_THROWS_AS(bad.validate(), PcError);
    bad = BlobSpec{};
    bad.intraClassStd = 0.0;
    CHECK_THROWS_AS(bad.validate(), PcError);
    bad = BlobSpec{};
    bad.samplesPerClassMin = 8;
    bad.samplesPerClassMax = 7;
    CHECK_THROWS_AS(bad.validate(), PcError);
}

TEST_CASE("cramped spheres exhaust centroid sampling") {
    BlobSpec spec;
    spec.numClasses = 40;
    spec.samplesPerClassMin = 2;
    spec.samplesPerClassMax = 2;
    spec.d = 2;  // at most a handful of directions fit below dot 0.5
    spec.seed = 17;
    try {
        generate_blobs(spec);
        FAIL("expected throw");
    } catch (const PcError& e) {
        CHECK(e.code() == ErrorCode::CentroidSamplingFailed);
    }
}
