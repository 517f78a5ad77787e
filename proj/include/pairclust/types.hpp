#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "pairclust/error.hpp"

namespace pairclust {

/// Dense row-major embedding store. Rows are float32; similarity between two
/// rows is their inner product, so rows are expected to be unit-norm (see
/// normalize()). All entries must be finite.
struct FeatureMatrix {
    std::int32_t n = 0;
    std::int32_t d = 0;
    std::vector<float> data;  // n*d, row-major

    FeatureMatrix() = default;
    FeatureMatrix(std::int32_t n_, std::int32_t d_)
        : n(n_), d(d_), data(static_cast<std::size_t>(n_) * static_cast<std::size_t>(d_), 0.0f) {}

    std::span<const float> row(std::int32_t i) const {
        return {data.data() + static_cast<std::size_t>(i) * d, static_cast<std::size_t>(d)};
    }
    std::span<float> row(std::int32_t i) {
        return {data.data() + static_cast<std::size_t>(i) * d, static_cast<std::size_t>(d)};
    }

    /// Checks n/d positivity, buffer size and entry finiteness.
    void validate() const;
};

/// Ground-truth class ids. Non-negative, not necessarily contiguous.
struct LabelVector {
    std::vector<std::int64_t> labels;

    std::int32_t size() const { return static_cast<std::int32_t>(labels.size()); }
    void validate() const;
};

/// Top-k neighbor lists under inner-product similarity. Per row: neighbors
/// sorted by descending similarity, similarity ties by ascending index, the
/// row's own index excluded.
struct KnnGraph {
    std::int32_t n = 0;
    std::int32_t k = 0;
    std::vector<std::int32_t> neighbors;  // n*k
    std::vector<float> sims;              // n*k

    KnnGraph() = default;
    KnnGraph(std::int32_t n_, std::int32_t k_)
        : n(n_),
          k(k_),
          neighbors(static_cast<std::size_t>(n_) * static_cast<std::size_t>(k_), 0),
          sims(static_cast<std::size_t>(n_) * static_cast<std::size_t>(k_), 0.0f) {}

    std::span<const std::int32_t> row_neighbors(std::int32_t i) const {
        return {neighbors.data() + static_cast<std::size_t>(i) * k, static_cast<std::size_t>(k)};
    }
    std::span<const float> row_sims(std::int32_t i) const {
        return {sims.data() + static_cast<std::size_t>(i) * k, static_cast<std::size_t>(k)};
    }

    /// Enforces the structural invariants: k <= n-1, indices in range and
    /// distinct per row, no self loops, sims non-increasing with ties ordered
    /// by ascending neighbor index.
    void validate() const;
};

enum class DensityMode { Original, RankWeighted };

/// Per-sample density. values are accumulated in float64 regardless of the
/// float32 similarity storage.
struct DensityScores {
    DensityMode mode = DensityMode::Original;
    double power = 0.0;  // meaningful when mode == RankWeighted
    std::vector<double> values;

    std::int32_t size() const { return static_cast<std::int32_t>(values.size()); }
};

/// Directed candidate pairs (sample, higher-density neighbor) awaiting
/// classification. At most one pair per sample, canonically sorted by sample.
struct PairSet {
    std::vector<std::pair<std::int32_t, std::int32_t>> pairs;

    std::int64_t size() const { return static_cast<std::int64_t>(pairs.size()); }
};

/// A full partition of [0, n) into clusters with contiguous ids from 0.
struct ClusterAssignment {
    std::vector<std::int32_t> ids;
    std::int32_t numClusters = 0;

    std::int32_t size() const { return static_cast<std::int32_t>(ids.size()); }
    std::int32_t numSingletons() const;
    void validate() const;
};

/// Scales every row to unit L2 norm. Norms are computed in float64; the
/// operation is idempotent up to float32 rounding.
/// Throws ZeroNormRow if a row's norm is below 1e-12.
FeatureMatrix normalize(const FeatureMatrix& features);

/// In-place variant of normalize().
void normalize_inplace(FeatureMatrix& features);

}  // namespace pairclust
