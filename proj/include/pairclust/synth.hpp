#pragma once

#include <cstdint>
#include <vector>

#include "pairclust/types.hpp"

namespace pairclust {

struct BlobSpec {
    std::int32_t numClasses = 50;
    std::int32_t samplesPerClassMin = 20;
    std::int32_t samplesPerClassMax = 20;  // inclusive; equal to min means fixed size
    std::int32_t d = 64;
    double intraClassStd = 0.05;
    double outlierFraction = 0.0;  // in [0, 0.2]; selected samples get 3x noise
    std::uint64_t seed = 0;

    /// numClasses >= 2, d >= 1, per-class range >= 1, intraClassStd > 0,
    /// outlierFraction in [0, 0.2].
    void validate() const;
};

struct BlobData {
    FeatureMatrix features;  // unit-norm rows, class-contiguous
    LabelVector labels;      // class index per sample
    FeatureMatrix centroids;
    std::vector<std::int32_t> outliers;  // ascending sample indices
};

/// Centroids drawn uniformly on the unit sphere, rejection-sampled until all
/// pairwise inner products stay below 0.5; samples are centroid plus
/// isotropic gaussian noise, L2-normalized. floor(n * outlierFraction)
/// seeded-selected samples get 3x noise. One seeded stream drawn in stage
/// order centroids, per-class counts, outlier picks, per-sample noise, so
/// equal seeds give bit-identical output.
///
/// Throws CentroidSamplingFailed after 1e5 rejected draws.
BlobData generate_blobs(const BlobSpec& spec);

}  // namespace pairclust
