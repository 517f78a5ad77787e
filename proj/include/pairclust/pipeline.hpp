#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "pairclust/classifier.hpp"
#include "pairclust/features.hpp"
#include "pairclust/types.hpp"

namespace pairclust {

/// Undirected "same class" edges, canonical (min, max) form.
struct EdgeList {
    std::vector<std::pair<std::int32_t, std::int32_t>> edges;

    /// Indices in [0, n), no self-edges (SameIndex), no duplicate pairs.
    void validate(std::int32_t n) const;
};

/// Breadth-first components over the undirected edge graph. Component ids are
/// assigned in order of each component's smallest member index, so the result
/// is invariant under edge permutation. Edgeless samples come back as
/// singletons.
ClusterAssignment connected_components(std::int32_t n, const EdgeList& edges);

struct PipelineOptions {
    std::int32_t k = 40;
    double power = 5.0;
    FeatureMode mode = FeatureMode::Combined;
    bool normalizeInput = true;
    bool renormContext = false;
    std::int32_t batchSize = 2048;
    int threads = 1;
};

struct StageTiming {
    std::string stage;
    double seconds = 0.0;
};

struct PipelineSummary {
    std::int32_t n = 0;
    std::int32_t k = 0;
    double power = 0.0;
    std::string mode;
    std::int32_t numClusters = 0;
    std::int32_t numSingletons = 0;
    std::int64_t pairsProposed = 0;
    std::int64_t pairsAccepted = 0;
    std::vector<StageTiming> timings;
    std::int64_t peakMemoryBytesEstimate = 0;
};

struct PipelineResult {
    ClusterAssignment assignment;
    PairSet pairs;
    EdgeList edges;
    PipelineSummary summary;
};

/// Full clustering pass: normalize (optional), exact k-NN, rank-weighted
/// density, pair selection, batched classification of the selected pairs,
/// BFS components over the accepted edges. The classifier runs on at most n
/// pairs.
///
/// Throws ModelMismatch when model.input_dim() != pair_feature_dim(mode, d);
/// stage errors propagate.
PipelineResult cluster(const FeatureMatrix& features, const MlpClassifier& model,
                       const PipelineOptions& options);

}  // namespace pairclust
