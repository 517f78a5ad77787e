#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pairclust/types.hpp"

namespace pairclust {

/// What a pair feature is built from: the original embeddings, the
/// weighted-neighbor context vectors, or both concatenated.
enum class FeatureMode { Original, WeightedNeighbor, Combined };

const char* feature_mode_name(FeatureMode mode);

/// Accepts "original", "weighted-neighbor", "combined". Throws
/// InvalidArgument otherwise.
FeatureMode parse_feature_mode(const std::string& name);

/// Pair-feature length: 2d for the single-source modes, 4d for combined.
std::int32_t pair_feature_dim(FeatureMode mode, std::int32_t d);

/// Context vector f_i' = f_i + sum over neighbors j of sims[i][j] * f_j (the
/// self term carries weight 1). Not renormalized. Accumulated in float64.
///
/// Throws IndexOutOfRange for bad i.
std::vector<double> weighted_neighbor_feature(const FeatureMatrix& features, const KnnGraph& graph,
                                              std::int32_t i);

/// All n context vectors, accumulated in float64 and stored as float32.
/// With renormalize, each row is L2-normalized afterwards.
FeatureMatrix weighted_neighbor_features(const FeatureMatrix& features, const KnnGraph& graph,
                                         bool renormalize = false, int threads = 1);

/// One pair feature, context vectors computed on the fly in float64:
/// original -> concat(f_a, f_b); weighted-neighbor -> concat(f_a', f_b');
/// combined -> concat(f_a, f_a', f_b, f_b').
///
/// Throws SameIndex if a == b, IndexOutOfRange for bad indices.
std::vector<double> pair_feature(const FeatureMatrix& features, const KnnGraph& graph,
                                 std::int32_t a, std::int32_t b, FeatureMode mode);

/// Batch pair-feature assembly over a cached context matrix. Swapping a and b
/// swaps the two halves of the output exactly.
class PairFeatureAssembler {
  public:
    PairFeatureAssembler(const FeatureMatrix& features, const KnnGraph& graph, FeatureMode mode,
                         bool renormContext = false, int threads = 1);

    FeatureMode mode() const { return mode_; }
    std::int32_t dim() const { return dim_; }

    /// Writes dim() values (float32 sources widened to float64).
    void assemble(std::int32_t a, std::int32_t b, double* out) const;
    std::vector<double> assemble(std::int32_t a, std::int32_t b) const;

  private:
    const FeatureMatrix* features_;
    FeatureMatrix context_;  // empty in Original mode
    FeatureMode mode_;
    std::int32_t d_;
    std::int32_t dim_;
};

}  // namespace pairclust
