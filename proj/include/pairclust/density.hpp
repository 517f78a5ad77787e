#pragma once

#include <cstdint>

#include "pairclust/types.hpp"

namespace pairclust {

/// Power-family rank weighting: rank j (1 = most similar) gets weight
/// (k - j)^p. With p = 0 every rank weighs 1 (0^0 = 1), recovering the
/// unweighted density; with p > 0 the last rank always weighs 0.
struct PowerWeighting {
    std::int32_t k = 0;
    double p = 0.0;

    double weight(std::int32_t rank) const;
};

/// values[i] = sum of sims[i][*]. mode = Original.
DensityScores original_density(const KnnGraph& graph);

/// values[i] = sum over ranks j of weight(j) * sims[i][j-1]. mode =
/// RankWeighted. With p = 0 the result is bit-identical to
/// original_density (same summation order, weights exactly 1.0).
///
/// Throws WeightingMismatch if weighting.k != graph.k.
DensityScores rank_weighted_density(const KnnGraph& graph, const PowerWeighting& weighting);

/// For each sample x, scans its neighbors in similarity-descending order and
/// emits (x, y) for the first y ranked above x under the total order
/// (density, -index): density[y] > density[x], or equal density and y < x.
/// Samples with no such neighbor emit nothing, so |pairs| <= n. Pairs are
/// sorted by x.
///
/// Throws LengthMismatch if density.values has length != graph.n.
PairSet find_pairs_via_density(const KnnGraph& graph, const DensityScores& density);

}  // namespace pairclust
