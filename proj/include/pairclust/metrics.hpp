#pragma once

#include <cstdint>

#include "pairclust/types.hpp"

namespace pairclust {

struct PrfScore {
    double precision = 0.0;
    double recall = 0.0;
    double f = 0.0;  // harmonic mean, 0 when precision + recall == 0
};

struct EvaluationReport {
    PrfScore pairwise;
    PrfScore bcubed;
    std::int32_t numClusters = 0;
    std::int32_t numSingletons = 0;
};

/// Pairwise F-score over unordered sample pairs: TP = pairs co-clustered and
/// co-labeled. Built from cluster-by-class contingency counts in
/// O(n + #cells); pair counts held in 128-bit integers.
///
/// Throws LengthMismatch when lengths differ.
PrfScore pairwise_fscore(const ClusterAssignment& predicted, const LabelVector& truth);

/// BCubed F-score: per-sample precision |C(x) intersect L(x)| / |C(x)| and
/// recall |C(x) intersect L(x)| / |L(x)|, averaged over samples.
PrfScore bcubed_fscore(const ClusterAssignment& predicted, const LabelVector& truth);

/// Both scores plus cluster-shape counts from the assignment.
EvaluationReport evaluate(const ClusterAssignment& predicted, const LabelVector& truth);

}  // namespace pairclust
