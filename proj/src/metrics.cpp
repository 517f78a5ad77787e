#include "pairclust/metrics.hpp"

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "pairclust/error.hpp"

namespace pairclust {
namespace {

using PairCount = unsigned __int128;

PairCount pairs2(std::int64_t m) {
    const auto u = static_cast<PairCount>(m);
    return u * (u - 1) / 2;
}

double ratio(PairCount num, PairCount den) {
    if (den == 0) return 0.0;
    return static_cast<double>(num) / static_cast<double>(den);
}

double harmonic(double p, double r) {
    if (p + r == 0.0) return 0.0;
    return 2.0 * p * r / (p + r);
}

struct Contingency {
    std::vector<std::int64_t> clusterSizes;
    std::map<std::int64_t, std::int64_t> classSizes;
    std::map<std::pair<std::int32_t, std::int64_t>, std::int64_t> cells;
    std::int32_t n = 0;
};

Contingency build_contingency(const ClusterAssignment& predicted, const LabelVector& truth) {
    predicted.validate();
    truth.validate();
    if (predicted.size() != truth.size()) {
        throw PcError(ErrorCode::LengthMismatch,
                      "assignment has " + std::to_string(predicted.size()) + " samples, labels " +
                          std::to_string(truth.size()));
    }
    Contingency c;
    c.n = predicted.size();
    c.clusterSizes.assign(static_cast<std::size_t>(predicted.numClusters), 0);
    for (std::int32_t i = 0; i < c.n; ++i) {
        const std::int32_t cluster = predicted.ids[static_cast<std::size_t>(i)];
        const std::int64_t label = truth.labels[static_cast<std::size_t>(i)];
        ++c.clusterSizes[static_cast<std::size_t>(cluster)];
        ++c.classSizes[label];
        ++c.cells[{cluster, label}];
    }
    return c;
}

}  // namespace

PrfScore pairwise_fscore(const ClusterAssignment& predicted, const LabelVector& truth) {
    const Contingency c = build_contingency(predicted, truth);
    if (c.n == 0) return {};
    PairCount tp = 0;
    for (const auto& [cell, count] : c.cells) tp += pairs2(count);
    PairCount predictedPairs = 0;
    for (std::int64_t size : c.clusterSizes) predictedPairs += pairs2(size);
    PairCount truthPairs = 0;
    for (const auto& [label, size] : c.classSizes) truthPairs += pairs2(size);

    PrfScore out;
    out.precision = ratio(tp, predictedPairs);
    out.recall = ratio(tp, truthPairs);
    out.f = harmonic(out.precision, out.recall);
    return out;
}

PrfScore bcubed_fscore(const ClusterAssignment& predicted, const LabelVector& truth) {
    const Contingency c = build_contingency(predicted, truth);
    if (c.n == 0) return {};
    double precisionSum = 0.0;
    double recallSum = 0.0;
    for (const auto& [cell, count] : c.cells) {
        const auto sq = static_cast<double>(count) * static_cast<double>(count);
        precisionSum += sq / static_cast<double>(c.clusterSizes[static_cast<std::size_t>(cell.first)]);
        recallSum += sq / static_cast<double>(c.classSizes.at(cell.second));
    }
    PrfScore out;
    out.precision = precisionSum / static_cast<double>(c.n);
    out.recall = recallSum / static_cast<double>(c.n);
    out.f = harmonic(out.precision, out.recall);
    return out;
}

EvaluationReport evaluate(const ClusterAssignment& predicted, const LabelVector& truth) {
    EvaluationReport report;
    report.pairwise = pairwise_fscore(predicted, truth);
    report.bcubed = bcubed_fscore(predicted, truth);
    report.numClusters = predicted.numClusters;
    report.numSingletons = predicted.numSingletons();
    return report;
}

}  // namespace pairclust
