#include "pairclust/density.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "pairclust/error.hpp"

namespace pairclust {

double PowerWeighting::weight(std::int32_t rank) const {
    return std::pow(static_cast<double>(k - rank), p);
}

DensityScores original_density(const KnnGraph& graph) {
    graph.validate();
    DensityScores out;
    out.mode = DensityMode::Original;
    out.power = 0.0;
    out.values.assign(static_cast<std::size_t>(graph.n), 0.0);
    for (std::int32_t i = 0; i < graph.n; ++i) {
        const auto sims = graph.row_sims(i);
        double acc = 0.0;
        for (float s : sims) acc += static_cast<double>(s);
        out.values[static_cast<std::size_t>(i)] = acc;
    }
    return out;
}

DensityScores rank_weighted_density(const KnnGraph& graph, const PowerWeighting& weighting) {
    graph.validate();
    if (weighting.k != graph.k) {
        throw PcError(ErrorCode::WeightingMismatch,
                      "weighting k=" + std::to_string(weighting.k) + " vs graph k=" +
                          std::to_string(graph.k));
    }
    if (weighting.p < 0.0 || !std::isfinite(weighting.p)) {
        throw PcError(ErrorCode::InvalidArgument, "power must be finite and >= 0");
    }

    std::vector<double> weights(static_cast<std::size_t>(graph.k), 0.0);
    for (std::int32_t rank = 1; rank <= graph.k; ++rank) {
        weights[static_cast<std::size_t>(rank - 1)] = weighting.weight(rank);
    }

    DensityScores out;
    out.mode = DensityMode::RankWeighted;
    out.power = weighting.p;
    out.values.assign(static_cast<std::size_t>(graph.n), 0.0);
    for (std::int32_t i = 0; i < graph.n; ++i) {
        const auto sims = graph.row_sims(i);
        double acc = 0.0;
        for (std::int32_t j = 0; j < graph.k; ++j) {
            acc += weights[static_cast<std::size_t>(j)] * static_cast<double>(sims[static_cast<std::size_t>(j)]);
        }
        out.values[static_cast<std::size_t>(i)] = acc;
    }
    return out;
}

PairSet find_pairs_via_density(const KnnGraph& graph, const DensityScores& density) {
    graph.validate();
    if (std::cmp_not_equal(density.values.size(), graph.n)) {
        throw PcError(ErrorCode::LengthMismatch,
                      "density length " + std::to_string(density.values.size()) + " vs n=" +
                          std::to_string(graph.n));
    }
    const auto& d = density.values;
    PairSet out;
    for (std::int32_t x = 0; x < graph.n; ++x) {
        const auto neighbors = graph.row_neighbors(x);
        const double dx = d[static_cast<std::size_t>(x)];
        for (std::int32_t y : neighbors) {
            const double dy = d[static_cast<std::size_t>(y)];
            if (dy > dx || (dy == dx && y < x)) {
                out.pairs.emplace_back(x, y);
                break;
            }
        }
    }
    return out;
}

}  // namespace pairclust
