#include "pairclust/features.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "pairclust/error.hpp"
#include "pairclust/threading.hpp"

namespace pairclust {
namespace {

void check_index(std::int32_t i, std::int32_t n) {
    if (i < 0 || i >= n) {
        throw PcError(ErrorCode::IndexOutOfRange,
                      "sample index " + std::to_string(i) + " outside [0, " + std::to_string(n) + ")");
    }
}

void accumulate_context(const FeatureMatrix& features, const KnnGraph& graph, std::int32_t i,
                        double* acc) {
    const std::int32_t d = features.d;
    const auto self = features.row(i);
    for (std::int32_t c = 0; c < d; ++c) acc[c] = static_cast<double>(self[static_cast<std::size_t>(c)]);
    const auto neighbors = graph.row_neighbors(i);
    const auto sims = graph.row_sims(i);
    for (std::int32_t j = 0; j < graph.k; ++j) {
        const double s = static_cast<double>(sims[static_cast<std::size_t>(j)]);
        const auto other = features.row(neighbors[static_cast<std::size_t>(j)]);
        for (std::int32_t c = 0; c < d; ++c) {
            acc[c] += s * static_cast<double>(other[static_cast<std::size_t>(c)]);
        }
    }
}

}  // namespace

const char* feature_mode_name(FeatureMode mode) {
    switch (mode) {
        case FeatureMode::Original: return "original";
        case FeatureMode::WeightedNeighbor: return "weighted-neighbor";
        case FeatureMode::Combined: return "combined";
    }
    return "unknown";
}

FeatureMode parse_feature_mode(const std::string& name) {
    if (name == "original") return FeatureMode::Original;
    if (name == "weighted-neighbor") return FeatureMode::WeightedNeighbor;
    if (name == "combined") return FeatureMode::Combined;
    throw PcError(ErrorCode::InvalidArgument, "unknown feature mode '" + name + "'");
}

std::int32_t pair_feature_dim(FeatureMode mode, std::int32_t d) {
    return (mode == FeatureMode::Combined ? 4 : 2) * d;
}

std::vector<double> weighted_neighbor_feature(const FeatureMatrix& features, const KnnGraph& graph,
                                              std::int32_t i) {
    features.validate();
    graph.validate();
    if (graph.n != features.n) {
        throw PcError(ErrorCode::LengthMismatch, "graph and features disagree on n");
    }
    check_index(i, features.n);
    std::vector<double> out(static_cast<std::size_t>(features.d), 0.0);
    accumulate_context(features, graph, i, out.data());
    return out;
}

FeatureMatrix weighted_neighbor_features(const FeatureMatrix& features, const KnnGraph& graph,
                                         bool renormalize, int threads) {
    features.validate();
    graph.validate();
    if (graph.n != features.n) {
        throw PcError(ErrorCode::LengthMismatch, "graph and features disagree on n");
    }
    const std::int32_t d = features.d;
    FeatureMatrix out(features.n, d);
    const int nthreads = resolve_threads(threads);
    parallel_chunks(0, features.n, nthreads, [&](std::int64_t lo, std::int64_t hi) {
        std::vector<double> acc(static_cast<std::size_t>(d), 0.0);
        for (std::int64_t i = lo; i < hi; ++i) {
            accumulate_context(features, graph, static_cast<std::int32_t>(i), acc.data());
            auto row = out.row(static_cast<std::int32_t>(i));
            for (std::int32_t c = 0; c < d; ++c) row[static_cast<std::size_t>(c)] = static_cast<float>(acc[static_cast<std::size_t>(c)]);
        }
    });
    if (renormalize) normalize_inplace(out);
    return out;
}

std::vector<double> pair_feature(const FeatureMatrix& features, const KnnGraph& graph,
                                 std::int32_t a, std::int32_t b, FeatureMode mode) {
    features.validate();
    check_index(a, features.n);
    check_index(b, features.n);
    if (a == b) {
        throw PcError(ErrorCode::SameIndex, "pair needs two distinct samples, got " + std::to_string(a));
    }
    const std::int32_t d = features.d;
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(pair_feature_dim(mode, d)));
    auto push_original = [&](std::int32_t i) {
        const auto row = features.row(i);
        for (float v : row) out.push_back(static_cast<double>(v));
    };
    auto push_context = [&](std::int32_t i) {
        const auto ctx = weighted_neighbor_feature(features, graph, i);
        out.insert(out.end(), ctx.begin(), ctx.end());
    };
    for (std::int32_t i : {a, b}) {
        if (mode != FeatureMode::WeightedNeighbor) push_original(i);
        if (mode != FeatureMode::Original) push_context(i);
    }
    return out;
}

PairFeatureAssembler::PairFeatureAssembler(const FeatureMatrix& features, const KnnGraph& graph,
                                           FeatureMode mode, bool renormContext, int threads)
    : features_(&features),
      mode_(mode),
      d_(features.d),
      dim_(pair_feature_dim(mode, features.d)) {
    features.validate();
    if (mode != FeatureMode::Original) {
        context_ = weighted_neighbor_features(features, graph, renormContext, threads);
    }
}

void PairFeatureAssembler::assemble(std::int32_t a, std::int32_t b, double* out) const {
    check_index(a, features_->n);
    check_index(b, features_->n);
    if (a == b) {
        throw PcError(ErrorCode::SameIndex, "pair needs two distinct samples, got " + std::to_string(a));
    }
    double* cursor = out;
    auto push = [&](const FeatureMatrix& source, std::int32_t i) {
        const auto row = source.row(i);
        for (float v : row) *cursor++ = static_cast<double>(v);
    };
    for (std::int32_t i : {a, b}) {
        if (mode_ != FeatureMode::WeightedNeighbor) push(*features_, i);
        if (mode_ != FeatureMode::Original) push(context_, i);
    }
}

std::vector<double> PairFeatureAssembler::assemble(std::int32_t a, std::int32_t b) const {
    std::vector<double> out(static_cast<std::size_t>(dim_), 0.0);
    assemble(a, b, out.data());
    return out;
}

}  // namespace pairclust
