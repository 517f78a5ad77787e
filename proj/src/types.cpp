#include "pairclust/types.hpp"

#include <cmath>
#include <unordered_set>

namespace pairclust {

void FeatureMatrix::validate() const {
    if (n < 1 || d < 1) {
        throw PcError(ErrorCode::InvalidArgument,
                      "feature matrix requires n >= 1 and d >= 1, got n=" + std::to_string(n) +
                          " d=" + std::to_string(d));
    }
    if (data.size() != static_cast<std::size_t>(n) * static_cast<std::size_t>(d)) {
        throw PcError(ErrorCode::LengthMismatch,
                      "feature buffer holds " + std::to_string(data.size()) + " floats, expected " +
                          std::to_string(static_cast<std::size_t>(n) * d));
    }
    for (std::size_t i = 0; i < data.size(); ++i) {
        if (!std::isfinite(data[i])) {
            throw PcError(ErrorCode::InvalidArgument,
                          "non-finite feature entry at flat index " + std::to_string(i));
        }
    }
}

void LabelVector::validate() const {
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] < 0) {
            throw PcError(ErrorCode::InvalidArgument,
                          "label at index " + std::to_string(i) + " is negative (" +
                              std::to_string(labels[i]) + "); class ids must be >= 0");
        }
    }
}

void KnnGraph::validate() const {
    if (n < 0 || k < 0) {
        throw PcError(ErrorCode::InvalidArgument, "knn graph with negative n or k");
    }
    if (k > 0 && k > n - 1) {
        throw PcError(ErrorCode::KTooLarge,
                      "k=" + std::to_string(k) + " exceeds n-1=" + std::to_string(n - 1));
    }
    if (neighbors.size() != static_cast<std::size_t>(n) * k || sims.size() != neighbors.size()) {
        throw PcError(ErrorCode::LengthMismatch, "knn graph buffers do not match n*k");
    }
    std::unordered_set<std::int32_t> seen;
    for (std::int32_t i = 0; i < n; ++i) {
        auto nbr = row_neighbors(i);
        auto s = row_sims(i);
        seen.clear();
        for (std::int32_t j = 0; j < k; ++j) {
            if (nbr[j] < 0 || nbr[j] >= n) {
                throw PcError(ErrorCode::IndexOutOfRange,
                              "neighbor index " + std::to_string(nbr[j]) + " out of range in row " +
                                  std::to_string(i));
            }
            if (nbr[j] == i) {
                throw PcError(ErrorCode::InvalidArgument,
                              "row " + std::to_string(i) + " lists itself as a neighbor");
            }
            if (!seen.insert(nbr[j]).second) {
                throw PcError(ErrorCode::InvalidArgument,
                              "duplicate neighbor " + std::to_string(nbr[j]) + " in row " +
                                  std::to_string(i));
            }
            if (j > 0) {
                if (s[j] > s[j - 1]) {
                    throw PcError(ErrorCode::InvalidArgument,
                                  "similarities increase at row " + std::to_string(i) + " rank " +
                                      std::to_string(j));
                }
                if (s[j] == s[j - 1] && nbr[j] < nbr[j - 1]) {
                    throw PcError(ErrorCode::InvalidArgument,
                                  "similarity tie out of index order at row " + std::to_string(i) +
                                      " rank " + std::to_string(j));
                }
            }
        }
    }
}

std::int32_t ClusterAssignment::numSingletons() const {
    std::vector<std::int32_t> counts(numClusters, 0);
    for (std::int32_t id : ids) {
        if (id >= 0 && id < numClusters) ++counts[id];
    }
    std::int32_t singletons = 0;
    for (std::int32_t c : counts) {
        if (c == 1) ++singletons;
    }
    return singletons;
}

void ClusterAssignment::validate() const {
    std::vector<bool> used(numClusters, false);
    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (ids[i] < 0 || ids[i] >= numClusters) {
            throw PcError(ErrorCode::IndexOutOfRange,
                          "cluster id " + std::to_string(ids[i]) + " at sample " +
                              std::to_string(i) + " outside [0, " + std::to_string(numClusters) +
                              ")");
        }
        used[ids[i]] = true;
    }
    for (std::int32_t c = 0; c < numClusters; ++c) {
        if (!used[c]) {
            throw PcError(ErrorCode::InvalidArgument,
                          "cluster id " + std::to_string(c) + " is unused; ids must be contiguous");
        }
    }
}

void normalize_inplace(FeatureMatrix& features) {
    features.validate();
    for (std::int32_t i = 0; i < features.n; ++i) {
        auto r = features.row(i);
        double sq = 0.0;
        for (float v : r) sq += static_cast<double>(v) * static_cast<double>(v);
        double norm = std::sqrt(sq);
        if (norm < 1e-12) {
            throw PcError(ErrorCode::ZeroNormRow,
                          "row " + std::to_string(i) + " has near-zero norm " + std::to_string(norm));
        }
        double inv = 1.0 / norm;
        for (float& v : r) v = static_cast<float>(v * inv);
    }
}

FeatureMatrix normalize(const FeatureMatrix& features) {
    FeatureMatrix out = features;
    normalize_inplace(out);
    return out;
}

}  // namespace pairclust
