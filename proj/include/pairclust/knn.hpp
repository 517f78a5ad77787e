#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "pairclust/types.hpp"

namespace pairclust {

/// Exact k-nearest-neighbor graph under inner-product similarity.
///
/// Inner products are accumulated in float64 (products of float32 entries are
/// exact in float64) and stored as float32. Per row the k best candidates are
/// kept under the total order (similarity descending, index ascending), the
/// row itself excluded. Output is identical at any thread count.
///
/// Throws KTooLarge if k > n-1, InvalidArgument if k < 1.
KnnGraph build_knn(const FeatureMatrix& features, std::int32_t k, int threads = 1);

using KnnBackendFn =
    std::function<KnnGraph(const FeatureMatrix& features, std::int32_t k, int threads)>;

/// Registers a search backend. "exact" is built in; approximate backends may
/// return non-optimal neighbors but must still satisfy the KnnGraph
/// invariants.
void register_knn_backend(const std::string& name, KnnBackendFn fn);

std::vector<std::string> knn_backend_names();

/// Dispatches to a registered backend. Throws UnknownBackend for names that
/// were never registered.
KnnGraph knn_search(const FeatureMatrix& features, std::int32_t k, const std::string& backend,
                    int threads = 1);

}  // namespace pairclust
