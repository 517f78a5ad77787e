#include "pairclust/knn.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <map>
#include <mutex>
#include <string>
#include <utility>

#include "pairclust/error.hpp"
#include "pairclust/threading.hpp"

namespace pairclust {
namespace {

struct Candidate {
    float sim;
    std::int32_t index;
};

// Ranking happens on the float32 similarity that ends up in the graph, so the
// stored rows satisfy the KnnGraph tie invariant by construction.
bool better(const Candidate& a, const Candidate& b) {
    if (a.sim != b.sim) return a.sim > b.sim;
    return a.index < b.index;
}

}  // namespace

KnnGraph build_knn(const FeatureMatrix& features, std::int32_t k, int threads) {
    features.validate();
    const std::int32_t n = features.n;
    if (k < 1) {
        throw PcError(ErrorCode::InvalidArgument, "k must be >= 1, got " + std::to_string(k));
    }
    if (k > n - 1) {
        throw PcError(ErrorCode::KTooLarge,
                      "k=" + std::to_string(k) + " exceeds n-1=" + std::to_string(n - 1));
    }

    using RowMajorF = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    Eigen::Map<const RowMajorF> raw(features.data.data(), n, features.d);
    const Eigen::MatrixXd feat = raw.cast<double>();

    KnnGraph graph(n, k);
    const int nthreads = resolve_threads(threads);

    parallel_chunks(0, n, nthreads, [&](std::int64_t lo, std::int64_t hi) {
        constexpr std::int64_t kQueryBlock = 64;
        Eigen::MatrixXd sims;
        std::vector<Candidate> heap;
        heap.reserve(static_cast<std::size_t>(k));
        for (std::int64_t blockLo = lo; blockLo < hi; blockLo += kQueryBlock) {
            const std::int64_t rows = std::min(hi, blockLo + kQueryBlock) - blockLo;
            // Column c of sims holds query blockLo+c against every candidate;
            // float32 products accumulate exactly in float64.
            sims.noalias() = feat * feat.middleRows(blockLo, rows).transpose();
            for (std::int64_t c = 0; c < rows; ++c) {
                const auto i = static_cast<std::int32_t>(blockLo + c);
                const double* col = sims.col(c).data();
                heap.clear();
                for (std::int32_t j = 0; j < n; ++j) {
                    if (j == i) continue;
                    const Candidate cand{static_cast<float>(col[j]), j};
                    if (std::cmp_less(heap.size(), k)) {
                        heap.push_back(cand);
                        std::push_heap(heap.begin(), heap.end(), better);
                    } else if (better(cand, heap.front())) {
                        std::pop_heap(heap.begin(), heap.end(), better);
                        heap.back() = cand;
                        std::push_heap(heap.begin(), heap.end(), better);
                    }
                }
                std::sort(heap.begin(), heap.end(), better);
                const std::size_t base = static_cast<std::size_t>(i) * static_cast<std::size_t>(k);
                for (std::int32_t r = 0; r < k; ++r) {
                    graph.neighbors[base + static_cast<std::size_t>(r)] = heap[static_cast<std::size_t>(r)].index;
                    graph.sims[base + static_cast<std::size_t>(r)] = heap[static_cast<std::size_t>(r)].sim;
                }
            }
        }
    });

    graph.validate();
    return graph;
}

namespace {

std::map<std::string, KnnBackendFn>& backend_registry() {
    static std::map<std::string, KnnBackendFn> registry{
        {"exact", [](const FeatureMatrix& f, std::int32_t k, int threads) {
             return build_knn(f, k, threads);
         }}};
    return registry;
}

std::mutex& backend_mutex() {
    static std::mutex m;
    return m;
}

}  // namespace

void register_knn_backend(const std::string& name, KnnBackendFn fn) {
    if (name.empty() || !fn) {
        throw PcError(ErrorCode::InvalidArgument, "backend needs a name and a callable");
    }
    std::lock_guard lock(backend_mutex());
    backend_registry()[name] = std::move(fn);
}

std::vector<std::string> knn_backend_names() {
    std::lock_guard lock(backend_mutex());
    std::vector<std::string> names;
    for (const auto& [name, fn] : backend_registry()) names.push_back(name);
    return names;
}

KnnGraph knn_search(const FeatureMatrix& features, std::int32_t k, const std::string& backend,
                    int threads) {
    KnnBackendFn fn;
    {
        std::lock_guard lock(backend_mutex());
        auto it = backend_registry().find(backend);
        if (it == backend_registry().end()) {
            throw PcError(ErrorCode::UnknownBackend, "no k-NN backend named '" + backend + "'");
        }
        fn = it->second;
    }
    KnnGraph graph = fn(features, k, threads);
    graph.validate();
    return graph;
}

}  // namespace pairclust
