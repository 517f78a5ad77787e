#include "pairclust/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <queue>
#include <set>

#include "pairclust/density.hpp"
#include "pairclust/error.hpp"
#include "pairclust/knn.hpp"
#include "pairclust/threading.hpp"

namespace pairclust {
namespace {

class StageClock {
  public:
    explicit StageClock(std::vector<StageTiming>& sink) : sink_(&sink) {}

    template <typename Fn>
    auto time(const std::string& stage, Fn&& fn) {
        const auto start = std::chrono::steady_clock::now();
        if constexpr (std::is_void_v<decltype(fn())>) {
            fn();
            record(stage, start);
        } else {
            auto result = fn();
            record(stage, start);
            return result;
        }
    }

  private:
    void record(const std::string& stage, std::chrono::steady_clock::time_point start) {
        const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
        sink_->push_back({stage, elapsed.count()});
    }

    std::vector<StageTiming>* sink_;
};

}  // namespace

void EdgeList::validate(std::int32_t n) const {
    std::set<std::pair<std::int32_t, std::int32_t>> seen;
    for (const auto& [a, b] : edges) {
        if (a < 0 || a >= n || b < 0 || b >= n) {
            throw PcError(ErrorCode::IndexOutOfRange, "edge endpoint outside [0, " + std::to_string(n) + ")");
        }
        if (a == b) throw PcError(ErrorCode::SameIndex, "self edge at " + std::to_string(a));
        if (!seen.emplace(std::min(a, b), std::max(a, b)).second) {
            throw PcError(ErrorCode::InvalidArgument, "duplicate edge " + std::to_string(a) + "-" + std::to_string(b));
        }
    }
}

ClusterAssignment connected_components(std::int32_t n, const EdgeList& edges) {
    if (n < 0) throw PcError(ErrorCode::InvalidArgument, "negative sample count");
    edges.validate(n);

    std::vector<std::int32_t> degree(static_cast<std::size_t>(n), 0);
    for (const auto& [a, b] : edges.edges) {
        ++degree[static_cast<std::size_t>(a)];
        ++degree[static_cast<std::size_t>(b)];
    }
    std::vector<std::int64_t> start(static_cast<std::size_t>(n) + 1, 0);
    for (std::int32_t i = 0; i < n; ++i) start[static_cast<std::size_t>(i) + 1] = start[static_cast<std::size_t>(i)] + degree[static_cast<std::size_t>(i)];
    std::vector<std::int32_t> adjacency(static_cast<std::size_t>(start[static_cast<std::size_t>(n)]), 0);
    std::vector<std::int64_t> cursor(start.begin(), start.end() - 1);
    for (const auto& [a, b] : edges.edges) {
        adjacency[static_cast<std::size_t>(cursor[static_cast<std::size_t>(a)]++)] = b;
        adjacency[static_cast<std::size_t>(cursor[static_cast<std::size_t>(b)]++)] = a;
    }

    ClusterAssignment out;
    out.ids.assign(static_cast<std::size_t>(n), -1);
    std::int32_t next = 0;
    std::queue<std::int32_t> frontier;
    for (std::int32_t i = 0; i < n; ++i) {
        if (out.ids[static_cast<std::size_t>(i)] != -1) continue;
        const std::int32_t id = next++;
        out.ids[static_cast<std::size_t>(i)] = id;
        frontier.push(i);
        while (!frontier.empty()) {
            const std::int32_t u = frontier.front();
            frontier.pop();
            for (std::int64_t e = start[static_cast<std::size_t>(u)]; e < start[static_cast<std::size_t>(u) + 1]; ++e) {
                const std::int32_t v = adjacency[static_cast<std::size_t>(e)];
                if (out.ids[static_cast<std::size_t>(v)] == -1) {
                    out.ids[static_cast<std::size_t>(v)] = id;
                    frontier.push(v);
                }
            }
        }
    }
    out.numClusters = next;
    out.validate();
    return out;
}

PipelineResult cluster(const FeatureMatrix& features, const MlpClassifier& model,
                       const PipelineOptions& options) {
    features.validate();
    if (options.k < 1 || options.k > features.n - 1) {
        throw PcError(ErrorCode::KTooLarge, "k=" + std::to_string(options.k) +
                                                " outside [1, " + std::to_string(features.n - 1) + "]");
    }
    if (options.batchSize < 1) throw PcError(ErrorCode::InvalidArgument, "batch size must be >= 1");
    const std::int32_t inputDim = pair_feature_dim(options.mode, features.d);
    if (model.input_dim() != inputDim) {
        throw PcError(ErrorCode::ModelMismatch,
                      "model expects input dim " + std::to_string(model.input_dim()) + ", " +
                          feature_mode_name(options.mode) + " pairs at d=" + std::to_string(features.d) +
                          " have " + std::to_string(inputDim));
    }
    const int threads = resolve_threads(options.threads);

    PipelineResult result;
    PipelineSummary& summary = result.summary;
    summary.n = features.n;
    summary.k = options.k;
    summary.power = options.power;
    summary.mode = feature_mode_name(options.mode);
    StageClock clock(summary.timings);

    const FeatureMatrix* working = &features;
    FeatureMatrix normalized;
    if (options.normalizeInput) {
        clock.time("normalize", [&] { normalized = normalize(features); });
        working = &normalized;
    }

    const KnnGraph graph = clock.time("knn", [&] { return build_knn(*working, options.k, threads); });
    const DensityScores density = clock.time("density", [&] {
        return rank_weighted_density(graph, PowerWeighting{options.k, options.power});
    });
    result.pairs = clock.time("pairs", [&] { return find_pairs_via_density(graph, density); });
    summary.pairsProposed = result.pairs.size();

    const PairFeatureAssembler assembler = clock.time("context", [&] {
        return PairFeatureAssembler(*working, graph, options.mode, options.renormContext, threads);
    });

    clock.time("classify", [&] {
        const auto total = static_cast<std::int64_t>(result.pairs.pairs.size());
        const std::int64_t batch = std::min<std::int64_t>(options.batchSize, std::max<std::int64_t>(total, 1));
        std::vector<double> rows(static_cast<std::size_t>(batch) * static_cast<std::size_t>(inputDim), 0.0);
        for (std::int64_t lo = 0; lo < total; lo += batch) {
            const std::int64_t count = std::min(batch, total - lo);
            for (std::int64_t r = 0; r < count; ++r) {
                const auto& [x, y] = result.pairs.pairs[static_cast<std::size_t>(lo + r)];
                assembler.assemble(x, y, rows.data() + r * inputDim);
            }
            const auto predictions = model.predict(rows.data(), count);
            for (std::int64_t r = 0; r < count; ++r) {
                if (!predictions[static_cast<std::size_t>(r)].same) continue;
                const auto& [x, y] = result.pairs.pairs[static_cast<std::size_t>(lo + r)];
                result.edges.edges.emplace_back(std::min(x, y), std::max(x, y));
            }
        }
        std::sort(result.edges.edges.begin(), result.edges.edges.end());
        result.edges.edges.erase(std::unique(result.edges.edges.begin(), result.edges.edges.end()),
                                 result.edges.edges.end());
    });
    summary.pairsAccepted = static_cast<std::int64_t>(result.edges.edges.size());

    result.assignment = clock.time("components", [&] {
        return connected_components(features.n, result.edges);
    });
    summary.numClusters = result.assignment.numClusters;
    summary.numSingletons = result.assignment.numSingletons();

    const auto n64 = static_cast<std::int64_t>(features.n);
    const auto d64 = static_cast<std::int64_t>(features.d);
    std::int64_t bytes = n64 * d64 * 4;                                   // input
    if (options.normalizeInput) bytes += n64 * d64 * 4;                   // normalized copy
    bytes += n64 * d64 * 8;                                               // float64 matrix in knn
    bytes += n64 * static_cast<std::int64_t>(options.k) * 8;              // graph
    if (options.mode != FeatureMode::Original) bytes += n64 * d64 * 4;    // context cache
    bytes += static_cast<std::int64_t>(options.batchSize) * inputDim * 8; // inference batch
    bytes += model.parameter_count() * 8;
    bytes += n64 * 8;  // density + ids
    summary.peakMemoryBytesEstimate = bytes;

    return result;
}

}  // namespace pairclust
