#pragma once

#include <cstdint>
#include <string>
#include <utility>

#include "pairclust/classifier.hpp"
#include "pairclust/features.hpp"
#include "pairclust/metrics.hpp"
#include "pairclust/pipeline.hpp"
#include "pairclust/types.hpp"

namespace pairclust {

/// Binary formats, little-endian throughout:
///   PCFT  features    magic "PCFT", version u32, n u64, d u32, n*d float32
///   PCLB  labels      magic "PCLB", version u32, n u64, n int64
///   PCKN  knn graph   magic "PCKN", version u32, n u64, k u32, n*k int32
///                     neighbors then n*k float32 sims
///   PCLF  model       magic "PCLF", version u32, 4 layer dims u32,
///                     parameters float64 in layer order; JSON sidecar at
///                     <path>.json carries mode, d, k, flags, SGD config
/// Sizes are checked exactly. Bad magic, version, or size throws FormatError;
/// unreadable or unwritable files throw IoError.

void write_features(const std::string& path, const FeatureMatrix& features);
FeatureMatrix read_features(const std::string& path);

void write_labels(const std::string& path, const LabelVector& labels);
LabelVector read_labels(const std::string& path);

void write_knn(const std::string& path, const KnnGraph& graph);
KnnGraph read_knn(const std::string& path);

/// One `<index>\t<value>` line per sample, values printed with %.17g so equal
/// scores serialize to equal bytes.
void write_density_tsv(const std::string& path, const DensityScores& density);

/// Everything the cluster stage needs to reproduce the training-time feature
/// space.
struct ModelMetadata {
    FeatureMode mode = FeatureMode::Combined;
    std::int32_t d = 0;
    std::int32_t k = 0;
    bool renormContext = false;
    bool normalizeInput = true;
    SgdConfig sgd;
};

void write_model(const std::string& path, const MlpClassifier& model, const ModelMetadata& meta);

/// Reads checkpoint plus sidecar; throws ModelMismatch when the sidecar's
/// mode and d disagree with the checkpoint's input dim.
std::pair<MlpClassifier, ModelMetadata> read_model(const std::string& path);

/// One `<sample_index>\t<cluster_id>` line per sample, ascending index.
void write_assignment_tsv(const std::string& path, const ClusterAssignment& assignment);

/// Accepts arbitrary cluster id values; they are remapped to contiguous ids
/// in order of first appearance, which round-trips files written by
/// write_assignment_tsv unchanged.
ClusterAssignment read_assignment_tsv(const std::string& path);

void write_summary_json(const std::string& path, const PipelineSummary& summary);
void write_report_json(const std::string& path, const EvaluationReport& report);

/// Aligned plain-text rendering of an evaluation report.
std::string report_table(const EvaluationReport& report);

}  // namespace pairclust
