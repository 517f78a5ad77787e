#include "pairclust/io.hpp"

#include <json.hpp>

#include <array>
#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <vector>

#include "pairclust/error.hpp"

static_assert(std::endian::native == std::endian::little,
              "file formats are little-endian and this code writes native byte order");

namespace pairclust {
namespace {

using ordered_json = nlohmann::ordered_json;

class BinaryWriter {
  public:
    explicit BinaryWriter(const std::string& path) : out_(path, std::ios::binary), path_(path) {
        if (!out_) throw PcError(ErrorCode::IoError, "cannot open " + path + " for writing");
    }

    void bytes(const void* data, std::size_t count) {
        out_.write(static_cast<const char*>(data), static_cast<std::streamsize>(count));
    }

    template <typename T>
    void pod(const T& value) {
        bytes(&value, sizeof value);
    }

    template <typename T>
    void array(const std::vector<T>& values) {
        bytes(values.data(), values.size() * sizeof(T));
    }

    void finish() {
        out_.flush();
        if (!out_) throw PcError(ErrorCode::IoError, "write to " + path_ + " failed");
    }

  private:
    std::ofstream out_;
    std::string path_;
};

class BinaryReader {
  public:
    explicit BinaryReader(const std::string& path) : in_(path, std::ios::binary), path_(path) {
        if (!in_) throw PcError(ErrorCode::IoError, "cannot open " + path);
        in_.seekg(0, std::ios::end);
        size_ = static_cast<std::uint64_t>(in_.tellg());
        in_.seekg(0, std::ios::beg);
    }

    const std::string& path() const { return path_; }

    void bytes(void* data, std::size_t count) {
        in_.read(static_cast<char*>(data), static_cast<std::streamsize>(count));
        if (static_cast<std::size_t>(in_.gcount()) != count) {
            throw PcError(ErrorCode::FormatError, path_ + ": truncated read");
        }
    }

    template <typename T>
    T pod() {
        T value{};
        bytes(&value, sizeof value);
        return value;
    }

    template <typename T>
    void array(std::vector<T>& values) {
        bytes(values.data(), values.size() * sizeof(T));
    }

    void expect_magic(const char* magic, const char* what) {
        std::array<char, 4> found{};
        bytes(found.data(), found.size());
        if (std::memcmp(found.data(), magic, 4) != 0) {
            throw PcError(ErrorCode::FormatError,
                          path_ + ": not a " + what + " file (bad magic)");
        }
    }

    void expect_version(std::uint32_t expected) {
        const auto version = pod<std::uint32_t>();
        if (version != expected) {
            throw PcError(ErrorCode::FormatError, path_ + ": unsupported format version " +
                                                      std::to_string(version));
        }
    }

    void expect_size(std::uint64_t expected) {
        if (size_ != expected) {
            throw PcError(ErrorCode::FormatError, path_ + ": size " + std::to_string(size_) +
                                                      " bytes, expected " + std::to_string(expected));
        }
    }

  private:
    std::ifstream in_;
    std::string path_;
    std::uint64_t size_ = 0;
};

std::int32_t checked_count(std::uint64_t value, const std::string& path, const char* what) {
    if (value < 1 || value > static_cast<std::uint64_t>(std::numeric_limits<std::int32_t>::max())) {
        throw PcError(ErrorCode::FormatError,
                      path + ": " + what + " " + std::to_string(value) + " out of range");
    }
    return static_cast<std::int32_t>(value);
}

void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw PcError(ErrorCode::IoError, "cannot open " + path + " for writing");
    out << content;
    out.flush();
    if (!out) throw PcError(ErrorCode::IoError, "write to " + path + " failed");
}

ordered_json sgd_to_json(const SgdConfig& sgd) {
    return ordered_json{{"learningRate", sgd.learningRate},
                        {"momentum", sgd.momentum},
                        {"weightDecay", sgd.weightDecay},
                        {"batchSize", sgd.batchSize},
                        {"epochs", sgd.epochs},
                        {"seed", sgd.seed},
                        {"stepDecayEvery", sgd.stepDecayEvery},
                        {"stepDecayFactor", sgd.stepDecayFactor}};
}

SgdConfig sgd_from_json(const ordered_json& j) {
    SgdConfig sgd;
    sgd.learningRate = j.at("learningRate").get<double>();
    sgd.momentum = j.at("momentum").get<double>();
    sgd.weightDecay = j.at("weightDecay").get<double>();
    sgd.batchSize = j.at("batchSize").get<std::int32_t>();
    sgd.epochs = j.at("epochs").get<std::int32_t>();
    sgd.seed = j.at("seed").get<std::uint64_t>();
    sgd.stepDecayEvery = j.value("stepDecayEvery", sgd.stepDecayEvery);
    sgd.stepDecayFactor = j.value("stepDecayFactor", sgd.stepDecayFactor);
    return sgd;
}

}  // namespace

void write_features(const std::string& path, const FeatureMatrix& features) {
    features.validate();
    BinaryWriter out(path);
    out.bytes("PCFT", 4);
    out.pod<std::uint32_t>(1);
    out.pod<std::uint64_t>(static_cast<std::uint64_t>(features.n));
    out.pod<std::uint32_t>(static_cast<std::uint32_t>(features.d));
    out.array(features.data);
    out.finish();
}

FeatureMatrix read_features(const std::string& path) {
    BinaryReader in(path);
    in.expect_magic("PCFT", "feature");
    in.expect_version(1);
    const auto n64 = in.pod<std::uint64_t>();
    const auto d32 = in.pod<std::uint32_t>();
    const std::int32_t n = checked_count(n64, path, "sample count");
    const std::int32_t d = checked_count(d32, path, "dimension");
    in.expect_size(20 + 4ull * n64 * d32);
    FeatureMatrix features(n, d);
    in.array(features.data);
    features.validate();
    return features;
}

void write_labels(const std::string& path, const LabelVector& labels) {
    labels.validate();
    BinaryWriter out(path);
    out.bytes("PCLB", 4);
    out.pod<std::uint32_t>(1);
    out.pod<std::uint64_t>(static_cast<std::uint64_t>(labels.labels.size()));
    out.array(labels.labels);
    out.finish();
}

LabelVector read_labels(const std::string& path) {
    BinaryReader in(path);
    in.expect_magic("PCLB", "label");
    in.expect_version(1);
    const auto n64 = in.pod<std::uint64_t>();
    const std::int32_t n = checked_count(n64, path, "sample count");
    in.expect_size(16 + 8ull * n64);
    LabelVector labels;
    labels.labels.assign(static_cast<std::size_t>(n), 0);
    in.array(labels.labels);
    labels.validate();
    return labels;
}

void write_knn(const std::string& path, const KnnGraph& graph) {
    graph.validate();
    BinaryWriter out(path);
    out.bytes("PCKN", 4);
    out.pod<std::uint32_t>(1);
    out.pod<std::uint64_t>(static_cast<std::uint64_t>(graph.n));
    out.pod<std::uint32_t>(static_cast<std::uint32_t>(graph.k));
    out.array(graph.neighbors);
    out.array(graph.sims);
    out.finish();
}

KnnGraph read_knn(const std::string& path) {
    BinaryReader in(path);
    in.expect_magic("PCKN", "k-NN graph");
    in.expect_version(1);
    const auto n64 = in.pod<std::uint64_t>();
    const auto k32 = in.pod<std::uint32_t>();
    const std::int32_t n = checked_count(n64, path, "sample count");
    if (k32 > static_cast<std::uint32_t>(std::numeric_limits<std::int32_t>::max())) {
        throw PcError(ErrorCode::FormatError, path + ": k out of range");
    }
    in.expect_size(20 + 8ull * n64 * k32);
    KnnGraph graph(n, static_cast<std::int32_t>(k32));
    in.array(graph.neighbors);
    in.array(graph.sims);
    graph.validate();
    return graph;
}

void write_density_tsv(const std::string& path, const DensityScores& density) {
    std::string content;
    content.reserve(density.values.size() * 24);
    char line[64];
    for (std::size_t i = 0; i < density.values.size(); ++i) {
        std::snprintf(line, sizeof line, "%zu\t%.17g\n", i, density.values[i]);
        content += line;
    }
    write_text(path, content);
}

void write_model(const std::string& path, const MlpClassifier& model, const ModelMetadata& meta) {
    if (model.parameter_count() == 0) {
        throw PcError(ErrorCode::InvalidArgument, "refusing to write an uninitialized model");
    }
    if (model.input_dim() != pair_feature_dim(meta.mode, meta.d)) {
        throw PcError(ErrorCode::ModelMismatch,
                      "metadata says " + std::string(feature_mode_name(meta.mode)) + " at d=" +
                          std::to_string(meta.d) + ", model input dim is " +
                          std::to_string(model.input_dim()));
    }
    BinaryWriter out(path);
    out.bytes("PCLF", 4);
    out.pod<std::uint32_t>(1);
    for (std::int32_t dim : model.layer_dims()) out.pod<std::uint32_t>(static_cast<std::uint32_t>(dim));
    const auto params = model.parameters();
    out.bytes(params.data(), params.size() * sizeof(double));
    out.finish();

    ordered_json sidecar{{"mode", feature_mode_name(meta.mode)},
                         {"d", meta.d},
                         {"k", meta.k},
                         {"renormContext", meta.renormContext},
                         {"normalizeInput", meta.normalizeInput},
                         {"sgd", sgd_to_json(meta.sgd)}};
    write_text(path + ".json", sidecar.dump(2) + "\n");
}

std::pair<MlpClassifier, ModelMetadata> read_model(const std::string& path) {
    BinaryReader in(path);
    in.expect_magic("PCLF", "model");
    in.expect_version(1);
    std::array<std::int32_t, 4> dims{};
    for (auto& dim : dims) {
        const auto raw = in.pod<std::uint32_t>();
        if (raw < 1 || raw > static_cast<std::uint32_t>(std::numeric_limits<std::int32_t>::max())) {
            throw PcError(ErrorCode::FormatError, path + ": layer dim out of range");
        }
        dim = static_cast<std::int32_t>(raw);
    }
    if (dims[3] != 2) throw PcError(ErrorCode::FormatError, path + ": output layer must have 2 logits");
    MlpClassifier model(dims);
    in.expect_size(24 + 8ull * static_cast<std::uint64_t>(model.parameter_count()));
    auto params = model.parameters();
    in.bytes(params.data(), params.size() * sizeof(double));

    const std::string sidecarPath = path + ".json";
    std::ifstream sidecarStream(sidecarPath, std::ios::binary);
    if (!sidecarStream) {
        throw PcError(ErrorCode::FormatError, path + ": missing sidecar " + sidecarPath);
    }
    ModelMetadata meta;
    try {
        const auto j = ordered_json::parse(sidecarStream);
        meta.mode = parse_feature_mode(j.at("mode").get<std::string>());
        meta.d = j.at("d").get<std::int32_t>();
        meta.k = j.at("k").get<std::int32_t>();
        meta.renormContext = j.at("renormContext").get<bool>();
        meta.normalizeInput = j.at("normalizeInput").get<bool>();
        meta.sgd = sgd_from_json(j.at("sgd"));
    } catch (const ordered_json::exception& e) {
        throw PcError(ErrorCode::FormatError, sidecarPath + ": " + e.what());
    }
    if (meta.d < 1 || meta.k < 1) {
        throw PcError(ErrorCode::FormatError, sidecarPath + ": d and k must be positive");
    }
    if (pair_feature_dim(meta.mode, meta.d) != model.input_dim()) {
        throw PcError(ErrorCode::ModelMismatch,
                      "sidecar says " + std::string(feature_mode_name(meta.mode)) + " at d=" +
                          std::to_string(meta.d) + " (input dim " +
                          std::to_string(pair_feature_dim(meta.mode, meta.d)) +
                          "), checkpoint input dim is " + std::to_string(model.input_dim()));
    }
    return {std::move(model), meta};
}

void write_assignment_tsv(const std::string& path, const ClusterAssignment& assignment) {
    assignment.validate();
    std::string content;
    content.reserve(assignment.ids.size() * 12);
    char line[48];
    for (std::size_t i = 0; i < assignment.ids.size(); ++i) {
        std::snprintf(line, sizeof line, "%zu\t%d\n", i, assignment.ids[i]);
        content += line;
    }
    write_text(path, content);
}

ClusterAssignment read_assignment_tsv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw PcError(ErrorCode::IoError, "cannot open " + path);
    ClusterAssignment out;
    std::map<std::int64_t, std::int32_t> remap;
    std::string lineText;
    std::int64_t row = 0;
    while (std::getline(in, lineText)) {
        if (lineText.empty()) continue;
        std::int64_t index = 0;
        std::int64_t cluster = 0;
        char tail = '\0';
        if (std::sscanf(lineText.c_str(), "%ld\t%ld%c", &index, &cluster, &tail) != 2) {
            throw PcError(ErrorCode::FormatError, path + ": bad line '" + lineText + "'");
        }
        if (index != row) {
            throw PcError(ErrorCode::FormatError, path + ": expected sample index " +
                                                      std::to_string(row) + ", got " +
                                                      std::to_string(index));
        }
        auto [it, inserted] = remap.try_emplace(cluster, static_cast<std::int32_t>(remap.size()));
        out.ids.push_back(it->second);
        ++row;
    }
    out.numClusters = static_cast<std::int32_t>(remap.size());
    out.validate();
    return out;
}

void write_summary_json(const std::string& path, const PipelineSummary& summary) {
    ordered_json timings = ordered_json::array();
    for (const auto& timing : summary.timings) {
        timings.push_back(ordered_json{{"stage", timing.stage}, {"seconds", timing.seconds}});
    }
    const ordered_json j{{"n", summary.n},
                         {"k", summary.k},
                         {"power", summary.power},
                         {"mode", summary.mode},
                         {"numClusters", summary.numClusters},
                         {"numSingletons", summary.numSingletons},
                         {"pairsProposed", summary.pairsProposed},
                         {"pairsAccepted", summary.pairsAccepted},
                         {"peakMemoryBytesEstimate", summary.peakMemoryBytesEstimate},
                         {"timings", timings}};
    write_text(path, j.dump(2) + "\n");
}

void write_report_json(const std::string& path, const EvaluationReport& report) {
    const ordered_json j{
        {"pairwise",
         ordered_json{{"precision", report.pairwise.precision},
                      {"recall", report.pairwise.recall},
                      {"f", report.pairwise.f}}},
        {"bcubed",
         ordered_json{{"precision", report.bcubed.precision},
                      {"recall", report.bcubed.recall},
                      {"f", report.bcubed.f}}},
        {"numClusters", report.numClusters},
        {"numSingletons", report.numSingletons}};
    write_text(path, j.dump(2) + "\n");
}

std::string report_table(const EvaluationReport& report) {
    char line[128];
    std::string out;
    std::snprintf(line, sizeof line, "%-10s %10s %10s %10s\n", "", "precision", "recall", "f");
    out += line;
    std::snprintf(line, sizeof line, "%-10s %10.6f %10.6f %10.6f\n", "pairwise",
                  report.pairwise.precision, report.pairwise.recall, report.pairwise.f);
    out += line;
    std::snprintf(line, sizeof line, "%-10s %10.6f %10.6f %10.6f\n", "bcubed",
                  report.bcubed.precision, report.bcubed.recall, report.bcubed.f);
    out += line;
    std::snprintf(line, sizeof line, "%-10s %10d\n", "clusters", report.numClusters);
    out += line;
    std::snprintf(line, sizeof line, "%-10s %10d\n", "singletons", report.numSingletons);
    out += line;
    return out;
}

}  // namespace pairclust
