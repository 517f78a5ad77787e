#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <string>

#include "pairclust/classifier.hpp"
#include "pairclust/density.hpp"
#include "pairclust/error.hpp"
#include "pairclust/io.hpp"
#include "pairclust/knn.hpp"
#include "pairclust/metrics.hpp"
#include "pairclust/pipeline.hpp"
#include "pairclust/synth.hpp"
#include "pairclust/threading.hpp"

namespace {

using namespace pairclust;

// Per-dataset-scale defaults; explicit --k / --power always win.
struct Profile {
    std::int32_t k;
    double power;
};

Profile profile_named(const std::string& name) {
    if (name == "large-dense") return {80, 5.0};
    if (name == "medium") return {40, 5.0};
    if (name == "small-sparse") return {5, 1.0};
    throw CLI::ValidationError("--profile must be large-dense, medium or small-sparse");
}

struct KPowerOpts {
    std::string profile;
    std::int32_t k = 0;
    double power = 5.0;
    CLI::Option* kOpt = nullptr;
    CLI::Option* powerOpt = nullptr;
    CLI::Option* profileOpt = nullptr;

    void add_to(CLI::App* sub, bool withPower) {
        kOpt = sub->add_option("--k", k, "Neighbors per sample");
        if (withPower) {
            powerOpt = sub->add_option("--power", power, "Rank-weighting exponent")
                           ->capture_default_str();
        }
        profileOpt = sub->add_option("--profile", profile,
                                     "Scale preset: large-dense (k=80, power=5), medium (k=40, "
                                     "power=5), small-sparse (k=5, power=1)");
    }

    // fallbackK < 0 means "k is mandatory here".
    std::int32_t resolve_k(std::int32_t fallbackK = -1) const {
        if (kOpt->count() > 0) return k;
        if (profileOpt->count() > 0) return profile_named(profile).k;
        if (fallbackK >= 0) return fallbackK;
        throw CLI::ValidationError("pass --k or --profile");
    }

    double resolve_power() const {
        if (powerOpt != nullptr && powerOpt->count() > 0) return power;
        if (profileOpt->count() > 0) return profile_named(profile).power;
        return power;
    }
};

FeatureMatrix load_features(const std::string& path, bool noNormalize) {
    FeatureMatrix features = read_features(path);
    if (!noNormalize) normalize_inplace(features);
    return features;
}

void run_gen(const BlobSpec& spec, const std::string& outFeatures, const std::string& outLabels) {
    const BlobData data = generate_blobs(spec);
    write_features(outFeatures, data.features);
    write_labels(outLabels, data.labels);
    std::printf("n=%d d=%d classes=%d outliers=%zu\n", data.features.n, data.features.d,
                spec.numClasses, data.outliers.size());
}

void run_knn(const std::string& featuresPath, std::int32_t k, int threads, bool noNormalize,
             const std::string& outPath) {
    const FeatureMatrix features = load_features(featuresPath, noNormalize);
    const KnnGraph graph = build_knn(features, k, threads);
    write_knn(outPath, graph);
    std::printf("n=%d k=%d\n", graph.n, graph.k);
}

void run_density(const std::string& featuresPath, std::int32_t k, double power, int threads,
                 bool noNormalize, const std::string& outPath) {
    const FeatureMatrix features = load_features(featuresPath, noNormalize);
    const KnnGraph graph = build_knn(features, k, threads);
    const DensityScores density = rank_weighted_density(graph, PowerWeighting{k, power});
    write_density_tsv(outPath, density);
    std::printf("n=%d k=%d power=%.17g\n", graph.n, k, power);
}

struct TrainOpts {
    std::string featuresPath;
    std::string labelsPath;
    std::string modeName = "combined";
    std::string outModel;
    SgdConfig sgd;
    double balanceTolerance = 0.2;
    std::int32_t positiveCap = 200;
    std::int32_t hidden1 = 0;  // 0 = derive from input dim
    std::int32_t hidden2 = 0;
    bool renormContext = false;
    bool noNormalize = false;
    int threads = 1;
};

void run_train(const TrainOpts& opts, std::int32_t k) {
    const FeatureMatrix features = load_features(opts.featuresPath, opts.noNormalize);
    const LabelVector labels = read_labels(opts.labelsPath);
    const FeatureMode mode = parse_feature_mode(opts.modeName);
    const int threads = resolve_threads(opts.threads);

    const KnnGraph graph = build_knn(features, k, threads);
    const PairFeatureAssembler assembler(features, graph, mode, opts.renormContext, threads);
    TrainingSetConfig setConfig;
    setConfig.balanceTolerance = opts.balanceTolerance;
    setConfig.positiveCapPerClass = opts.positiveCap;
    setConfig.seed = opts.sgd.seed;
    const PairTrainingSet set = build_training_set(
        features, labels,
        [&](std::int32_t miningK) { return build_knn(features, miningK, threads); }, assembler,
        setConfig);
    if (!set.balanced) std::fprintf(stderr, "warning: %s\n", set.warning.c_str());
    std::printf("pairs=%ld positives=%ld negatives=%ld dim=%d\n", static_cast<long>(set.rows),
                static_cast<long>(set.positiveCount), static_cast<long>(set.negativeCount), set.dim);

    auto dims = MlpClassifier::default_dims(set.dim);
    if (opts.hidden1 > 0) dims[1] = opts.hidden1;
    if (opts.hidden2 > 0) dims[2] = opts.hidden2;
    MlpClassifier model(dims, opts.sgd.seed);
    const auto trace = model.train(set, opts.sgd);
    for (std::size_t epoch = 0; epoch < trace.size(); ++epoch) {
        std::printf("epoch=%zu loss=%.6f\n", epoch, trace[epoch]);
    }

    ModelMetadata meta;
    meta.mode = mode;
    meta.d = features.d;
    meta.k = k;
    meta.renormContext = opts.renormContext;
    meta.normalizeInput = !opts.noNormalize;
    meta.sgd = opts.sgd;
    write_model(opts.outModel, model, meta);
    std::printf("model=%s params=%ld\n", opts.outModel.c_str(),
                static_cast<long>(model.parameter_count()));
}

struct ClusterOpts {
    std::string featuresPath;
    std::string modelPath;
    std::string outAssignment;
    std::string outSummary;
    std::int32_t batch = 2048;
    int threads = 1;
};

void run_cluster(const ClusterOpts& opts, const KPowerOpts& kp) {
    auto [model, meta] = read_model(opts.modelPath);
    const FeatureMatrix features = read_features(opts.featuresPath);
    if (features.d != meta.d) {
        throw PcError(ErrorCode::ModelMismatch,
                      "features have d=" + std::to_string(features.d) + ", model was trained at d=" +
                          std::to_string(meta.d));
    }

    PipelineOptions pipeline;
    pipeline.k = kp.resolve_k(meta.k);
    if (pipeline.k != meta.k) {
        std::fprintf(stderr, "warning: clustering with k=%d, model was trained with k=%d\n",
                     pipeline.k, meta.k);
    }
    pipeline.power = kp.resolve_power();
    pipeline.mode = meta.mode;
    pipeline.normalizeInput = meta.normalizeInput;
    pipeline.renormContext = meta.renormContext;
    pipeline.batchSize = opts.batch;
    pipeline.threads = opts.threads;

    const PipelineResult result = cluster(features, model, pipeline);
    if (!opts.outAssignment.empty()) write_assignment_tsv(opts.outAssignment, result.assignment);
    if (!opts.outSummary.empty()) write_summary_json(opts.outSummary, result.summary);
    std::printf("clusters=%d singletons=%d pairsProposed=%ld pairsAccepted=%ld\n",
                result.summary.numClusters, result.summary.numSingletons,
                static_cast<long>(result.summary.pairsProposed),
                static_cast<long>(result.summary.pairsAccepted));
}

void run_evaluate(const std::string& assignmentPath, const std::string& labelsPath,
                  const std::string& outReport) {
    const ClusterAssignment assignment = read_assignment_tsv(assignmentPath);
    const LabelVector labels = read_labels(labelsPath);
    const EvaluationReport report = evaluate(assignment, labels);
    if (!outReport.empty()) write_report_json(outReport, report);
    std::fputs(report_table(report).c_str(), stdout);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Pairwise clustering of dense embeddings"};
    app.require_subcommand(1);

    BlobSpec blobSpec;
    std::int32_t perClassMax = 0;  // 0 = same as --per-class
    std::string genOutFeatures, genOutLabels;
    auto* gen = app.add_subcommand("gen", "Generate synthetic blob embeddings");
    gen->add_option("--classes", blobSpec.numClasses, "Number of classes")->capture_default_str();
    gen->add_option("--per-class", blobSpec.samplesPerClassMin, "Samples per class")
        ->capture_default_str();
    gen->add_option("--per-class-max", perClassMax,
                    "Upper bound for a seeded per-class sample count range");
    gen->add_option("--dim", blobSpec.d, "Embedding dimension")->capture_default_str();
    gen->add_option("--std", blobSpec.intraClassStd, "Intra-class noise std")->capture_default_str();
    gen->add_option("--outlier-fraction", blobSpec.outlierFraction, "Fraction of samples with 3x noise")
        ->capture_default_str();
    gen->add_option("--seed", blobSpec.seed, "RNG seed")->capture_default_str();
    gen->add_option("--out-features", genOutFeatures, "Output feature file")->required();
    gen->add_option("--out-labels", genOutLabels, "Output label file")->required();
    gen->callback([&] {
        blobSpec.samplesPerClassMax =
            perClassMax > 0 ? perClassMax : blobSpec.samplesPerClassMin;
        run_gen(blobSpec, genOutFeatures, genOutLabels);
    });

    std::string knnFeatures, knnOut;
    int knnThreads = 1;
    bool knnNoNormalize = false;
    KPowerOpts knnKp;
    auto* knn = app.add_subcommand("knn", "Build the exact k-NN graph");
    knn->add_option("--features", knnFeatures, "Feature file")->required();
    knnKp.add_to(knn, false);
    knn->add_option("--threads", knnThreads, "Worker threads, 0 = auto")->capture_default_str();
    knn->add_flag("--no-normalize", knnNoNormalize, "Skip input L2 normalization");
    knn->add_option("--out", knnOut, "Output graph file")->required();
    knn->callback([&] { run_knn(knnFeatures, knnKp.resolve_k(), knnThreads, knnNoNormalize, knnOut); });

    std::string densityFeatures, densityOut;
    int densityThreads = 1;
    bool densityNoNormalize = false;
    KPowerOpts densityKp;
    auto* density = app.add_subcommand("density", "Compute rank-weighted densities");
    density->add_option("--features", densityFeatures, "Feature file")->required();
    densityKp.add_to(density, true);
    density->add_option("--threads", densityThreads, "Worker threads, 0 = auto")->capture_default_str();
    density->add_flag("--no-normalize", densityNoNormalize, "Skip input L2 normalization");
    density->add_option("--out", densityOut, "Output TSV file")->required();
    density->callback([&] {
        run_density(densityFeatures, densityKp.resolve_k(), densityKp.resolve_power(),
                    densityThreads, densityNoNormalize, densityOut);
    });

    TrainOpts trainOpts;
    KPowerOpts trainKp;
    auto* train = app.add_subcommand("train", "Train the pair classifier");
    train->add_option("--features", trainOpts.featuresPath, "Feature file")->required();
    train->add_option("--labels", trainOpts.labelsPath, "Label file")->required();
    train->add_option("--mode", trainOpts.modeName,
                      "Pair feature mode: original, weighted-neighbor, combined")
        ->capture_default_str();
    trainKp.add_to(train, false);
    train->add_option("--lr", trainOpts.sgd.learningRate, "Learning rate")->capture_default_str();
    train->add_option("--momentum", trainOpts.sgd.momentum, "SGD momentum")->capture_default_str();
    train->add_option("--weight-decay", trainOpts.sgd.weightDecay, "Weight decay")
        ->capture_default_str();
    train->add_option("--batch", trainOpts.sgd.batchSize, "Batch size")->capture_default_str();
    train->add_option("--epochs", trainOpts.sgd.epochs, "Training epochs")->capture_default_str();
    train->add_option("--seed", trainOpts.sgd.seed, "RNG seed")->capture_default_str();
    train->add_option("--lr-step-every", trainOpts.sgd.stepDecayEvery,
                      "Epochs between learning-rate decay steps, 0 = constant rate")
        ->capture_default_str();
    train->add_option("--lr-step-factor", trainOpts.sgd.stepDecayFactor,
                      "Learning-rate multiplier per decay step")
        ->capture_default_str();
    train->add_option("--balance-tolerance", trainOpts.balanceTolerance,
                      "Allowed positive/negative imbalance")
        ->capture_default_str();
    train->add_option("--positive-cap", trainOpts.positiveCap, "Positive rows per class")
        ->capture_default_str();
    train->add_option("--hidden1", trainOpts.hidden1, "First hidden width, 0 = auto");
    train->add_option("--hidden2", trainOpts.hidden2, "Second hidden width, 0 = auto");
    train->add_flag("--renorm-context", trainOpts.renormContext,
                    "L2-renormalize weighted-neighbor features");
    train->add_flag("--no-normalize", trainOpts.noNormalize, "Skip input L2 normalization");
    train->add_option("--threads", trainOpts.threads, "Worker threads, 0 = auto")
        ->capture_default_str();
    train->add_option("--out-model", trainOpts.outModel, "Output checkpoint path")->required();
    train->callback([&] { run_train(trainOpts, trainKp.resolve_k()); });

    ClusterOpts clusterOpts;
    KPowerOpts clusterKp;
    auto* clusterCmd = app.add_subcommand("cluster", "Cluster embeddings with a trained model");
    clusterCmd->add_option("--features", clusterOpts.featuresPath, "Feature file")->required();
    clusterCmd->add_option("--model", clusterOpts.modelPath, "Model checkpoint")->required();
    clusterKp.add_to(clusterCmd, true);
    clusterCmd->add_option("--batch", clusterOpts.batch, "Inference batch size")
        ->capture_default_str();
    clusterCmd->add_option("--threads", clusterOpts.threads, "Worker threads, 0 = auto")
        ->capture_default_str();
    clusterCmd->add_option("--out-assignment", clusterOpts.outAssignment, "Assignment TSV path");
    clusterCmd->add_option("--out-summary", clusterOpts.outSummary, "Summary JSON path");
    clusterCmd->callback([&] { run_cluster(clusterOpts, clusterKp); });

    std::string evalAssignment, evalLabels, evalReport;
    auto* evaluateCmd = app.add_subcommand("evaluate", "Score an assignment against labels");
    evaluateCmd->add_option("--assignment", evalAssignment, "Assignment TSV")->required();
    evaluateCmd->add_option("--labels", evalLabels, "Ground-truth label file")->required();
    evaluateCmd->add_option("--out-report", evalReport, "Report JSON path");
    evaluateCmd->callback([&] { run_evaluate(evalAssignment, evalLabels, evalReport); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    } catch (const PcError& e) {
        std::fprintf(stderr, "error_code=%s detail=%s\n", e.code_name(), e.detail().c_str());
        return e.exit_code();
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error_code=Unexpected detail=%s\n", e.what());
        return 3;
    }
    return 0;
}
