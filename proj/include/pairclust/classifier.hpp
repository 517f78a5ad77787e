#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "pairclust/features.hpp"
#include "pairclust/types.hpp"

namespace pairclust {

struct SgdConfig {
    double learningRate = 0.01;
    double momentum = 0.9;
    double weightDecay = 5e-4;
    std::int32_t batchSize = 2048;
    std::int32_t epochs = 60;
    std::uint64_t seed = 0;
    std::int32_t stepDecayEvery = 0;   // epochs per decay step, 0 = constant rate
    double stepDecayFactor = 0.1;      // rate multiplier per step, used when stepping

    /// learningRate and batchSize must be positive, momentum and weightDecay
    /// non-negative, epochs >= 0, stepDecayEvery >= 0, stepDecayFactor in
    /// (0, 1].
    void validate() const;
};

/// Balanced same/different pair rows, features already assembled. Labels:
/// 1 = same class, 0 = different class.
struct PairTrainingSet {
    std::int64_t rows = 0;
    std::int32_t dim = 0;
    std::vector<double> pairFeatures;  // rows x dim, row-major
    std::vector<std::int32_t> labels;
    std::int64_t positiveCount = 0;
    std::int64_t negativeCount = 0;
    bool balanced = true;
    std::string warning;  // set when balancing failed at k = n-1
};

struct TrainingSetConfig {
    double balanceTolerance = 0.2;
    std::int32_t positiveCapPerClass = 200;  // ordered rows per class
    std::int32_t miningKStart = 8;
    std::uint64_t seed = 0;
};

using GraphBuilder = std::function<KnnGraph(std::int32_t k)>;

/// Positives: intra-class pairs, seeded-subsampled to the per-class cap, both
/// orientations. Negatives: cross-label k-NN pairs mined from graphBuilder(k)
/// with k doubling from miningKStart until negatives reach
/// positives * (1 - balanceTolerance) or k = n-1, deduplicated, both
/// orientations, then seeded-subsampled to match the positive count. If the
/// balance is unreachable the set comes back with balanced = false and a
/// warning instead of an error.
///
/// Throws SingleClass when only one label is present, InvalidArgument when no
/// class has two samples.
PairTrainingSet build_training_set(const FeatureMatrix& features, const LabelVector& labels,
                                   const GraphBuilder& graphBuilder,
                                   const PairFeatureAssembler& assembler,
                                   const TrainingSetConfig& config);

struct PairPrediction {
    bool same = false;
    double probSame = 0.0;  // softmax mass on the "same" logit, diagnostics only
};

/// 3-layer fully connected net: inputDim -> h1 -> h2 -> 2 logits, rectifier
/// after the hidden layers. Logit order: index 0 = different, 1 = same.
/// Parameters are one flat float64 vector in layer order
/// (W1, b1, W2, b2, W3, b3, weight matrices row-major).
class MlpClassifier {
  public:
    MlpClassifier() = default;

    /// Zero-initialized parameters.
    explicit MlpClassifier(const std::array<std::int32_t, 4>& layerDims);

    MlpClassifier(const std::array<std::int32_t, 4>& layerDims, std::uint64_t seed);

    /// h1 = min(256, 4 * inputDim), h2 = h1 / 2.
    static std::array<std::int32_t, 4> default_dims(std::int32_t inputDim);

    const std::array<std::int32_t, 4>& layer_dims() const { return dims_; }
    std::int32_t input_dim() const { return dims_[0]; }
    std::int64_t parameter_count() const { return static_cast<std::int64_t>(params_.size()); }
    std::span<double> parameters() { return params_; }
    std::span<const double> parameters() const { return params_; }

    /// Seeded uniform init in +-sqrt(6 / (fanIn + fanOut)) per weight matrix,
    /// biases zero.
    void randomize(std::uint64_t seed);

    /// logits must hold rows * 2 values.
    void forward(const double* batch, std::int64_t rows, double* logits) const;

    /// batch.size() must be a multiple of input_dim(). Throws DimMismatch.
    std::vector<double> forward(const std::vector<double>& batch) const;

    /// Argmax decision; an exact logit tie predicts "different".
    std::vector<PairPrediction> predict(const double* batch, std::int64_t rows) const;
    std::vector<PairPrediction> predict(const std::vector<double>& batch) const;

    /// Mean softmax cross-entropy of the batch.
    double mean_loss(const double* batch, const std::int32_t* labels, std::int64_t rows) const;

    /// Analytic gradient of the mean loss (no decay term); grad must hold
    /// parameter_count() values. Returns the mean loss.
    double backward(const double* batch, const std::int32_t* labels, std::int64_t rows,
                    double* grad) const;

    /// Momentum SGD over shuffled mini-batches, decay * w added to the
    /// gradient. Returns the per-epoch mean loss trace (length
    /// config.epochs). Deterministic for a fixed seed. Throws NonFiniteLoss
    /// naming the offending epoch, DimMismatch if set.dim != input_dim().
    std::vector<double> train(const PairTrainingSet& set, const SgdConfig& config);

  private:
    std::array<std::int32_t, 4> dims_{0, 0, 0, 0};
    std::vector<double> params_;

    void allocate();
};

/// Central finite differences of the mean loss against backward() over every
/// parameter. Returns max_i |num - ana| / max(|num|, |ana|, 1e-8). The model
/// is restored afterwards. Intended for small models (<= ~1e4 parameters).
double gradient_check(MlpClassifier& model, const double* batch, const std::int32_t* labels,
                      std::int64_t rows, double epsilon = 1e-5);

}  // namespace pairclust
