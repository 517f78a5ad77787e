#include "pairclust/classifier.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <utility>

#include "pairclust/error.hpp"

namespace pairclust {
namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapRowMat = Eigen::Map<RowMat>;
using MapConstRowMat = Eigen::Map<const RowMat>;
using MapVec = Eigen::Map<Eigen::VectorXd>;
using MapConstVec = Eigen::Map<const Eigen::VectorXd>;

struct ParamOffsets {
    std::int64_t w1, b1, w2, b2, w3, b3, total;
};

ParamOffsets offsets_for(const std::array<std::int32_t, 4>& d) {
    const std::int64_t in = d[0], h1 = d[1], h2 = d[2], out = d[3];
    ParamOffsets o{};
    o.w1 = 0;
    o.b1 = o.w1 + h1 * in;
    o.w2 = o.b1 + h1;
    o.b2 = o.w2 + h2 * h1;
    o.w3 = o.b2 + h2;
    o.b3 = o.w3 + out * h2;
    o.total = o.b3 + out;
    return o;
}

double row_loss(const double* logits, std::int32_t label, double* probs) {
    const double m = std::max(logits[0], logits[1]);
    const double e0 = std::exp(logits[0] - m);
    const double e1 = std::exp(logits[1] - m);
    const double z = e0 + e1;
    probs[0] = e0 / z;
    probs[1] = e1 / z;
    return std::log(z) + m - logits[label];
}

double unit_double(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// j uniform in [lo, hi); modulo bias is irrelevant here, determinism is not.
std::int64_t pick_index(std::mt19937_64& rng, std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(hi - lo));
}

}  // namespace

void SgdConfig::validate() const {
    const bool ok = std::isfinite(learningRate) && learningRate > 0.0 && std::isfinite(momentum) &&
                    momentum >= 0.0 && std::isfinite(weightDecay) && weightDecay >= 0.0 &&
                    batchSize > 0 && epochs >= 0 && stepDecayEvery >= 0 &&
                    std::isfinite(stepDecayFactor) && stepDecayFactor > 0.0 &&
                    stepDecayFactor <= 1.0;
    if (!ok) throw PcError(ErrorCode::InvalidArgument, "bad SGD configuration");
}

MlpClassifier::MlpClassifier(const std::array<std::int32_t, 4>& layerDims) : dims_(layerDims) {
    for (std::int32_t dim : dims_) {
        if (dim < 1) throw PcError(ErrorCode::InvalidArgument, "layer dims must be positive");
    }
    if (dims_[3] != 2) throw PcError(ErrorCode::InvalidArgument, "output layer must emit 2 logits");
    allocate();
}

MlpClassifier::MlpClassifier(const std::array<std::int32_t, 4>& layerDims, std::uint64_t seed)
    : MlpClassifier(layerDims) {
    randomize(seed);
}

std::array<std::int32_t, 4> MlpClassifier::default_dims(std::int32_t inputDim) {
    const std::int32_t h1 = std::min<std::int32_t>(256, 4 * inputDim);
    return {inputDim, h1, std::max<std::int32_t>(1, h1 / 2), 2};
}

void MlpClassifier::allocate() { params_.assign(static_cast<std::size_t>(offsets_for(dims_).total), 0.0); }

void MlpClassifier::randomize(std::uint64_t seed) {
    const auto o = offsets_for(dims_);
    std::mt19937_64 rng(seed);
    const std::array<std::tuple<std::int64_t, std::int32_t, std::int32_t>, 3> layers{{
        {o.w1, dims_[1], dims_[0]},
        {o.w2, dims_[2], dims_[1]},
        {o.w3, dims_[3], dims_[2]},
    }};
    for (const auto& [offset, fanOut, fanIn] : layers) {
        const double bound = std::sqrt(6.0 / static_cast<double>(fanIn + fanOut));
        const std::int64_t count = static_cast<std::int64_t>(fanOut) * fanIn;
        for (std::int64_t i = 0; i < count; ++i) {
            params_[static_cast<std::size_t>(offset + i)] = (2.0 * unit_double(rng) - 1.0) * bound;
        }
    }
    std::fill(params_.begin() + o.b1, params_.begin() + o.w2, 0.0);
    std::fill(params_.begin() + o.b2, params_.begin() + o.w3, 0.0);
    std::fill(params_.begin() + o.b3, params_.end(), 0.0);
}

void MlpClassifier::forward(const double* batch, std::int64_t rows, double* logits) const {
    const auto o = offsets_for(dims_);
    const std::int64_t in = dims_[0], h1 = dims_[1], h2 = dims_[2], out = dims_[3];
    MapConstRowMat X(batch, rows, in);
    MapConstRowMat W1(params_.data() + o.w1, h1, in);
    MapConstVec b1(params_.data() + o.b1, h1);
    MapConstRowMat W2(params_.data() + o.w2, h2, h1);
    MapConstVec b2(params_.data() + o.b2, h2);
    MapConstRowMat W3(params_.data() + o.w3, out, h2);
    MapConstVec b3(params_.data() + o.b3, out);

    RowMat A1 = ((X * W1.transpose()).rowwise() + b1.transpose()).cwiseMax(0.0);
    RowMat A2 = ((A1 * W2.transpose()).rowwise() + b2.transpose()).cwiseMax(0.0);
    MapRowMat L(logits, rows, out);
    L.noalias() = A2 * W3.transpose();
    L.rowwise() += b3.transpose();
}

std::vector<double> MlpClassifier::forward(const std::vector<double>& batch) const {
    const std::int32_t in = input_dim();
    if (in < 1 || batch.size() % static_cast<std::size_t>(in) != 0) {
        throw PcError(ErrorCode::DimMismatch, "batch width does not match input dim " + std::to_string(in));
    }
    const auto rows = static_cast<std::int64_t>(batch.size() / static_cast<std::size_t>(in));
    std::vector<double> logits(static_cast<std::size_t>(rows) * 2, 0.0);
    forward(batch.data(), rows, logits.data());
    return logits;
}

std::vector<PairPrediction> MlpClassifier::predict(const double* batch, std::int64_t rows) const {
    std::vector<double> logits(static_cast<std::size_t>(rows) * 2, 0.0);
    forward(batch, rows, logits.data());
    std::vector<PairPrediction> out(static_cast<std::size_t>(rows));
    for (std::int64_t r = 0; r < rows; ++r) {
        const double l0 = logits[static_cast<std::size_t>(2 * r)];
        const double l1 = logits[static_cast<std::size_t>(2 * r + 1)];
        double probs[2];
        row_loss(&logits[static_cast<std::size_t>(2 * r)], 0, probs);
        out[static_cast<std::size_t>(r)].same = l1 > l0;
        out[static_cast<std::size_t>(r)].probSame = probs[1];
    }
    return out;
}

std::vector<PairPrediction> MlpClassifier::predict(const std::vector<double>& batch) const {
    const std::int32_t in = input_dim();
    if (in < 1 || batch.size() % static_cast<std::size_t>(in) != 0) {
        throw PcError(ErrorCode::DimMismatch, "batch width does not match input dim " + std::to_string(in));
    }
    return predict(batch.data(), static_cast<std::int64_t>(batch.size() / static_cast<std::size_t>(in)));
}

double MlpClassifier::mean_loss(const double* batch, const std::int32_t* labels,
                                std::int64_t rows) const {
    std::vector<double> logits(static_cast<std::size_t>(rows) * 2, 0.0);
    forward(batch, rows, logits.data());
    double sum = 0.0;
    for (std::int64_t r = 0; r < rows; ++r) {
        double probs[2];
        sum += row_loss(&logits[static_cast<std::size_t>(2 * r)], labels[r], probs);
    }
    return sum / static_cast<double>(rows);
}

double MlpClassifier::backward(const double* batch, const std::int32_t* labels, std::int64_t rows,
                               double* grad) const {
    const auto o = offsets_for(dims_);
    const std::int64_t in = dims_[0], h1 = dims_[1], h2 = dims_[2], out = dims_[3];
    MapConstRowMat X(batch, rows, in);
    MapConstRowMat W1(params_.data() + o.w1, h1, in);
    MapConstVec b1(params_.data() + o.b1, h1);
    MapConstRowMat W2(params_.data() + o.w2, h2, h1);
    MapConstVec b2(params_.data() + o.b2, h2);
    MapConstRowMat W3(params_.data() + o.w3, out, h2);
    MapConstVec b3(params_.data() + o.b3, out);

    RowMat Z1 = (X * W1.transpose()).rowwise() + b1.transpose();
    RowMat A1 = Z1.cwiseMax(0.0);
    RowMat Z2 = (A1 * W2.transpose()).rowwise() + b2.transpose();
    RowMat A2 = Z2.cwiseMax(0.0);
    RowMat L = (A2 * W3.transpose()).rowwise() + b3.transpose();

    RowMat dL(rows, out);
    double lossSum = 0.0;
    for (std::int64_t r = 0; r < rows; ++r) {
        double probs[2];
        lossSum += row_loss(L.row(r).data(), labels[r], probs);
        dL(r, 0) = probs[0];
        dL(r, 1) = probs[1];
        dL(r, labels[r]) -= 1.0;
    }
    const double scale = 1.0 / static_cast<double>(rows);
    dL *= scale;

    MapRowMat gW1(grad + o.w1, h1, in);
    MapVec gb1(grad + o.b1, h1);
    MapRowMat gW2(grad + o.w2, h2, h1);
    MapVec gb2(grad + o.b2, h2);
    MapRowMat gW3(grad + o.w3, out, h2);
    MapVec gb3(grad + o.b3, out);

    gW3.noalias() = dL.transpose() * A2;
    gb3 = dL.colwise().sum().transpose();
    RowMat dZ2 = (dL * W3).cwiseProduct((Z2.array() > 0.0).cast<double>().matrix());
    gW2.noalias() = dZ2.transpose() * A1;
    gb2 = dZ2.colwise().sum().transpose();
    RowMat dZ1 = (dZ2 * W2).cwiseProduct((Z1.array() > 0.0).cast<double>().matrix());
    gW1.noalias() = dZ1.transpose() * X;
    gb1 = dZ1.colwise().sum().transpose();
    return lossSum * scale;
}

std::vector<double> MlpClassifier::train(const PairTrainingSet& set, const SgdConfig& config) {
    config.validate();
    if (params_.empty()) throw PcError(ErrorCode::InvalidArgument, "model has no parameters");
    if (set.rows < 1) throw PcError(ErrorCode::InvalidArgument, "training set is empty");
    if (set.dim != input_dim()) {
        throw PcError(ErrorCode::DimMismatch, "training rows have width " + std::to_string(set.dim) +
                                                  ", model expects " + std::to_string(input_dim()));
    }
    if (std::cmp_not_equal(set.pairFeatures.size(), set.rows * set.dim) ||
        std::cmp_not_equal(set.labels.size(), set.rows)) {
        throw PcError(ErrorCode::LengthMismatch, "training set buffers disagree with rows x dim");
    }
    for (std::int32_t label : set.labels) {
        if (label != 0 && label != 1) {
            throw PcError(ErrorCode::InvalidArgument, "pair labels must be 0 or 1");
        }
    }

    const std::int64_t M = set.rows;
    const std::int64_t B = std::min<std::int64_t>(config.batchSize, M);
    std::vector<double> velocity(params_.size(), 0.0);
    std::vector<double> grad(params_.size(), 0.0);
    std::vector<double> xb(static_cast<std::size_t>(B) * static_cast<std::size_t>(set.dim), 0.0);
    std::vector<std::int32_t> yb(static_cast<std::size_t>(B), 0);
    std::vector<std::int64_t> order(static_cast<std::size_t>(M), 0);
    std::iota(order.begin(), order.end(), std::int64_t{0});
    std::mt19937_64 rng(config.seed + 0x9E3779B97F4A7C15ULL);

    std::vector<double> trace;
    trace.reserve(static_cast<std::size_t>(config.epochs));
    for (std::int32_t epoch = 0; epoch < config.epochs; ++epoch) {
        const double rate =
            config.stepDecayEvery > 0
                ? config.learningRate * std::pow(config.stepDecayFactor, epoch / config.stepDecayEvery)
                : config.learningRate;
        for (std::int64_t i = M - 1; i > 0; --i) {
            std::swap(order[static_cast<std::size_t>(i)],
                      order[static_cast<std::size_t>(pick_index(rng, 0, i + 1))]);
        }
        double epochLossSum = 0.0;
        for (std::int64_t lo = 0; lo < M; lo += B) {
            const std::int64_t bs = std::min(B, M - lo);
            for (std::int64_t r = 0; r < bs; ++r) {
                const std::int64_t src = order[static_cast<std::size_t>(lo + r)];
                std::memcpy(xb.data() + r * set.dim, set.pairFeatures.data() + src * set.dim,
                            sizeof(double) * static_cast<std::size_t>(set.dim));
                yb[static_cast<std::size_t>(r)] = set.labels[static_cast<std::size_t>(src)];
            }
            const double meanLoss = backward(xb.data(), yb.data(), bs, grad.data());
            if (!std::isfinite(meanLoss)) {
                throw PcError(ErrorCode::NonFiniteLoss,
                              "epoch " + std::to_string(epoch) + ", batch starting at row " +
                                  std::to_string(lo));
            }
            epochLossSum += meanLoss * static_cast<double>(bs);
            for (std::size_t pi = 0; pi < params_.size(); ++pi) {
                const double g = grad[pi] + config.weightDecay * params_[pi];
                velocity[pi] = config.momentum * velocity[pi] + g;
                params_[pi] -= rate * velocity[pi];
            }
        }
        trace.push_back(epochLossSum / static_cast<double>(M));
    }
    return trace;
}

double gradient_check(MlpClassifier& model, const double* batch, const std::int32_t* labels,
                      std::int64_t rows, double epsilon) {
    auto params = model.parameters();
    std::vector<double> analytic(params.size(), 0.0);
    model.backward(batch, labels, rows, analytic.data());
    double worst = 0.0;
    for (std::size_t i = 0; i < params.size(); ++i) {
        const double saved = params[i];
        params[i] = saved + epsilon;
        const double up = model.mean_loss(batch, labels, rows);
        params[i] = saved - epsilon;
        const double down = model.mean_loss(batch, labels, rows);
        params[i] = saved;
        const double numeric = (up - down) / (2.0 * epsilon);
        const double denom = std::max({std::abs(numeric), std::abs(analytic[i]), 1e-8});
        worst = std::max(worst, std::abs(numeric - analytic[i]) / denom);
    }
    return worst;
}

PairTrainingSet build_training_set(const FeatureMatrix& features, const LabelVector& labels,
                                   const GraphBuilder& graphBuilder,
                                   const PairFeatureAssembler& assembler,
                                   const TrainingSetConfig& config) {
    features.validate();
    labels.validate();
    const std::int32_t n = features.n;
    if (labels.size() != n) {
        throw PcError(ErrorCode::LengthMismatch, "labels length " + std::to_string(labels.size()) +
                                                     " vs n=" + std::to_string(n));
    }
    if (!(config.balanceTolerance >= 0.0 && config.balanceTolerance < 1.0) ||
        config.positiveCapPerClass < 2 || config.miningKStart < 1) {
        throw PcError(ErrorCode::InvalidArgument, "bad training-set configuration");
    }
    if (!graphBuilder) throw PcError(ErrorCode::InvalidArgument, "graph builder is empty");

    std::map<std::int64_t, std::vector<std::int32_t>> classes;
    for (std::int32_t i = 0; i < n; ++i) classes[labels.labels[static_cast<std::size_t>(i)]].push_back(i);
    if (classes.size() < 2) {
        throw PcError(ErrorCode::SingleClass,
                      "training needs at least 2 classes, got " + std::to_string(classes.size()));
    }

    std::mt19937_64 rng(config.seed);
    std::vector<std::pair<std::int32_t, std::int32_t>> positives;
    const std::int64_t capUnordered = config.positiveCapPerClass / 2;
    for (const auto& [label, members] : classes) {
        const auto m = static_cast<std::int64_t>(members.size());
        if (m < 2) continue;
        std::vector<std::pair<std::int32_t, std::int32_t>> unordered;
        unordered.reserve(static_cast<std::size_t>(std::min<std::int64_t>(m * (m - 1) / 2, 4 * capUnordered)));
        for (std::int64_t i = 0; i < m; ++i) {
            for (std::int64_t j = i + 1; j < m; ++j) {
                unordered.emplace_back(members[static_cast<std::size_t>(i)], members[static_cast<std::size_t>(j)]);
            }
        }
        if (std::cmp_greater(unordered.size(), capUnordered)) {
            for (std::int64_t i = 0; i < capUnordered; ++i) {
                std::swap(unordered[static_cast<std::size_t>(i)],
                          unordered[static_cast<std::size_t>(
                              pick_index(rng, i, static_cast<std::int64_t>(unordered.size())))]);
            }
            unordered.resize(static_cast<std::size_t>(capUnordered));
        }
        for (const auto& [a, b] : unordered) {
            positives.emplace_back(a, b);
            positives.emplace_back(b, a);
        }
    }
    if (positives.empty()) {
        throw PcError(ErrorCode::InvalidArgument, "no class has two samples; cannot form positive pairs");
    }
    const auto posRows = static_cast<std::int64_t>(positives.size());

    const double needed = static_cast<double>(posRows) * (1.0 - config.balanceTolerance);
    std::set<std::pair<std::int32_t, std::int32_t>> negSet;
    std::int32_t miningK = std::min<std::int32_t>(std::max<std::int32_t>(config.miningKStart, 1), n - 1);
    while (true) {
        negSet.clear();
        const KnnGraph graph = graphBuilder(miningK);
        if (graph.n != n) {
            throw PcError(ErrorCode::LengthMismatch, "graph builder returned wrong sample count");
        }
        for (std::int32_t x = 0; x < n; ++x) {
            const std::int64_t lx = labels.labels[static_cast<std::size_t>(x)];
            for (std::int32_t y : graph.row_neighbors(x)) {
                if (labels.labels[static_cast<std::size_t>(y)] != lx) {
                    negSet.emplace(std::min(x, y), std::max(x, y));
                }
            }
        }
        if (2.0 * static_cast<double>(negSet.size()) >= needed || miningK >= n - 1) break;
        miningK = std::min<std::int32_t>(miningK * 2, n - 1);
    }

    std::vector<std::pair<std::int32_t, std::int32_t>> negatives(negSet.begin(), negSet.end());
    const std::int64_t targetUnordered = posRows / 2;
    bool balanced = true;
    std::string warning;
    if (std::cmp_greater(negatives.size(), targetUnordered)) {
        for (std::int64_t i = 0; i < targetUnordered; ++i) {
            std::swap(negatives[static_cast<std::size_t>(i)],
                      negatives[static_cast<std::size_t>(
                          pick_index(rng, i, static_cast<std::int64_t>(negatives.size())))]);
        }
        negatives.resize(static_cast<std::size_t>(targetUnordered));
        std::sort(negatives.begin(), negatives.end());
    } else if (2.0 * static_cast<double>(negatives.size()) < needed) {
        balanced = false;
        warning = "insufficient negatives: " + std::to_string(2 * negatives.size()) +
                  " negative rows vs " + std::to_string(posRows) + " positive rows at k=" +
                  std::to_string(miningK);
    }

    PairTrainingSet out;
    out.dim = assembler.dim();
    out.positiveCount = posRows;
    out.negativeCount = static_cast<std::int64_t>(negatives.size()) * 2;
    out.rows = out.positiveCount + out.negativeCount;
    out.balanced = balanced;
    out.warning = warning;
    out.pairFeatures.assign(static_cast<std::size_t>(out.rows) * static_cast<std::size_t>(out.dim), 0.0);
    out.labels.assign(static_cast<std::size_t>(out.rows), 0);

    std::int64_t row = 0;
    auto emit = [&](std::int32_t a, std::int32_t b, std::int32_t label) {
        assembler.assemble(a, b, out.pairFeatures.data() + row * out.dim);
        out.labels[static_cast<std::size_t>(row)] = label;
        ++row;
    };
    for (const auto& [a, b] : positives) emit(a, b, 1);
    for (const auto& [a, b] : negatives) {
        emit(a, b, 0);
        emit(b, a, 0);
    }
    return out;
}

}  // namespace pairclust
