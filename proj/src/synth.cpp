#include "pairclust/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "pairclust/error.hpp"

namespace pairclust {
namespace {

double unit_double(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Box-Muller without cached state: two uniforms per draw, reproducible
// independent of library internals.
double gaussian(std::mt19937_64& rng) {
    const double u1 = 1.0 - unit_double(rng);  // (0, 1]
    const double u2 = unit_double(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
}

}  // namespace

void BlobSpec::validate() const {
    const bool ok = numClasses >= 2 && d >= 1 && samplesPerClassMin >= 1 &&
                    samplesPerClassMax >= samplesPerClassMin && std::isfinite(intraClassStd) &&
                    intraClassStd > 0.0 && outlierFraction >= 0.0 && outlierFraction <= 0.2;
    if (!ok) throw PcError(ErrorCode::InvalidArgument, "bad blob spec");
}

BlobData generate_blobs(const BlobSpec& spec) {
    spec.validate();
    std::mt19937_64 rng(spec.seed);

    BlobData out;
    out.centroids = FeatureMatrix(spec.numClasses, spec.d);
    std::vector<double> candidate(static_cast<std::size_t>(spec.d), 0.0);
    constexpr std::int64_t kMaxAttempts = 100000;
    std::int64_t attempts = 0;
    for (std::int32_t c = 0; c < spec.numClasses;) {
        if (attempts >= kMaxAttempts) {
            throw PcError(ErrorCode::CentroidSamplingFailed,
                          "no centroid layout with pairwise inner product < 0.5 after " +
                              std::to_string(kMaxAttempts) + " draws (d=" + std::to_string(spec.d) +
                              ", classes=" + std::to_string(spec.numClasses) + ")");
        }
        ++attempts;
        double norm2 = 0.0;
        for (double& v : candidate) {
            v = gaussian(rng);
            norm2 += v * v;
        }
        const double norm = std::sqrt(norm2);
        if (norm < 1e-12) continue;
        for (double& v : candidate) v /= norm;
        bool separated = true;
        for (std::int32_t prev = 0; prev < c && separated; ++prev) {
            double dot = 0.0;
            const auto row = out.centroids.row(prev);
            for (std::int32_t j = 0; j < spec.d; ++j) {
                dot += static_cast<double>(row[static_cast<std::size_t>(j)]) * candidate[static_cast<std::size_t>(j)];
            }
            separated = dot < 0.5;
        }
        if (!separated) continue;
        auto row = out.centroids.row(c);
        for (std::int32_t j = 0; j < spec.d; ++j) row[static_cast<std::size_t>(j)] = static_cast<float>(candidate[static_cast<std::size_t>(j)]);
        ++c;
    }

    std::vector<std::int32_t> counts(static_cast<std::size_t>(spec.numClasses), spec.samplesPerClassMin);
    if (spec.samplesPerClassMax > spec.samplesPerClassMin) {
        const auto span = static_cast<std::uint64_t>(spec.samplesPerClassMax - spec.samplesPerClassMin + 1);
        for (auto& count : counts) count = spec.samplesPerClassMin + static_cast<std::int32_t>(rng() % span);
    }
    const std::int64_t n = std::accumulate(counts.begin(), counts.end(), std::int64_t{0});

    const auto numOutliers = static_cast<std::int64_t>(static_cast<double>(n) * spec.outlierFraction);
    std::vector<std::int32_t> all(static_cast<std::size_t>(n), 0);
    std::iota(all.begin(), all.end(), 0);
    for (std::int64_t i = 0; i < numOutliers; ++i) {
        const auto j = i + static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(n - i));
        std::swap(all[static_cast<std::size_t>(i)], all[static_cast<std::size_t>(j)]);
    }
    out.outliers.assign(all.begin(), all.begin() + numOutliers);
    std::sort(out.outliers.begin(), out.outliers.end());
    std::vector<bool> isOutlier(static_cast<std::size_t>(n), false);
    for (std::int32_t i : out.outliers) isOutlier[static_cast<std::size_t>(i)] = true;

    out.features = FeatureMatrix(static_cast<std::int32_t>(n), spec.d);
    out.labels.labels.assign(static_cast<std::size_t>(n), 0);
    std::int32_t sample = 0;
    for (std::int32_t c = 0; c < spec.numClasses; ++c) {
        const auto centroid = out.centroids.row(c);
        for (std::int32_t s = 0; s < counts[static_cast<std::size_t>(c)]; ++s, ++sample) {
            const double sigma = spec.intraClassStd * (isOutlier[static_cast<std::size_t>(sample)] ? 3.0 : 1.0);
            double norm2 = 0.0;
            for (std::int32_t j = 0; j < spec.d; ++j) {
                candidate[static_cast<std::size_t>(j)] =
                    static_cast<double>(centroid[static_cast<std::size_t>(j)]) + sigma * gaussian(rng);
                norm2 += candidate[static_cast<std::size_t>(j)] * candidate[static_cast<std::size_t>(j)];
            }
            const double norm = std::sqrt(norm2);
            auto row = out.features.row(sample);
            for (std::int32_t j = 0; j < spec.d; ++j) {
                row[static_cast<std::size_t>(j)] = static_cast<float>(candidate[static_cast<std::size_t>(j)] / norm);
            }
            out.labels.labels[static_cast<std::size_t>(sample)] = c;
        }
    }
    return out;
}

}  // namespace pairclust
