#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "smoe/decompose.hpp"

namespace smoe {

using FeatureVector = std::vector<float>;

enum class ExtractorKind { RawPixels, ExternalEmbeddings };

struct ExtractorConfig {
    ExtractorKind kind = ExtractorKind::RawPixels;
    int dim = 0;     // expected embedding length (ExternalEmbeddings)
    std::string dir; // directory holding emb_{regionindex}.f32 files
};

/// Orthonormal projection basis fitted on training features. components is
/// out_dim x in_dim row-major; explained_variance is non-increasing.
struct PCAModel {
    int in_dim = 0;
    int out_dim = 0;
    std::vector<float> mean;
    std::vector<float> components;
    std::vector<float> explained_variance;
};

/// RawPixels flattens the region row-major; ExternalEmbeddings loads the
/// float32 little-endian vector keyed by region_index.
FeatureVector extract_features(const Region& region, const ExtractorConfig& extractor,
                               int region_index = 0);

/// PCA of the sample covariance. Effective out_dim is
/// min(out_dim, n_samples - 1, input dim). Component signs are fixed so the
/// largest-magnitude entry of each is positive.
PCAModel fit_pca(const std::vector<FeatureVector>& features, int out_dim = 256);

/// components * (f - mean).
FeatureVector project(const PCAModel& pca, const FeatureVector& f);

struct KMeansResult {
    int k = 0;
    int dim = 0;
    std::vector<float> centroids; // k x dim row-major
    std::vector<int> assignments;
    std::vector<double> inertia_history; // one entry per assignment pass
    int iterations = 0;
};

/// Lloyd's algorithm with k-means++ seeding. Stops when no centroid moves
/// more than 1e-6 or after 300 iterations; an emptied cluster is reseeded to
/// the point currently farthest from its centroid. Deterministic for a given
/// (point order, k, seed).
KMeansResult fit_kmeans(const std::vector<FeatureVector>& points, int k, std::uint64_t seed);

struct GatingModel {
    ExtractorConfig extractor;
    PCAModel pca;
    int k = 0;
    std::vector<float> centroids; // k x pca.out_dim row-major

    bool fitted() const { return k >= 1 && !centroids.empty(); }
};

struct GateResult {
    int cluster = 0;
    std::vector<float> onehot;
};

/// Nearest centroid in PCA space under squared Euclidean distance; ties go
/// to the lowest index. The onehot vector has exactly one 1.
GateResult gate(const GatingModel& model, const Region& region, int region_index = 0);

} // namespace smoe
