#include "smoe/gating.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

#include "smoe/errors.hpp"
#include "smoe/rng.hpp"

namespace smoe {

namespace {

double sq_dist(const double* a, const double* b, int dim) {
    double d = 0.0;
    for (int i = 0; i < dim; ++i) {
        const double t = a[i] - b[i];
        d += t * t;
    }
    return d;
}

} // namespace

FeatureVector extract_features(const Region& region, const ExtractorConfig& extractor,
                               int region_index) {
    if (extractor.kind == ExtractorKind::RawPixels) return region.data;

    const auto path = std::filesystem::path(extractor.dir) /
                      ("emb_" + std::to_string(region_index) + ".f32");
    std::ifstream in(path, std::ios::binary);
    if (!in) throw format_error("extract_features: cannot open " + path.string());
    std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (extractor.dim < 1 || buf.size() != static_cast<std::size_t>(extractor.dim) * 4)
        throw format_error(path.string() + ": expected " + std::to_string(extractor.dim) +
                           " float32 values, got " + std::to_string(buf.size() / 4));
    FeatureVector f(extractor.dim);
    const auto* p = reinterpret_cast<const std::uint8_t*>(buf.data());
    for (int i = 0; i < extractor.dim; ++i) {
        std::uint32_t bits = 0;
        for (int b = 0; b < 4; ++b)
            bits |= static_cast<std::uint32_t>(p[4 * i + b]) << (8 * b);
        std::memcpy(&f[i], &bits, 4);
        if (!std::isfinite(f[i]))
            throw format_error(path.string() + ": non-finite embedding value at index " +
                               std::to_string(i));
    }
    return f;
}

PCAModel fit_pca(const std::vector<FeatureVector>& features, int out_dim) {
    const int n = static_cast<int>(features.size());
    if (n < 2) throw format_error("fit_pca: need at least 2 samples");
    const int d = static_cast<int>(features[0].size());
    for (const auto& f : features)
        if (static_cast<int>(f.size()) != d) throw format_error("fit_pca: inconsistent feature dims");

    Eigen::MatrixXd x(n, d);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < d; ++j) x(i, j) = features[i][j];
    const Eigen::RowVectorXd mean = x.colwise().mean();
    x.rowwise() -= mean;

    const int k = std::min({out_dim, n - 1, d});
    Eigen::MatrixXd comps(k, d);
    Eigen::VectorXd vars(k);

    if (d <= n) {
        const Eigen::MatrixXd cov = (x.transpose() * x) / static_cast<double>(n - 1);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
        if (es.info() != Eigen::Success) throw numeric_error("fit_pca: eigensolver failed");
        for (int i = 0; i < k; ++i) { // Eigen sorts ascending
            comps.row(i) = es.eigenvectors().col(d - 1 - i).transpose();
            vars(i) = std::max(0.0, es.eigenvalues()(d - 1 - i));
        }
    } else {
        // Gram trick: eigendecompose the n x n inner-product matrix, then map
        // eigenvectors back through the data.
        const Eigen::MatrixXd gram = (x * x.transpose()) / static_cast<double>(n - 1);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
        if (es.info() != Eigen::Success) throw numeric_error("fit_pca: eigensolver failed");
        for (int i = 0; i < k; ++i) {
            const double lambda = std::max(0.0, es.eigenvalues()(n - 1 - i));
            Eigen::VectorXd v = x.transpose() * es.eigenvectors().col(n - 1 - i);
            const double norm = v.norm();
            if (norm > 0.0) v /= norm;
            comps.row(i) = v.transpose();
            vars(i) = lambda;
        }
    }

    // Deterministic sign: the largest-magnitude entry of each component is
    // positive.
    for (int i = 0; i < k; ++i) {
        int arg = 0;
        double best = -1.0;
        for (int j = 0; j < d; ++j) {
            const double a = std::abs(comps(i, j));
            if (a > best) {
                best = a;
                arg = j;
            }
        }
        if (comps(i, arg) < 0.0) comps.row(i) = -comps.row(i);
    }

    PCAModel model;
    model.in_dim = d;
    model.out_dim = k;
    model.mean.resize(d);
    for (int j = 0; j < d; ++j) model.mean[j] = static_cast<float>(mean(j));
    model.components.resize(static_cast<std::size_t>(k) * d);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < d; ++j)
            model.components[static_cast<std::size_t>(i) * d + j] = static_cast<float>(comps(i, j));
    model.explained_variance.resize(k);
    for (int i = 0; i < k; ++i) model.explained_variance[i] = static_cast<float>(vars(i));
    return model;
}

FeatureVector project(const PCAModel& pca, const FeatureVector& f) {
    if (static_cast<int>(f.size()) != pca.in_dim)
        throw format_error("project: feature length " + std::to_string(f.size()) +
                           " does not match PCA input dim " + std::to_string(pca.in_dim));
    FeatureVector out(pca.out_dim);
    for (int i = 0; i < pca.out_dim; ++i) {
        const float* row = &pca.components[static_cast<std::size_t>(i) * pca.in_dim];
        double acc = 0.0;
        for (int j = 0; j < pca.in_dim; ++j)
            acc += static_cast<double>(row[j]) * (static_cast<double>(f[j]) - pca.mean[j]);
        out[i] = static_cast<float>(acc);
    }
    return out;
}

KMeansResult fit_kmeans(const std::vector<FeatureVector>& points, int k, std::uint64_t seed) {
    const int n = static_cast<int>(points.size());
    if (k < 1) throw format_error("fit_kmeans: k must be >= 1");
    if (n < k)
        throw format_error("fit_kmeans: " + std::to_string(n) + " points < k = " + std::to_string(k));
    const int dim = static_cast<int>(points[0].size());
    for (const auto& p : points)
        if (static_cast<int>(p.size()) != dim)
            throw format_error("fit_kmeans: inconsistent point dims");

    std::vector<double> pts(static_cast<std::size_t>(n) * dim);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < dim; ++j) pts[static_cast<std::size_t>(i) * dim + j] = points[i][j];
    auto pt = [&](int i) { return &pts[static_cast<std::size_t>(i) * dim]; };

    // k-means++ seeding.
    rng::Stream rs(seed, 0x5EEDu);
    std::vector<double> centroids(static_cast<std::size_t>(k) * dim);
    auto cent = [&](int c) { return &centroids[static_cast<std::size_t>(c) * dim]; };
    std::copy_n(pt(static_cast<int>(rs.next_below(n))), dim, cent(0));
    std::vector<double> d2(n);
    for (int c = 1; c < k; ++c) {
        double total = 0.0;
        for (int i = 0; i < n; ++i) {
            double best = std::numeric_limits<double>::infinity();
            for (int j = 0; j < c; ++j) best = std::min(best, sq_dist(pt(i), cent(j), dim));
            d2[i] = best;
            total += best;
        }
        int pick;
        if (total > 0.0) {
            const double r = rs.next_unit() * total;
            double acc = 0.0;
            pick = n - 1;
            for (int i = 0; i < n; ++i) {
                acc += d2[i];
                if (acc > r) {
                    pick = i;
                    break;
                }
            }
        } else {
            pick = static_cast<int>(rs.next_below(n));
        }
        std::copy_n(pt(pick), dim, cent(c));
    }

    KMeansResult res;
    res.k = k;
    res.dim = dim;
    res.assignments.assign(n, 0);
    std::vector<double> sums(static_cast<std::size_t>(k) * dim);
    std::vector<int> counts(k);

    for (int iter = 0; iter < 300; ++iter) {
        // Assignment pass; ties go to the lowest index.
        double inertia = 0.0;
        for (int i = 0; i < n; ++i) {
            int best_c = 0;
            double best_d = sq_dist(pt(i), cent(0), dim);
            for (int c = 1; c < k; ++c) {
                const double d = sq_dist(pt(i), cent(c), dim);
                if (d < best_d) {
                    best_d = d;
                    best_c = c;
                }
            }
            res.assignments[i] = best_c;
            inertia += best_d;
        }
        res.inertia_history.push_back(inertia);
        res.iterations = iter + 1;

        // Recenter.
        std::fill(sums.begin(), sums.end(), 0.0);
        std::fill(counts.begin(), counts.end(), 0);
        for (int i = 0; i < n; ++i) {
            const int c = res.assignments[i];
            ++counts[c];
            double* s = &sums[static_cast<std::size_t>(c) * dim];
            const double* q = pt(i);
            for (int j = 0; j < dim; ++j) s[j] += q[j];
        }
        double max_shift = 0.0;
        std::vector<int> reseeded;
        for (int c = 0; c < k; ++c) {
            if (counts[c] == 0) {
                // Reseed to the point farthest from its current centroid.
                int far_i = -1;
                double far_d = -1.0;
                for (int i = 0; i < n; ++i) {
                    if (std::find(reseeded.begin(), reseeded.end(), i) != reseeded.end()) continue;
                    const double d = sq_dist(pt(i), cent(res.assignments[i]), dim);
                    if (d > far_d) {
                        far_d = d;
                        far_i = i;
                    }
                }
                reseeded.push_back(far_i);
                std::copy_n(pt(far_i), dim, cent(c));
                max_shift = std::numeric_limits<double>::infinity();
                continue;
            }
            double shift = 0.0;
            double* ctr = cent(c);
            const double* s = &sums[static_cast<std::size_t>(c) * dim];
            for (int j = 0; j < dim; ++j) {
                const double next = s[j] / counts[c];
                const double dj = next - ctr[j];
                shift += dj * dj;
                ctr[j] = next;
            }
            max_shift = std::max(max_shift, std::sqrt(shift));
        }
        if (max_shift < 1e-6) break;
    }

    res.centroids.resize(centroids.size());
    for (std::size_t i = 0; i < centroids.size(); ++i)
        res.centroids[i] = static_cast<float>(centroids[i]);
    return res;
}

GateResult gate(const GatingModel& model, const Region& region, int region_index) {
    if (!model.fitted()) throw format_error("gate: unfitted gating model");
    const FeatureVector f = extract_features(region, model.extractor, region_index);
    const FeatureVector p = project(model.pca, f);
    const int dim = model.pca.out_dim;
    GateResult res;
    double best = std::numeric_limits<double>::infinity();
    for (int c = 0; c < model.k; ++c) {
        const float* ctr = &model.centroids[static_cast<std::size_t>(c) * dim];
        double d = 0.0;
        for (int j = 0; j < dim; ++j) {
            const double t = static_cast<double>(p[j]) - ctr[j];
            d += t * t;
        }
        if (d < best) {
            best = d;
            res.cluster = c;
        }
    }
    res.onehot.assign(model.k, 0.0f);
    res.onehot[res.cluster] = 1.0f;
    return res;
}

} // namespace smoe
