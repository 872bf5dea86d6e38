#include "detext/similarity.hpp"

#include "detext/errors.hpp"
#include "detext/feature_store.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace detext {

std::string_view to_string(DistanceMetric metric) noexcept {
    switch (metric) {
    case DistanceMetric::cosine:
        return "cosine";
    case DistanceMetric::l1:
        return "l1";
    case DistanceMetric::l2:
        return "l2";
    case DistanceMetric::squared_l2:
        return "squared_l2";
    }
    return "unknown";
}

DistanceMetric parse_metric(std::string_view name) {
    for (auto m : {DistanceMetric::cosine, DistanceMetric::l1, DistanceMetric::l2, DistanceMetric::squared_l2}) {
        if (name == to_string(m)) {
            return m;
        }
    }
    throw std::invalid_argument("unknown distance metric '" + std::string(name) + "'");
}

ClassCentroid compute_centroid(std::span<const std::vector<double>> vectors, std::string class_label) {
    if (vectors.empty()) {
        throw EmptyInput("cannot compute the centroid of an empty set");
    }
    const auto &anchor = vectors.front();
    const std::size_t dim = anchor.size();
    for (const auto &v : vectors) {
        if (v.size() != dim) {
            throw DimensionMismatch(dim, v.size());
        }
    }

    const auto n = static_cast<double>(vectors.size());
    std::vector<double> offset(dim, 0.0);
    for (const auto &v : vectors) {
        for (std::size_t k = 0; k < dim; ++k) {
            offset[k] += v[k] - anchor[k];
        }
    }
    ClassCentroid out;
    out.class_label = std::move(class_label);
    out.sample_count = vectors.size();
    out.centroid.resize(dim);
    for (std::size_t k = 0; k < dim; ++k) {
        out.centroid[k] = anchor[k] + offset[k] / n;
    }

    double inertia = 0.0;
    for (const auto &v : vectors) {
        for (std::size_t k = 0; k < dim; ++k) {
            const double d = v[k] - out.centroid[k];
            inertia += d * d;
        }
    }
    out.inertia = inertia;
    return out;
}

std::vector<ClassCentroid> compute_centroids(const FeatureStore &store, const std::vector<std::string> &class_labels) {
    const auto labels = class_labels.empty() ? store.class_labels() : class_labels;
    std::vector<ClassCentroid> out;
    out.reserve(labels.size());
    std::vector<std::vector<double>> vectors;
    for (const auto &label : labels) {
        const auto &recs = store.records(label);
        vectors.clear();
        vectors.reserve(recs.size());
        for (const auto &r : recs) {
            vectors.push_back(r.vector);
        }
        out.push_back(compute_centroid(vectors, label));
    }
    return out;
}

double distance(std::span<const double> a, std::span<const double> b, DistanceMetric metric) {
    if (a.size() != b.size()) {
        throw DimensionMismatch(a.size(), b.size());
    }
    switch (metric) {
    case DistanceMetric::cosine: {
        double dot = 0.0;
        double na = 0.0;
        double nb = 0.0;
        for (std::size_t k = 0; k < a.size(); ++k) {
            dot += a[k] * b[k];
            na += a[k] * a[k];
            nb += b[k] * b[k];
        }
        if (na == 0.0 || nb == 0.0) {
            throw ZeroVector("<anonymous>", na == 0.0 ? "a" : "b");
        }
        // sqrt of the product, not product of roots: identical inputs then give exactly 0.
        const double d = 1.0 - dot / std::sqrt(na * nb);
        return std::clamp(d, 0.0, 2.0);
    }
    case DistanceMetric::l1: {
        double s = 0.0;
        for (std::size_t k = 0; k < a.size(); ++k) {
            s += std::abs(a[k] - b[k]);
        }
        return s;
    }
    case DistanceMetric::l2:
    case DistanceMetric::squared_l2: {
        double s = 0.0;
        for (std::size_t k = 0; k < a.size(); ++k) {
            const double d = a[k] - b[k];
            s += d * d;
        }
        return metric == DistanceMetric::l2 ? std::sqrt(s) : s;
    }
    }
    throw std::invalid_argument("unknown distance metric");
}

SimilarityMatrix::SimilarityMatrix(std::vector<std::string> labels, DistanceMetric metric)
    : labels_(std::move(labels)), metric_(metric), distances_(labels_.size() * labels_.size(), 0.0) {
    std::set<std::string_view> seen;
    for (const auto &l : labels_) {
        if (!seen.insert(l).second) {
            throw DuplicateLabel(l);
        }
    }
}

std::optional<std::size_t> SimilarityMatrix::index_of(std::string_view label) const {
    auto it = std::find(labels_.begin(), labels_.end(), label);
    if (it == labels_.end()) {
        return std::nullopt;
    }
    return static_cast<std::size_t>(it - labels_.begin());
}

double SimilarityMatrix::at(std::size_t i, std::size_t j) const {
    if (i >= size() || j >= size()) {
        throw std::out_of_range("similarity matrix index out of range");
    }
    return distances_[i * size() + j];
}

double SimilarityMatrix::at(std::string_view a, std::string_view b) const {
    const auto i = index_of(a);
    if (!i) {
        throw UnknownClass(std::string(a));
    }
    const auto j = index_of(b);
    if (!j) {
        throw UnknownClass(std::string(b));
    }
    return at(*i, *j);
}

void SimilarityMatrix::set(std::size_t i, std::size_t j, double value) {
    if (i >= size() || j >= size()) {
        throw std::out_of_range("similarity matrix index out of range");
    }
    if (i == j) {
        throw std::invalid_argument("diagonal of a similarity matrix is fixed at zero");
    }
    if (!std::isfinite(value) || value < 0.0) {
        throw std::invalid_argument("distances must be finite and non-negative");
    }
    distances_[i * size() + j] = value;
    distances_[j * size() + i] = value;
}

void SimilarityMatrix::set(std::string_view a, std::string_view b, double value) {
    const auto i = index_of(a);
    if (!i) {
        throw UnknownClass(std::string(a));
    }
    const auto j = index_of(b);
    if (!j) {
        throw UnknownClass(std::string(b));
    }
    set(*i, *j, value);
}

SimilarityMatrix similarity_matrix(std::span<const ClassCentroid> centroids, DistanceMetric metric) {
    if (centroids.size() < 2) {
        throw EmptyInput("a similarity matrix needs at least two centroids");
    }
    std::vector<std::string> labels;
    labels.reserve(centroids.size());
    for (const auto &c : centroids) {
        labels.push_back(c.class_label);
    }
    SimilarityMatrix matrix(std::move(labels), metric);

    const std::size_t dim = centroids.front().centroid.size();
    for (const auto &c : centroids) {
        if (c.centroid.size() != dim) {
            throw DimensionMismatch(dim, c.centroid.size());
        }
    }
    for (std::size_t i = 0; i < centroids.size(); ++i) {
        for (std::size_t j = i + 1; j < centroids.size(); ++j) {
            matrix.set(i, j, distance(centroids[i].centroid, centroids[j].centroid, metric));
        }
    }
    return matrix;
}

bool CompatibilityMap::precondition_met() const {
    return std::all_of(entries.begin(), entries.end(), [](const auto &e) { return !e.second.empty(); });
}

std::vector<std::string> CompatibilityMap::unsatisfied_extensions() const {
    std::vector<std::string> out;
    for (const auto &[ext, bases] : entries) {
        if (bases.empty()) {
            out.push_back(ext);
        }
    }
    return out;
}

bool CompatibilityMap::is_compatible_base(std::string_view label) const {
    for (const auto &[ext, bases] : entries) {
        for (const auto &b : bases) {
            if (b.label == label) {
                return true;
            }
        }
    }
    return false;
}

std::vector<std::string> CompatibilityMap::extension_classes() const {
    std::vector<std::string> out;
    out.reserve(entries.size());
    for (const auto &[ext, bases] : entries) {
        out.push_back(ext);
    }
    return out;
}

std::vector<std::string> CompatibilityMap::compatible_bases() const {
    std::set<std::string> out;
    for (const auto &[ext, bases] : entries) {
        for (const auto &b : bases) {
            out.insert(b.label);
        }
    }
    return {out.begin(), out.end()};
}

std::vector<std::string> CompatibilityMap::required_labels() const {
    std::set<std::string> out;
    for (const auto &[ext, bases] : entries) {
        out.insert(ext);
        for (const auto &b : bases) {
            out.insert(b.label);
        }
    }
    return {out.begin(), out.end()};
}

CompatibilityMap select_compatible(const SimilarityMatrix &matrix, const std::vector<std::string> &base_classes,
                                   const std::vector<std::string> &extension_classes, double threshold) {
    if (!(threshold > 0.0)) {
        throw NonPositiveThreshold(threshold);
    }
    for (const auto *group : {&base_classes, &extension_classes}) {
        for (const auto &label : *group) {
            if (!matrix.index_of(label)) {
                throw UnknownClass(label);
            }
        }
    }
    const std::set<std::string> bases(base_classes.begin(), base_classes.end());
    for (const auto &ext : extension_classes) {
        if (bases.count(ext) != 0) {
            throw OverlappingSets(ext);
        }
    }

    CompatibilityMap result;
    result.threshold = threshold;
    for (const auto &ext : extension_classes) {
        auto &list = result.entries[ext];
        for (const auto &base : bases) {
            const double d = matrix.at(ext, base);
            if (d < threshold) {
                list.push_back({base, d});
            }
        }
        std::sort(list.begin(), list.end(), [](const CompatibleBase &x, const CompatibleBase &y) {
            return x.distance != y.distance ? x.distance < y.distance : x.label < y.label;
        });
    }
    return result;
}

} // namespace detext
