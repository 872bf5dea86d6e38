#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace detext {

class FeatureStore;

struct ClassCentroid {
    std::string class_label;
    std::vector<double> centroid;
    /// Sum of squared Euclidean distances of the class vectors to the centroid.
    double inertia = 0.0;
    std::size_t sample_count = 0;
};

enum class DistanceMetric { cosine, l1, l2, squared_l2 };

[[nodiscard]] std::string_view to_string(DistanceMetric metric) noexcept;
/// Accepts "cosine", "l1", "l2", "squared_l2". Throws std::invalid_argument.
[[nodiscard]] DistanceMetric parse_metric(std::string_view name);

/// Componentwise mean, inertia and count of a non-empty set of equal-length
/// vectors. The mean is accumulated relative to the first vector, so n copies
/// of v give back exactly v with zero inertia.
/// Throws EmptyInput, DimensionMismatch.
[[nodiscard]] ClassCentroid compute_centroid(std::span<const std::vector<double>> vectors, std::string class_label = {});

/// Centroid of every class in the store (or of the listed classes, in that order).
[[nodiscard]] std::vector<ClassCentroid> compute_centroids(const FeatureStore &store,
                                                           const std::vector<std::string> &class_labels = {});

/// Cosine distance is 1 - a.b / (|a| |b|), clamped to [0, 2].
/// Throws DimensionMismatch; ZeroVector for cosine on an all-zero input.
[[nodiscard]] double distance(std::span<const double> a, std::span<const double> b, DistanceMetric metric);

/// Symmetric, zero-diagonal matrix of pairwise class distances.
class SimilarityMatrix {
  public:
    /// All distances start at zero. Throws DuplicateLabel.
    SimilarityMatrix(std::vector<std::string> labels, DistanceMetric metric);

    [[nodiscard]] const std::vector<std::string> &labels() const noexcept { return labels_; }
    [[nodiscard]] DistanceMetric metric() const noexcept { return metric_; }
    [[nodiscard]] std::size_t size() const noexcept { return labels_.size(); }

    [[nodiscard]] std::optional<std::size_t> index_of(std::string_view label) const;
    [[nodiscard]] double at(std::size_t i, std::size_t j) const;
    /// Throws UnknownClass.
    [[nodiscard]] double at(std::string_view a, std::string_view b) const;

    /// Writes both (i, j) and (j, i). Off-diagonal only; the value must be
    /// finite and non-negative.
    void set(std::size_t i, std::size_t j, double value);
    void set(std::string_view a, std::string_view b, double value);

    friend bool operator==(const SimilarityMatrix &, const SimilarityMatrix &) = default;

  private:
    std::vector<std::string> labels_;
    DistanceMetric metric_;
    std::vector<double> distances_;
};

/// Pairwise distances between centroids, each unordered pair evaluated once.
/// Throws EmptyInput (fewer than two centroids), DuplicateLabel, DimensionMismatch.
[[nodiscard]] SimilarityMatrix similarity_matrix(std::span<const ClassCentroid> centroids, DistanceMetric metric);

inline constexpr double kDefaultSimilarityThreshold = 0.05;

struct CompatibleBase {
    std::string label;
    double distance = 0.0;

    friend bool operator==(const CompatibleBase &, const CompatibleBase &) = default;
};

/// Extension classes and the base classes a detector is likely to confuse
/// them with. Each list holds only bases strictly below `threshold`, sorted by
/// ascending distance then label. An empty list marks an extension class the
/// detector has no confusable base for, so the correction scheme cannot cover it.
struct CompatibilityMap {
    double threshold = kDefaultSimilarityThreshold;
    std::map<std::string, std::vector<CompatibleBase>> entries;

    [[nodiscard]] bool precondition_met() const;
    [[nodiscard]] std::vector<std::string> unsatisfied_extensions() const;
    [[nodiscard]] bool is_compatible_base(std::string_view label) const;
    [[nodiscard]] std::vector<std::string> extension_classes() const;
    /// Distinct compatible base labels across all entries, sorted.
    [[nodiscard]] std::vector<std::string> compatible_bases() const;
    /// Union of extension and compatible base labels, sorted. This is the
    /// label set the correcting classifier must be able to emit.
    [[nodiscard]] std::vector<std::string> required_labels() const;

    friend bool operator==(const CompatibilityMap &, const CompatibilityMap &) = default;
};

/// Throws UnknownClass, OverlappingSets, NonPositiveThreshold.
[[nodiscard]] CompatibilityMap select_compatible(const SimilarityMatrix &matrix,
                                                 const std::vector<std::string> &base_classes,
                                                 const std::vector<std::string> &extension_classes,
                                                 double threshold = kDefaultSimilarityThreshold);

} // namespace detext
