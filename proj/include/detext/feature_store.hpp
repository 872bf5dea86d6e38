#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace detext {

inline constexpr std::size_t kDefaultFeatureDim = 2048;

struct FeatureRecord {
    std::string class_label;
    std::string sample_id;
    std::vector<double> vector;

    friend bool operator==(const FeatureRecord &, const FeatureRecord &) = default;
};

/// Labeled feature vectors grouped by class. Records keep their insertion
/// order within a class. Once built the store is only read, so concurrent
/// readers need no synchronization.
class FeatureStore {
  public:
    explicit FeatureStore(std::size_t dimension = kDefaultFeatureDim);

    /// Validates and appends a record. Throws DimensionMismatch, ZeroVector,
    /// or std::invalid_argument (empty label, duplicate id, non-finite value).
    void add(FeatureRecord record);

    [[nodiscard]] std::size_t dimension() const noexcept { return dimension_; }
    [[nodiscard]] bool empty() const noexcept { return classes_.empty(); }
    [[nodiscard]] bool contains(const std::string &class_label) const;
    [[nodiscard]] std::size_t record_count() const noexcept;
    [[nodiscard]] std::vector<std::string> class_labels() const;

    /// Throws UnknownClass.
    [[nodiscard]] const std::vector<FeatureRecord> &records(const std::string &class_label) const;
    [[nodiscard]] const std::map<std::string, std::vector<FeatureRecord>> &classes() const noexcept {
        return classes_;
    }

    friend bool operator==(const FeatureStore &, const FeatureStore &) = default;

  private:
    std::size_t dimension_;
    std::map<std::string, std::vector<FeatureRecord>> classes_;
};

struct ValidationReport {
    std::size_t dimension = 0;
    std::vector<std::string> missing_classes;
    std::map<std::string, std::size_t> sample_counts;

    [[nodiscard]] bool ok() const noexcept { return missing_classes.empty(); }
    friend bool operator==(const ValidationReport &, const ValidationReport &) = default;
};

/// Reads one JSON object per line: {"class": s, "id": s, "vector": [...]}.
/// Blank lines are skipped. Without `expected_dim` the first record fixes D.
FeatureStore load_feature_store(const std::filesystem::path &path,
                                std::optional<std::size_t> expected_dim = std::nullopt);

/// Writes the store in the same line format, classes in label order.
void save_feature_store(const FeatureStore &store, const std::filesystem::path &path);

ValidationReport validate_store(const FeatureStore &store, const std::vector<std::string> &required_classes);

} // namespace detext
