#pragma once

#include "detext/geometry.hpp"
#include "detext/inference.hpp"
#include "detext/similarity.hpp"
#include "detext/tracker_correction.hpp"

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace detext {

// Similarity outputs.

/// Header `class,<l1>,<l2>,...`, one row per class, six decimals.
void write_matrix_csv(std::ostream &out, const SimilarityMatrix &matrix);

/// {"threshold": t, "entries": {ext: [{"base": b, "distance": d}, ...]}}
[[nodiscard]] std::string compat_to_json(const CompatibilityMap &compat);
/// Rejects maps that break the CompatibilityMap invariants.
/// Throws Error, NonPositiveThreshold.
[[nodiscard]] CompatibilityMap compat_from_json(std::string_view text);
[[nodiscard]] CompatibilityMap load_compat(const std::filesystem::path &path);

/// [{"class": s, "centroid": [...], "inertia": x, "count": n}, ...]
[[nodiscard]] std::string centroids_to_json(std::span<const ClassCentroid> centroids);

// Pipeline outputs.

/// One line: {"frame": k, "detections": [{"box": [...], "label", "confidence", "corrected"}]}
[[nodiscard]] std::string prediction_to_jsonl(const PredictionObject &prediction);
void write_predictions(std::ostream &out, std::span<const PredictionObject> predictions);
[[nodiscard]] std::vector<PredictionObject> read_predictions(std::istream &in);

/// PipelineStats as JSON, times in seconds rounded to milliseconds.
[[nodiscard]] std::string stats_to_json(const PipelineStats &stats, const std::string &mode);

// Tracker correction.

/// {"frame": k, "track": t, "box": [...], "label": s, "confidence": c} per line;
/// an optional "corrected" is accepted so corrected output can be read back.
/// Throws MalformedRecord with the line number.
[[nodiscard]] std::vector<TrackedDetection> read_tracked_detections(std::istream &in);
[[nodiscard]] std::vector<TrackedDetection> load_tracked_detections(const std::filesystem::path &path);
void write_tracked_detections(std::ostream &out, std::span<const TrackedDetection> detections);
[[nodiscard]] std::string track_report_to_json(const TrackCorrectionResult &result);

} // namespace detext
