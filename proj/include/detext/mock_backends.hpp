#pragma once

#include "detext/geometry.hpp"
#include "detext/inference.hpp"
#include "detext/tracker_correction.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace detext {

/// Simulated per-call delay, uniform in [fixed_ms, fixed_ms + jitter_ms].
struct LatencyModel {
    double fixed_ms = 0.0;
    double jitter_ms = 0.0;

    /// Delay for a call identified by `key`; a pure function of (seed, key).
    [[nodiscard]] double delay_ms(std::uint64_t seed, std::uint64_t key) const;
    void wait(std::uint64_t seed, std::uint64_t key) const;

    friend bool operator==(const LatencyModel &, const LatencyModel &) = default;
};

struct ScriptedDetection {
    std::size_t frame = 0;
    BoundingBox box;
    std::string true_label;
    /// What the mock detector reports; differs from true_label for a confusion.
    std::string emitted_label;
    double confidence = 0.0;
    std::optional<std::size_t> track;

    friend bool operator==(const ScriptedDetection &, const ScriptedDetection &) = default;
};

/// Scripted ground truth for a synthetic video. The optional fields carry
/// defaults for the mock backends built from it.
struct MockScenario {
    std::uint64_t seed = 0;
    std::size_t frame_count = 0;
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<ScriptedDetection> script;
    /// Allowed (true, emitted) pairs. Empty means any confusion is allowed.
    std::vector<std::pair<std::string, std::string>> confusions;
    std::optional<std::vector<std::string>> labels;
    double accuracy = 1.0;
    LatencyModel detector_latency;
    LatencyModel classifier_latency;

    /// Frames 0..frame_count-1 with a small token payload.
    [[nodiscard]] std::vector<Frame> frames() const;
    [[nodiscard]] std::vector<const ScriptedDetection *> entries_for(std::size_t frame) const;
    /// Script entries as tracker output, labelled with the emitted label.
    /// Entries without a track id each become their own track, numbered
    /// after the largest explicit id.
    [[nodiscard]] std::vector<TrackedDetection> tracked_detections() const;
    /// `labels` if given, else every true and emitted label in the script, sorted.
    [[nodiscard]] std::vector<std::string> classifier_labels() const;

    friend bool operator==(const MockScenario &, const MockScenario &) = default;
};

/// Throws InvalidBox (with frame index) or MalformedScenario.
void validate_scenario(const MockScenario &scenario);

/// Scenario JSON: {"seed": n, "frames": m, "size": [w, h], "script": [{"frame": k,
/// "box": [x1, y1, x2, y2], "true": s, "emitted": s, "confidence": c, "track": t?}]}
/// plus optional "confusions", "labels", "accuracy" and
/// "latency": {"detector": {"fixed_ms", "jitter_ms"}, "classifier": {...}}.
[[nodiscard]] MockScenario parse_scenario(std::string_view text);
[[nodiscard]] MockScenario load_scenario(const std::filesystem::path &path);
[[nodiscard]] std::string dump_scenario(const MockScenario &scenario);
void save_scenario(const MockScenario &scenario, const std::filesystem::path &path);

/// Replays the script: frame k yields its scripted boxes under their emitted labels.
class MockDetector final : public DetectorInterface {
  public:
    MockDetector(MockScenario scenario, LatencyModel latency);

    /// Throws FrameOutOfRange.
    PredictionObject detect(const Frame &frame) override;

  private:
    MockScenario scenario_;
    LatencyModel latency_;
};

/// Matches the query box to the best-overlapping scripted box (IoU >= 0.5)
/// and answers with its true label with probability `accuracy`, otherwise
/// with a wrong label from the label set. The draw is seeded per
/// (frame, box), so repeated queries agree.
class MockClassifier final : public ClassifierInterface {
  public:
    static constexpr double kMatchIoU = 0.5;
    static constexpr double kCorrectScore = 0.9;
    static constexpr double kWrongScore = 0.6;

    /// Throws LabelSetMismatch if a confused true label is outside
    /// `label_set`; std::invalid_argument on a bad accuracy.
    MockClassifier(MockScenario scenario, std::vector<std::string> label_set, double accuracy, LatencyModel latency);

    /// Throws NoMatchingRegion.
    Classification classify(const Frame &frame, const BoundingBox &box) override;
    [[nodiscard]] std::vector<std::string> label_set() const override { return labels_; }

  private:
    MockScenario scenario_;
    std::vector<std::string> labels_;
    double accuracy_;
    LatencyModel latency_;
};

/// Detector and classifier configured from the scenario's own defaults.
[[nodiscard]] MockDetector make_mock_detector(const MockScenario &scenario);
[[nodiscard]] MockClassifier make_mock_classifier(const MockScenario &scenario);

} // namespace detext
