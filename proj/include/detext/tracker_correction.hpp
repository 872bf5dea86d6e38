#pragma once

#include "detext/geometry.hpp"
#include "detext/inference.hpp"
#include "detext/similarity.hpp"

#include <cstddef>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace detext {

struct TrackedDetection {
    std::size_t frame_index = 0;
    std::size_t track_id = 0;
    BoundingBox box;
    std::string class_label;
    double confidence = 0.0;
    bool corrected = false;

    friend bool operator==(const TrackedDetection &, const TrackedDetection &) = default;
};

struct BestCrop {
    std::size_t frame_index = 0;
    BoundingBox box;

    friend bool operator==(const BestCrop &, const BestCrop &) = default;
};

struct TrackDecision {
    std::size_t frame_index = 0;
    std::string old_label;
    std::string new_label;
    double confidence = 0.0;

    friend bool operator==(const TrackDecision &, const TrackDecision &) = default;
};

struct TrackCorrectionResult {
    /// Same order as the input.
    std::vector<TrackedDetection> corrected;
    std::size_t tracks_examined = 0;
    std::size_t classifier_invocations = 0;
    std::map<std::size_t, TrackDecision> per_track_decision;
};

/// Returns nullptr when the frame is unavailable.
using FrameLookup = std::function<const Frame *(std::size_t frame_index)>;

/// Largest-area detection of each track; equal areas resolve to the earliest frame.
/// Throws DuplicateFramePerTrack.
[[nodiscard]] std::map<std::size_t, BestCrop> best_crop_per_track(const std::vector<TrackedDetection> &detections);

/// Label a track is judged by: the most frequent label, ties going to the
/// tied label carried by the most confident detection (earliest frame on
/// equal confidence). `track` must be non-empty.
[[nodiscard]] std::string majority_label(const std::vector<const TrackedDetection *> &track);

/// Classifies each compatible track once on its best crop and writes the
/// verdict onto every detection of that track.
/// Throws DuplicateFramePerTrack, MissingFrame, LabelSetMismatch, InvalidBox.
[[nodiscard]] TrackCorrectionResult correct_tracks(const std::vector<TrackedDetection> &detections,
                                                   const FrameLookup &frames, ClassifierInterface &classifier,
                                                   const CompatibilityMap &compat, double pad_fraction = 0.0);

} // namespace detext
