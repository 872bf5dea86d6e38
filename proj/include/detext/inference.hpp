#pragma once

#include "detext/errors.hpp"
#include "detext/geometry.hpp"
#include "detext/pipeline_slot.hpp"
#include "detext/similarity.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace detext {

struct Classification {
    std::string label;
    double confidence = 0.0;

    friend bool operator==(const Classification &, const Classification &) = default;
};

/// Object detector producing one prediction per frame. Implementations must
/// be deterministic in the frame payload; they are only ever called from one
/// worker at a time.
class DetectorInterface {
  public:
    virtual ~DetectorInterface() = default;
    virtual PredictionObject detect(const Frame &frame) = 0;
};

/// Region classifier trained on the extension classes and their compatible
/// base classes.
class ClassifierInterface {
  public:
    virtual ~ClassifierInterface() = default;
    virtual Classification classify(const Frame &frame, const BoundingBox &box) = 0;
    [[nodiscard]] virtual std::vector<std::string> label_set() const = 0;
};

/// Throws LabelSetMismatch if the classifier cannot emit every extension and
/// compatible base label of `compat`.
void check_label_coverage(const ClassifierInterface &classifier, const CompatibilityMap &compat);

/// Rewrites detections whose label is a compatible base class with the
/// classifier's verdict on that region. Keeps running counts across frames.
class PredictionCorrector {
  public:
    /// Throws LabelSetMismatch.
    PredictionCorrector(ClassifierInterface &classifier, const CompatibilityMap &compat, double pad_fraction = 0.0);

    /// Throws FrameMismatch, InvalidBox, LabelSetMismatch (label outside the
    /// classifier's own set), or whatever the classifier throws.
    PredictionObject correct(const Frame &frame, PredictionObject prediction);

    [[nodiscard]] std::size_t invocations() const noexcept { return invocations_; }
    [[nodiscard]] std::size_t corrected() const noexcept { return corrected_; }

  private:
    ClassifierInterface &classifier_;
    const CompatibilityMap &compat_;
    std::vector<std::string> labels_;
    double pad_fraction_;
    std::size_t invocations_ = 0;
    std::size_t corrected_ = 0;
};

/// One-shot form of PredictionCorrector::correct.
PredictionObject correct_prediction(const Frame &frame, const PredictionObject &prediction,
                                    ClassifierInterface &classifier, const CompatibilityMap &compat,
                                    double pad_fraction = 0.0);

struct PipelineStats {
    std::size_t frames_processed = 0;
    std::size_t total_detections = 0;
    std::size_t classifier_invocations = 0;
    std::size_t detections_corrected = 0;
    double wall_time = 0.0;      // seconds
    double detector_busy = 0.0;  // seconds
    double corrector_busy = 0.0; // seconds
};

struct RunOptions {
    double pad_fraction = 0.0;
};

struct RunResult {
    /// In frame order. On failure holds every frame finished before the failing one.
    std::vector<PredictionObject> predictions;
    PipelineStats stats;
    SlotCounters slot;
    std::optional<StageFailure> failure;
};

/// Detect then correct each frame on the calling thread. Serves as the
/// reference the parallel runner must reproduce.
/// Throws LabelSetMismatch and FrameMismatch (non-consecutive indices) up front;
/// stage errors are reported through RunResult::failure.
RunResult run_sequential(std::span<const Frame> frames, DetectorInterface &detector, ClassifierInterface &classifier,
                         const CompatibilityMap &compat, const RunOptions &options = {});

/// Detector and corrector on two workers, one frame apart, exchanging
/// (frame, prediction) through a single PipelineSlot. Results are identical
/// to run_sequential; only timing differs.
RunResult run_dual_parallel(std::span<const Frame> frames, DetectorInterface &detector,
                            ClassifierInterface &classifier, const CompatibilityMap &compat,
                            const RunOptions &options = {});

} // namespace detext
