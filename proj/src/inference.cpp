#include "detext/inference.hpp"

#include <algorithm>
#include <chrono>
#include <exception>
#include <thread>

namespace detext {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

void check_stream(std::span<const Frame> frames) {
    for (std::size_t k = 0; k < frames.size(); ++k) {
        if (frames[k].index != k) {
            throw FrameMismatch("frame at position " + std::to_string(k) + " has index " +
                                std::to_string(frames[k].index));
        }
    }
}

PredictionObject detect_checked(DetectorInterface &detector, const Frame &frame) {
    PredictionObject prediction = detector.detect(frame);
    if (prediction.frame_index != frame.index) {
        throw FrameMismatch("detector returned prediction for frame " + std::to_string(prediction.frame_index) +
                            " when given frame " + std::to_string(frame.index));
    }
    return prediction;
}

std::string describe(std::exception_ptr error) {
    try {
        std::rethrow_exception(error);
    } catch (const std::exception &e) {
        return e.what();
    } catch (...) {
        return "unknown error";
    }
}

void finish_stats(RunResult &result, const PredictionCorrector &corrector, Clock::time_point start) {
    result.stats.frames_processed = result.predictions.size();
    result.stats.total_detections = 0;
    for (const auto &p : result.predictions) {
        result.stats.total_detections += p.detections.size();
    }
    result.stats.classifier_invocations = corrector.invocations();
    result.stats.detections_corrected = corrector.corrected();
    result.stats.wall_time = seconds_since(start);
}

} // namespace

void check_label_coverage(const ClassifierInterface &classifier, const CompatibilityMap &compat) {
    const auto available = classifier.label_set();
    std::vector<std::string> missing;
    for (const auto &label : compat.required_labels()) {
        if (std::find(available.begin(), available.end(), label) == available.end()) {
            missing.push_back(label);
        }
    }
    if (!missing.empty()) {
        std::string msg = "classifier cannot produce required labels:";
        for (const auto &m : missing) {
            msg += " " + m;
        }
        throw LabelSetMismatch(msg);
    }
}

PredictionCorrector::PredictionCorrector(ClassifierInterface &classifier, const CompatibilityMap &compat,
                                         double pad_fraction)
    : classifier_(classifier), compat_(compat), labels_(classifier.label_set()), pad_fraction_(pad_fraction) {
    check_label_coverage(classifier, compat);
    if (!(pad_fraction >= 0.0)) {
        throw std::invalid_argument("pad fraction must be non-negative");
    }
}

PredictionObject PredictionCorrector::correct(const Frame &frame, PredictionObject prediction) {
    if (prediction.frame_index != frame.index) {
        throw FrameMismatch("prediction for frame " + std::to_string(prediction.frame_index) +
                            " paired with frame " + std::to_string(frame.index));
    }
    for (auto &det : prediction.detections) {
        validate_box(det.box, frame);
        if (!compat_.is_compatible_base(det.class_label)) {
            continue;
        }
        const BoundingBox region = crop_box(frame, det.box, pad_fraction_);
        Classification verdict = classifier_.classify(frame, region);
        ++invocations_;
        if (std::find(labels_.begin(), labels_.end(), verdict.label) == labels_.end()) {
            throw LabelSetMismatch("classifier returned label '" + verdict.label + "' outside its label set");
        }
        if (!(verdict.confidence >= 0.0 && verdict.confidence <= 1.0)) {
            throw Error("classifier confidence " + std::to_string(verdict.confidence) + " outside [0, 1]");
        }
        det.class_label = std::move(verdict.label);
        det.confidence = verdict.confidence;
        det.corrected = true;
        ++corrected_;
    }
    return prediction;
}

PredictionObject correct_prediction(const Frame &frame, const PredictionObject &prediction,
                                    ClassifierInterface &classifier, const CompatibilityMap &compat,
                                    double pad_fraction) {
    PredictionCorrector corrector(classifier, compat, pad_fraction);
    return corrector.correct(frame, prediction);
}

RunResult run_sequential(std::span<const Frame> frames, DetectorInterface &detector, ClassifierInterface &classifier,
                         const CompatibilityMap &compat, const RunOptions &options) {
    check_stream(frames);
    PredictionCorrector corrector(classifier, compat, options.pad_fraction);
    RunResult result;
    result.predictions.reserve(frames.size());
    const auto start = Clock::now();

    for (const auto &frame : frames) {
        PredictionObject prediction;
        auto t0 = Clock::now();
        try {
            prediction = detect_checked(detector, frame);
        } catch (...) {
            result.failure.emplace("detector", frame.index, describe(std::current_exception()));
            break;
        }
        result.stats.detector_busy += seconds_since(t0);

        t0 = Clock::now();
        try {
            result.predictions.push_back(corrector.correct(frame, std::move(prediction)));
        } catch (...) {
            result.failure.emplace("corrector", frame.index, describe(std::current_exception()));
            break;
        }
        result.stats.corrector_busy += seconds_since(t0);
    }
    finish_stats(result, corrector, start);
    return result;
}

RunResult run_dual_parallel(std::span<const Frame> frames, DetectorInterface &detector,
                            ClassifierInterface &classifier, const CompatibilityMap &compat,
                            const RunOptions &options) {
    check_stream(frames);
    PredictionCorrector corrector(classifier, compat, options.pad_fraction);
    RunResult result;
    result.predictions.reserve(frames.size());
    PipelineSlot slot;
    std::optional<StageFailure> detector_failure;
    double detector_busy = 0.0;
    const auto start = Clock::now();

    std::thread detector_worker([&] {
        for (const auto &frame : frames) {
            PredictionObject prediction;
            const auto t0 = Clock::now();
            try {
                prediction = detect_checked(detector, frame);
            } catch (...) {
                detector_failure.emplace("detector", frame.index, describe(std::current_exception()));
                break;
            }
            detector_busy += seconds_since(t0);
            if (!slot.put(frame, std::move(prediction))) {
                break;
            }
        }
        slot.close();
    });

    // The calling thread is the corrector worker; it alone appends to the
    // output, so predictions leave in the order they were produced.
    while (auto item = slot.take()) {
        const auto t0 = Clock::now();
        try {
            result.predictions.push_back(corrector.correct(item->frame, std::move(item->prediction)));
        } catch (...) {
            result.failure.emplace("corrector", item->frame.index, describe(std::current_exception()));
            slot.cancel();
            break;
        }
        result.stats.corrector_busy += seconds_since(t0);
    }
    detector_worker.join();

    if (!result.failure && detector_failure) {
        result.failure = std::move(detector_failure);
    }
    result.stats.detector_busy = detector_busy;
    result.slot = slot.counters();
    finish_stats(result, corrector, start);
    return result;
}

} // namespace detext
