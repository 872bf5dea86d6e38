#include "detext/tracker_correction.hpp"

#include "detext/errors.hpp"

#include <algorithm>
#include <set>

namespace detext {

namespace {

std::map<std::size_t, std::vector<const TrackedDetection *>>
group_by_track(const std::vector<TrackedDetection> &detections) {
    std::map<std::size_t, std::vector<const TrackedDetection *>> tracks;
    std::set<std::pair<std::size_t, std::size_t>> seen;
    for (const auto &d : detections) {
        if (!seen.emplace(d.track_id, d.frame_index).second) {
            throw DuplicateFramePerTrack(d.track_id, d.frame_index);
        }
        tracks[d.track_id].push_back(&d);
    }
    return tracks;
}

BestCrop best_of(const std::vector<const TrackedDetection *> &track) {
    const TrackedDetection *best = track.front();
    for (const auto *d : track) {
        const double area = d->box.area();
        if (area > best->box.area() || (area == best->box.area() && d->frame_index < best->frame_index)) {
            best = d;
        }
    }
    return {best->frame_index, best->box};
}

} // namespace

std::map<std::size_t, BestCrop> best_crop_per_track(const std::vector<TrackedDetection> &detections) {
    std::map<std::size_t, BestCrop> out;
    for (const auto &[id, track] : group_by_track(detections)) {
        out.emplace(id, best_of(track));
    }
    return out;
}

std::string majority_label(const std::vector<const TrackedDetection *> &track) {
    std::map<std::string, std::size_t> votes;
    for (const auto *d : track) {
        ++votes[d->class_label];
    }
    std::size_t top = 0;
    for (const auto &[label, n] : votes) {
        top = std::max(top, n);
    }
    const TrackedDetection *pick = nullptr;
    for (const auto *d : track) {
        if (votes[d->class_label] != top) {
            continue;
        }
        if (pick == nullptr || d->confidence > pick->confidence ||
            (d->confidence == pick->confidence && d->frame_index < pick->frame_index)) {
            pick = d;
        }
    }
    return pick->class_label;
}

TrackCorrectionResult correct_tracks(const std::vector<TrackedDetection> &detections, const FrameLookup &frames,
                                     ClassifierInterface &classifier, const CompatibilityMap &compat,
                                     double pad_fraction) {
    check_label_coverage(classifier, compat);
    const auto labels = classifier.label_set();
    const auto tracks = group_by_track(detections);

    TrackCorrectionResult result;
    result.corrected = detections;
    result.tracks_examined = tracks.size();

    std::map<std::size_t, Classification> verdicts;
    for (const auto &[id, track] : tracks) {
        std::string label = majority_label(track);
        if (!compat.is_compatible_base(label)) {
            continue;
        }
        const BestCrop crop = best_of(track);
        const Frame *frame = frames ? frames(crop.frame_index) : nullptr;
        if (frame == nullptr) {
            throw MissingFrame(crop.frame_index);
        }
        Classification verdict = classifier.classify(*frame, crop_box(*frame, crop.box, pad_fraction));
        ++result.classifier_invocations;
        if (std::find(labels.begin(), labels.end(), verdict.label) == labels.end()) {
            throw LabelSetMismatch("classifier returned label '" + verdict.label + "' outside its label set");
        }
        result.per_track_decision[id] = {crop.frame_index, std::move(label), verdict.label, verdict.confidence};
        verdicts.emplace(id, std::move(verdict));
    }

    for (auto &d : result.corrected) {
        auto it = verdicts.find(d.track_id);
        if (it == verdicts.end()) {
            continue;
        }
        d.class_label = it->second.label;
        d.confidence = it->second.confidence;
        d.corrected = true;
    }
    return result;
}

} // namespace detext
