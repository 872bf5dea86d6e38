#include "detext/serialization.hpp"

#include "detext/errors.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace detext {

namespace {

using ojson = nlohmann::ordered_json;
using nlohmann::json;

double round_ms(double seconds) { return std::round(seconds * 1000.0) / 1000.0; }

ojson box_json(const BoundingBox &b) { return ojson::array({b.x1, b.y1, b.x2, b.y2}); }

BoundingBox box_from(const json &j) {
    if (!j.is_array() || j.size() != 4) {
        throw std::invalid_argument("box must be [x1, y1, x2, y2]");
    }
    for (const auto &v : j) {
        if (!v.is_number()) {
            throw std::invalid_argument("box coordinates must be numbers");
        }
    }
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
}

std::string read_all(const std::filesystem::path &path, const char *what) {
    std::ifstream in(path);
    if (!in) {
        throw Error(std::string("cannot open ") + what + " '" + path.string() + "'");
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

bool blank(const std::string &line) {
    return line.find_first_not_of(" \t\r\n") == std::string::npos;
}

} // namespace

void write_matrix_csv(std::ostream &out, const SimilarityMatrix &matrix) {
    out << "class";
    for (const auto &l : matrix.labels()) {
        out << ',' << l;
    }
    out << '\n';
    char buf[64];
    for (std::size_t i = 0; i < matrix.size(); ++i) {
        out << matrix.labels()[i];
        for (std::size_t j = 0; j < matrix.size(); ++j) {
            std::snprintf(buf, sizeof buf, "%.6f", matrix.at(i, j));
            out << ',' << buf;
        }
        out << '\n';
    }
}

std::string compat_to_json(const CompatibilityMap &compat) {
    ojson root;
    root["threshold"] = compat.threshold;
    ojson entries = ojson::object();
    for (const auto &[ext, bases] : compat.entries) {
        ojson list = ojson::array();
        for (const auto &b : bases) {
            list.push_back(ojson{{"base", b.label}, {"distance", b.distance}});
        }
        entries[ext] = std::move(list);
    }
    root["entries"] = std::move(entries);
    return root.dump(2);
}

CompatibilityMap compat_from_json(std::string_view text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error &e) {
        throw Error(std::string("compatibility map: invalid JSON: ") + e.what());
    }
    if (!root.is_object() || !root.contains("threshold") || !root["threshold"].is_number() ||
        !root.contains("entries") || !root["entries"].is_object()) {
        throw Error("compatibility map: expected {\"threshold\": t, \"entries\": {...}}");
    }
    CompatibilityMap compat;
    compat.threshold = root["threshold"].get<double>();
    if (!(compat.threshold > 0.0)) {
        throw NonPositiveThreshold(compat.threshold);
    }
    for (const auto &[ext, list] : root["entries"].items()) {
        if (!list.is_array()) {
            throw Error("compatibility map: entry '" + ext + "' must be an array");
        }
        auto &bases = compat.entries[ext];
        for (const auto &item : list) {
            if (!item.is_object() || !item.contains("base") || !item["base"].is_string() ||
                !item.contains("distance") || !item["distance"].is_number()) {
                throw Error("compatibility map: entries need {\"base\": s, \"distance\": d}");
            }
            CompatibleBase b{item["base"].get<std::string>(), item["distance"].get<double>()};
            if (!(b.distance >= 0.0 && b.distance < compat.threshold)) {
                throw Error("compatibility map: base '" + b.label + "' of '" + ext +
                            "' is not strictly below the threshold");
            }
            if (!bases.empty()) {
                const auto &prev = bases.back();
                if (prev.distance > b.distance || (prev.distance == b.distance && prev.label >= b.label)) {
                    throw Error("compatibility map: bases of '" + ext + "' are not sorted by distance");
                }
            }
            bases.push_back(std::move(b));
        }
    }
    for (const auto &[ext, bases] : compat.entries) {
        if (compat.is_compatible_base(ext)) {
            throw OverlappingSets(ext);
        }
    }
    return compat;
}

CompatibilityMap load_compat(const std::filesystem::path &path) {
    return compat_from_json(read_all(path, "compatibility map"));
}

std::string centroids_to_json(std::span<const ClassCentroid> centroids) {
    ojson out = ojson::array();
    for (const auto &c : centroids) {
        out.push_back(ojson{{"class", c.class_label},
                            {"centroid", c.centroid},
                            {"inertia", c.inertia},
                            {"count", c.sample_count}});
    }
    return out.dump(2);
}

std::string prediction_to_jsonl(const PredictionObject &prediction) {
    ojson dets = ojson::array();
    for (const auto &d : prediction.detections) {
        dets.push_back(ojson{{"box", box_json(d.box)},
                             {"label", d.class_label},
                             {"confidence", d.confidence},
                             {"corrected", d.corrected}});
    }
    return ojson{{"frame", prediction.frame_index}, {"detections", std::move(dets)}}.dump();
}

void write_predictions(std::ostream &out, std::span<const PredictionObject> predictions) {
    for (const auto &p : predictions) {
        out << prediction_to_jsonl(p) << '\n';
    }
}

std::vector<PredictionObject> read_predictions(std::istream &in) {
    std::vector<PredictionObject> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (blank(line)) {
            continue;
        }
        try {
            const json j = json::parse(line);
            PredictionObject p;
            p.frame_index = j.at("frame").get<std::size_t>();
            for (const auto &d : j.at("detections")) {
                p.detections.push_back(Detection{box_from(d.at("box")), d.at("label").get<std::string>(),
                                                 d.at("confidence").get<double>(), d.at("corrected").get<bool>()});
            }
            out.push_back(std::move(p));
        } catch (const std::exception &e) {
            throw MalformedRecord(line_no, e.what());
        }
    }
    return out;
}

std::string stats_to_json(const PipelineStats &stats, const std::string &mode) {
    ojson root;
    root["mode"] = mode;
    root["frames_processed"] = stats.frames_processed;
    root["total_detections"] = stats.total_detections;
    root["classifier_invocations"] = stats.classifier_invocations;
    root["detections_corrected"] = stats.detections_corrected;
    root["wall_time"] = round_ms(stats.wall_time);
    root["per_stage_busy_time"] = ojson{{"detector", round_ms(stats.detector_busy)},
                                        {"corrector", round_ms(stats.corrector_busy)}};
    return root.dump(2);
}

std::vector<TrackedDetection> read_tracked_detections(std::istream &in) {
    std::vector<TrackedDetection> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (blank(line)) {
            continue;
        }
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error &e) {
            throw MalformedRecord(line_no, std::string("invalid JSON: ") + e.what());
        }
        if (!j.is_object()) {
            throw MalformedRecord(line_no, "expected a JSON object");
        }
        for (const auto &[key, value] : j.items()) {
            if (key != "frame" && key != "track" && key != "box" && key != "label" && key != "confidence" &&
                key != "corrected") {
                throw MalformedRecord(line_no, "unexpected key '" + key + "'");
            }
        }
        try {
            TrackedDetection d;
            const auto &frame = j.at("frame");
            const auto &track = j.at("track");
            if (!frame.is_number_unsigned() || !track.is_number_unsigned()) {
                throw std::invalid_argument("'frame' and 'track' must be non-negative integers");
            }
            d.frame_index = frame.get<std::size_t>();
            d.track_id = track.get<std::size_t>();
            d.box = box_from(j.at("box"));
            d.class_label = j.at("label").get<std::string>();
            d.confidence = j.at("confidence").get<double>();
            d.corrected = j.value("corrected", false);
            if (!(d.confidence >= 0.0 && d.confidence <= 1.0)) {
                throw std::invalid_argument("confidence must lie in [0, 1]");
            }
            if (!(d.box.x1 < d.box.x2 && d.box.y1 < d.box.y2)) {
                throw std::invalid_argument("box must satisfy x1 < x2 and y1 < y2");
            }
            out.push_back(std::move(d));
        } catch (const MalformedRecord &) {
            throw;
        } catch (const std::exception &e) {
            throw MalformedRecord(line_no, e.what());
        }
    }
    return out;
}

std::vector<TrackedDetection> load_tracked_detections(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open tracked detections '" + path.string() + "'");
    }
    return read_tracked_detections(in);
}

void write_tracked_detections(std::ostream &out, std::span<const TrackedDetection> detections) {
    for (const auto &d : detections) {
        out << ojson{{"frame", d.frame_index},
                     {"track", d.track_id},
                     {"box", box_json(d.box)},
                     {"label", d.class_label},
                     {"confidence", d.confidence},
                     {"corrected", d.corrected}}
                   .dump()
            << '\n';
    }
}

std::string track_report_to_json(const TrackCorrectionResult &result) {
    ojson decisions = ojson::array();
    for (const auto &[id, d] : result.per_track_decision) {
        decisions.push_back(ojson{{"track", id},
                                  {"frame", d.frame_index},
                                  {"old_label", d.old_label},
                                  {"new_label", d.new_label},
                                  {"confidence", d.confidence}});
    }
    ojson root;
    root["tracks_examined"] = result.tracks_examined;
    root["classifier_invocations"] = result.classifier_invocations;
    root["detections"] = result.corrected.size();
    root["per_track_decision"] = std::move(decisions);
    return root.dump(2);
}

} // namespace detext
