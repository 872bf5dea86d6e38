#include "detext/mock_backends.hpp"

#include "detext/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <thread>

namespace detext {

namespace {

using nlohmann::json;

constexpr std::uint64_t kDetectorSalt = 0xd1b54a32d192ed03ULL;
constexpr std::uint64_t kClassifierSalt = 0x8cb92ba72f3d8dd7ULL;

// Deterministic 64-bit draw keyed by a list of words. mt19937_64's output
// sequence is fixed by the standard, so results agree across toolchains.
std::uint64_t keyed_draw(std::initializer_list<std::uint64_t> words) {
    std::vector<std::uint32_t> parts;
    for (auto w : words) {
        parts.push_back(static_cast<std::uint32_t>(w));
        parts.push_back(static_cast<std::uint32_t>(w >> 32));
    }
    std::seed_seq keyed(parts.begin(), parts.end());
    std::mt19937_64 gen(keyed);
    return gen();
}

double unit_interval(std::uint64_t bits) { return static_cast<double>(bits >> 11) * 0x1.0p-53; }

std::uint64_t box_key(const BoundingBox &b) {
    std::uint64_t h = 0;
    for (double v : {b.x1, b.y1, b.x2, b.y2}) {
        h = h * 0x100000001b3ULL ^ std::bit_cast<std::uint64_t>(v);
    }
    return h;
}

BoundingBox parse_box(const json &j, const std::string &where) {
    if (!j.is_array() || j.size() != 4 || !std::all_of(j.begin(), j.end(), [](const json &v) { return v.is_number(); })) {
        throw MalformedScenario(where + ": box must be [x1, y1, x2, y2]");
    }
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
}

template <typename T>
T required(const json &obj, const char *key, const std::string &where) {
    if (!obj.contains(key)) {
        throw MalformedScenario(where + ": missing '" + key + "'");
    }
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception &) {
        throw MalformedScenario(where + ": wrong type for '" + key + "'");
    }
}

std::size_t required_count(const json &obj, const char *key, const std::string &where) {
    if (!obj.contains(key) || !obj.at(key).is_number_integer() || obj.at(key).get<long long>() < 0) {
        throw MalformedScenario(where + ": '" + key + "' must be a non-negative integer");
    }
    return obj.at(key).get<std::size_t>();
}

LatencyModel parse_latency(const json &j, const std::string &where) {
    if (!j.is_object()) {
        throw MalformedScenario(where + " must be an object");
    }
    LatencyModel m;
    m.fixed_ms = j.value("fixed_ms", 0.0);
    m.jitter_ms = j.value("jitter_ms", 0.0);
    return m;
}

nlohmann::ordered_json latency_json(const LatencyModel &m) { return nlohmann::ordered_json{{"fixed_ms", m.fixed_ms}, {"jitter_ms", m.jitter_ms}}; }

void check_latency(const LatencyModel &m, const char *name) {
    if (!(m.fixed_ms >= 0.0) || !(m.jitter_ms >= 0.0) || !std::isfinite(m.fixed_ms) || !std::isfinite(m.jitter_ms)) {
        throw MalformedScenario(std::string(name) + " latency must be finite and non-negative");
    }
}

} // namespace

double LatencyModel::delay_ms(std::uint64_t seed, std::uint64_t key) const {
    if (jitter_ms <= 0.0) {
        return fixed_ms;
    }
    return fixed_ms + jitter_ms * unit_interval(keyed_draw({seed, key}));
}

void LatencyModel::wait(std::uint64_t seed, std::uint64_t key) const {
    const double ms = delay_ms(seed, key);
    if (ms > 0.0) {
        std::this_thread::sleep_for(std::chrono::duration<double, std::milli>(ms));
    }
}

std::vector<Frame> MockScenario::frames() const {
    std::vector<Frame> out;
    out.reserve(frame_count);
    for (std::size_t k = 0; k < frame_count; ++k) {
        const std::string token = "mock-frame-" + std::to_string(k);
        out.push_back(Frame{k, width, height, std::vector<std::uint8_t>(token.begin(), token.end())});
    }
    return out;
}

std::vector<const ScriptedDetection *> MockScenario::entries_for(std::size_t frame) const {
    std::vector<const ScriptedDetection *> out;
    for (const auto &s : script) {
        if (s.frame == frame) {
            out.push_back(&s);
        }
    }
    return out;
}

std::vector<TrackedDetection> MockScenario::tracked_detections() const {
    std::size_t next_id = 0;
    for (const auto &s : script) {
        if (s.track) {
            next_id = std::max(next_id, *s.track + 1);
        }
    }
    std::vector<TrackedDetection> out;
    out.reserve(script.size());
    for (const auto &s : script) {
        const std::size_t id = s.track ? *s.track : next_id++;
        out.push_back(TrackedDetection{s.frame, id, s.box, s.emitted_label, s.confidence, false});
    }
    return out;
}

std::vector<std::string> MockScenario::classifier_labels() const {
    if (labels) {
        return *labels;
    }
    std::set<std::string> all;
    for (const auto &s : script) {
        all.insert(s.true_label);
        all.insert(s.emitted_label);
    }
    return {all.begin(), all.end()};
}

void validate_scenario(const MockScenario &scenario) {
    if (scenario.width == 0 || scenario.height == 0) {
        throw MalformedScenario("frame size must be positive");
    }
    if (!(scenario.accuracy >= 0.0 && scenario.accuracy <= 1.0)) {
        throw MalformedScenario("accuracy must lie in [0, 1]");
    }
    check_latency(scenario.detector_latency, "detector");
    check_latency(scenario.classifier_latency, "classifier");
    const std::set<std::pair<std::string, std::string>> allowed(scenario.confusions.begin(),
                                                                scenario.confusions.end());
    for (std::size_t i = 0; i < scenario.script.size(); ++i) {
        const auto &s = scenario.script[i];
        const std::string where = "script entry " + std::to_string(i);
        if (s.frame >= scenario.frame_count) {
            throw MalformedScenario(where + ": frame " + std::to_string(s.frame) + " beyond frame count");
        }
        if (!box_within(s.box, scenario.width, scenario.height)) {
            std::ostringstream msg;
            msg << "scripted box [" << s.box.x1 << ", " << s.box.y1 << ", " << s.box.x2 << ", " << s.box.y2
                << "] outside " << scenario.width << "x" << scenario.height << " frame " << s.frame;
            throw InvalidBox(msg.str());
        }
        if (s.true_label.empty() || s.emitted_label.empty()) {
            throw MalformedScenario(where + ": labels must be non-empty");
        }
        if (!(s.confidence >= 0.0 && s.confidence <= 1.0)) {
            throw MalformedScenario(where + ": confidence must lie in [0, 1]");
        }
        if (s.true_label != s.emitted_label && !allowed.empty() &&
            allowed.count({s.true_label, s.emitted_label}) == 0) {
            throw MalformedScenario(where + ": undeclared confusion " + s.true_label + " -> " + s.emitted_label);
        }
    }
}

MockScenario parse_scenario(std::string_view text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error &e) {
        throw MalformedScenario(std::string("invalid JSON: ") + e.what());
    }
    if (!root.is_object()) {
        throw MalformedScenario("scenario must be a JSON object");
    }
    static const std::set<std::string> known{"seed",   "frames",   "size",    "script",
                                             "labels", "accuracy", "latency", "confusions"};
    for (const auto &[key, value] : root.items()) {
        if (known.count(key) == 0) {
            throw MalformedScenario("unexpected key '" + key + "'");
        }
    }

    MockScenario sc;
    if (!root.contains("seed") || !root["seed"].is_number_integer()) {
        throw MalformedScenario("scenario: 'seed' must be an integer");
    }
    sc.seed = root["seed"].is_number_unsigned() ? root["seed"].get<std::uint64_t>()
                                                : static_cast<std::uint64_t>(root["seed"].get<std::int64_t>());
    sc.frame_count = required_count(root, "frames", "scenario");
    const auto size = required<std::vector<long long>>(root, "size", "scenario");
    if (size.size() != 2 || size[0] <= 0 || size[1] <= 0) {
        throw MalformedScenario("scenario: 'size' must be [width, height] with positive entries");
    }
    sc.width = static_cast<std::size_t>(size[0]);
    sc.height = static_cast<std::size_t>(size[1]);

    const json script = root.value("script", json::array());
    if (!script.is_array()) {
        throw MalformedScenario("scenario: 'script' must be an array");
    }
    for (std::size_t i = 0; i < script.size(); ++i) {
        const json &e = script[i];
        const std::string where = "script entry " + std::to_string(i);
        if (!e.is_object()) {
            throw MalformedScenario(where + ": expected an object");
        }
        ScriptedDetection s;
        s.frame = required_count(e, "frame", where);
        if (!e.contains("box")) {
            throw MalformedScenario(where + ": missing 'box'");
        }
        s.box = parse_box(e["box"], where);
        s.true_label = required<std::string>(e, "true", where);
        s.emitted_label = required<std::string>(e, "emitted", where);
        s.confidence = required<double>(e, "confidence", where);
        if (e.contains("track")) {
            s.track = required_count(e, "track", where);
        }
        sc.script.push_back(std::move(s));
    }

    if (root.contains("confusions")) {
        for (const auto &pair : root["confusions"]) {
            if (!pair.is_array() || pair.size() != 2 || !pair[0].is_string() || !pair[1].is_string()) {
                throw MalformedScenario("confusions must be [true, emitted] string pairs");
            }
            sc.confusions.emplace_back(pair[0].get<std::string>(), pair[1].get<std::string>());
        }
    }
    if (root.contains("labels")) {
        sc.labels = required<std::vector<std::string>>(root, "labels", "scenario");
    }
    if (root.contains("accuracy")) {
        sc.accuracy = required<double>(root, "accuracy", "scenario");
    }
    if (root.contains("latency")) {
        const json &lat = root["latency"];
        if (!lat.is_object()) {
            throw MalformedScenario("scenario: 'latency' must be an object");
        }
        if (lat.contains("detector")) {
            sc.detector_latency = parse_latency(lat["detector"], "detector latency");
        }
        if (lat.contains("classifier")) {
            sc.classifier_latency = parse_latency(lat["classifier"], "classifier latency");
        }
    }
    validate_scenario(sc);
    return sc;
}

MockScenario load_scenario(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open scenario file '" + path.string() + "'");
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str());
}

std::string dump_scenario(const MockScenario &scenario) {
    nlohmann::ordered_json root;
    root["seed"] = scenario.seed;
    root["frames"] = scenario.frame_count;
    root["size"] = {scenario.width, scenario.height};
    auto script = nlohmann::ordered_json::array();
    for (const auto &s : scenario.script) {
        nlohmann::ordered_json e;
        e["frame"] = s.frame;
        e["box"] = {s.box.x1, s.box.y1, s.box.x2, s.box.y2};
        e["true"] = s.true_label;
        e["emitted"] = s.emitted_label;
        e["confidence"] = s.confidence;
        if (s.track) {
            e["track"] = *s.track;
        }
        script.push_back(std::move(e));
    }
    root["script"] = std::move(script);
    if (!scenario.confusions.empty()) {
        auto pairs = nlohmann::ordered_json::array();
        for (const auto &[t, e] : scenario.confusions) {
            pairs.push_back({t, e});
        }
        root["confusions"] = std::move(pairs);
    }
    if (scenario.labels) {
        root["labels"] = *scenario.labels;
    }
    root["accuracy"] = scenario.accuracy;
    root["latency"] = {{"detector", latency_json(scenario.detector_latency)},
                       {"classifier", latency_json(scenario.classifier_latency)}};
    return root.dump(2);
}

void save_scenario(const MockScenario &scenario, const std::filesystem::path &path) {
    std::ofstream out(path);
    if (!out) {
        throw Error("cannot write scenario file '" + path.string() + "'");
    }
    out << dump_scenario(scenario) << '\n';
}

MockDetector::MockDetector(MockScenario scenario, LatencyModel latency)
    : scenario_(std::move(scenario)), latency_(latency) {
    validate_scenario(scenario_);
}

PredictionObject MockDetector::detect(const Frame &frame) {
    if (frame.index >= scenario_.frame_count) {
        throw FrameOutOfRange(frame.index, scenario_.frame_count);
    }
    latency_.wait(scenario_.seed, keyed_draw({kDetectorSalt, frame.index}));
    PredictionObject out;
    out.frame_index = frame.index;
    for (const auto *s : scenario_.entries_for(frame.index)) {
        out.detections.push_back(Detection{s->box, s->emitted_label, s->confidence, false});
    }
    return out;
}

MockClassifier::MockClassifier(MockScenario scenario, std::vector<std::string> label_set, double accuracy,
                               LatencyModel latency)
    : scenario_(std::move(scenario)), labels_(std::move(label_set)), accuracy_(accuracy), latency_(latency) {
    validate_scenario(scenario_);
    if (!(accuracy >= 0.0 && accuracy <= 1.0)) {
        throw std::invalid_argument("classifier accuracy must lie in [0, 1]");
    }
    std::sort(labels_.begin(), labels_.end());
    labels_.erase(std::unique(labels_.begin(), labels_.end()), labels_.end());
    for (const auto &s : scenario_.script) {
        if (s.true_label != s.emitted_label && !std::binary_search(labels_.begin(), labels_.end(), s.true_label)) {
            throw LabelSetMismatch("confused true label '" + s.true_label + "' missing from classifier label set");
        }
    }
    if (accuracy < 1.0 && labels_.size() < 2) {
        throw std::invalid_argument("an imperfect mock classifier needs at least two labels");
    }
}

Classification MockClassifier::classify(const Frame &frame, const BoundingBox &box) {
    const std::uint64_t region = keyed_draw({kClassifierSalt, frame.index, box_key(box)});
    latency_.wait(scenario_.seed, region);

    const ScriptedDetection *match = nullptr;
    double best = kMatchIoU;
    for (const auto *s : scenario_.entries_for(frame.index)) {
        const double iou = intersection_over_union(s->box, box);
        if (iou >= best && (match == nullptr || iou > best)) {
            match = s;
            best = iou;
        }
    }
    if (match == nullptr) {
        throw NoMatchingRegion(frame.index);
    }

    const std::uint64_t draw = keyed_draw({scenario_.seed, region});
    if (unit_interval(draw) < accuracy_) {
        return {match->true_label, kCorrectScore};
    }
    std::vector<std::string> wrong;
    for (const auto &l : labels_) {
        if (l != match->true_label) {
            wrong.push_back(l);
        }
    }
    const std::uint64_t pick = keyed_draw({draw, region});
    return {wrong[pick % wrong.size()], kWrongScore};
}

MockDetector make_mock_detector(const MockScenario &scenario) {
    return MockDetector(scenario, scenario.detector_latency);
}

MockClassifier make_mock_classifier(const MockScenario &scenario) {
    return MockClassifier(scenario, scenario.classifier_labels(), scenario.accuracy, scenario.classifier_latency);
}

} // namespace detext
