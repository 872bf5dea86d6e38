#include "detext/feature_store.hpp"

#include "detext/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace detext {

FeatureStore::FeatureStore(std::size_t dimension) : dimension_(dimension) {
    if (dimension == 0) {
        throw std::invalid_argument("feature dimension must be positive");
    }
}

void FeatureStore::add(FeatureRecord record) {
    if (record.class_label.empty()) {
        throw std::invalid_argument("class label must be non-empty");
    }
    if (record.vector.size() != dimension_) {
        throw DimensionMismatch(dimension_, record.vector.size());
    }
    if (!std::all_of(record.vector.begin(), record.vector.end(), [](double v) { return std::isfinite(v); })) {
        throw std::invalid_argument("non-finite value in vector of sample '" + record.sample_id + "'");
    }
    if (std::all_of(record.vector.begin(), record.vector.end(), [](double v) { return v == 0.0; })) {
        throw ZeroVector(record.class_label, record.sample_id);
    }
    auto &bucket = classes_[record.class_label];
    const bool duplicate = std::any_of(bucket.begin(), bucket.end(),
                                       [&](const FeatureRecord &r) { return r.sample_id == record.sample_id; });
    if (duplicate) {
        throw std::invalid_argument("duplicate sample id '" + record.sample_id + "' in class '" +
                                    record.class_label + "'");
    }
    bucket.push_back(std::move(record));
}

bool FeatureStore::contains(const std::string &class_label) const { return classes_.count(class_label) != 0; }

std::size_t FeatureStore::record_count() const noexcept {
    std::size_t n = 0;
    for (const auto &[label, recs] : classes_) {
        n += recs.size();
    }
    return n;
}

std::vector<std::string> FeatureStore::class_labels() const {
    std::vector<std::string> labels;
    labels.reserve(classes_.size());
    for (const auto &[label, recs] : classes_) {
        labels.push_back(label);
    }
    return labels;
}

const std::vector<FeatureRecord> &FeatureStore::records(const std::string &class_label) const {
    auto it = classes_.find(class_label);
    if (it == classes_.end()) {
        throw UnknownClass(class_label);
    }
    return it->second;
}

namespace {

FeatureRecord parse_record(const std::string &line, std::size_t line_no) {
    nlohmann::json obj;
    try {
        obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error &e) {
        throw MalformedRecord(line_no, std::string("invalid JSON: ") + e.what());
    }
    if (!obj.is_object()) {
        throw MalformedRecord(line_no, "expected a JSON object");
    }
    for (const auto &[key, value] : obj.items()) {
        if (key != "class" && key != "id" && key != "vector") {
            throw MalformedRecord(line_no, "unexpected key '" + key + "'");
        }
    }
    for (const char *key : {"class", "id", "vector"}) {
        if (!obj.contains(key)) {
            throw MalformedRecord(line_no, std::string("missing key '") + key + "'");
        }
    }
    if (!obj["class"].is_string() || !obj["id"].is_string()) {
        throw MalformedRecord(line_no, "'class' and 'id' must be strings");
    }
    if (!obj["vector"].is_array()) {
        throw MalformedRecord(line_no, "'vector' must be an array");
    }

    FeatureRecord rec;
    rec.class_label = obj["class"].get<std::string>();
    rec.sample_id = obj["id"].get<std::string>();
    if (rec.class_label.empty()) {
        throw MalformedRecord(line_no, "empty class label");
    }
    rec.vector.reserve(obj["vector"].size());
    for (const auto &v : obj["vector"]) {
        if (!v.is_number()) {
            throw MalformedRecord(line_no, "vector entries must be numbers");
        }
        const double x = v.get<double>();
        if (!std::isfinite(x)) {
            throw MalformedRecord(line_no, "non-finite vector entry");
        }
        rec.vector.push_back(x);
    }
    return rec;
}

} // namespace

FeatureStore load_feature_store(const std::filesystem::path &path, std::optional<std::size_t> expected_dim) {
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open feature file '" + path.string() + "'");
    }
    if (expected_dim && *expected_dim == 0) {
        throw std::invalid_argument("expected dimension must be positive");
    }

    std::optional<FeatureStore> store;
    if (expected_dim) {
        store.emplace(*expected_dim);
    }

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (std::all_of(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); })) {
            continue;
        }
        FeatureRecord rec = parse_record(line, line_no);
        if (!store) {
            if (rec.vector.empty()) {
                throw MalformedRecord(line_no, "empty vector");
            }
            store.emplace(rec.vector.size());
        }
        if (rec.vector.size() != store->dimension()) {
            throw DimensionMismatch(store->dimension(), rec.vector.size(), line_no);
        }
        try {
            store->add(std::move(rec));
        } catch (const std::invalid_argument &e) {
            throw MalformedRecord(line_no, e.what());
        }
    }
    if (!store || store->empty()) {
        throw EmptyStore();
    }
    return std::move(*store);
}

void save_feature_store(const FeatureStore &store, const std::filesystem::path &path) {
    std::ofstream out(path);
    if (!out) {
        throw Error("cannot write feature file '" + path.string() + "'");
    }
    for (const auto &[label, recs] : store.classes()) {
        for (const auto &rec : recs) {
            nlohmann::ordered_json obj;
            obj["class"] = rec.class_label;
            obj["id"] = rec.sample_id;
            obj["vector"] = rec.vector;
            out << obj.dump() << '\n';
        }
    }
}

ValidationReport validate_store(const FeatureStore &store, const std::vector<std::string> &required_classes) {
    ValidationReport report;
    if (store.empty() && required_classes.empty()) {
        return report;
    }
    report.dimension = store.dimension();
    for (const auto &[label, recs] : store.classes()) {
        report.sample_counts[label] = recs.size();
    }
    for (const auto &label : required_classes) {
        const bool seen = std::find(report.missing_classes.begin(), report.missing_classes.end(), label) !=
                          report.missing_classes.end();
        if (!store.contains(label) && !seen) {
            report.missing_classes.push_back(label);
        }
    }
    return report;
}

} // namespace detext
