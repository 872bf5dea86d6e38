#include "detext/cli.hpp"

#include "detext/errors.hpp"
#include "detext/feature_store.hpp"
#include "detext/serialization.hpp"
#include "detext/tracker_correction.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

namespace detext::cli {

namespace {

using Clock = std::chrono::steady_clock;

std::ofstream open_out(const std::filesystem::path &path) {
    std::ofstream out(path);
    if (!out) {
        throw Error("cannot write '" + path.string() + "'");
    }
    return out;
}

MockScenario scenario_for(const RunConfig &config) {
    MockScenario scenario = load_scenario(config.scenario);
    if (config.seed) {
        scenario.seed = *config.seed;
    }
    return scenario;
}

double median(std::vector<double> xs) {
    std::sort(xs.begin(), xs.end());
    const std::size_t n = xs.size();
    return n % 2 == 1 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

std::string join(const std::vector<std::string> &xs) {
    std::string out;
    for (const auto &x : xs) {
        out += (out.empty() ? "" : ", ") + x;
    }
    return out;
}

// Runs a command body, mapping every exception to exit code 1 with a diagnostic.
template <typename Body>
int guarded(const char *name, std::ostream &log, Body &&body) {
    try {
        return body();
    } catch (const std::exception &e) {
        log << name << ": error: " << e.what() << '\n';
        return kExitError;
    }
}

} // namespace

std::string_view to_string(RunMode mode) noexcept {
    switch (mode) {
    case RunMode::dual_parallel:
        return "dual_parallel";
    case RunMode::sequential:
        return "sequential";
    case RunMode::tracked:
        return "tracked";
    }
    return "unknown";
}

RunMode parse_mode(std::string_view name) {
    for (auto m : {RunMode::dual_parallel, RunMode::sequential, RunMode::tracked}) {
        if (name == to_string(m)) {
            return m;
        }
    }
    throw std::invalid_argument("unknown mode '" + std::string(name) + "'");
}

std::filesystem::path matrix_path_for(const std::filesystem::path &compat_out) {
    return compat_out.parent_path() / (compat_out.stem().string() + ".matrix.csv");
}

std::filesystem::path report_path_for(const std::filesystem::path &tracked_out) {
    return tracked_out.parent_path() / (tracked_out.stem().string() + ".report.json");
}

RunResult run_tracked(const MockScenario &scenario, const CompatibilityMap &compat, const RunOptions &options) {
    MockDetector detector = make_mock_detector(scenario);
    MockClassifier classifier = make_mock_classifier(scenario);
    const auto frames = scenario.frames();
    check_label_coverage(classifier, compat);

    RunResult result;
    const auto start = Clock::now();
    auto t0 = Clock::now();
    std::vector<PredictionObject> raw;
    raw.reserve(frames.size());
    for (const auto &f : frames) {
        try {
            raw.push_back(detector.detect(f));
        } catch (const std::exception &e) {
            result.failure.emplace("detector", f.index, e.what());
            break;
        }
    }
    result.stats.detector_busy = std::chrono::duration<double>(Clock::now() - t0).count();

    if (!result.failure) {
        t0 = Clock::now();
        const auto tracked = scenario.tracked_detections();
        const FrameLookup lookup = [&frames](std::size_t k) -> const Frame * {
            return k < frames.size() ? &frames[k] : nullptr;
        };
        const TrackCorrectionResult corrected =
            correct_tracks(tracked, lookup, classifier, compat, options.pad_fraction);
        result.stats.corrector_busy = std::chrono::duration<double>(Clock::now() - t0).count();

        // Tracked detections mirror the script, which lists each frame's
        // detections in detector order.
        result.predictions.resize(frames.size());
        for (std::size_t k = 0; k < frames.size(); ++k) {
            result.predictions[k].frame_index = k;
        }
        for (const auto &d : corrected.corrected) {
            result.predictions[d.frame_index].detections.push_back(
                Detection{d.box, d.class_label, d.confidence, d.corrected});
            if (d.corrected) {
                ++result.stats.detections_corrected;
            }
        }
        result.stats.classifier_invocations = corrected.classifier_invocations;
    } else {
        result.predictions = std::move(raw);
    }
    result.stats.frames_processed = result.predictions.size();
    for (const auto &p : result.predictions) {
        result.stats.total_detections += p.detections.size();
    }
    result.stats.wall_time = std::chrono::duration<double>(Clock::now() - start).count();
    return result;
}

RunResult run_mode(RunMode mode, const MockScenario &scenario, const CompatibilityMap &compat,
                   const RunOptions &options) {
    if (mode == RunMode::tracked) {
        return run_tracked(scenario, compat, options);
    }
    MockDetector detector = make_mock_detector(scenario);
    MockClassifier classifier = make_mock_classifier(scenario);
    const auto frames = scenario.frames();
    return mode == RunMode::dual_parallel ? run_dual_parallel(frames, detector, classifier, compat, options)
                                          : run_sequential(frames, detector, classifier, compat, options);
}

int cmd_centroids(const RunConfig &config, std::ostream &log) {
    return guarded("centroids", log, [&] {
        const FeatureStore store = load_feature_store(config.features);
        const auto centroids = compute_centroids(store);
        auto out = open_out(config.out);
        out << centroids_to_json(centroids) << '\n';
        log << "centroids: " << centroids.size() << " classes, D=" << store.dimension() << '\n';
        return kExitOk;
    });
}

int cmd_select(const RunConfig &config, std::ostream &log) {
    return guarded("select", log, [&] {
        if (config.base.empty() || config.ext.empty()) {
            throw std::invalid_argument("both --base and --ext need at least one class");
        }
        const FeatureStore store = load_feature_store(config.features);
        std::vector<std::string> classes = config.ext;
        classes.insert(classes.end(), config.base.begin(), config.base.end());
        const ValidationReport report = validate_store(store, classes);
        if (!report.ok()) {
            throw UnknownClass(join(report.missing_classes));
        }

        const auto centroids = compute_centroids(store, classes);
        const SimilarityMatrix matrix = similarity_matrix(centroids, config.metric);
        const CompatibilityMap compat = select_compatible(matrix, config.base, config.ext, config.threshold);

        {
            auto csv = open_out(matrix_path_for(config.out));
            write_matrix_csv(csv, matrix);
        }
        auto out = open_out(config.out);
        out << compat_to_json(compat) << '\n';

        for (const auto &[ext, bases] : compat.entries) {
            log << "select: " << ext << ":";
            for (const auto &b : bases) {
                log << ' ' << b.label << '(' << b.distance << ')';
            }
            log << '\n';
        }
        const auto unsatisfied = compat.unsatisfied_extensions();
        if (!unsatisfied.empty()) {
            log << "select: no base class within threshold " << config.threshold << " for: " << join(unsatisfied)
                << '\n';
            return kExitPrecondition;
        }
        return kExitOk;
    });
}

int cmd_run(const RunConfig &config, std::ostream &log) {
    return guarded("run", log, [&] {
        const MockScenario scenario = scenario_for(config);
        const CompatibilityMap compat = load_compat(config.compat);
        const RunResult result = run_mode(config.mode, scenario, compat, RunOptions{config.pad_fraction});

        auto out = open_out(config.out);
        write_predictions(out, result.predictions);
        if (result.failure) {
            out << nlohmann::ordered_json{{"error", result.failure->cause()},
                                          {"stage", result.failure->stage()},
                                          {"frame", result.failure->frame_index()}}
                       .dump()
                << '\n';
        }
        if (!config.stats_out.empty()) {
            auto stats = open_out(config.stats_out);
            stats << stats_to_json(result.stats, std::string(to_string(config.mode))) << '\n';
        }
        log << "run: " << to_string(config.mode) << ", " << result.stats.frames_processed << " frames, "
            << result.stats.classifier_invocations << " classifier calls, " << result.stats.wall_time << " s\n";
        if (result.failure) {
            log << "run: error: " << result.failure->what() << '\n';
            return kExitError;
        }
        return kExitOk;
    });
}

int cmd_track_correct(const RunConfig &config, std::ostream &log) {
    return guarded("track-correct", log, [&] {
        const auto detections = load_tracked_detections(config.detections);
        const MockScenario scenario = scenario_for(config);
        const CompatibilityMap compat = load_compat(config.compat);
        MockClassifier classifier = make_mock_classifier(scenario);
        const auto frames = scenario.frames();
        const FrameLookup lookup = [&frames](std::size_t k) -> const Frame * {
            return k < frames.size() ? &frames[k] : nullptr;
        };
        const TrackCorrectionResult result =
            correct_tracks(detections, lookup, classifier, compat, config.pad_fraction);

        {
            auto out = open_out(config.out);
            write_tracked_detections(out, result.corrected);
        }
        const auto report_path = config.stats_out.empty() ? report_path_for(config.out) : config.stats_out;
        auto report = open_out(report_path);
        report << track_report_to_json(result) << '\n';
        log << "track-correct: " << result.tracks_examined << " tracks, " << result.classifier_invocations
            << " classifier calls\n";
        return kExitOk;
    });
}

int cmd_bench(const RunConfig &config, std::ostream &log) {
    return guarded("bench", log, [&] {
        if (config.reps < 1) {
            throw std::invalid_argument("--reps must be at least 1");
        }
        const MockScenario scenario = scenario_for(config);
        const CompatibilityMap compat = load_compat(config.compat);
        const RunOptions options{config.pad_fraction};

        nlohmann::ordered_json modes;
        std::map<RunMode, double> medians;
        std::vector<PredictionObject> reference;
        bool identical = true;
        for (auto mode : {RunMode::sequential, RunMode::dual_parallel, RunMode::tracked}) {
            std::vector<double> times;
            std::size_t invocations = 0;
            for (std::size_t r = 0; r < config.reps; ++r) {
                RunResult result = run_mode(mode, scenario, compat, options);
                if (result.failure) {
                    throw *result.failure;
                }
                times.push_back(result.stats.wall_time);
                invocations = result.stats.classifier_invocations;
                if (mode == RunMode::sequential && r == 0) {
                    reference = result.predictions;
                } else if (mode == RunMode::dual_parallel) {
                    identical = identical && result.predictions == reference;
                }
            }
            medians[mode] = median(times);
            modes[std::string(to_string(mode))] = {{"median_wall_time", medians[mode]},
                                                   {"wall_times", times},
                                                   {"classifier_invocations", invocations}};
            log << "bench: " << to_string(mode) << " median " << medians[mode] << " s, " << invocations
                << " classifier calls\n";
        }

        nlohmann::ordered_json root;
        root["repetitions"] = config.reps;
        root["frames"] = scenario.frame_count;
        root["modes"] = std::move(modes);
        const double seq = medians[RunMode::sequential];
        root["speedup"] = {{"dual_parallel_vs_sequential", seq / medians[RunMode::dual_parallel]},
                           {"tracked_vs_sequential", seq / medians[RunMode::tracked]}};
        root["dual_parallel_matches_sequential"] = identical;
        auto out = open_out(config.out);
        out << root.dump(2) << '\n';
        return kExitOk;
    });
}

int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
    CLI::App app{"Extend an object detector with new classes via confusable-class correction"};
    app.require_subcommand(1);
    RunConfig config;
    std::string metric = "cosine";
    std::string mode = "dual_parallel";
    std::uint64_t seed = 0;

    auto threshold_opt = [&](CLI::App *sub) {
        sub->add_option("--threshold", config.threshold, "Similarity threshold")->capture_default_str();
    };
    auto pad_opt = [&](CLI::App *sub) {
        sub->add_option("--pad", config.pad_fraction, "Crop padding as a fraction of box size")
            ->check(CLI::NonNegativeNumber)
            ->capture_default_str();
    };
    auto seed_opt = [&](CLI::App *sub) { sub->add_option("--seed", seed, "Override the scenario seed"); };

    auto *centroids = app.add_subcommand("centroids", "Per-class feature centroids");
    centroids->add_option("--features", config.features, "Feature JSONL file")->required();
    centroids->add_option("--out", config.out, "Centroid JSON output")->required();

    auto *select = app.add_subcommand("select", "Similarity matrix and compatible-class selection");
    select->add_option("--features", config.features, "Feature JSONL file")->required();
    select->add_option("--base", config.base, "Base classes (comma-separated)")->delimiter(',')->required();
    select->add_option("--ext", config.ext, "Extension classes (comma-separated)")->delimiter(',')->required();
    threshold_opt(select);
    select->add_option("--metric", metric, "cosine|l1|l2|squared_l2")
        ->check(CLI::IsMember({"cosine", "l1", "l2", "squared_l2"}))
        ->capture_default_str();
    select->add_option("--out", config.out, "Compatibility JSON output; the matrix CSV goes alongside")->required();

    auto *runcmd = app.add_subcommand("run", "Run the correction pipeline over a mock scenario");
    runcmd->add_option("--scenario", config.scenario, "Scenario JSON")->required();
    runcmd->add_option("--compat", config.compat, "Compatibility JSON")->required();
    runcmd->add_option("--mode", mode, "dual_parallel|sequential|tracked")
        ->check(CLI::IsMember({"dual_parallel", "sequential", "tracked"}))
        ->capture_default_str();
    runcmd->add_option("--out", config.out, "Predictions JSONL output")->required();
    runcmd->add_option("--stats-out", config.stats_out, "Stats JSON output");
    pad_opt(runcmd);
    seed_opt(runcmd);

    auto *track = app.add_subcommand("track-correct", "Per-track correction of tracked detections");
    track->add_option("--detections", config.detections, "Tracked detections JSONL")->required();
    track->add_option("--scenario", config.scenario, "Scenario JSON backing the classifier")->required();
    track->add_option("--compat", config.compat, "Compatibility JSON")->required();
    track->add_option("--out", config.out, "Corrected detections JSONL output")->required();
    track->add_option("--stats-out", config.stats_out, "Report JSON output");
    pad_opt(track);
    seed_opt(track);

    auto *bench = app.add_subcommand("bench", "Compare sequential, dual-parallel and tracked modes");
    bench->add_option("--scenario", config.scenario, "Scenario JSON")->required();
    bench->add_option("--compat", config.compat, "Compatibility JSON")->required();
    bench->add_option("--reps", config.reps, "Repetitions per mode")->capture_default_str();
    bench->add_option("--out", config.out, "Benchmark JSON output")->required();
    pad_opt(bench);
    seed_opt(bench);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitError;
    }

    config.metric = parse_metric(metric);
    config.mode = parse_mode(mode);
    for (auto *sub : {runcmd, track, bench}) {
        if (sub->parsed() && sub->count("--seed") > 0) {
            config.seed = seed;
        }
    }

    if (centroids->parsed()) {
        return cmd_centroids(config, err);
    }
    if (select->parsed()) {
        return cmd_select(config, err);
    }
    if (runcmd->parsed()) {
        return cmd_run(config, err);
    }
    if (track->parsed()) {
        return cmd_track_correct(config, err);
    }
    return cmd_bench(config, err);
}

} // namespace detext::cli
