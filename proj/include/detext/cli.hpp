#pragma once

#include "detext/inference.hpp"
#include "detext/mock_backends.hpp"
#include "detext/similarity.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace detext::cli {

/// Process exit codes. Stable across versions.
enum ExitCode : int {
    kExitOk = 0,
    kExitError = 1,
    /// Some extension class has no compatible base class below the threshold.
    kExitPrecondition = 2,
};

enum class RunMode { dual_parallel, sequential, tracked };

[[nodiscard]] std::string_view to_string(RunMode mode) noexcept;
/// Throws std::invalid_argument.
[[nodiscard]] RunMode parse_mode(std::string_view name);

struct RunConfig {
    double threshold = kDefaultSimilarityThreshold;
    DistanceMetric metric = DistanceMetric::cosine;
    double pad_fraction = 0.0;
    RunMode mode = RunMode::dual_parallel;
    std::vector<std::string> base;
    std::vector<std::string> ext;
    std::filesystem::path features;
    std::filesystem::path scenario;
    std::filesystem::path compat;
    std::filesystem::path detections;
    std::filesystem::path out;
    std::filesystem::path stats_out;
    std::size_t reps = 5;
    std::optional<std::uint64_t> seed;
};

/// Sibling of the compatibility output that receives the similarity matrix CSV.
[[nodiscard]] std::filesystem::path matrix_path_for(const std::filesystem::path &compat_out);
/// Sibling of the tracked output that receives the correction report when
/// no --stats-out is given.
[[nodiscard]] std::filesystem::path report_path_for(const std::filesystem::path &tracked_out);

/// Offline tracked pass over a scenario: the detector runs over every frame,
/// then each compatible track is classified once and the verdict applied to
/// all of its detections. Predictions come back grouped per frame.
[[nodiscard]] RunResult run_tracked(const MockScenario &scenario, const CompatibilityMap &compat,
                                    const RunOptions &options = {});

/// Runs one mode over the scenario with backends built from its defaults.
[[nodiscard]] RunResult run_mode(RunMode mode, const MockScenario &scenario, const CompatibilityMap &compat,
                                 const RunOptions &options = {});

int cmd_centroids(const RunConfig &config, std::ostream &log);
int cmd_select(const RunConfig &config, std::ostream &log);
int cmd_run(const RunConfig &config, std::ostream &log);
int cmd_track_correct(const RunConfig &config, std::ostream &log);
int cmd_bench(const RunConfig &config, std::ostream &log);

/// Parses argv and dispatches to a subcommand.
int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

} // namespace detext::cli
