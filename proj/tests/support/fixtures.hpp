#pragma once

// Test-only fixtures and independent oracles. Nothing here calls into the
// code paths it is used to check.

#include "detext/feature_store.hpp"
#include "detext/mock_backends.hpp"
#include "detext/similarity.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

namespace detext::testing {

/// Reference cosine distances between the Bus/Car/Truck base classes and the
/// Van extension class.
inline const std::array<std::string, 4> kVehicleLabels{"Bus", "Car", "Truck", "Van"};
inline constexpr std::array<std::array<double, 4>, 4> kVehicleDistances{{
    {0.0, 0.0977, 0.0314, 0.0468},
    {0.0977, 0.0, 0.0685, 0.0378},
    {0.0314, 0.0685, 0.0, 0.0292},
    {0.0468, 0.0378, 0.0292, 0.0},
}};

inline SimilarityMatrix vehicle_matrix() {
    SimilarityMatrix m({kVehicleLabels.begin(), kVehicleLabels.end()}, DistanceMetric::cosine);
    for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t j = i + 1; j < 4; ++j) {
            m.set(i, j, kVehicleDistances[i][j]);
        }
    }
    return m;
}

inline CompatibilityMap van_compat() {
    CompatibilityMap c;
    c.threshold = 0.05;
    c.entries["Van"] = {{"Truck", 0.0292}, {"Car", 0.0378}, {"Bus", 0.0468}};
    return c;
}

/// Unit vectors whose Gram matrix is 1 - distance, via a hand-rolled
/// Cholesky factorisation, so their pairwise cosine distances reproduce the
/// reference distances. Each vector is rotated into `dim` dimensions by a seeded random
/// orthonormal basis so the fixture does not live in the first four axes.
inline std::array<std::vector<double>, 4> vehicle_centroids(std::size_t dim = 32, std::uint64_t seed = 7) {
    double gram[4][4];
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            gram[i][j] = 1.0 - kVehicleDistances[i][j];
        }
    }
    double chol[4][4] = {};
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j <= i; ++j) {
            double s = gram[i][j];
            for (int k = 0; k < j; ++k) {
                s -= chol[i][k] * chol[j][k];
            }
            chol[i][j] = i == j ? std::sqrt(s) : s / chol[j][j];
        }
    }

    // Gram-Schmidt on random vectors gives four orthonormal axes in R^dim.
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> normal;
    std::vector<std::vector<double>> basis;
    while (basis.size() < 4) {
        std::vector<double> v(dim);
        for (auto &x : v) {
            x = normal(gen);
        }
        for (const auto &b : basis) {
            double dot = 0.0;
            for (std::size_t k = 0; k < dim; ++k) {
                dot += v[k] * b[k];
            }
            for (std::size_t k = 0; k < dim; ++k) {
                v[k] -= dot * b[k];
            }
        }
        double norm = 0.0;
        for (double x : v) {
            norm += x * x;
        }
        norm = std::sqrt(norm);
        for (auto &x : v) {
            x /= norm;
        }
        basis.push_back(std::move(v));
    }

    std::array<std::vector<double>, 4> out;
    for (int i = 0; i < 4; ++i) {
        out[i].assign(dim, 0.0);
        for (int k = 0; k < 4; ++k) {
            for (std::size_t d = 0; d < dim; ++d) {
                out[i][d] += chol[i][k] * basis[k][d];
            }
        }
    }
    return out;
}

/// Feature store whose class means are the vehicle centroids: every class gets
/// `pairs` mirrored samples c + n and c - n.
inline FeatureStore vehicle_store(std::size_t dim = 32, std::size_t pairs = 6, std::uint64_t seed = 7) {
    const auto centroids = vehicle_centroids(dim, seed);
    FeatureStore store(dim);
    std::mt19937_64 gen(seed + 1);
    std::normal_distribution<double> noise(0.0, 0.05);
    for (int c = 0; c < 4; ++c) {
        for (std::size_t p = 0; p < pairs; ++p) {
            std::vector<double> plus(dim);
            std::vector<double> minus(dim);
            for (std::size_t d = 0; d < dim; ++d) {
                const double n = noise(gen);
                plus[d] = centroids[c][d] + n;
                minus[d] = centroids[c][d] - n;
            }
            store.add({kVehicleLabels[c], "s" + std::to_string(2 * p), plus});
            store.add({kVehicleLabels[c], "s" + std::to_string(2 * p + 1), minus});
        }
    }
    return store;
}

/// Mean accumulated in long double, in input order.
inline std::vector<double> brute_force_mean(const std::vector<std::vector<double>> &vs) {
    std::vector<long double> acc(vs.front().size(), 0.0L);
    for (const auto &v : vs) {
        for (std::size_t k = 0; k < v.size(); ++k) {
            acc[k] += v[k];
        }
    }
    std::vector<double> out(acc.size());
    for (std::size_t k = 0; k < acc.size(); ++k) {
        out[k] = static_cast<double>(acc[k] / static_cast<long double>(vs.size()));
    }
    return out;
}

inline double brute_force_inertia(const std::vector<std::vector<double>> &vs, const std::vector<double> &center) {
    long double s = 0.0L;
    for (const auto &v : vs) {
        for (std::size_t k = 0; k < v.size(); ++k) {
            const long double d = static_cast<long double>(v[k]) - center[k];
            s += d * d;
        }
    }
    return static_cast<double>(s);
}

/// Lloyd's algorithm with a single cluster, seeded from a random member and
/// iterated until the center stops moving. Accumulates in reverse order so it
/// shares no summation path with the library or the brute-force mean.
inline std::vector<double> kmeans_one_cluster(const std::vector<std::vector<double>> &vs, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::vector<double> center = vs[std::uniform_int_distribution<std::size_t>(0, vs.size() - 1)(gen)];
    for (int iter = 0; iter < 100; ++iter) {
        std::vector<double> next(center.size(), 0.0);
        std::size_t members = 0;
        for (auto it = vs.rbegin(); it != vs.rend(); ++it) {
            // single cluster: every point is assigned to it
            for (std::size_t k = 0; k < center.size(); ++k) {
                next[k] += (*it)[k];
            }
            ++members;
        }
        for (auto &x : next) {
            x /= static_cast<double>(members);
        }
        if (next == center) {
            break;
        }
        center = std::move(next);
    }
    return center;
}

inline std::vector<std::vector<double>> random_vectors(std::size_t n, std::size_t dim, std::mt19937_64 &gen) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<std::vector<double>> out(n, std::vector<double>(dim));
    for (auto &v : out) {
        for (auto &x : v) {
            x = u(gen);
        }
    }
    return out;
}

struct ScenarioOptions {
    std::size_t min_frames = 6;
    std::size_t max_frames = 14;
    double jitter_ms = 5.0;
    bool random_accuracy = true;
};

/// Seeded vehicle scenario: up to four non-overlapping boxes per frame (one
/// per quadrant) drawn from vehicles and distractors, with vans reported as
/// one of the compatible base classes.
inline MockScenario random_scenario(std::uint64_t seed, const ScenarioOptions &opts = {}) {
    std::mt19937_64 gen(seed);
    MockScenario sc;
    sc.seed = seed;
    sc.width = 640;
    sc.height = 480;
    sc.frame_count = std::uniform_int_distribution<std::size_t>(opts.min_frames, opts.max_frames)(gen);
    sc.labels = std::vector<std::string>{"Bus", "Car", "Truck", "Van"};
    sc.confusions = {{"Van", "Truck"}, {"Van", "Car"}, {"Van", "Bus"}};
    const std::array<double, 3> accuracies{1.0, 0.7, 0.0};
    sc.accuracy = opts.random_accuracy ? accuracies[gen() % 3] : 1.0;
    sc.detector_latency = {0.0, opts.jitter_ms};
    sc.classifier_latency = {0.0, opts.jitter_ms};

    const std::array<std::string, 6> classes{"Car", "Bus", "Truck", "Van", "Person", "Dog"};
    const std::array<std::string, 3> van_as{"Truck", "Car", "Bus"};
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (std::size_t f = 0; f < sc.frame_count; ++f) {
        for (int q = 0; q < 4; ++q) {
            if (u(gen) < 0.45) {
                continue;
            }
            const double ox = (q % 2) * 320.0;
            const double oy = (q / 2) * 240.0;
            const double x1 = ox + 10.0 + 100.0 * u(gen);
            const double y1 = oy + 10.0 + 80.0 * u(gen);
            const double x2 = x1 + 40.0 + 150.0 * u(gen);
            const double y2 = y1 + 30.0 + 110.0 * u(gen);
            ScriptedDetection s;
            s.frame = f;
            s.box = {x1, y1, std::min(x2, ox + 320.0), std::min(y2, oy + 240.0)};
            s.true_label = classes[gen() % classes.size()];
            s.emitted_label = s.true_label == "Van" ? van_as[gen() % 3] : s.true_label;
            s.confidence = std::round(u(gen) * 1000.0) / 1000.0;
            sc.script.push_back(std::move(s));
        }
    }
    return sc;
}

/// Unique scratch directory removed on destruction.
class TempDir {
  public:
    TempDir() {
        static std::atomic<int> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("detext_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir &) = delete;
    TempDir &operator=(const TempDir &) = delete;

    [[nodiscard]] const std::filesystem::path &path() const noexcept { return path_; }
    [[nodiscard]] std::filesystem::path operator/(const std::string &name) const { return path_ / name; }

  private:
    std::filesystem::path path_;
};

} // namespace detext::testing
