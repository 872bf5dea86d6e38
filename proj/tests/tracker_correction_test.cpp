#include "detext/errors.hpp"
#include "detext/tracker_correction.hpp"
#include "support/fixtures.hpp"

#include <gtest/gtest.h>

#include <map>
#include <algorithm>
#include <random>
#include <set>

namespace detext {
namespace {

using namespace detext::testing;

TrackedDetection td(std::size_t frame, std::size_t track, double side, std::string label, double conf = 0.5) {
    return TrackedDetection{frame, track, {0, 0, side, side}, std::move(label), conf, false};
}

class CountingClassifier : public ClassifierInterface {
  public:
    explicit CountingClassifier(Classification answer) : answer_(std::move(answer)) {}
    Classification classify(const Frame &f, const BoundingBox &b) override {
        calls.emplace_back(f.index, b);
        return answer_;
    }
    [[nodiscard]] std::vector<std::string> label_set() const override { return {"Bus", "Car", "Truck", "Van"}; }
    std::vector<std::pair<std::size_t, BoundingBox>> calls;

  private:
    Classification answer_;
};

struct Frames {
    explicit Frames(std::size_t n) {
        for (std::size_t k = 0; k < n; ++k) {
            store.push_back(Frame{k, 100, 100, {}});
        }
    }
    [[nodiscard]] FrameLookup lookup() const {
        return [this](std::size_t k) -> const Frame * { return k < store.size() ? &store[k] : nullptr; };
    }
    std::vector<Frame> store;
};

TEST(BestCropPerTrack, Singleton) {
    const auto best = best_crop_per_track({td(4, 9, 10, "Car")});
    ASSERT_EQ(best.size(), 1u);
    EXPECT_EQ(best.at(9), (BestCrop{4, {0, 0, 10, 10}}));
}

TEST(BestCropPerTrack, LargestArea) {
    // areas 100, 400, 200
    std::vector<TrackedDetection> ds{td(0, 1, 10, "Car"), td(1, 1, 20, "Car"),
                                     TrackedDetection{2, 1, {0, 0, 10, 20}, "Car", 0.5, false}};
    EXPECT_EQ(best_crop_per_track(ds).at(1).frame_index, 1u);
}

TEST(BestCropPerTrack, TieGoesToEarliestFrame) {
    std::vector<TrackedDetection> ds{td(7, 2, 10, "Car"), td(3, 2, 10, "Car")};
    EXPECT_EQ(best_crop_per_track(ds).at(2).frame_index, 3u);
}

TEST(BestCropPerTrack, DuplicateFrameRejected) {
    EXPECT_THROW((void)best_crop_per_track({td(1, 1, 10, "Car"), td(1, 1, 12, "Bus")}), DuplicateFramePerTrack);
}

TEST(MajorityLabel, VoteThenConfidence) {
    const auto a = td(0, 0, 1, "Car", 0.2);
    const auto b = td(1, 0, 1, "Car", 0.3);
    const auto c = td(2, 0, 1, "Truck", 0.99);
    EXPECT_EQ(majority_label({&a, &b, &c}), "Car");
    const auto d = td(3, 0, 1, "Truck", 0.1);
    EXPECT_EQ(majority_label({&a, &b, &c, &d}), "Truck");
    const auto e = td(4, 0, 1, "Person", 1.0);
    // Person has a single vote; its confidence does not matter
    EXPECT_EQ(majority_label({&a, &b, &c, &d, &e}), "Truck");
}

TEST(CorrectTracks, CountsOnlyCompatibleTracks) {
    std::vector<TrackedDetection> ds;
    const std::vector<std::string> labels{"Truck", "Car", "Person", "Person", "Person"};
    for (std::size_t t = 0; t < labels.size(); ++t) {
        for (std::size_t f = 0; f < 3; ++f) {
            ds.push_back(td(f, t, 10.0 + f, labels[t]));
        }
    }
    Frames frames(3);
    CountingClassifier cls({"Van", 0.95});
    const auto r = correct_tracks(ds, frames.lookup(), cls, van_compat());
    EXPECT_EQ(r.classifier_invocations, 2u);
    EXPECT_EQ(r.tracks_examined, 5u);
    EXPECT_EQ(cls.calls.size(), 2u);
    // classified on the largest crop
    EXPECT_EQ(cls.calls[0].first, 2u);
    EXPECT_EQ(r.per_track_decision.at(0), (TrackDecision{2, "Truck", "Van", 0.95}));
    EXPECT_EQ(r.per_track_decision.at(1), (TrackDecision{2, "Car", "Van", 0.95}));
    EXPECT_EQ(r.per_track_decision.count(2), 0u);
}

TEST(CorrectTracks, WholeTrackRelabeled) {
    std::vector<TrackedDetection> ds;
    for (std::size_t f = 0; f < 10; ++f) {
        ds.push_back(td(f, 3, 5.0 + f, "Bus", 0.1 * static_cast<double>(f % 5)));
    }
    Frames frames(10);
    CountingClassifier cls({"Van", 0.95});
    const auto r = correct_tracks(ds, frames.lookup(), cls, van_compat());
    ASSERT_EQ(r.corrected.size(), 10u);
    for (std::size_t i = 0; i < 10; ++i) {
        EXPECT_EQ(r.corrected[i].class_label, "Van");
        EXPECT_EQ(r.corrected[i].confidence, 0.95);
        EXPECT_TRUE(r.corrected[i].corrected);
        EXPECT_EQ(r.corrected[i].box, ds[i].box);
        EXPECT_EQ(r.corrected[i].frame_index, ds[i].frame_index);
    }
    EXPECT_EQ(r.classifier_invocations, 1u);
}

TEST(CorrectTracks, NoCompatibleTracks) {
    std::vector<TrackedDetection> ds{td(0, 0, 5, "Person"), td(1, 0, 5, "Person"), td(0, 1, 5, "Dog")};
    Frames frames(2);
    CountingClassifier cls({"Van", 0.95});
    const auto r = correct_tracks(ds, frames.lookup(), cls, van_compat());
    EXPECT_EQ(r.corrected, ds);
    EXPECT_EQ(r.classifier_invocations, 0u);
}

TEST(CorrectTracks, Errors) {
    Frames frames(2);
    CountingClassifier cls({"Van", 0.95});
    EXPECT_THROW((void)correct_tracks({td(5, 0, 5, "Car")}, frames.lookup(), cls, van_compat()), MissingFrame);
    EXPECT_THROW((void)correct_tracks({td(0, 0, 5, "Car"), td(0, 0, 6, "Car")}, frames.lookup(), cls, van_compat()),
                 DuplicateFramePerTrack);

    class Narrow : public CountingClassifier {
      public:
        Narrow() : CountingClassifier({"Van", 0.9}) {}
        [[nodiscard]] std::vector<std::string> label_set() const override { return {"Van"}; }
    } narrow;
    EXPECT_THROW((void)correct_tracks({td(0, 0, 5, "Car")}, frames.lookup(), narrow, van_compat()), LabelSetMismatch);
}

TEST(CorrectTracks, PropertiesOnRandomTracks) {
    std::mt19937_64 gen(8);
    const std::vector<std::string> pool{"Car", "Bus", "Truck", "Person", "Dog"};
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<TrackedDetection> ds;
        const std::size_t tracks = 1 + gen() % 8;
        for (std::size_t t = 0; t < tracks; ++t) {
            const std::size_t len = 1 + gen() % 6;
            const std::string base = pool[gen() % pool.size()];
            for (std::size_t f = 0; f < len; ++f) {
                // occasional label drift inside a track
                const std::string label = gen() % 5 == 0 ? pool[gen() % pool.size()] : base;
                ds.push_back(td(f, t * 10, 1.0 + static_cast<double>(gen() % 50), label,
                                static_cast<double>(gen() % 100) / 100.0));
            }
        }
        std::shuffle(ds.begin(), ds.end(), gen);
        Frames frames(6);
        CountingClassifier cls({"Van", 0.9});
        const auto r = correct_tracks(ds, frames.lookup(), cls, van_compat());

        EXPECT_LE(r.classifier_invocations, tracks);
        EXPECT_EQ(r.classifier_invocations, r.per_track_decision.size());
        std::map<std::size_t, std::set<std::pair<std::string, double>>> per_track;
        for (std::size_t i = 0; i < ds.size(); ++i) {
            EXPECT_EQ(r.corrected[i].box, ds[i].box);
            EXPECT_EQ(r.corrected[i].frame_index, ds[i].frame_index);
            EXPECT_EQ(r.corrected[i].track_id, ds[i].track_id);
            if (r.corrected[i].corrected) {
                per_track[ds[i].track_id].emplace(r.corrected[i].class_label, r.corrected[i].confidence);
            }
        }
        for (const auto &[id, values] : per_track) {
            EXPECT_EQ(values.size(), 1u) << "track " << id;
        }

        CountingClassifier again({"Van", 0.9});
        const auto second = correct_tracks(r.corrected, frames.lookup(), again, van_compat());
        EXPECT_EQ(second.corrected, r.corrected);
        EXPECT_EQ(second.classifier_invocations, 0u);
    }
}

} // namespace
} // namespace detext
