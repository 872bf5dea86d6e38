#pragma once

#include "detext/geometry.hpp"

#include <condition_variable>
#include <cstddef>
#include <mutex>
#include <optional>
#include <set>

namespace detext {

/// Handoff event counts recorded by a PipelineSlot. A correct run has zero
/// overwrites and zero double consumptions.
struct SlotCounters {
    std::size_t produced = 0;
    std::size_t consumed = 0;
    std::size_t overwritten_unconsumed = 0;
    std::size_t double_consumed = 0;

    friend bool operator==(const SlotCounters &, const SlotCounters &) = default;
};

/// Depth-one mailbox shared by the detector and corrector stages. Every
/// access happens under one mutex; the state machine
/// empty -> produced -> consumed -> produced ... makes the writer wait for
/// the reader before overwriting and keeps the reader from seeing a frame twice.
class PipelineSlot {
  public:
    enum class State { empty, produced, consumed };

    struct Item {
        Frame frame;
        PredictionObject prediction;
    };

    PipelineSlot() = default;
    PipelineSlot(const PipelineSlot &) = delete;
    PipelineSlot &operator=(const PipelineSlot &) = delete;

    /// Blocks while the previous item is unconsumed. Returns false if the
    /// slot was cancelled, in which case the item is dropped.
    bool put(Frame frame, PredictionObject prediction);

    /// Blocks until an item is produced. Returns nullopt once the producer
    /// has closed the slot and nothing is left, or after cancel().
    std::optional<Item> take();

    /// Producer side: no more items will follow.
    void close();
    /// Consumer side: stop accepting items and release a blocked producer.
    void cancel();

    [[nodiscard]] State state() const;
    [[nodiscard]] SlotCounters counters() const;

  private:
    mutable std::mutex mutex_;
    std::condition_variable changed_;
    State state_ = State::empty;
    bool closed_ = false;
    bool cancelled_ = false;
    std::optional<Frame> frame_;
    std::optional<PredictionObject> prediction_;
    std::set<std::size_t> consumed_indices_;
    SlotCounters counters_;
};

} // namespace detext
