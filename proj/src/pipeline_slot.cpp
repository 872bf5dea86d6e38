#include "detext/pipeline_slot.hpp"

namespace detext {

bool PipelineSlot::put(Frame frame, PredictionObject prediction) {
    std::unique_lock lock(mutex_);
    changed_.wait(lock, [this] { return state_ != State::produced || cancelled_; });
    if (cancelled_) {
        return false;
    }
    if (state_ == State::produced) {
        ++counters_.overwritten_unconsumed;
    }
    frame_ = std::move(frame);
    prediction_ = std::move(prediction);
    state_ = State::produced;
    ++counters_.produced;
    lock.unlock();
    changed_.notify_all();
    return true;
}

std::optional<PipelineSlot::Item> PipelineSlot::take() {
    std::unique_lock lock(mutex_);
    changed_.wait(lock, [this] { return state_ == State::produced || closed_ || cancelled_; });
    if (cancelled_ || state_ != State::produced) {
        return std::nullopt;
    }
    Item item{std::move(*frame_), std::move(*prediction_)};
    frame_.reset();
    prediction_.reset();
    if (!consumed_indices_.insert(item.frame.index).second) {
        ++counters_.double_consumed;
    }
    state_ = State::consumed;
    ++counters_.consumed;
    lock.unlock();
    changed_.notify_all();
    return item;
}

void PipelineSlot::close() {
    {
        std::lock_guard lock(mutex_);
        closed_ = true;
    }
    changed_.notify_all();
}

void PipelineSlot::cancel() {
    {
        std::lock_guard lock(mutex_);
        cancelled_ = true;
    }
    changed_.notify_all();
}

PipelineSlot::State PipelineSlot::state() const {
    std::lock_guard lock(mutex_);
    return state_;
}

SlotCounters PipelineSlot::counters() const {
    std::lock_guard lock(mutex_);
    return counters_;
}

} // namespace detext
