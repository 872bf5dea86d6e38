#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace detext {

/// Base of every error raised by the library. Callers that only need a
/// diagnostic can catch this; tests and the CLI catch the concrete types.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// A line of a line-delimited input file could not be parsed or violates its schema.
class MalformedRecord : public Error {
  public:
    MalformedRecord(std::size_t line, const std::string &what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
    [[nodiscard]] std::size_t line() const noexcept { return line_; }

  private:
    std::size_t line_;
};

class DimensionMismatch : public Error {
  public:
    DimensionMismatch(std::size_t expected, std::size_t actual, std::size_t line = 0)
        : Error(message(expected, actual, line)), expected_(expected), actual_(actual), line_(line) {}

    [[nodiscard]] std::size_t expected() const noexcept { return expected_; }
    [[nodiscard]] std::size_t actual() const noexcept { return actual_; }
    /// 1-based line in the source file, 0 when not file-backed.
    [[nodiscard]] std::size_t line() const noexcept { return line_; }

  private:
    static std::string message(std::size_t expected, std::size_t actual, std::size_t line) {
        std::string msg = "dimension mismatch: expected " + std::to_string(expected) + ", got " +
                          std::to_string(actual);
        if (line != 0) {
            msg = "line " + std::to_string(line) + ": " + msg;
        }
        return msg;
    }

    std::size_t expected_;
    std::size_t actual_;
    std::size_t line_;
};

class ZeroVector : public Error {
  public:
    ZeroVector(std::string class_label, std::string sample_id)
        : Error("all-zero feature vector for class '" + class_label + "', sample '" + sample_id + "'"),
          class_label_(std::move(class_label)), sample_id_(std::move(sample_id)) {}
    [[nodiscard]] const std::string &class_label() const noexcept { return class_label_; }
    [[nodiscard]] const std::string &sample_id() const noexcept { return sample_id_; }

  private:
    std::string class_label_;
    std::string sample_id_;
};

class EmptyStore : public Error {
  public:
    EmptyStore() : Error("feature store contains no records") {}
};

class EmptyInput : public Error {
  public:
    using Error::Error;
};

class DuplicateLabel : public Error {
  public:
    explicit DuplicateLabel(const std::string &label) : Error("duplicate class label '" + label + "'") {}
};

class UnknownClass : public Error {
  public:
    explicit UnknownClass(const std::string &label) : Error("unknown class '" + label + "'"), label_(label) {}
    [[nodiscard]] const std::string &label() const noexcept { return label_; }

  private:
    std::string label_;
};

class OverlappingSets : public Error {
  public:
    explicit OverlappingSets(const std::string &label)
        : Error("class '" + label + "' is listed as both base and extension") {}
};

class NonPositiveThreshold : public Error {
  public:
    explicit NonPositiveThreshold(double value)
        : Error("similarity threshold must be positive, got " + std::to_string(value)) {}
};

class LabelSetMismatch : public Error {
  public:
    using Error::Error;
};

class InvalidBox : public Error {
  public:
    using Error::Error;
};

class FrameMismatch : public Error {
  public:
    using Error::Error;
};

/// A pipeline stage threw while handling a frame.
class StageFailure : public Error {
  public:
    StageFailure(std::string stage, std::size_t frame_index, const std::string &cause)
        : Error(stage + " failed on frame " + std::to_string(frame_index) + ": " + cause),
          stage_(std::move(stage)), frame_index_(frame_index), cause_(cause) {}
    [[nodiscard]] const std::string &stage() const noexcept { return stage_; }
    [[nodiscard]] std::size_t frame_index() const noexcept { return frame_index_; }
    [[nodiscard]] const std::string &cause() const noexcept { return cause_; }

  private:
    std::string stage_;
    std::size_t frame_index_;
    std::string cause_;
};

class DuplicateFramePerTrack : public Error {
  public:
    DuplicateFramePerTrack(std::size_t track_id, std::size_t frame_index)
        : Error("track " + std::to_string(track_id) + " has more than one detection on frame " +
                std::to_string(frame_index)) {}
};

class MissingFrame : public Error {
  public:
    explicit MissingFrame(std::size_t frame_index)
        : Error("frame " + std::to_string(frame_index) + " is not available") {}
};

class MalformedScenario : public Error {
  public:
    using Error::Error;
};

class FrameOutOfRange : public Error {
  public:
    FrameOutOfRange(std::size_t frame_index, std::size_t frame_count)
        : Error("frame " + std::to_string(frame_index) + " outside scenario of " + std::to_string(frame_count) +
                " frames") {}
};

class NoMatchingRegion : public Error {
  public:
    explicit NoMatchingRegion(std::size_t frame_index)
        : Error("no scripted region matches the query box on frame " + std::to_string(frame_index)) {}
};

} // namespace detext
