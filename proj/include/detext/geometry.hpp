#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace detext {

/// Pixel-space box with x1 < x2, y1 < y2.
struct BoundingBox {
    double x1 = 0.0;
    double y1 = 0.0;
    double x2 = 0.0;
    double y2 = 0.0;

    [[nodiscard]] double width() const noexcept { return x2 - x1; }
    [[nodiscard]] double height() const noexcept { return y2 - y1; }
    [[nodiscard]] double area() const noexcept { return width() * height(); }

    friend bool operator==(const BoundingBox &, const BoundingBox &) = default;
};

struct Frame {
    std::size_t index = 0;
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<std::uint8_t> payload;

    friend bool operator==(const Frame &, const Frame &) = default;
};

struct Detection {
    BoundingBox box;
    std::string class_label;
    double confidence = 0.0;
    /// Set when the correcting classifier rewrote label and confidence.
    bool corrected = false;

    friend bool operator==(const Detection &, const Detection &) = default;
};

struct PredictionObject {
    std::size_t frame_index = 0;
    std::vector<Detection> detections;

    friend bool operator==(const PredictionObject &, const PredictionObject &) = default;
};

[[nodiscard]] bool box_within(const BoundingBox &box, std::size_t width, std::size_t height) noexcept;
/// Throws InvalidBox naming the frame index.
void validate_box(const BoundingBox &box, const Frame &frame);

[[nodiscard]] double intersection_over_union(const BoundingBox &a, const BoundingBox &b) noexcept;

/// Grows the box by `pad_fraction` of its width and height on each side,
/// clamped to the frame. Throws InvalidBox, std::invalid_argument on a
/// negative or non-finite pad.
[[nodiscard]] BoundingBox crop_box(const Frame &frame, const BoundingBox &box, double pad_fraction = 0.0);

/// Regular files of `dir` in lexicographic name order as frames 0..n-1, each
/// file's bytes as payload. Pixel size is not decoded and is taken as given.
/// Throws Error if `dir` is not a directory; std::invalid_argument on a zero size.
[[nodiscard]] std::vector<Frame> load_frame_directory(const std::filesystem::path &dir, std::size_t width,
                                                      std::size_t height);

} // namespace detext
