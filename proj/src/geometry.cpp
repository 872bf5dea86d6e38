#include "detext/geometry.hpp"

#include "detext/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>
#include <stdexcept>

namespace detext {

bool box_within(const BoundingBox &box, std::size_t width, std::size_t height) noexcept {
    const auto w = static_cast<double>(width);
    const auto h = static_cast<double>(height);
    return std::isfinite(box.x1) && std::isfinite(box.y1) && std::isfinite(box.x2) && std::isfinite(box.y2) &&
           0.0 <= box.x1 && box.x1 < box.x2 && box.x2 <= w && 0.0 <= box.y1 && box.y1 < box.y2 && box.y2 <= h;
}

void validate_box(const BoundingBox &box, const Frame &frame) {
    if (!box_within(box, frame.width, frame.height)) {
        std::ostringstream msg;
        msg << "box [" << box.x1 << ", " << box.y1 << ", " << box.x2 << ", " << box.y2 << "] invalid for "
            << frame.width << "x" << frame.height << " frame " << frame.index;
        throw InvalidBox(msg.str());
    }
}

double intersection_over_union(const BoundingBox &a, const BoundingBox &b) noexcept {
    const double ix = std::max(0.0, std::min(a.x2, b.x2) - std::max(a.x1, b.x1));
    const double iy = std::max(0.0, std::min(a.y2, b.y2) - std::max(a.y1, b.y1));
    const double inter = ix * iy;
    const double uni = a.area() + b.area() - inter;
    return uni > 0.0 ? inter / uni : 0.0;
}

BoundingBox crop_box(const Frame &frame, const BoundingBox &box, double pad_fraction) {
    validate_box(box, frame);
    if (!std::isfinite(pad_fraction) || pad_fraction < 0.0) {
        throw std::invalid_argument("pad fraction must be finite and non-negative");
    }
    const double px = box.width() * pad_fraction;
    const double py = box.height() * pad_fraction;
    return BoundingBox{
        std::max(0.0, box.x1 - px),
        std::max(0.0, box.y1 - py),
        std::min(static_cast<double>(frame.width), box.x2 + px),
        std::min(static_cast<double>(frame.height), box.y2 + py),
    };
}

std::vector<Frame> load_frame_directory(const std::filesystem::path &dir, std::size_t width, std::size_t height) {
    if (width == 0 || height == 0) {
        throw std::invalid_argument("frame size must be positive");
    }
    if (!std::filesystem::is_directory(dir)) {
        throw Error("not a frame directory: '" + dir.string() + "'");
    }
    std::vector<std::filesystem::path> files;
    for (const auto &entry : std::filesystem::directory_iterator(dir)) {
        if (entry.is_regular_file()) {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end(),
              [](const auto &a, const auto &b) { return a.filename().string() < b.filename().string(); });

    std::vector<Frame> frames;
    frames.reserve(files.size());
    for (const auto &path : files) {
        std::ifstream in(path, std::ios::binary);
        if (!in) {
            throw Error("cannot read frame '" + path.string() + "'");
        }
        Frame f{frames.size(), width, height, {}};
        f.payload.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
        frames.push_back(std::move(f));
    }
    return frames;
}

} // namespace detext
