#pragma once

#include "chunkcount/geometry.hpp"

#include <cstdint>
#include <optional>

namespace chunkcount {

using FrameIndex = std::int64_t;

// Ground-truth tag for simulator clutter (false positives).
inline constexpr std::int64_t kClutterTruthId = -1;

// One detector output at a global frame index.
struct Detection {
    FrameIndex frame = 0;
    double cx = 0.0;
    double cy = 0.0;
    double w = 0.0;
    double h = 0.0;
    double score = 1.0;
    // Simulator ground truth; the pipeline never reads it.
    std::optional<std::int64_t> truth_id;

    Point2 centroid() const { return {cx, cy}; }

    friend bool operator==(const Detection&, const Detection&) = default;
};

// Throws ValidationError unless the detection is finite, has a non-negative
// frame and extent, and a score in [0, 1].
void validate(const Detection& d);

}  // namespace chunkcount
