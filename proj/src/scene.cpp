#include "chunkcount/scene.hpp"

#include "chunkcount/detection.hpp"
#include "chunkcount/errors.hpp"

#include <cmath>

namespace chunkcount {

void validate(const Detection& d) {
    if (d.frame < 0) {
        throw ValidationError("frame", "must be >= 0, got " + std::to_string(d.frame));
    }
    if (!std::isfinite(d.cx) || !std::isfinite(d.cy)) {
        throw ValidationError("cx/cy", "centroid must be finite");
    }
    if (!std::isfinite(d.w) || !std::isfinite(d.h) || d.w < 0.0 || d.h < 0.0) {
        throw ValidationError("w/h", "extent must be finite and >= 0");
    }
    if (!std::isfinite(d.score) || d.score < 0.0 || d.score > 1.0) {
        throw ValidationError("score", "must lie in [0, 1]");
    }
}

void validate(const TrackerParams& params) {
    if (params.max_age < 1) {
        throw ValidationError("tracker.max_age", "must be >= 1");
    }
    if (params.min_hits < 1) {
        throw ValidationError("tracker.min_hits", "must be >= 1");
    }
    if (!std::isfinite(params.gate) || params.gate <= 0.0) {
        throw ValidationError("tracker.gate", "must be a finite value > 0");
    }
    try {
        validate(params.kalman);
    } catch (const ValidationError& e) {
        throw ValidationError("tracker." + e.field(), e.message());
    }
}

SceneConfig::SceneConfig(Segment counting_line, Polygon region, Point2 street_direction,
                         int grace_frames, TrackerParams tracker)
    : counting_line_(counting_line),
      region_(std::move(region)),
      street_direction_(street_direction),
      grace_frames_(grace_frames),
      tracker_(tracker),
      after_side_(0) {
    const double len = norm(street_direction_);
    if (std::abs(len - 1.0) > 1e-6) {
        throw ValidationError("street_direction",
                              "must be a unit vector (norm " + std::to_string(len) + ")");
    }
    // Rescaling is skipped once the norm is within rounding of 1 so that a
    // saved direction reloads bit-identically.
    if (std::abs(len - 1.0) > 1e-14) {
        street_direction_ = (1.0 / len) * street_direction_;
    }

    if (!point_in_polygon(counting_line_.a(), region_) ||
        !point_in_polygon(counting_line_.b(), region_)) {
        throw ValidationError("counting_line", "endpoints must lie inside or on the region");
    }

    const Point2 line_unit = (1.0 / counting_line_.length()) * counting_line_.vector();
    const double sine = cross(line_unit, street_direction_);
    if (std::abs(sine) <= kGeomEpsilon) {
        throw ValidationError("street_direction", "is parallel to the counting line");
    }
    after_side_ = sine > 0 ? 1 : -1;

    if (grace_frames_ < 0) {
        throw ValidationError("grace_frames", "must be >= 0");
    }
    validate(tracker_);
}

}  // namespace chunkcount
