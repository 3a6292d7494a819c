#pragma once

#include "chunkcount/geometry.hpp"
#include "chunkcount/kalman.hpp"

#include <cstdint>

namespace chunkcount {

enum class CostMetric { euclidean, mahalanobis };

struct TrackerParams {
    int max_age = 5;    // consecutive misses before a track dies
    int min_hits = 1;   // hits before a track is confirmed
    double gate = 50.0; // association costs above this are forbidden
    CostMetric metric = CostMetric::euclidean;
    KalmanParams kalman;

    friend bool operator==(const TrackerParams&, const TrackerParams&) = default;
};

void validate(const TrackerParams& params);

// Street configuration: where to count, which area to track, and which way
// traffic legally crosses the line.
class SceneConfig {
public:
    static constexpr int kDefaultGraceFrames = 5;

    // Validates every invariant; throws ValidationError naming the field.
    // `street_direction` is re-normalised when within 1e-6 of unit length.
    SceneConfig(Segment counting_line, Polygon region, Point2 street_direction,
                int grace_frames = kDefaultGraceFrames, TrackerParams tracker = {});

    const Segment& counting_line() const noexcept { return counting_line_; }
    const Polygon& region() const noexcept { return region_; }
    Point2 street_direction() const noexcept { return street_direction_; }
    int grace_frames() const noexcept { return grace_frames_; }
    const TrackerParams& tracker() const noexcept { return tracker_; }

    // side_of_line value of positions past the line in the street direction.
    int after_side() const noexcept { return after_side_; }

    friend bool operator==(const SceneConfig&, const SceneConfig&) = default;

private:
    Segment counting_line_;
    Polygon region_;
    Point2 street_direction_;
    int grace_frames_;
    TrackerParams tracker_;
    int after_side_;
};

}  // namespace chunkcount
