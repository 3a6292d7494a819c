#pragma once

#include "chunkcount/detection.hpp"
#include "chunkcount/kalman.hpp"
#include "chunkcount/scene.hpp"

#include <optional>
#include <span>
#include <vector>

namespace chunkcount {

enum class TrackStatus { tentative, confirmed, dead };

struct HistoryPoint {
    FrameIndex frame;
    Point2 position;

    friend bool operator==(const HistoryPoint&, const HistoryPoint&) = default;
};

struct Track {
    std::int64_t id = 0;  // chunk-local, starts at 1
    KalmanState state;
    // Observed-and-updated positions only; coasting frames are not recorded.
    std::vector<HistoryPoint> history;
    int hits = 0;
    int misses_in_a_row = 0;
    TrackStatus status = TrackStatus::tentative;
    FrameIndex first_frame = 0;
    double width = 0.0;  // extent of the last matched detection, unfiltered
    double height = 0.0;
};

// Single-chunk multi-object tracker: Kalman prediction, Hungarian
// association under a distance gate, and a tentative/confirmed/dead
// lifecycle. Instances are single-owner and strictly sequential.
class Tracker {
public:
    explicit Tracker(TrackerParams params);

    // Advances to `frame`. Detections outside the scene region are dropped
    // before association. Throws SequencingError unless `frame` is greater
    // than the previous one, ValidationError if a detection is for a
    // different frame.
    void step(FrameIndex frame, std::span<const Detection> detections, const SceneConfig& scene);

    // Every track created so far, dead ones included, ordered by id.
    std::vector<Track> finalize() const { return tracks_; }

    std::span<const Track> tracks() const noexcept { return tracks_; }
    std::optional<FrameIndex> last_frame() const noexcept { return last_frame_; }

private:
    double association_cost(const Track& track, const Detection& d) const;

    TrackerParams params_;
    std::vector<Track> tracks_;
    std::int64_t next_id_ = 1;
    std::optional<FrameIndex> last_frame_;
};

}  // namespace chunkcount
