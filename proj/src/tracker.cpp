#include "chunkcount/tracker.hpp"

#include "chunkcount/assignment.hpp"
#include "chunkcount/errors.hpp"

#include <string>

namespace chunkcount {

Tracker::Tracker(TrackerParams params) : params_(params) { validate(params_); }

double Tracker::association_cost(const Track& track, const Detection& d) const {
    if (params_.metric == CostMetric::mahalanobis) {
        return innovation_distance(track.state, d.centroid(), params_.kalman);
    }
    return norm(d.centroid() - track.state.position());
}

void Tracker::step(FrameIndex frame, std::span<const Detection> detections, const SceneConfig& scene) {
    if (last_frame_ && frame <= *last_frame_) {
        throw SequencingError("tracker stepped to frame " + std::to_string(frame) +
                              " after frame " + std::to_string(*last_frame_));
    }
    std::vector<const Detection*> inside;
    inside.reserve(detections.size());
    for (const auto& d : detections) {
        if (d.frame != frame) {
            throw ValidationError("frame", "detection at frame " + std::to_string(d.frame) +
                                               " passed to step for frame " + std::to_string(frame));
        }
        if (point_in_polygon(d.centroid(), scene.region())) {
            inside.push_back(&d);
        }
    }

    const FrameIndex elapsed = last_frame_ ? frame - *last_frame_ : 0;
    last_frame_ = frame;

    std::vector<std::size_t> live;
    for (std::size_t i = 0; i < tracks_.size(); ++i) {
        if (tracks_[i].status == TrackStatus::dead) {
            continue;
        }
        for (FrameIndex k = 0; k < elapsed; ++k) {
            tracks_[i].state = predict(tracks_[i].state, params_.kalman);
        }
        live.push_back(i);
    }

    CostMatrix costs(live.size(), inside.size(), params_.gate);
    for (std::size_t r = 0; r < live.size(); ++r) {
        for (std::size_t c = 0; c < inside.size(); ++c) {
            costs(r, c) = association_cost(tracks_[live[r]], *inside[c]);
        }
    }
    const Assignment assignment = solve_assignment(costs);

    for (const auto& [r, c] : assignment.pairs) {
        Track& t = tracks_[live[r]];
        const Detection& d = *inside[c];
        t.state = update(t.state, d.centroid(), params_.kalman).state;
        t.history.push_back({frame, t.state.position()});
        t.hits += 1;
        t.misses_in_a_row = 0;
        t.width = d.w;
        t.height = d.h;
        if (t.status == TrackStatus::tentative && t.hits >= params_.min_hits) {
            t.status = TrackStatus::confirmed;
        }
    }
    for (std::size_t r : assignment.unmatched_rows) {
        Track& t = tracks_[live[r]];
        t.misses_in_a_row += 1;
        if (t.misses_in_a_row >= params_.max_age) {
            t.status = TrackStatus::dead;
        }
    }
    for (std::size_t c : assignment.unmatched_cols) {
        const Detection& d = *inside[c];
        Track t;
        t.id = next_id_++;
        t.state = init_state(d.centroid(), params_.kalman);
        t.history.push_back({frame, t.state.position()});
        t.hits = 1;
        t.first_frame = frame;
        t.width = d.w;
        t.height = d.h;
        t.status = t.hits >= params_.min_hits ? TrackStatus::confirmed : TrackStatus::tentative;
        tracks_.push_back(std::move(t));
    }
}

}  // namespace chunkcount
