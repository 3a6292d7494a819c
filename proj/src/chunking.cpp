#include "chunkcount/chunking.hpp"

#include "chunkcount/errors.hpp"

#include <algorithm>
#include <string>

namespace chunkcount {

std::string_view to_string(Decision d) {
    switch (d) {
        case Decision::counted:
            return "counted";
        case Decision::filtered:
            return "filtered";
    }
    return "?";
}

std::string_view to_string(VerdictReason r) {
    switch (r) {
        case VerdictReason::crossed_in_chunk:
            return "crossed_in_chunk";
        case VerdictReason::after_line_at_start:
            return "after_line_at_start";
        case VerdictReason::never_crossed:
            return "never_crossed";
        case VerdictReason::wrong_direction:
            return "wrong_direction";
        case VerdictReason::outside_grace:
            return "outside_grace";
    }
    return "?";
}

std::vector<ChunkRange> partition(FrameIndex total_frames, std::size_t k) {
    if (total_frames < 1) {
        throw ValidationError("total_frames", "must be >= 1");
    }
    if (k < 1 || static_cast<FrameIndex>(k) > total_frames) {
        throw ValidationError("chunks", "must lie in [1, " + std::to_string(total_frames) + "], got " +
                                            std::to_string(k));
    }
    const auto kk = static_cast<FrameIndex>(k);
    const FrameIndex base = total_frames / kk;
    const FrameIndex longer = total_frames % kk;
    std::vector<ChunkRange> out;
    out.reserve(k);
    FrameIndex start = 0;
    for (FrameIndex i = 0; i < kk; ++i) {
        const FrameIndex len = base + (i < longer ? 1 : 0);
        out.push_back({static_cast<std::size_t>(i), start, start + len});
        start += len;
    }
    return out;
}

namespace {

struct CrossingScan {
    std::optional<FrameIndex> first_forward;  // frame completing the first in-direction crossing
    bool any_backward = false;
};

// Crossings complete on the first position strictly off the line after a
// position strictly on the other side; positions on the line are skipped.
CrossingScan scan_crossings(const Track& track, const SceneConfig& scene) {
    CrossingScan scan;
    const Segment& line = scene.counting_line();
    std::optional<Point2> anchor;
    for (const auto& h : track.history) {
        const int side = side_of_line(h.position, line);
        if (side == 0) {
            continue;
        }
        if (anchor && crossing(*anchor, h.position, line)) {
            if (dot(h.position - *anchor, scene.street_direction()) > 0.0) {
                scan.first_forward = h.frame;
                return scan;
            }
            scan.any_backward = true;
        }
        anchor = h.position;
    }
    return scan;
}

TrackVerdict counted(const Track& t, VerdictReason reason, FrameIndex frame) {
    return {t.id, Decision::counted, reason, frame};
}

TrackVerdict filtered(const Track& t, VerdictReason reason) {
    return {t.id, Decision::filtered, reason, std::nullopt};
}

}  // namespace

TrackVerdict classify_track(const Track& track, const SceneConfig& scene, const ChunkRange& chunk) {
    if (track.history.empty()) {
        throw ValidationError("history", "track " + std::to_string(track.id) + " has no positions");
    }
    for (const auto& h : track.history) {
        if (!chunk.contains(h.frame)) {
            throw ValidationError("history", "frame " + std::to_string(h.frame) + " of track " +
                                                 std::to_string(track.id) + " lies outside chunk " +
                                                 std::to_string(chunk.index));
        }
    }

    const CrossingScan scan = scan_crossings(track, scene);
    if (scan.first_forward) {
        return counted(track, VerdictReason::crossed_in_chunk, *scan.first_forward);
    }
    if (scan.any_backward) {
        return filtered(track, VerdictReason::wrong_direction);
    }

    const Segment& line = scene.counting_line();
    const bool all_after = std::all_of(track.history.begin(), track.history.end(), [&](const HistoryPoint& h) {
        return side_of_line(h.position, line) == scene.after_side();
    });
    if (!all_after) {
        return filtered(track, VerdictReason::never_crossed);
    }

    const HistoryPoint& first = track.history.front();
    const HistoryPoint& last = track.history.back();
    const FrameIndex seen_after_start = first.frame - chunk.start_frame;
    if (track.history.size() < 2) {
        // No motion estimate, so the crossing time cannot be placed.
        return filtered(track, VerdictReason::outside_grace);
    }
    const Point2 velocity = (1.0 / static_cast<double>(last.frame - first.frame)) * (last.position - first.position);
    if (dot(velocity, scene.street_direction()) < 0.0) {
        return filtered(track, VerdictReason::wrong_direction);
    }
    if (seen_after_start > scene.grace_frames()) {
        return filtered(track, VerdictReason::outside_grace);
    }
    // Where was the vehicle on the previous chunk's last frame? If already
    // past the line, that chunk saw it there and owns the count.
    const auto back = static_cast<double>(first.frame - (chunk.start_frame - 1));
    const Point2 at_previous_end = first.position - back * velocity;
    if (side_of_line(at_previous_end, line) == scene.after_side()) {
        return filtered(track, VerdictReason::outside_grace);
    }
    return counted(track, VerdictReason::after_line_at_start, first.frame);
}

TrackVerdict classify_track_naive(const Track& track, const SceneConfig& scene) {
    if (track.history.empty()) {
        throw ValidationError("history", "track " + std::to_string(track.id) + " has no positions");
    }
    const CrossingScan scan = scan_crossings(track, scene);
    if (scan.first_forward) {
        return counted(track, VerdictReason::crossed_in_chunk, *scan.first_forward);
    }
    for (const auto& h : track.history) {
        if (side_of_line(h.position, scene.counting_line()) == scene.after_side()) {
            return counted(track, VerdictReason::after_line_at_start, h.frame);
        }
    }
    return filtered(track, scan.any_backward ? VerdictReason::wrong_direction : VerdictReason::never_crossed);
}

ChunkResult process_chunk(std::span<const Detection> detections, const SceneConfig& scene,
                          const ChunkRange& chunk, bool dedup) {
    if (chunk.start_frame < 0 || chunk.start_frame >= chunk.end_frame) {
        throw ValidationError("chunk", "range must satisfy 0 <= start < end");
    }
    for (std::size_t i = 0; i < detections.size(); ++i) {
        if (!chunk.contains(detections[i].frame)) {
            throw ValidationError("frame", "detection at frame " + std::to_string(detections[i].frame) +
                                               " outside chunk [" + std::to_string(chunk.start_frame) + ", " +
                                               std::to_string(chunk.end_frame) + ")");
        }
        if (i > 0 && detections[i].frame < detections[i - 1].frame) {
            throw ValidationError("frame", "detections are not frame-ordered");
        }
    }

    Tracker tracker(scene.tracker());
    std::size_t next = 0;
    for (FrameIndex f = chunk.start_frame; f < chunk.end_frame; ++f) {
        std::size_t end = next;
        while (end < detections.size() && detections[end].frame == f) {
            ++end;
        }
        tracker.step(f, detections.subspan(next, end - next), scene);
        next = end;
    }

    ChunkResult result;
    result.range = chunk;
    for (const Track& t : tracker.finalize()) {
        TrackVerdict v = dedup ? classify_track(t, scene, chunk) : classify_track_naive(t, scene);
        if (v.decision == Decision::counted) {
            ++result.counted;
        } else {
            ++result.filtered;
        }
        result.verdicts.push_back(v);
    }
    return result;
}

}  // namespace chunkcount
