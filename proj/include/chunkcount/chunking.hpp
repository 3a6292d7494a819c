#pragma once

#include "chunkcount/detection.hpp"
#include "chunkcount/scene.hpp"
#include "chunkcount/tracker.hpp"

#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace chunkcount {

// Half-open frame range [start_frame, end_frame) handled by one map task.
struct ChunkRange {
    std::size_t index = 0;
    FrameIndex start_frame = 0;
    FrameIndex end_frame = 0;

    FrameIndex length() const noexcept { return end_frame - start_frame; }
    bool contains(FrameIndex f) const noexcept { return f >= start_frame && f < end_frame; }

    friend bool operator==(const ChunkRange&, const ChunkRange&) = default;
};

enum class Decision { counted, filtered };

enum class VerdictReason {
    crossed_in_chunk,
    after_line_at_start,
    never_crossed,
    wrong_direction,
    outside_grace,
};

std::string_view to_string(Decision d);
std::string_view to_string(VerdictReason r);

struct TrackVerdict {
    std::int64_t track_id = 0;
    Decision decision = Decision::filtered;
    VerdictReason reason = VerdictReason::never_crossed;
    std::optional<FrameIndex> crossing_frame;

    friend bool operator==(const TrackVerdict&, const TrackVerdict&) = default;
};

struct ChunkResult {
    ChunkRange range;
    std::vector<TrackVerdict> verdicts;
    std::size_t counted = 0;
    std::size_t filtered = 0;
};

// k contiguous ranges covering [0, total_frames); lengths differ by at most
// one and the first total_frames % k ranges are the longer ones.
std::vector<ChunkRange> partition(FrameIndex total_frames, std::size_t k);

// Boundary deduplication for one finished track.
//
// Counted when the track's history completes a crossing of the counting
// line in the street direction (crossed_in_chunk, first such crossing
// wins), or when the track lies entirely past the line, was first seen
// within grace_frames of the chunk start, moves with the street, and its
// average velocity puts it before the line at the previous chunk's last
// frame (after_line_at_start). The last test is what keeps a vehicle that
// crossed early in the previous chunk, and is still visible here, from
// being counted twice.
TrackVerdict classify_track(const Track& track, const SceneConfig& scene, const ChunkRange& chunk);

// Naive per-chunk counting without deduplication: any in-direction
// crossing, or any position past the line, counts the track.
TrackVerdict classify_track_naive(const Track& track, const SceneConfig& scene);

// Map task: track every frame of the chunk, then classify each track.
// Throws ValidationError if a detection lies outside the range or the
// detections are not frame-ordered.
ChunkResult process_chunk(std::span<const Detection> detections, const SceneConfig& scene,
                          const ChunkRange& chunk, bool dedup);

}  // namespace chunkcount
