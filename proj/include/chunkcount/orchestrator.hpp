#pragma once

#include "chunkcount/chunking.hpp"
#include "chunkcount/detection.hpp"
#include "chunkcount/scene.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace chunkcount {

struct ChunkSummary {
    ChunkRange range;
    std::size_t counted = 0;
    std::size_t filtered = 0;

    friend bool operator==(const ChunkSummary&, const ChunkSummary&) = default;
};

struct PhaseTimings {
    double partition_ms = 0.0;
    double map_ms = 0.0;
    double reduce_ms = 0.0;

    friend bool operator==(const PhaseTimings&, const PhaseTimings&) = default;
};

struct CountReport {
    std::string run_id;
    std::string scene;  // label, usually the scene file path
    std::size_t chunks = 1;
    std::size_t total = 0;
    std::vector<ChunkSummary> per_chunk;  // ordered by range.index
    bool dedup = true;
    bool oracle = false;
    std::optional<std::uint64_t> seed;
    PhaseTimings wall_time_ms;
    std::string timestamp;  // ISO 8601, UTC

    friend bool operator==(const CountReport&, const CountReport&) = default;
};

struct ReduceResult {
    std::size_t total = 0;
    std::vector<ChunkSummary> per_chunk;
};

// Order-insensitive reduction. Throws ValidationError unless the results
// form a partition: indices 0..k-1, first range starting at frame 0, each
// range starting where the previous one ends.
ReduceResult reduce(std::vector<ChunkResult> results);

struct PipelineOptions {
    std::size_t chunks = 1;
    std::size_t workers = 1;
    bool dedup = true;
    // Frame count to partition; defaults to last detection frame + 1 (at
    // least 1).
    std::optional<FrameIndex> total_frames;
    std::string scene_label;
    std::optional<std::uint64_t> seed;
};

// Partition, slice on the caller's thread, run process_chunk on at most
// `workers` threads, barrier, reduce. Fails fast: the error of the
// lowest-index failing chunk is rethrown and no report is produced.
CountReport run_pipeline(std::span<const Detection> detections, const SceneConfig& scene,
                         const PipelineOptions& options);

// Whole stream as one chunk with deduplication; tagged as the oracle.
CountReport run_single(std::span<const Detection> detections, const SceneConfig& scene,
                       PipelineOptions options = {});

struct ReportDiff {
    std::int64_t total_delta = 0;  // b.total - a.total
    bool per_chunk_equal = true;
    std::vector<ChunkSummary> a_chunks;
    std::vector<ChunkSummary> b_chunks;

    bool empty() const noexcept { return total_delta == 0 && per_chunk_equal; }
    bool totals_equal() const noexcept { return total_delta == 0; }
};

// Throws ValidationError when the reports are for different scenes.
ReportDiff compare(const CountReport& a, const CountReport& b);

// Canonical JSON of the report without run_id, timestamp and wall_time_ms:
// a pure function of (detections, scene, k, dedup).
std::string report_content(const CountReport& report);

// Worker count from CHUNKCOUNT_WORKERS, else hardware concurrency (>= 1).
std::size_t default_worker_count();

}  // namespace chunkcount
