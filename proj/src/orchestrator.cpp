#include "chunkcount/orchestrator.hpp"

#include "chunkcount/config_io.hpp"
#include "chunkcount/errors.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <exception>
#include <thread>

namespace chunkcount {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since) {
    return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

// FNV-1a, 64 bit.
class Fnv1a {
public:
    void bytes(const void* data, std::size_t n) {
        const auto* p = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < n; ++i) {
            hash_ ^= p[i];
            hash_ *= 0x100000001b3ULL;
        }
    }
    void text(std::string_view s) { bytes(s.data(), s.size()); }
    template <typename T>
    void value(T v) {
        bytes(&v, sizeof v);
    }
    std::uint64_t digest() const { return hash_; }

private:
    std::uint64_t hash_ = 0xcbf29ce484222325ULL;
};

std::string iso8601_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t secs = std::chrono::system_clock::to_time_t(now);
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count() % 1000;
    std::tm tm{};
    gmtime_r(&secs, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%S", &tm);
    char out[40];
    std::snprintf(out, sizeof out, "%s.%03dZ", buf, static_cast<int>(ms));
    return out;
}

std::string make_run_id(std::span<const Detection> detections, const SceneConfig& scene, std::size_t k, bool dedup,
                        FrameIndex total_frames, const std::string& timestamp) {
    Fnv1a h;
    h.text(scene_to_json(scene));
    for (const auto& d : detections) {
        h.value(d.frame);
        h.value(std::bit_cast<std::uint64_t>(d.cx));
        h.value(std::bit_cast<std::uint64_t>(d.cy));
        h.value(std::bit_cast<std::uint64_t>(d.w));
        h.value(std::bit_cast<std::uint64_t>(d.h));
        h.value(std::bit_cast<std::uint64_t>(d.score));
    }
    h.value(static_cast<std::uint64_t>(k));
    h.value(static_cast<std::uint8_t>(dedup));
    h.value(total_frames);
    h.text(timestamp);
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h.digest()));
    return buf;
}

}  // namespace

ReduceResult reduce(std::vector<ChunkResult> results) {
    std::sort(results.begin(), results.end(),
              [](const ChunkResult& a, const ChunkResult& b) { return a.range.index < b.range.index; });
    ReduceResult out;
    FrameIndex expected_start = 0;
    for (std::size_t i = 0; i < results.size(); ++i) {
        const ChunkResult& r = results[i];
        if (r.range.index != i) {
            throw ValidationError("chunks", "chunk index " + std::to_string(i) + " is missing or duplicated");
        }
        if (r.range.start_frame != expected_start || r.range.end_frame <= r.range.start_frame) {
            throw ValidationError("chunks", "chunk " + std::to_string(i) + " range [" +
                                                std::to_string(r.range.start_frame) + ", " +
                                                std::to_string(r.range.end_frame) +
                                                ") leaves a gap or overlaps its predecessor");
        }
        expected_start = r.range.end_frame;
        out.total += r.counted;
        out.per_chunk.push_back({r.range, r.counted, r.filtered});
    }
    return out;
}

CountReport run_pipeline(std::span<const Detection> detections, const SceneConfig& scene,
                         const PipelineOptions& options) {
    if (options.workers < 1) {
        throw ValidationError("workers", "must be >= 1");
    }
    for (std::size_t i = 1; i < detections.size(); ++i) {
        if (detections[i].frame < detections[i - 1].frame) {
            throw ValidationError("frame", "detections are not frame-ordered");
        }
    }
    for (const auto& d : detections) {
        validate(d);
    }
    const FrameIndex last_frame = detections.empty() ? 0 : detections.back().frame;
    const FrameIndex total_frames = options.total_frames.value_or(std::max<FrameIndex>(1, last_frame + 1));
    if (!detections.empty() && last_frame >= total_frames) {
        throw ValidationError("total_frames", "detections extend to frame " + std::to_string(last_frame) +
                                                  " beyond the frame count " + std::to_string(total_frames));
    }

    CountReport report;
    report.timestamp = iso8601_now();

    auto t0 = Clock::now();
    const std::vector<ChunkRange> ranges = partition(total_frames, options.chunks);
    std::vector<std::span<const Detection>> slices;
    slices.reserve(ranges.size());
    for (const auto& r : ranges) {
        auto lo = std::lower_bound(detections.begin(), detections.end(), r.start_frame,
                                   [](const Detection& d, FrameIndex f) { return d.frame < f; });
        auto hi = std::lower_bound(lo, detections.end(), r.end_frame,
                                   [](const Detection& d, FrameIndex f) { return d.frame < f; });
        slices.emplace_back(lo, hi);
    }
    report.wall_time_ms.partition_ms = elapsed_ms(t0);

    t0 = Clock::now();
    std::vector<ChunkResult> results(ranges.size());
    std::vector<std::exception_ptr> errors(ranges.size());
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= ranges.size() || failed.load()) {
                return;
            }
            try {
                results[i] = process_chunk(slices[i], scene, ranges[i], options.dedup);
            } catch (...) {
                errors[i] = std::current_exception();
                failed.store(true);
            }
        }
    };
    const std::size_t pool = std::min(options.workers, ranges.size());
    if (pool <= 1) {
        worker();
    } else {
        std::vector<std::jthread> threads;
        threads.reserve(pool);
        for (std::size_t w = 0; w < pool; ++w) {
            threads.emplace_back(worker);
        }
    }
    for (const auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
    report.wall_time_ms.map_ms = elapsed_ms(t0);

    t0 = Clock::now();
    ReduceResult reduced = reduce(std::move(results));
    report.wall_time_ms.reduce_ms = elapsed_ms(t0);

    report.scene = options.scene_label;
    report.chunks = ranges.size();
    report.total = reduced.total;
    report.per_chunk = std::move(reduced.per_chunk);
    report.dedup = options.dedup;
    report.oracle = false;
    report.seed = options.seed;
    report.run_id = make_run_id(detections, scene, ranges.size(), options.dedup, total_frames, report.timestamp);
    return report;
}

CountReport run_single(std::span<const Detection> detections, const SceneConfig& scene, PipelineOptions options) {
    options.chunks = 1;
    options.workers = 1;
    options.dedup = true;
    CountReport report = run_pipeline(detections, scene, options);
    report.oracle = true;
    return report;
}

ReportDiff compare(const CountReport& a, const CountReport& b) {
    if (a.scene != b.scene) {
        throw ValidationError("scene", "reports are for different scenes (\"" + a.scene + "\" vs \"" + b.scene + "\")");
    }
    ReportDiff diff;
    diff.total_delta = static_cast<std::int64_t>(b.total) - static_cast<std::int64_t>(a.total);
    diff.per_chunk_equal = a.per_chunk == b.per_chunk;
    diff.a_chunks = a.per_chunk;
    diff.b_chunks = b.per_chunk;
    return diff;
}

std::size_t default_worker_count() {
    if (const char* env = std::getenv("CHUNKCOUNT_WORKERS"); env && *env) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (*end != '\0' || v < 1) {
            throw ValidationError("CHUNKCOUNT_WORKERS", "must be a positive integer, got \"" + std::string(env) + "\"");
        }
        return static_cast<std::size_t>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace chunkcount
