#include "chunkcount/config_io.hpp"

#include "chunkcount/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

namespace chunkcount {

using ojson = nlohmann::ordered_json;

namespace {

ojson parse_document(std::string_view text, const std::string& source, std::size_t line_no = 0) {
    try {
        return ojson::parse(text.begin(), text.end());
    } catch (const ojson::parse_error& e) {
        throw ParseError(source, line_no, std::string("malformed JSON: ") + e.what());
    }
}

const ojson& require(const ojson& obj, const char* key, const std::string& field) {
    if (!obj.is_object()) {
        throw ValidationError(field, "expected an object");
    }
    auto it = obj.find(key);
    if (it == obj.end()) {
        throw ValidationError(field.empty() ? key : field + "." + key, "missing");
    }
    return *it;
}

void reject_unknown_keys(const ojson& obj, std::initializer_list<const char*> known, const std::string& field) {
    for (const auto& [key, value] : obj.items()) {
        if (std::none_of(known.begin(), known.end(), [&](const char* k) { return key == k; })) {
            throw ValidationError(field.empty() ? key : field + "." + key, "unknown key");
        }
    }
}

double as_number(const ojson& j, const std::string& field) {
    if (!j.is_number()) {
        throw ValidationError(field, "expected a number");
    }
    return j.get<double>();
}

std::int64_t as_integer(const ojson& j, const std::string& field) {
    if (!j.is_number_integer()) {
        throw ValidationError(field, "expected an integer");
    }
    if (j.is_number_unsigned() && j.get<std::uint64_t>() > static_cast<std::uint64_t>(INT64_MAX)) {
        throw ValidationError(field, "integer out of range");
    }
    return j.get<std::int64_t>();
}

std::uint64_t as_unsigned(const ojson& j, const std::string& field) {
    if (!j.is_number_integer() || (j.is_number_integer() && !j.is_number_unsigned() && j.get<std::int64_t>() < 0)) {
        throw ValidationError(field, "expected a non-negative integer");
    }
    return j.get<std::uint64_t>();
}

int as_int(const ojson& j, const std::string& field) {
    const std::int64_t v = as_integer(j, field);
    if (v < INT32_MIN || v > INT32_MAX) {
        throw ValidationError(field, "integer out of range");
    }
    return static_cast<int>(v);
}

std::size_t as_count(const ojson& j, const std::string& field) {
    const std::int64_t v = as_integer(j, field);
    if (v < 0) {
        throw ValidationError(field, "must be >= 0");
    }
    return static_cast<std::size_t>(v);
}

bool as_bool(const ojson& j, const std::string& field) {
    if (!j.is_boolean()) {
        throw ValidationError(field, "expected a boolean");
    }
    return j.get<bool>();
}

std::string as_string(const ojson& j, const std::string& field) {
    if (!j.is_string()) {
        throw ValidationError(field, "expected a string");
    }
    return j.get<std::string>();
}

Point2 as_point(const ojson& j, const std::string& field) {
    if (!j.is_array() || j.size() != 2) {
        throw ValidationError(field, "expected [x, y]");
    }
    return {as_number(j[0], field + "[0]"), as_number(j[1], field + "[1]")};
}

ojson point_json(Point2 p) { return ojson::array({p.x, p.y}); }

// Rebrands a construction-time ValidationError with the document field.
template <typename F>
auto with_field(const std::string& field, F&& make) {
    try {
        return make();
    } catch (const ValidationError& e) {
        throw ValidationError(field, e.message());
    }
}

ojson scene_json(const SceneConfig& scene) {
    ojson region = ojson::array();
    for (const auto& v : scene.region().vertices()) {
        region.push_back(point_json(v));
    }
    const TrackerParams& t = scene.tracker();
    ojson tracker = {
        {"max_age", t.max_age},
        {"min_hits", t.min_hits},
        {"gate", t.gate},
        {"kalman",
         {{"q", t.kalman.process_noise_q}, {"r", t.kalman.measurement_noise_r}, {"v0", t.kalman.initial_velocity_var}}},
    };
    if (t.metric == CostMetric::mahalanobis) {
        tracker["metric"] = "mahalanobis";
    }
    return ojson{
        {"counting_line", {{"a", point_json(scene.counting_line().a())}, {"b", point_json(scene.counting_line().b())}}},
        {"region", std::move(region)},
        {"street_direction", point_json(scene.street_direction())},
        {"grace_frames", scene.grace_frames()},
        {"tracker", std::move(tracker)},
    };
}

TrackerParams tracker_from(const ojson& j) {
    const std::string f = "tracker";
    if (!j.is_object()) {
        throw ValidationError(f, "expected an object");
    }
    reject_unknown_keys(j, {"max_age", "min_hits", "gate", "kalman", "metric"}, f);
    TrackerParams t;
    if (j.contains("max_age")) t.max_age = as_int(j["max_age"], "tracker.max_age");
    if (j.contains("min_hits")) t.min_hits = as_int(j["min_hits"], "tracker.min_hits");
    if (j.contains("gate")) t.gate = as_number(j["gate"], "tracker.gate");
    if (j.contains("metric")) {
        const std::string m = as_string(j["metric"], "tracker.metric");
        if (m == "euclidean") {
            t.metric = CostMetric::euclidean;
        } else if (m == "mahalanobis") {
            t.metric = CostMetric::mahalanobis;
        } else {
            throw ValidationError("tracker.metric", "expected \"euclidean\" or \"mahalanobis\"");
        }
    }
    if (j.contains("kalman")) {
        const ojson& k = j["kalman"];
        if (!k.is_object()) {
            throw ValidationError("tracker.kalman", "expected an object");
        }
        reject_unknown_keys(k, {"q", "r", "v0"}, "tracker.kalman");
        if (k.contains("q")) t.kalman.process_noise_q = as_number(k["q"], "tracker.kalman.q");
        if (k.contains("r")) t.kalman.measurement_noise_r = as_number(k["r"], "tracker.kalman.r");
        if (k.contains("v0")) t.kalman.initial_velocity_var = as_number(k["v0"], "tracker.kalman.v0");
    }
    validate(t);
    return t;
}

ojson chunk_summary_json(const ChunkSummary& c) {
    return ojson{
        {"range", ojson::array({c.range.start_frame, c.range.end_frame})},
        {"counted", c.counted},
        {"filtered", c.filtered},
    };
}

ojson report_json(const CountReport& r, bool with_volatile) {
    ojson per_chunk = ojson::array();
    for (const auto& c : r.per_chunk) {
        per_chunk.push_back(chunk_summary_json(c));
    }
    ojson j;
    if (with_volatile) {
        j["run_id"] = r.run_id;
    }
    j["scene"] = r.scene;
    j["chunks"] = r.chunks;
    j["total"] = r.total;
    j["per_chunk"] = std::move(per_chunk);
    j["dedup"] = r.dedup;
    j["oracle"] = r.oracle;
    if (r.seed) {
        j["seed"] = *r.seed;
    }
    if (with_volatile) {
        j["wall_time_ms"] = {
            {"partition", r.wall_time_ms.partition_ms},
            {"map", r.wall_time_ms.map_ms},
            {"reduce", r.wall_time_ms.reduce_ms},
        };
        j["timestamp"] = r.timestamp;
    }
    return j;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError(path.string(), "cannot open for writing");
    }
    out << text;
    out.flush();
    if (!out) {
        throw IoError(path.string(), "write failed");
    }
}

}  // namespace

std::string read_text_file(const std::filesystem::path& path) {
    std::error_code ec;
    if (!std::filesystem::exists(path, ec)) {
        throw IoError(path.string(), "no such file");
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError(path.string(), "cannot open for reading");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// --- scene -----------------------------------------------------------------

std::string scene_to_json(const SceneConfig& scene) { return scene_json(scene).dump(); }

SceneConfig scene_from_json(std::string_view text, const std::string& source) {
    const ojson j = parse_document(text, source);
    if (!j.is_object()) {
        throw ParseError(source, 0, "expected a JSON object");
    }
    reject_unknown_keys(j, {"counting_line", "region", "street_direction", "grace_frames", "tracker"}, "");

    const ojson& line_j = require(j, "counting_line", "");
    reject_unknown_keys(line_j, {"a", "b"}, "counting_line");
    const Point2 a = as_point(require(line_j, "a", "counting_line"), "counting_line.a");
    const Point2 b = as_point(require(line_j, "b", "counting_line"), "counting_line.b");
    const Segment line = with_field("counting_line", [&] { return Segment(a, b); });

    const ojson& region_j = require(j, "region", "");
    if (!region_j.is_array()) {
        throw ValidationError("region", "expected an array of [x, y]");
    }
    std::vector<Point2> verts;
    for (std::size_t i = 0; i < region_j.size(); ++i) {
        verts.push_back(as_point(region_j[i], "region[" + std::to_string(i) + "]"));
    }
    Polygon region = with_field("region", [&] { return Polygon(verts); });

    const Point2 dir = as_point(require(j, "street_direction", ""), "street_direction");
    const int grace = j.contains("grace_frames") ? as_int(j["grace_frames"], "grace_frames")
                                                 : SceneConfig::kDefaultGraceFrames;
    const TrackerParams tracker = j.contains("tracker") ? tracker_from(j["tracker"]) : TrackerParams{};
    return SceneConfig(line, std::move(region), dir, grace, tracker);
}

SceneConfig load_scene(const std::filesystem::path& path) {
    return scene_from_json(read_text_file(path), path.string());
}

void save_scene(const std::filesystem::path& path, const SceneConfig& scene) {
    write_text_file(path, scene_to_json(scene) + "\n");
}

// --- scenario --------------------------------------------------------------

std::string scenario_to_json(const ScenarioSpec& spec) {
    ojson vehicles = ojson::array();
    for (const auto& v : spec.vehicles) {
        vehicles.push_back(ojson{
            {"spawn_frame", v.spawn_frame},
            {"start", point_json(v.start)},
            {"velocity", point_json(v.velocity)},
            {"lifetime", v.lifetime},
        });
    }
    return ojson{
        {"total_frames", spec.total_frames},
        {"vehicles", std::move(vehicles)},
        {"noise_sigma", spec.noise_sigma},
        {"dropout_prob", spec.dropout_prob},
        {"clutter_rate", spec.clutter_rate},
        {"seed", spec.seed},
    }
        .dump();
}

ScenarioSpec scenario_from_json(std::string_view text, const std::string& source) {
    const ojson j = parse_document(text, source);
    if (!j.is_object()) {
        throw ParseError(source, 0, "expected a JSON object");
    }
    reject_unknown_keys(j, {"total_frames", "vehicles", "noise_sigma", "dropout_prob", "clutter_rate", "seed"}, "");
    ScenarioSpec spec;
    spec.total_frames = as_integer(require(j, "total_frames", ""), "total_frames");
    const ojson& vehicles = require(j, "vehicles", "");
    if (!vehicles.is_array()) {
        throw ValidationError("vehicles", "expected an array");
    }
    for (std::size_t i = 0; i < vehicles.size(); ++i) {
        const std::string f = "vehicles[" + std::to_string(i) + "]";
        const ojson& v = vehicles[i];
        if (!v.is_object()) {
            throw ValidationError(f, "expected an object");
        }
        reject_unknown_keys(v, {"spawn_frame", "start", "velocity", "lifetime"}, f);
        VehicleSpec vs;
        vs.spawn_frame = as_integer(require(v, "spawn_frame", f), f + ".spawn_frame");
        vs.start = as_point(require(v, "start", f), f + ".start");
        vs.velocity = as_point(require(v, "velocity", f), f + ".velocity");
        vs.lifetime = as_integer(require(v, "lifetime", f), f + ".lifetime");
        spec.vehicles.push_back(vs);
    }
    if (j.contains("noise_sigma")) spec.noise_sigma = as_number(j["noise_sigma"], "noise_sigma");
    if (j.contains("dropout_prob")) spec.dropout_prob = as_number(j["dropout_prob"], "dropout_prob");
    if (j.contains("clutter_rate")) spec.clutter_rate = as_number(j["clutter_rate"], "clutter_rate");
    if (j.contains("seed")) spec.seed = as_unsigned(j["seed"], "seed");
    validate(spec);
    return spec;
}

ScenarioSpec load_scenario(const std::filesystem::path& path) {
    return scenario_from_json(read_text_file(path), path.string());
}

void save_scenario(const std::filesystem::path& path, const ScenarioSpec& spec) {
    write_text_file(path, scenario_to_json(spec) + "\n");
}

// --- detections ------------------------------------------------------------

std::string detection_to_json(const Detection& d) {
    ojson j{
        {"frame", d.frame}, {"cx", d.cx}, {"cy", d.cy}, {"w", d.w}, {"h", d.h}, {"score", d.score},
    };
    if (d.truth_id) {
        j["truth_id"] = *d.truth_id;
    }
    return j.dump();
}

Detection detection_from_json(std::string_view line, const std::string& source, std::size_t line_no) {
    const ojson j = parse_document(line, source, line_no);
    try {
        if (!j.is_object()) {
            throw ValidationError("", "expected a JSON object");
        }
        reject_unknown_keys(j, {"frame", "cx", "cy", "w", "h", "score", "truth_id"}, "");
        Detection d;
        d.frame = as_integer(require(j, "frame", ""), "frame");
        d.cx = as_number(require(j, "cx", ""), "cx");
        d.cy = as_number(require(j, "cy", ""), "cy");
        d.w = j.contains("w") ? as_number(j["w"], "w") : 0.0;
        d.h = j.contains("h") ? as_number(j["h"], "h") : 0.0;
        d.score = j.contains("score") ? as_number(j["score"], "score") : 1.0;
        if (j.contains("truth_id") && !j["truth_id"].is_null()) {
            d.truth_id = as_integer(j["truth_id"], "truth_id");
        }
        validate(d);
        return d;
    } catch (const ValidationError& e) {
        if (line_no == 0) {
            throw;
        }
        throw ValidationError(e.field(), std::string(e.what()) + " (" + source + " line " + std::to_string(line_no) + ")");
    }
}

std::string detections_to_jsonl(std::span<const Detection> detections) {
    std::string out;
    for (const auto& d : detections) {
        out += detection_to_json(d);
        out += '\n';
    }
    return out;
}

std::vector<Detection> detections_from_jsonl(std::string_view text, const std::string& source) {
    std::vector<Detection> out;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) {
            end = text.size();
        }
        ++line_no;
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        if (line.find_first_not_of(" \t\r") == std::string_view::npos) {
            continue;
        }
        out.push_back(detection_from_json(line, source, line_no));
    }
    std::stable_sort(out.begin(), out.end(), [](const Detection& a, const Detection& b) { return a.frame < b.frame; });
    return out;
}

std::vector<Detection> read_detections(const std::filesystem::path& path) {
    return detections_from_jsonl(read_text_file(path), path.string());
}

void write_detections(const std::filesystem::path& path, std::span<const Detection> detections) {
    write_text_file(path, detections_to_jsonl(detections));
}

// --- reports ---------------------------------------------------------------

std::string report_to_json(const CountReport& report) { return report_json(report, true).dump(); }

std::string report_content(const CountReport& report) { return report_json(report, false).dump(); }

CountReport report_from_json(std::string_view text, const std::string& source, std::size_t line_no) {
    const ojson j = parse_document(text, source, line_no);
    if (!j.is_object()) {
        throw ParseError(source, line_no, "expected a JSON object");
    }
    reject_unknown_keys(
        j, {"run_id", "scene", "chunks", "total", "per_chunk", "dedup", "oracle", "seed", "wall_time_ms", "timestamp"},
        "");
    CountReport r;
    r.run_id = as_string(require(j, "run_id", ""), "run_id");
    r.scene = as_string(require(j, "scene", ""), "scene");
    r.chunks = as_count(require(j, "chunks", ""), "chunks");
    r.total = as_count(require(j, "total", ""), "total");
    const ojson& per_chunk = require(j, "per_chunk", "");
    if (!per_chunk.is_array()) {
        throw ValidationError("per_chunk", "expected an array");
    }
    for (std::size_t i = 0; i < per_chunk.size(); ++i) {
        const std::string f = "per_chunk[" + std::to_string(i) + "]";
        const ojson& c = per_chunk[i];
        if (!c.is_object()) {
            throw ValidationError(f, "expected an object");
        }
        reject_unknown_keys(c, {"range", "counted", "filtered"}, f);
        const ojson& range = require(c, "range", f);
        if (!range.is_array() || range.size() != 2) {
            throw ValidationError(f + ".range", "expected [start, end)");
        }
        ChunkSummary s;
        s.range = {i, as_integer(range[0], f + ".range[0]"), as_integer(range[1], f + ".range[1]")};
        if (s.range.start_frame < 0 || s.range.start_frame >= s.range.end_frame) {
            throw ValidationError(f + ".range", "must satisfy 0 <= start < end");
        }
        s.counted = as_count(require(c, "counted", f), f + ".counted");
        s.filtered = as_count(require(c, "filtered", f), f + ".filtered");
        r.per_chunk.push_back(s);
    }
    r.dedup = as_bool(require(j, "dedup", ""), "dedup");
    if (j.contains("oracle")) r.oracle = as_bool(j["oracle"], "oracle");
    if (j.contains("seed")) r.seed = as_unsigned(j["seed"], "seed");
    if (j.contains("wall_time_ms")) {
        const ojson& w = j["wall_time_ms"];
        if (!w.is_object()) {
            throw ValidationError("wall_time_ms", "expected an object");
        }
        reject_unknown_keys(w, {"partition", "map", "reduce"}, "wall_time_ms");
        if (w.contains("partition")) r.wall_time_ms.partition_ms = as_number(w["partition"], "wall_time_ms.partition");
        if (w.contains("map")) r.wall_time_ms.map_ms = as_number(w["map"], "wall_time_ms.map");
        if (w.contains("reduce")) r.wall_time_ms.reduce_ms = as_number(w["reduce"], "wall_time_ms.reduce");
    }
    r.timestamp = as_string(require(j, "timestamp", ""), "timestamp");

    if (r.chunks != r.per_chunk.size()) {
        throw ValidationError("chunks", "does not match per_chunk length");
    }
    std::size_t sum = 0;
    for (const auto& c : r.per_chunk) {
        sum += c.counted;
    }
    if (sum != r.total) {
        throw ValidationError("total", "does not equal the sum of per_chunk counted");
    }
    return r;
}

void append_report(const std::filesystem::path& store_path, const CountReport& report) {
    const std::string record = report_to_json(report) + "\n";
    const int fd = ::open(store_path.c_str(), O_WRONLY | O_APPEND | O_CREAT | O_CLOEXEC, 0644);
    if (fd < 0) {
        throw IoError(store_path.string(), std::string("cannot open results store: ") + std::strerror(errno));
    }
    struct FdGuard {
        int fd;
        ~FdGuard() { ::close(fd); }  // also drops the flock
    } guard{fd};

    if (::flock(fd, LOCK_EX) != 0) {
        throw IoError(store_path.string(), std::string("cannot lock results store: ") + std::strerror(errno));
    }
    std::size_t written = 0;
    while (written < record.size()) {
        const ssize_t n = ::write(fd, record.data() + written, record.size() - written);
        if (n < 0) {
            if (errno == EINTR) {
                continue;
            }
            throw IoError(store_path.string(), std::string("append failed: ") + std::strerror(errno));
        }
        written += static_cast<std::size_t>(n);
    }
    if (::fsync(fd) != 0) {
        throw IoError(store_path.string(), std::string("fsync failed: ") + std::strerror(errno));
    }
}

std::vector<CountReport> read_reports(const std::filesystem::path& store_path) {
    const std::string text = read_text_file(store_path);
    std::vector<CountReport> out;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        out.push_back(report_from_json(line, store_path.string(), line_no));
    }
    return out;
}

}  // namespace chunkcount
