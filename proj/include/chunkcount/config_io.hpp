#pragma once

#include "chunkcount/detection.hpp"
#include "chunkcount/orchestrator.hpp"
#include "chunkcount/scene.hpp"
#include "chunkcount/simulator.hpp"

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace chunkcount {

// Canonical forms are compact JSON with a fixed key order and the shortest
// float representation that round-trips a double.

std::string scene_to_json(const SceneConfig& scene);
SceneConfig scene_from_json(std::string_view text, const std::string& source = "<scene>");
SceneConfig load_scene(const std::filesystem::path& path);
void save_scene(const std::filesystem::path& path, const SceneConfig& scene);

std::string scenario_to_json(const ScenarioSpec& spec);
ScenarioSpec scenario_from_json(std::string_view text, const std::string& source = "<scenario>");
ScenarioSpec load_scenario(const std::filesystem::path& path);
void save_scenario(const std::filesystem::path& path, const ScenarioSpec& spec);

// One detection per line: {"frame","cx","cy","w","h","score"[,"truth_id"]}.
std::string detection_to_json(const Detection& d);
Detection detection_from_json(std::string_view line, const std::string& source = "<detection>",
                              std::size_t line_no = 0);
std::string detections_to_jsonl(std::span<const Detection> detections);
// Parses JSON Lines text; blank lines are skipped. The result is stably
// sorted by frame.
std::vector<Detection> detections_from_jsonl(std::string_view text, const std::string& source = "<detections>");
std::vector<Detection> read_detections(const std::filesystem::path& path);
void write_detections(const std::filesystem::path& path, std::span<const Detection> detections);

std::string report_to_json(const CountReport& report);
CountReport report_from_json(std::string_view text, const std::string& source = "<report>",
                             std::size_t line_no = 0);

// Appends one canonical record plus newline under an exclusive flock with a
// single O_APPEND write, so concurrent appenders never interleave bytes and
// existing records are never rewritten.
void append_report(const std::filesystem::path& store_path, const CountReport& report);
std::vector<CountReport> read_reports(const std::filesystem::path& store_path);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace chunkcount
