#pragma once

#include "chunkcount/detection.hpp"
#include "chunkcount/scene.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

namespace chunkcount {

struct VehicleSpec {
    FrameIndex spawn_frame = 0;
    Point2 start;
    Point2 velocity;  // px / frame
    std::int64_t lifetime = 1;

    Point2 position_at(FrameIndex frame) const {
        return start + static_cast<double>(frame - spawn_frame) * velocity;
    }
    bool alive_at(FrameIndex frame) const {
        return frame >= spawn_frame && frame < spawn_frame + lifetime;
    }

    friend bool operator==(const VehicleSpec&, const VehicleSpec&) = default;
};

struct ScenarioSpec {
    std::int64_t total_frames = 1;
    std::vector<VehicleSpec> vehicles;
    double noise_sigma = 0.0;
    double dropout_prob = 0.0;
    double clutter_rate = 0.0;
    std::uint64_t seed = 0;

    friend bool operator==(const ScenarioSpec&, const ScenarioSpec&) = default;
};

void validate(const ScenarioSpec& spec);

struct GroundTruth {
    std::size_t count = 0;
    // Per vehicle: frame completing its first in-direction crossing, if any.
    std::vector<std::optional<FrameIndex>> crossing_frames;
};

struct Simulation {
    std::vector<Detection> detections;  // frame-ordered, truth_id tagged
    GroundTruth truth;
};

// Detection extents emitted by the simulator.
inline constexpr double kVehicleWidth = 40.0;
inline constexpr double kVehicleHeight = 30.0;
inline constexpr double kVehicleScore = 0.9;
inline constexpr double kClutterSize = 20.0;
inline constexpr double kClutterScore = 0.4;

// Portable random source: std::mt19937_64 for raw bits, with uniform,
// Gaussian (Box-Muller, cosine branch) and Poisson (Knuth) transforms done
// here so streams match across standard libraries.
class SimRandom {
public:
    explicit SimRandom(std::uint64_t seed) : engine_(seed) {}

    double uniform();                      // [0, 1), 53 random bits
    double uniform(double lo, double hi);  // [lo, hi)
    double normal();                       // N(0, 1)
    std::int64_t poisson(double rate);
    std::uint64_t bits() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

// Per frame: each live vehicle in spec order draws (dropout, noise x,
// noise y), then a Poisson clutter count followed by (x, y) per clutter
// detection uniform over the region's bounding box.
Simulation generate(const ScenarioSpec& spec, const SceneConfig& scene);

// Vehicles whose noiseless trajectory completes an in-direction crossing of
// the counting segment within [0, total_frames). Independent of chunking.
std::size_t ground_truth_count(const ScenarioSpec& spec, const SceneConfig& scene);
GroundTruth ground_truth(const ScenarioSpec& spec, const SceneConfig& scene);

struct RoadScenarioOptions {
    std::size_t vehicles = 10;
    std::int64_t total_frames = 600;
    double noise_sigma = 0.0;
    double dropout_prob = 0.0;
    double clutter_rate = 0.0;
    double wrong_way_lane_prob = 0.25;
    double gate = 50.0;
    int grace_frames = SceneConfig::kDefaultGraceFrames;
};

struct RoadScenario {
    ScenarioSpec spec;
    SceneConfig scene;
};

// Multi-lane straight road crossed by a counting line, randomly rotated.
// Lanes are 250 px apart and vehicles sharing a lane move at one speed and
// stay at least 260 px apart, so trajectories never come within 4x the
// default gate of each other. Lane speeds stay below gate / 2.
RoadScenario make_road_scenario(const RoadScenarioOptions& options, std::uint64_t seed);

}  // namespace chunkcount
