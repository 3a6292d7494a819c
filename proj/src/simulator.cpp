#include "chunkcount/simulator.hpp"

#include "chunkcount/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace chunkcount {

double SimRandom::uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double SimRandom::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double SimRandom::normal() {
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::int64_t SimRandom::poisson(double rate) {
    if (rate <= 0.0) {
        return 0;
    }
    const double limit = std::exp(-rate);
    std::int64_t k = 0;
    double p = uniform();
    while (p > limit) {
        ++k;
        p *= uniform();
    }
    return k;
}

void validate(const ScenarioSpec& spec) {
    if (spec.total_frames < 1) {
        throw ValidationError("total_frames", "must be >= 1");
    }
    if (!std::isfinite(spec.noise_sigma) || spec.noise_sigma < 0.0) {
        throw ValidationError("noise_sigma", "must be finite and >= 0");
    }
    if (!std::isfinite(spec.dropout_prob) || spec.dropout_prob < 0.0 || spec.dropout_prob >= 1.0) {
        throw ValidationError("dropout_prob", "must lie in [0, 1)");
    }
    // Knuth's sampler underflows exp(-rate) past ~700.
    if (!std::isfinite(spec.clutter_rate) || spec.clutter_rate < 0.0 || spec.clutter_rate > 500.0) {
        throw ValidationError("clutter_rate", "must lie in [0, 500]");
    }
    for (std::size_t i = 0; i < spec.vehicles.size(); ++i) {
        const auto& v = spec.vehicles[i];
        const std::string field = "vehicles[" + std::to_string(i) + "]";
        if (v.spawn_frame < 0) {
            throw ValidationError(field + ".spawn_frame", "must be >= 0");
        }
        if (v.lifetime < 1) {
            throw ValidationError(field + ".lifetime", "must be >= 1");
        }
    }
}

Simulation generate(const ScenarioSpec& spec, const SceneConfig& scene) {
    validate(spec);
    Simulation sim;
    SimRandom rng(spec.seed);
    const auto [lo, hi] = scene.region().bounds();

    for (FrameIndex f = 0; f < spec.total_frames; ++f) {
        for (std::size_t i = 0; i < spec.vehicles.size(); ++i) {
            const VehicleSpec& v = spec.vehicles[i];
            if (!v.alive_at(f)) {
                continue;
            }
            const double u = rng.uniform();
            const double nx = rng.normal();
            const double ny = rng.normal();
            if (u < spec.dropout_prob) {
                continue;
            }
            const Point2 p = v.position_at(f);
            sim.detections.push_back(Detection{f, p.x + spec.noise_sigma * nx, p.y + spec.noise_sigma * ny,
                                               kVehicleWidth, kVehicleHeight, kVehicleScore,
                                               static_cast<std::int64_t>(i)});
        }
        const std::int64_t clutter = rng.poisson(spec.clutter_rate);
        for (std::int64_t c = 0; c < clutter; ++c) {
            const double x = rng.uniform(lo.x, hi.x);
            const double y = rng.uniform(lo.y, hi.y);
            sim.detections.push_back(
                Detection{f, x, y, kClutterSize, kClutterSize, kClutterScore, kClutterTruthId});
        }
    }
    sim.truth = ground_truth(spec, scene);
    return sim;
}

GroundTruth ground_truth(const ScenarioSpec& spec, const SceneConfig& scene) {
    validate(spec);
    GroundTruth truth;
    truth.crossing_frames.resize(spec.vehicles.size());
    const Segment& line = scene.counting_line();
    for (std::size_t i = 0; i < spec.vehicles.size(); ++i) {
        const VehicleSpec& v = spec.vehicles[i];
        const FrameIndex end = std::min(spec.total_frames, v.spawn_frame + v.lifetime);
        std::optional<Point2> anchor;  // last position strictly off the line
        for (FrameIndex f = v.spawn_frame; f < end; ++f) {
            const Point2 p = v.position_at(f);
            const int side = side_of_line(p, line);
            if (side == 0) {
                continue;
            }
            if (anchor) {
                const auto event = crossing(*anchor, p, line);
                if (event && dot(p - *anchor, scene.street_direction()) > 0.0) {
                    truth.crossing_frames[i] = f;
                    break;
                }
            }
            anchor = p;
        }
        if (truth.crossing_frames[i]) {
            ++truth.count;
        }
    }
    return truth;
}

std::size_t ground_truth_count(const ScenarioSpec& spec, const SceneConfig& scene) {
    return ground_truth(spec, scene).count;
}

RoadScenario make_road_scenario(const RoadScenarioOptions& options, std::uint64_t seed) {
    constexpr double kLaneSpacing = 250.0;
    constexpr double kRoadLength = 1000.0;
    constexpr double kLineY = 500.0;
    constexpr double kEntryMargin = 100.0;
    constexpr double kMinHeadway = 260.0;

    SimRandom rng(seed);
    const std::size_t n = options.vehicles;
    const std::size_t lanes = std::max<std::size_t>(2, (n + 2) / 3);
    const double width = kLaneSpacing * static_cast<double>(lanes);

    const double theta = rng.uniform(0.0, 2.0 * std::numbers::pi);
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    auto rotate = [&](Point2 p) { return Point2{c * p.x - s * p.y, s * p.x + c * p.y}; };

    struct Lane {
        double x;
        double speed;
        bool wrong_way;
        double next_entry;  // earliest frame the next vehicle may be at the entry point
    };
    std::vector<Lane> lane_state;
    bool any_forward = false;
    for (std::size_t l = 0; l < lanes; ++l) {
        Lane lane{};
        lane.x = kLaneSpacing * (static_cast<double>(l) + 0.5);
        lane.speed = rng.uniform(3.0, 0.48 * options.gate);
        lane.wrong_way = rng.uniform() < options.wrong_way_lane_prob;
        if (l + 1 == lanes && !any_forward) {
            lane.wrong_way = false;
        }
        any_forward = any_forward || !lane.wrong_way;
        lane.next_entry = rng.uniform(0.0, 0.5 * static_cast<double>(options.total_frames));
        lane_state.push_back(lane);
    }

    ScenarioSpec spec;
    spec.total_frames = options.total_frames;
    spec.noise_sigma = options.noise_sigma;
    spec.dropout_prob = options.dropout_prob;
    spec.clutter_rate = options.clutter_rate;
    spec.seed = rng.bits();

    const double entry_y = -kEntryMargin;
    const double exit_y = kRoadLength + kEntryMargin;
    for (std::size_t i = 0; i < n; ++i) {
        Lane& lane = lane_state[i % lanes];
        const double sign = lane.wrong_way ? -1.0 : 1.0;
        const double entry = lane.wrong_way ? exit_y : entry_y;
        const double lateral = rng.uniform(-0.02, 0.02) * lane.speed;

        VehicleSpec v;
        double entry_time = 0.0;
        if (i < lanes && rng.uniform() < 0.5) {
            // Already on the road at frame 0, at least 100 px before the line
            // for forward lanes.
            const double y = lane.wrong_way ? rng.uniform(kLineY + 100.0, kRoadLength)
                                            : rng.uniform(0.0, kLineY - 100.0);
            v.spawn_frame = 0;
            v.start = {lane.x, y};
            entry_time = -std::abs(y - entry) / lane.speed;
        } else {
            v.spawn_frame = std::max<FrameIndex>(
                0, static_cast<FrameIndex>(std::ceil(lane.next_entry + rng.uniform(0.0, 30.0))));
            v.start = {lane.x, entry};
            entry_time = static_cast<double>(v.spawn_frame);
        }
        v.velocity = {lateral, sign * lane.speed};
        const double remaining = std::abs((lane.wrong_way ? entry_y : exit_y) - v.start.y);
        v.lifetime = static_cast<std::int64_t>(std::ceil(remaining / lane.speed)) + 5;
        lane.next_entry = entry_time + std::ceil(kMinHeadway / lane.speed) + 1.0;

        v.start = rotate(v.start);
        v.velocity = rotate(v.velocity);
        spec.vehicles.push_back(v);
    }

    const Polygon region({rotate({0.0, 0.0}), rotate({width, 0.0}), rotate({width, kRoadLength}),
                          rotate({0.0, kRoadLength})});
    const Segment line(rotate({0.0, kLineY}), rotate({width, kLineY}));
    TrackerParams tracker;
    tracker.gate = options.gate;
    SceneConfig scene(line, region, rotate({0.0, 1.0}), options.grace_frames, tracker);
    return {std::move(spec), std::move(scene)};
}

}  // namespace chunkcount
