#include "chunkcount/config_io.hpp"
#include "chunkcount/errors.hpp"
#include "chunkcount/simulator.hpp"

#include "support/oracles.hpp"
#include "support/scenes.hpp"

#include <doctest.h>

#include <cmath>

using namespace chunkcount;

namespace {

ScenarioSpec one_vehicle(Point2 start, Point2 vel, std::int64_t frames) {
    ScenarioSpec s;
    s.total_frames = frames;
    s.vehicles.push_back({0, start, vel, frames});
    s.seed = 42;
    return s;
}

}  // namespace

TEST_CASE("noiseless vehicle reproduces its exact trajectory") {
    const auto scene = testscene::road();
    const auto spec = one_vehicle({100, 200}, {1.5, 2.25}, 10);
    const auto sim = generate(spec, scene);
    REQUIRE(sim.detections.size() == 10);
    for (std::size_t i = 0; i < 10; ++i) {
        const auto& d = sim.detections[i];
        CHECK(d.frame == static_cast<FrameIndex>(i));
        CHECK(d.cx == 100 + 1.5 * static_cast<double>(i));
        CHECK(d.cy == 200 + 2.25 * static_cast<double>(i));
        CHECK(d.truth_id == 0);
    }
}

TEST_CASE("same seed gives byte-identical streams") {
    RoadScenarioOptions opt;
    opt.noise_sigma = 2.0;
    opt.dropout_prob = 0.2;
    opt.clutter_rate = 0.5;
    const auto rs = make_road_scenario(opt, 9);
    const auto a = detections_to_jsonl(generate(rs.spec, rs.scene).detections);
    const auto b = detections_to_jsonl(generate(rs.spec, rs.scene).detections);
    CHECK(a == b);
    auto other = rs.spec;
    other.seed ^= 1;
    CHECK(detections_to_jsonl(generate(other, rs.scene).detections) != a);
}

TEST_CASE("dropout fraction concentrates") {
    // 10^4 vehicle-frames at p = 0.3: sd = sqrt(0.21 / 1e4) ~ 0.0046, so
    // +-0.02 is more than four standard deviations.
    const auto scene = testscene::road();
    ScenarioSpec spec;
    spec.total_frames = 1000;
    for (int i = 0; i < 10; ++i) {
        spec.vehicles.push_back({0, {50.0 + 90 * i, 10}, {0, 0.5}, 1000});
    }
    spec.dropout_prob = 0.3;
    spec.seed = 1234;
    const auto sim = generate(spec, scene);
    const double dropped = 1.0 - static_cast<double>(sim.detections.size()) / 1e4;
    CHECK(std::abs(dropped - 0.3) <= 0.02);
}

TEST_CASE("clutter is tagged and inside the region bounds") {
    const auto scene = testscene::road();
    ScenarioSpec spec;
    spec.total_frames = 500;
    spec.clutter_rate = 2.0;
    spec.seed = 77;
    const auto sim = generate(spec, scene);
    // Poisson(1000) total: mean 1000, sd ~ 31.6.
    CHECK(std::abs(static_cast<double>(sim.detections.size()) - 1000.0) < 150.0);
    for (const auto& d : sim.detections) {
        CHECK(d.truth_id == kClutterTruthId);
        CHECK(point_in_polygon(d.centroid(), scene.region()));
    }
}

TEST_CASE("ground truth direction gate") {
    const auto scene = testscene::road();
    CHECK(ground_truth_count(one_vehicle({300, 100}, {0, 10}, 100), scene) == 1);
    CHECK(ground_truth_count(one_vehicle({300, 900}, {0, -10}, 100), scene) == 0);
    // Never reaches the line before the stream ends.
    CHECK(ground_truth_count(one_vehicle({300, 100}, {0, 1}, 100), scene) == 0);
    // Passes beside the finite segment.
    CHECK(ground_truth_count(one_vehicle({1100, 100}, {0, 10}, 100), scene) == 0);
    // Lands exactly on the line at frame 40, completes the crossing at 41.
    const auto truth = ground_truth(one_vehicle({300, 100}, {0, 10}, 100), scene);
    CHECK(truth.crossing_frames[0] == 41);
}

TEST_CASE("ground truth matches the brute-force scan on random scenarios") {
    for (std::uint64_t seed = 100; seed < 150; ++seed) {
        RoadScenarioOptions opt;
        opt.vehicles = 5 + seed % 30;
        opt.total_frames = 300 + static_cast<std::int64_t>(seed % 7) * 100;
        const auto rs = make_road_scenario(opt, seed);
        const auto& line = rs.scene.counting_line();
        const auto dir = rs.scene.street_direction();
        CHECK(ground_truth_count(rs.spec, rs.scene) ==
              oracle::brute_ground_truth(rs.spec, {line.a().x, line.a().y}, {line.b().x, line.b().y},
                                         {dir.x, dir.y}));
    }
}

TEST_CASE("scenario validation") {
    ScenarioSpec s;
    s.total_frames = 0;
    CHECK_THROWS_AS(validate(s), ValidationError);
    s.total_frames = 10;
    s.dropout_prob = 1.0;
    CHECK_THROWS_AS(validate(s), ValidationError);
    s.dropout_prob = 0.0;
    s.vehicles.push_back({0, {0, 0}, {1, 1}, 0});
    CHECK_THROWS_AS(validate(s), ValidationError);
}

TEST_CASE("road scenarios respect separation and speed limits") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        RoadScenarioOptions opt;
        opt.vehicles = 30;
        const auto rs = make_road_scenario(opt, seed);
        for (const auto& v : rs.spec.vehicles) {
            CHECK(norm(v.velocity) <= opt.gate / 2);
        }
        for (FrameIndex f = 0; f < rs.spec.total_frames; f += 7) {
            for (std::size_t i = 0; i < rs.spec.vehicles.size(); ++i) {
                for (std::size_t j = i + 1; j < rs.spec.vehicles.size(); ++j) {
                    const auto& a = rs.spec.vehicles[i];
                    const auto& b = rs.spec.vehicles[j];
                    if (a.alive_at(f) && b.alive_at(f)) {
                        CHECK(norm(a.position_at(f) - b.position_at(f)) >= 4 * opt.gate);
                    }
                }
            }
        }
    }
}
