#include "chunkcount/errors.hpp"
#include "chunkcount/simulator.hpp"
#include "chunkcount/tracker.hpp"

#include "support/oracles.hpp"
#include "support/scenes.hpp"

#include <doctest.h>

using namespace chunkcount;

namespace {

// Steps every frame in [0, frames) feeding the frame-ordered detections.
Tracker run(const std::vector<Detection>& dets, FrameIndex frames, const SceneConfig& scene) {
    Tracker t(scene.tracker());
    std::size_t i = 0;
    for (FrameIndex f = 0; f < frames; ++f) {
        std::size_t j = i;
        while (j < dets.size() && dets[j].frame == f) ++j;
        t.step(f, std::span(dets).subspan(i, j - i), scene);
        i = j;
    }
    return t;
}

std::vector<Detection> straight(std::int64_t id, Point2 start, Point2 vel, FrameIndex from, FrameIndex to) {
    std::vector<Detection> out;
    for (FrameIndex f = from; f < to; ++f) {
        const Point2 p = start + static_cast<double>(f - from) * vel;
        out.push_back({f, p.x, p.y, 40, 30, 0.9, id});
    }
    return out;
}

std::vector<Detection> merge(std::vector<Detection> a, const std::vector<Detection>& b) {
    a.insert(a.end(), b.begin(), b.end());
    std::stable_sort(a.begin(), a.end(), [](auto& x, auto& y) { return x.frame < y.frame; });
    return a;
}

}  // namespace

TEST_CASE("no detections, no tracks") {
    const auto scene = testscene::road();
    CHECK(run({}, 50, scene).finalize().empty());
    CHECK(Tracker(scene.tracker()).finalize().empty());
}

TEST_CASE("single noiseless vehicle") {
    const auto scene = testscene::road();
    const auto dets = straight(0, {300, 100}, {0.5, 8}, 0, 20);
    const auto tracks = run(dets, 20, scene).finalize();
    REQUIRE(tracks.size() == 1);
    CHECK(tracks[0].status == TrackStatus::confirmed);
    CHECK(tracks[0].history.size() == 20);
    CHECK(tracks[0].hits == 20);
    CHECK(tracks[0].id == 1);
    CHECK(tracks[0].history.front().position == Point2{300, 100});
}

TEST_CASE("two parallel lanes keep identities") {
    const auto scene = testscene::road();
    const auto dets = merge(straight(0, {300, 50}, {0, 10}, 0, 30), straight(1, {500, 50}, {0, 10}, 0, 30));
    const auto tracks = run(dets, 30, scene).finalize();
    REQUIRE(tracks.size() == 2);
    for (const auto& t : tracks) {
        CHECK(t.status == TrackStatus::confirmed);
        CHECK(oracle::history_truth_ids(t, dets).size() == 1);
    }
}

TEST_CASE("death keeps history") {
    TrackerParams p;
    p.max_age = 3;
    const auto scene = testscene::road(5, p);
    const auto dets = straight(0, {300, 50}, {0, 10}, 0, 10);
    const auto tracks = run(dets, 30, scene).finalize();
    REQUIRE(tracks.size() == 1);
    CHECK(tracks[0].status == TrackStatus::dead);
    REQUIRE(tracks[0].history.size() == 10);
    CHECK(tracks[0].history.front().frame == 0);
    CHECK(tracks[0].history.back().frame == 9);
    CHECK(tracks[0].misses_in_a_row == 3);
}

TEST_CASE("detections outside the region are discarded") {
    const auto scene = testscene::road();
    std::vector<Detection> dets{{0, -50, 10, 1, 1, 1, std::nullopt}, {0, 10, 10, 1, 1, 1, std::nullopt}};
    Tracker t(scene.tracker());
    t.step(0, dets, scene);
    REQUIRE(t.tracks().size() == 1);
    CHECK(t.tracks()[0].history[0].position == Point2{10, 10});
}

TEST_CASE("min_hits delays confirmation") {
    TrackerParams p;
    p.min_hits = 3;
    const auto scene = testscene::road(5, p);
    const auto dets = straight(0, {300, 50}, {0, 10}, 0, 5);
    Tracker t(scene.tracker());
    for (FrameIndex f = 0; f < 5; ++f) {
        t.step(f, std::span(dets).subspan(static_cast<std::size_t>(f), 1), scene);
        CHECK((t.tracks()[0].status == TrackStatus::confirmed) == (f >= 2));
    }
}

TEST_CASE("sequencing and frame validation") {
    const auto scene = testscene::road();
    Tracker t(scene.tracker());
    t.step(3, {}, scene);
    CHECK_THROWS_AS(t.step(3, {}, scene), SequencingError);
    CHECK_THROWS_AS(t.step(2, {}, scene), SequencingError);
    const Detection wrong{7, 1, 1, 1, 1, 1, std::nullopt};
    CHECK_THROWS_AS(t.step(4, std::span(&wrong, 1), scene), ValidationError);
}

TEST_CASE("coasting is not recorded and tracks re-acquire after a gap") {
    const auto scene = testscene::road();
    auto dets = straight(0, {300, 50}, {0, 10}, 0, 12);
    dets.erase(dets.begin() + 5, dets.begin() + 7);  // frames 5 and 6 missing
    const auto tracks = run(dets, 12, scene).finalize();
    REQUIRE(tracks.size() == 1);
    CHECK(tracks[0].history.size() == 10);
    for (std::size_t i = 1; i < tracks[0].history.size(); ++i) {
        CHECK(tracks[0].history[i].frame > tracks[0].history[i - 1].frame);
    }
}

TEST_CASE("mahalanobis metric associates a single target") {
    TrackerParams p;
    p.metric = CostMetric::mahalanobis;
    p.gate = 25.0;  // chi-square scale
    const auto scene = testscene::road(5, p);
    const auto dets = straight(0, {300, 50}, {0, 10}, 0, 20);
    const auto tracks = run(dets, 20, scene).finalize();
    REQUIRE(tracks.size() == 1);
    CHECK(tracks[0].history.size() == 20);
}

TEST_CASE("random separated scenarios: one pure track per vehicle, deterministic") {
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
        RoadScenarioOptions opt;
        opt.vehicles = 5 + seed % 20;
        opt.total_frames = 400;
        const auto rs = make_road_scenario(opt, seed);
        const auto sim = generate(rs.spec, rs.scene);
        const auto tracks = run(sim.detections, rs.spec.total_frames, rs.scene).finalize();

        std::set<std::int64_t> seen_vehicles;
        for (const auto& d : sim.detections) {
            if (point_in_polygon(d.centroid(), rs.scene.region())) seen_vehicles.insert(*d.truth_id);
        }
        CHECK(tracks.size() == seen_vehicles.size());
        std::size_t history_points = 0;
        for (const auto& t : tracks) {
            CHECK(oracle::history_truth_ids(t, sim.detections).size() == 1);
            history_points += t.history.size();
        }
        CHECK(history_points <= sim.detections.size());

        const auto again = run(sim.detections, rs.spec.total_frames, rs.scene).finalize();
        REQUIRE(again.size() == tracks.size());
        for (std::size_t i = 0; i < tracks.size(); ++i) {
            CHECK(again[i].id == tracks[i].id);
            CHECK(again[i].history == tracks[i].history);
            CHECK(again[i].status == tracks[i].status);
        }
    }
}
