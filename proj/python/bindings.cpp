#include "chunkcount/assignment.hpp"
#include "chunkcount/config_io.hpp"
#include "chunkcount/errors.hpp"
#include "chunkcount/orchestrator.hpp"
#include "chunkcount/simulator.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

namespace py = pybind11;
using namespace chunkcount;

namespace {

PipelineOptions pipeline_options(std::size_t chunks, std::size_t workers, bool dedup,
                                 std::optional<FrameIndex> total_frames, std::string scene_label) {
    PipelineOptions po;
    po.chunks = chunks;
    po.workers = workers;
    po.dedup = dedup;
    po.total_frames = total_frames;
    po.scene_label = std::move(scene_label);
    return po;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Chunk-parallel vehicle counting";

    auto error = py::register_exception<Error>(m, "Error");
    py::register_exception<ValidationError>(m, "ValidationError", error);
    py::register_exception<SequencingError>(m, "SequencingError", error);
    py::register_exception<IoError>(m, "IoError", error);
    py::register_exception<ParseError>(m, "ParseError", error);

    py::class_<Detection>(m, "Detection")
        .def(py::init([](FrameIndex frame, double cx, double cy, double w, double h, double score,
                         std::optional<std::int64_t> truth_id) {
                 Detection d{frame, cx, cy, w, h, score, truth_id};
                 validate(d);
                 return d;
             }),
             py::arg("frame"), py::arg("cx"), py::arg("cy"), py::arg("w") = 0.0, py::arg("h") = 0.0,
             py::arg("score") = 1.0, py::arg("truth_id") = py::none())
        .def_readwrite("frame", &Detection::frame)
        .def_readwrite("cx", &Detection::cx)
        .def_readwrite("cy", &Detection::cy)
        .def_readwrite("w", &Detection::w)
        .def_readwrite("h", &Detection::h)
        .def_readwrite("score", &Detection::score)
        .def_readwrite("truth_id", &Detection::truth_id)
        .def("__eq__", [](const Detection& a, const Detection& b) { return a == b; })
        .def("__repr__", [](const Detection& d) { return "Detection(" + detection_to_json(d) + ")"; });

    py::class_<SceneConfig>(m, "Scene")
        .def_static("from_json", [](const std::string& text) { return scene_from_json(text); })
        .def_static("load", [](const std::filesystem::path& p) { return load_scene(p); })
        .def("to_json", [](const SceneConfig& s) { return scene_to_json(s); })
        .def("save", [](const SceneConfig& s, const std::filesystem::path& p) { save_scene(p, s); })
        .def_property_readonly("grace_frames", &SceneConfig::grace_frames)
        .def_property_readonly("after_side", &SceneConfig::after_side);

    py::class_<ScenarioSpec>(m, "Scenario")
        .def_static("from_json", [](const std::string& text) { return scenario_from_json(text); })
        .def_static("load", [](const std::filesystem::path& p) { return load_scenario(p); })
        .def("to_json", [](const ScenarioSpec& s) { return scenario_to_json(s); })
        .def("save", [](const ScenarioSpec& s, const std::filesystem::path& p) { save_scenario(p, s); })
        .def_readwrite("seed", &ScenarioSpec::seed)
        .def_readonly("total_frames", &ScenarioSpec::total_frames)
        .def_property_readonly("vehicle_count", [](const ScenarioSpec& s) { return s.vehicles.size(); });

    m.def(
        "road_scenario",
        [](std::uint64_t seed, std::size_t vehicles, std::int64_t total_frames, double noise_sigma,
           double dropout_prob, double clutter_rate) {
            RoadScenarioOptions opt;
            opt.vehicles = vehicles;
            opt.total_frames = total_frames;
            opt.noise_sigma = noise_sigma;
            opt.dropout_prob = dropout_prob;
            opt.clutter_rate = clutter_rate;
            auto rs = make_road_scenario(opt, seed);
            return py::make_tuple(rs.spec, rs.scene);
        },
        py::arg("seed"), py::arg("vehicles") = 10, py::arg("total_frames") = 600, py::arg("noise_sigma") = 0.0,
        py::arg("dropout_prob") = 0.0, py::arg("clutter_rate") = 0.0,
        "Seeded multi-lane road scenario; returns (Scenario, Scene).");

    m.def(
        "simulate",
        [](const ScenarioSpec& spec, const SceneConfig& scene) {
            auto sim = generate(spec, scene);
            return py::make_tuple(std::move(sim.detections), sim.truth.count);
        },
        py::arg("scenario"), py::arg("scene"), "Returns (detections, ground-truth count).");

    m.def("ground_truth_count", &ground_truth_count, py::arg("scenario"), py::arg("scene"));
    m.def("read_detections", &read_detections, py::arg("path"));
    m.def(
        "write_detections",
        [](const std::filesystem::path& p, const std::vector<Detection>& d) { write_detections(p, d); },
        py::arg("path"), py::arg("detections"));

    m.def(
        "partition",
        [](FrameIndex total_frames, std::size_t k) {
            std::vector<std::pair<FrameIndex, FrameIndex>> out;
            for (const auto& r : partition(total_frames, k)) out.emplace_back(r.start_frame, r.end_frame);
            return out;
        },
        py::arg("total_frames"), py::arg("k"));

    m.def(
        "run_json",
        [](const std::vector<Detection>& detections, const SceneConfig& scene, std::size_t chunks,
           std::size_t workers, bool dedup, std::optional<FrameIndex> total_frames, std::string scene_label) {
            py::gil_scoped_release release;
            return report_to_json(
                run_pipeline(detections, scene, pipeline_options(chunks, workers, dedup, total_frames, scene_label)));
        },
        py::arg("detections"), py::arg("scene"), py::arg("chunks") = 1, py::arg("workers") = 1,
        py::arg("dedup") = true, py::arg("total_frames") = py::none(), py::arg("scene_label") = "");

    m.def(
        "oracle_json",
        [](const std::vector<Detection>& detections, const SceneConfig& scene, std::optional<FrameIndex> total_frames,
           std::string scene_label) {
            py::gil_scoped_release release;
            return report_to_json(
                run_single(detections, scene, pipeline_options(1, 1, true, total_frames, scene_label)));
        },
        py::arg("detections"), py::arg("scene"), py::arg("total_frames") = py::none(), py::arg("scene_label") = "");

    m.def(
        "report_content",
        [](const std::string& report_json) { return report_content(report_from_json(report_json)); },
        py::arg("report_json"), "Canonical report without run_id, timestamp and timings.");

    m.def(
        "solve_assignment",
        [](const std::vector<std::vector<double>>& costs, double threshold) {
            const std::size_t rows = costs.size(), cols = rows ? costs[0].size() : 0;
            std::vector<double> flat;
            for (const auto& row : costs) {
                if (row.size() != cols) throw ValidationError("costs", "rows differ in length");
                flat.insert(flat.end(), row.begin(), row.end());
            }
            const auto a = solve_assignment(CostMatrix(rows, cols, std::move(flat), threshold));
            return py::make_tuple(a.pairs, a.total_cost);
        },
        py::arg("costs"), py::arg("threshold") = std::numeric_limits<double>::infinity(),
        "Minimum-cost matching of maximum cardinality; returns (pairs, total_cost).");
}
