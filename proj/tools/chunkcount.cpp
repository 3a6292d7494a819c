// chunkcount: simulate, count, and compare vehicle-counting runs.
//
// Exit status: 0 success, 1 invalid input or usage, 2 compare mismatch.
// Reports go to stdout; diagnostics only ever go to stderr.

#include "chunkcount/config_io.hpp"
#include "chunkcount/errors.hpp"
#include "chunkcount/orchestrator.hpp"
#include "chunkcount/simulator.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

using namespace chunkcount;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitMismatch = 2;

struct SimulateArgs {
    std::string scenario, scene, out;
    std::optional<std::uint64_t> seed;
};

struct RunArgs {
    std::string detections, scene, store;
    std::optional<std::size_t> chunks, workers;
    std::optional<FrameIndex> frames;
    bool no_dedup = false;
};

struct CompareArgs {
    std::string a, b;
};

struct ValidateArgs {
    std::string scene, scenario;
};

int simulate(const SimulateArgs& args) {
    ScenarioSpec spec = load_scenario(args.scenario);
    const SceneConfig scene = load_scene(args.scene);
    if (args.seed) spec.seed = *args.seed;
    const Simulation sim = generate(spec, scene);
    write_detections(args.out, sim.detections);
    std::cout << "truth: " << sim.truth.count << '\n';
    return kExitOk;
}

int count(const RunArgs& args, bool single) {
    const SceneConfig scene = load_scene(args.scene);
    const std::vector<Detection> detections = read_detections(args.detections);
    PipelineOptions po;
    po.workers = args.workers.value_or(default_worker_count());
    po.chunks = args.chunks.value_or(po.workers);
    po.dedup = !args.no_dedup;
    po.total_frames = args.frames;
    po.scene_label = args.scene;
    const CountReport report = single ? run_single(detections, scene, po) : run_pipeline(detections, scene, po);
    if (!args.store.empty()) append_report(args.store, report);
    std::cout << report_to_json(report) << '\n';
    return kExitOk;
}

// "file" holds one report, or a JSONL store whose last record is used;
// "file#run_id" selects a record of a store by id.
CountReport resolve_report(const std::string& ref) {
    const auto hash = ref.rfind('#');
    if (hash != std::string::npos) {
        const std::string path = ref.substr(0, hash), id = ref.substr(hash + 1);
        for (const auto& r : read_reports(path)) {
            if (r.run_id == id) return r;
        }
        throw ValidationError("run_id", "no run \"" + id + "\" in " + path);
    }
    const std::string text = read_text_file(ref);
    try {
        return report_from_json(text, ref);
    } catch (const ParseError&) {
        const auto all = read_reports(ref);
        if (all.empty()) throw ValidationError("report", ref + " holds no reports");
        return all.back();
    }
}

std::string range_text(const ChunkRange& r) {
    return "[" + std::to_string(r.start_frame) + ", " + std::to_string(r.end_frame) + ")";
}

int compare_reports(const CompareArgs& args) {
    const CountReport a = resolve_report(args.a);
    const CountReport b = resolve_report(args.b);
    const ReportDiff diff = compare(a, b);

    std::printf("%-6s %-18s %8s   %-18s %8s\n", "chunk", "a range", "a count", "b range", "b count");
    const std::size_t rows = std::max(diff.a_chunks.size(), diff.b_chunks.size());
    for (std::size_t i = 0; i < rows; ++i) {
        std::string ar = "-", ac = "-", br = "-", bc = "-";
        if (i < diff.a_chunks.size()) {
            ar = range_text(diff.a_chunks[i].range);
            ac = std::to_string(diff.a_chunks[i].counted);
        }
        if (i < diff.b_chunks.size()) {
            br = range_text(diff.b_chunks[i].range);
            bc = std::to_string(diff.b_chunks[i].counted);
        }
        std::printf("%-6zu %-18s %8s   %-18s %8s\n", i, ar.c_str(), ac.c_str(), br.c_str(), bc.c_str());
    }
    std::printf("total  a=%zu b=%zu delta=%+lld\n", a.total, b.total, static_cast<long long>(diff.total_delta));
    std::printf("%s\n", diff.totals_equal() ? "totals equal" : "totals differ");
    return diff.totals_equal() ? kExitOk : kExitMismatch;
}

int validate_config(const ValidateArgs& args) {
    if (args.scene.empty() && args.scenario.empty()) {
        throw ValidationError("", "give --scene, --scenario, or both");
    }
    if (!args.scene.empty()) {
        load_scene(args.scene);
        std::cout << args.scene << ": ok\n";
    }
    if (!args.scenario.empty()) {
        load_scenario(args.scenario);
        std::cout << args.scenario << ": ok\n";
    }
    return kExitOk;
}

void add_count_options(CLI::App* cmd, RunArgs& args) {
    cmd->add_option("--detections", args.detections, "JSONL detection stream")->required();
    cmd->add_option("--scene", args.scene, "scene JSON")->required();
    cmd->add_option("--store", args.store, "append the report to this JSONL store");
    cmd->add_option("--frames", args.frames, "frame count to partition (default: last frame + 1)")
        ->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Chunk-parallel vehicle counting on detection streams"};
    app.require_subcommand(1);

    SimulateArgs sim_args;
    auto* sim = app.add_subcommand("simulate", "generate detections and print the ground-truth count");
    sim->add_option("--scenario", sim_args.scenario, "scenario JSON")->required();
    sim->add_option("--scene", sim_args.scene, "scene JSON")->required();
    sim->add_option("--out", sim_args.out, "output JSONL path")->required();
    sim->add_option("--seed", sim_args.seed, "override the scenario seed");

    RunArgs run_args;
    auto* run = app.add_subcommand("run", "count with k chunks and print the report");
    add_count_options(run, run_args);
    run->add_option("--chunks", run_args.chunks, "number of chunks (default: worker count)")->check(CLI::PositiveNumber);
    run->add_option("--workers", run_args.workers, "worker threads (default: CHUNKCOUNT_WORKERS or cores)")
        ->check(CLI::PositiveNumber);
    run->add_flag("--no-dedup", run_args.no_dedup, "count naively in every chunk");

    RunArgs oracle_args;
    auto* oracle = app.add_subcommand("oracle", "count the whole stream as one chunk");
    add_count_options(oracle, oracle_args);

    CompareArgs cmp_args;
    auto* cmp = app.add_subcommand("compare", "diff two reports; exit 2 when totals differ");
    cmp->add_option("--a", cmp_args.a, "report file, JSONL store, or store#run_id")->required();
    cmp->add_option("--b", cmp_args.b, "report file, JSONL store, or store#run_id")->required();

    ValidateArgs val_args;
    auto* val = app.add_subcommand("validate-config", "check scene and scenario files");
    val->add_option("--scene", val_args.scene, "scene JSON");
    val->add_option("--scenario", val_args.scenario, "scenario JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e, std::cerr, std::cerr);
        return kExitInvalid;
    }

    try {
        if (*sim) return simulate(sim_args);
        if (*run) return count(run_args, false);
        if (*oracle) return count(oracle_args, true);
        if (*cmp) return compare_reports(cmp_args);
        if (*val) return validate_config(val_args);
    } catch (const std::exception& e) {
        std::cerr << "chunkcount: error: " << e.what() << '\n';
        return kExitInvalid;
    }
    return kExitInvalid;
}
