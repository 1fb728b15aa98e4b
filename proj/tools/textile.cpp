#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "textile/pipeline.hpp"
#include "textile/volume.hpp"

namespace fs = std::filesystem;
using namespace textile;

namespace {

struct Common {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out;
};

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("--config", c.config, "JSON config file (defaults apply when omitted)");
    cmd->add_option("--seed", c.seed, "global seed, overrides the config");
    cmd->add_option("--out", c.out, "output directory");
}

PipelineConfig resolve(const Common& c) {
    PipelineConfig config = c.config.empty() ? PipelineConfig{} : load_config(c.config);
    if (c.seed) config.seed = *c.seed;
    if (!c.out.empty()) config.output_dir = c.out;
    config.validate();
    return config;
}

void report(const std::vector<fs::path>& files) {
    for (const auto& f : files) std::cerr << "wrote " << f.string() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Woven textile descriptive modeling pipeline"};
    app.set_version_flag("--version", std::string(version()));
    app.require_subcommand(1);

    Common common;

    auto* generate = app.add_subcommand("generate", "generate a synthetic interlock model");
    add_common(generate, common);

    auto* compact = app.add_subcommand("compact", "write a compaction sequence of a model");
    add_common(compact, common);
    std::string model_path;
    double h_final = 0.0;
    int n_steps = 12;
    compact->add_option("--model", model_path, "model.json")->required();
    compact->add_option("--h-final", h_final, "final thickness, model units")->required();
    compact->add_option("--steps", n_steps, "number of steps");

    auto* voxelize = app.add_subcommand("voxelize", "voxelize a model into a label volume");
    add_common(voxelize, common);
    std::optional<double> voxel_size;
    bool dims_only = false;
    std::vector<double> extent_um;
    voxelize->add_option("--model", model_path, "model.json");
    voxelize->add_option("--voxel-size", voxel_size, "voxel edge in micrometres");
    voxelize->add_flag("--dims-only", dims_only, "write the header only");
    voxelize->add_option("--extent-um", extent_um, "box extents in micrometres (dimension check)")
        ->expected(3);

    auto* render = app.add_subcommand("render", "render a pseudo-CT volume from labels");
    add_common(render, common);
    std::string labels_path;
    render->add_option("--labels", labels_path, "labels.json header")->required();

    auto* segment = app.add_subcommand("segment", "oracle detections from a label volume");
    add_common(segment, common);
    std::string axis = "both";
    segment->add_option("--labels", labels_path, "labels.json header")->required();
    segment->add_option("--axis", axis, "XZ, YZ or both");

    auto* degrade_cmd = app.add_subcommand("degrade", "drop and jitter detections");
    add_common(degrade_cmd, common);
    std::string detections_path;
    std::optional<double> dropout, jitter, floor;
    degrade_cmd->add_option("--detections", detections_path, "detections.jsonl")->required();
    degrade_cmd->add_option("--dropout", dropout, "section dropout probability");
    degrade_cmd->add_option("--jitter", jitter, "keypoint jitter sigma, voxels");
    degrade_cmd->add_option("--confidence-floor", floor, "minimum confidence kept");

    auto* reconstruct = app.add_subcommand("reconstruct", "track, complete, fit and mesh yarns");
    add_common(reconstruct, common);
    reconstruct->add_option("--detections", detections_path, "detections.jsonl")->required();
    reconstruct->add_option("--labels", labels_path, "labels.json header (grid geometry)")->required();

    auto* validate = app.add_subcommand("validate", "assess reconstructed yarns against a model");
    add_common(validate, common);
    std::string yarns_path;
    validate->add_option("--model", model_path, "ground-truth model.json")->required();
    validate->add_option("--yarns", yarns_path, "yarns.json")->required();

    auto* pipeline = app.add_subcommand("pipeline", "run every stage and write a manifest");
    add_common(pipeline, common);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        PipelineConfig config = resolve(common);
        const fs::path out = config.output_dir;
        if (generate->parsed()) {
            report(cmd_generate(config, out));
        } else if (compact->parsed()) {
            report(cmd_compact(model_path, h_final, n_steps, out));
        } else if (voxelize->parsed()) {
            const double vs = voxel_size.value_or(config.voxel_size_um);
            if (!extent_um.empty()) {
                const GridGeometry g = dims_for_extent(Vec3(extent_um[0], extent_um[1], extent_um[2]), vs);
                std::printf("dims %lld %lld %lld\nslices XZ %lld YZ %lld total %lld\n",
                            static_cast<long long>(g.dims[0]), static_cast<long long>(g.dims[1]),
                            static_cast<long long>(g.dims[2]),
                            static_cast<long long>(slice_count(g, SliceAxis::XZ)),
                            static_cast<long long>(slice_count(g, SliceAxis::YZ)),
                            static_cast<long long>(slice_count(g, SliceAxis::XZ) +
                                                   slice_count(g, SliceAxis::YZ)));
                return 0;
            }
            if (model_path.empty()) throw ConfigError("voxelize: --model or --extent-um is required");
            const auto result = cmd_voxelize(model_path, vs, out, dims_only, config.voxel_budget);
            const auto& d = result.grid.dims;
            std::printf("dims %lld %lld %lld\n", static_cast<long long>(d[0]),
                        static_cast<long long>(d[1]), static_cast<long long>(d[2]));
            report(result.files);
        } else if (render->parsed()) {
            RenderParams params = config.render;
            params.seed = stage_seed(config, Stage::Render);
            report(cmd_render(labels_path, params, out));
        } else if (segment->parsed()) {
            report(cmd_segment(labels_path, axis, config.min_component_area, out));
        } else if (degrade_cmd->parsed()) {
            DegradeParams params = config.degrade;
            if (dropout) params.section_dropout_p = *dropout;
            if (jitter) params.keypoint_jitter_sigma = *jitter;
            if (floor) params.confidence_floor = *floor;
            params.seed = stage_seed(config, Stage::Degrade);
            report(cmd_degrade(detections_path, params, out));
        } else if (reconstruct->parsed()) {
            report(cmd_reconstruct(detections_path, labels_path, config, out));
        } else if (validate->parsed()) {
            report(cmd_validate(model_path, yarns_path, config, out));
        } else if (pipeline->parsed()) {
            const RunManifest m = cmd_pipeline(config);
            for (const auto& t : m.timings) std::cerr << t.stage << " " << t.seconds << " s\n";
            std::cerr << "wrote " << (out / "manifest.json").string() << "\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e);
    }
    return 0;
}
