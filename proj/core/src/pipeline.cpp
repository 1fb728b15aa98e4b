#include "textile/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <new>

#include "json_field.hpp"
#include "textile/io.hpp"
#include "textile/mesh.hpp"
#include "textile/mesh_io.hpp"
#include "textile/random.hpp"
#include "textile/serialize.hpp"
#include "textile/validate.hpp"
#include "textile/volume.hpp"
#include "textile/voxelizer.hpp"

#ifndef TEXTILE_VERSION
#define TEXTILE_VERSION "0.0.0"
#endif

namespace textile {

namespace fs = std::filesystem;
using detail::Field;
using detail::json;

const char* version() noexcept { return TEXTILE_VERSION; }

const char* to_string(Stage stage) noexcept {
    switch (stage) {
        case Stage::Generate: return "generate";
        case Stage::Compact: return "compact";
        case Stage::Voxelize: return "voxelize";
        case Stage::Render: return "render";
        case Stage::Segment: return "segment";
        case Stage::Degrade: return "degrade";
        case Stage::Reconstruct: return "reconstruct";
        case Stage::Validate: return "validate";
    }
    return "unknown";
}

int exit_code_for(const std::exception& error) noexcept {
    if (const auto* s = dynamic_cast<const StageError*>(&error)) return 10 + static_cast<int>(s->stage());
    if (const auto* e = dynamic_cast<const Error*>(&error)) {
        switch (e->kind()) {
            case ErrorKind::Config: return 2;
            case ErrorKind::Io:
            case ErrorKind::Parse: return 3;
            default: return 1;
        }
    }
    return 1;
}

namespace {

// Library failures inside a stage become StageError; configuration and
// input problems keep their own exit codes.
template <typename F>
auto in_stage(Stage stage, F&& body) {
    try {
        return body();
    } catch (const StageError&) {
        throw;
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::Config || e.kind() == ErrorKind::Io || e.kind() == ErrorKind::Parse) {
            throw;
        }
        throw StageError(stage, e.kind(), e.what());
    } catch (const std::bad_alloc&) {
        throw StageError(stage, ErrorKind::BudgetExceeded, "out of memory");
    }
}

template <typename F>
void as_config(F&& check) {
    try {
        check();
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
}

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
}

fs::path raw_for(const fs::path& header) {
    fs::path raw = header;
    raw.replace_extension(".raw");
    return raw;
}

void require_file(const fs::path& p) {
    if (!fs::is_regular_file(p)) throw IoError("missing input file " + p.string());
}

}  // namespace

void PipelineConfig::validate() const {
    as_config([&] {
        weave.validate();
        fibers.validate();
        render.validate();
        degrade.validate();
    });
    auto need = [](bool ok, const std::string& what) {
        if (!ok) throw ConfigError("config: " + what);
    };
    need(!target_vf || (*target_vf > 0.0 && *target_vf <= 1.0), "fibers.target_vf must lie in (0, 1]");
    need(sections_warp == 0 || sections_warp >= 2, "sections.warp must be 0 or >= 2");
    need(sections_weft == 0 || sections_weft >= 2, "sections.weft must be 0 or >= 2");
    need(perturb_sigma >= 0.0, "perturb_sigma must be >= 0");
    need(compaction_steps >= 0, "compaction.n_steps must be >= 0");
    need(compaction_steps == 0 || compaction_h_final > 0.0, "compaction.h_final must be > 0");
    need(voxel_size_um > 0.0 && std::isfinite(voxel_size_um), "voxel_size_um must be > 0");
    need(voxel_budget > 0, "voxel_budget must be > 0");
    need(d_gate >= 0.0, "reconstruct.d_gate must be >= 0");
    need(min_track_length >= 1, "reconstruct.min_length must be >= 1");
    need(max_gap >= 0, "reconstruct.max_gap must be >= 0");
    need(spline_controls == 0 || spline_controls >= 4, "reconstruct.n_controls must be 0 or >= 4");
    need(spline_window >= 1, "reconstruct.spline_window must be >= 1");
    need(composite_factor >= 1, "reconstruct.composite_factor must be >= 1");
    need(min_component_area >= 1, "segment.min_area must be >= 1");
    need(resample_n >= 2, "validate.resample_n must be >= 2");
    need(n_bins >= 1, "validate.n_bins must be >= 1");
}

int PipelineConfig::warp_sections() const {
    return sections_warp > 0 ? sections_warp : 8 * weave.n_weft_columns + 1;
}

int PipelineConfig::weft_sections() const {
    return sections_weft > 0 ? sections_weft : 8 * weave.n_warp_columns + 1;
}

ReconstructOptions PipelineConfig::reconstruct_options(double grid_spacing) const {
    ReconstructOptions o;
    o.tracking.d_gate = d_gate > 0.0 ? d_gate : default_gate(weave, grid_spacing);
    o.tracking.min_length = min_track_length;
    o.tracking.max_gap = max_gap;
    o.fit.n_controls = spline_controls;
    o.spline_window = spline_window;
    return o;
}

namespace {

constexpr const char* kTopKeys[] = {"seed", "output_dir", "weave", "fibers", "sections",
                                    "perturb_sigma", "compaction", "voxel_size_um", "voxel_budget",
                                    "render", "degrade", "reconstruct", "segment", "validate"};

json vec_json(const Vec3& p) { return json::array({p.x(), p.y(), p.z()}); }

void read_config(PipelineConfig& c, const Field& root) {
    root.only(kTopKeys);
    if (root.has("seed")) c.seed = root["seed"].unsigned_integer();
    if (root.has("output_dir")) c.output_dir = root["output_dir"].string();
    if (root.has("weave")) {
        const Field w = root["weave"];
        w.only(std::array{"n_warp_columns", "n_weft_columns", "warp_sequence", "weft_sequence",
                          "yarn_spacing", "crimp_amplitude", "ellipse_a", "ellipse_b", "seed"});
        if (w.has("n_warp_columns")) c.weave.n_warp_columns = static_cast<int>(w["n_warp_columns"].integer());
        if (w.has("n_weft_columns")) c.weave.n_weft_columns = static_cast<int>(w["n_weft_columns"].integer());
        for (const char* key : {"warp_sequence", "weft_sequence"}) {
            if (!w.has(key)) continue;
            std::vector<int> seq;
            for (std::size_t i = 0; i < w[key].size(); ++i) seq.push_back(static_cast<int>(w[key].item(i).integer()));
            (std::string(key) == "warp_sequence" ? c.weave.warp_sequence : c.weave.weft_sequence) = seq;
        }
        if (w.has("yarn_spacing")) c.weave.yarn_spacing = w["yarn_spacing"].vec3();
        if (w.has("crimp_amplitude")) c.weave.crimp_amplitude = w["crimp_amplitude"].number();
        if (w.has("ellipse_a")) c.weave.ellipse_a = w["ellipse_a"].number();
        if (w.has("ellipse_b")) c.weave.ellipse_b = w["ellipse_b"].number();
        if (w.has("seed")) c.weave.seed = w["seed"].unsigned_integer();
    }
    if (root.has("fibers")) {
        const Field f = root["fibers"];
        f.only(std::array{"fiber_radius", "fibers_per_yarn", "target_vf"});
        if (f.has("fiber_radius")) c.fibers.fiber_radius = f["fiber_radius"].number();
        if (f.has("fibers_per_yarn")) {
            c.fibers.fibers_per_yarn = static_cast<int>(f["fibers_per_yarn"].integer());
            c.target_vf.reset();
        }
        if (f.has("target_vf")) {
            if (f["target_vf"].is_null()) {
                c.target_vf.reset();
            } else {
                c.target_vf = f["target_vf"].number();
            }
        }
    }
    if (root.has("sections")) {
        const Field s = root["sections"];
        s.only(std::array{"warp", "weft"});
        if (s.has("warp")) c.sections_warp = static_cast<int>(s["warp"].integer());
        if (s.has("weft")) c.sections_weft = static_cast<int>(s["weft"].integer());
    }
    if (root.has("perturb_sigma")) c.perturb_sigma = root["perturb_sigma"].number();
    if (root.has("compaction")) {
        const Field s = root["compaction"];
        s.only(std::array{"h_final", "n_steps"});
        if (s.has("h_final")) c.compaction_h_final = s["h_final"].number();
        if (s.has("n_steps")) c.compaction_steps = static_cast<int>(s["n_steps"].integer());
    }
    if (root.has("voxel_size_um")) c.voxel_size_um = root["voxel_size_um"].number();
    if (root.has("voxel_budget")) c.voxel_budget = root["voxel_budget"].integer();
    if (root.has("render")) {
        const Field r = root["render"];
        r.only(std::array{"matrix_level", "yarn_level", "warp_contrast", "weft_contrast",
                          "fiber_texture_period", "noise_sigma", "ring_amplitude", "ring_period"});
        auto num = [&](const char* key, double& dst) {
            if (r.has(key)) dst = r[key].number();
        };
        num("matrix_level", c.render.matrix_level);
        num("yarn_level", c.render.yarn_level);
        num("warp_contrast", c.render.warp_contrast);
        num("weft_contrast", c.render.weft_contrast);
        num("fiber_texture_period", c.render.fiber_texture_period);
        num("noise_sigma", c.render.noise_sigma);
        num("ring_amplitude", c.render.ring_amplitude);
        num("ring_period", c.render.ring_period);
    }
    if (root.has("degrade")) {
        const Field d = root["degrade"];
        d.only(std::array{"keypoint_jitter_sigma", "section_dropout_p", "confidence_floor"});
        if (d.has("keypoint_jitter_sigma")) c.degrade.keypoint_jitter_sigma = d["keypoint_jitter_sigma"].number();
        if (d.has("section_dropout_p")) c.degrade.section_dropout_p = d["section_dropout_p"].number();
        if (d.has("confidence_floor")) c.degrade.confidence_floor = d["confidence_floor"].number();
    }
    if (root.has("reconstruct")) {
        const Field r = root["reconstruct"];
        r.only(std::array{"d_gate", "min_length", "max_gap", "n_controls", "spline_window",
                          "composite_factor"});
        if (r.has("d_gate")) c.d_gate = r["d_gate"].number();
        if (r.has("min_length")) c.min_track_length = static_cast<int>(r["min_length"].integer());
        if (r.has("max_gap")) c.max_gap = static_cast<int>(r["max_gap"].integer());
        if (r.has("n_controls")) c.spline_controls = static_cast<int>(r["n_controls"].integer());
        if (r.has("spline_window")) c.spline_window = static_cast<int>(r["spline_window"].integer());
        if (r.has("composite_factor")) c.composite_factor = static_cast<int>(r["composite_factor"].integer());
    }
    if (root.has("segment")) {
        const Field s = root["segment"];
        s.only(std::array{"min_area"});
        if (s.has("min_area")) c.min_component_area = static_cast<int>(s["min_area"].integer());
    }
    if (root.has("validate")) {
        const Field v = root["validate"];
        v.only(std::array{"resample_n", "n_bins"});
        if (v.has("resample_n")) c.resample_n = static_cast<int>(v["resample_n"].integer());
        if (v.has("n_bins")) c.n_bins = static_cast<int>(v["n_bins"].integer());
    }
}

json config_json(const PipelineConfig& c) {
    const WeaveSpec& w = c.weave;
    return {
        {"seed", c.seed},
        {"output_dir", c.output_dir.generic_string()},
        {"weave", {{"n_warp_columns", w.n_warp_columns}, {"n_weft_columns", w.n_weft_columns},
                   {"warp_sequence", w.warp_sequence}, {"weft_sequence", w.weft_sequence},
                   {"yarn_spacing", vec_json(w.yarn_spacing)}, {"crimp_amplitude", w.crimp_amplitude},
                   {"ellipse_a", w.ellipse_a}, {"ellipse_b", w.ellipse_b}, {"seed", w.seed}}},
        {"fibers", {{"fiber_radius", c.fibers.fiber_radius},
                    {"fibers_per_yarn", c.fibers.fibers_per_yarn},
                    {"target_vf", c.target_vf ? json(*c.target_vf) : json(nullptr)}}},
        {"sections", {{"warp", c.sections_warp}, {"weft", c.sections_weft}}},
        {"perturb_sigma", c.perturb_sigma},
        {"compaction", {{"h_final", c.compaction_h_final}, {"n_steps", c.compaction_steps}}},
        {"voxel_size_um", c.voxel_size_um},
        {"voxel_budget", c.voxel_budget},
        {"render", {{"matrix_level", c.render.matrix_level}, {"yarn_level", c.render.yarn_level},
                    {"warp_contrast", c.render.warp_contrast}, {"weft_contrast", c.render.weft_contrast},
                    {"fiber_texture_period", c.render.fiber_texture_period},
                    {"noise_sigma", c.render.noise_sigma}, {"ring_amplitude", c.render.ring_amplitude},
                    {"ring_period", c.render.ring_period}}},
        {"degrade", {{"keypoint_jitter_sigma", c.degrade.keypoint_jitter_sigma},
                     {"section_dropout_p", c.degrade.section_dropout_p},
                     {"confidence_floor", c.degrade.confidence_floor}}},
        {"reconstruct", {{"d_gate", c.d_gate}, {"min_length", c.min_track_length},
                         {"max_gap", c.max_gap}, {"n_controls", c.spline_controls},
                         {"spline_window", c.spline_window}, {"composite_factor", c.composite_factor}}},
        {"segment", {{"min_area", c.min_component_area}}},
        {"validate", {{"resample_n", c.resample_n}, {"n_bins", c.n_bins}}},
    };
}

}  // namespace

PipelineConfig config_from_json(const std::string& text, const std::string& source) {
    PipelineConfig config;
    if (text.find_first_not_of(" \t\r\n") == std::string::npos) return config;
    try {
        const json doc = detail::parse_document(text, source);
        if (!doc.is_object()) throw ParseError(source, "<document>", "expected an object");
        read_config(config, Field(doc, source, ""));
    } catch (const ParseError& e) {
        throw ConfigError(e.what());
    }
    config.validate();
    return config;
}

std::string config_to_json(const PipelineConfig& config) { return config_json(config).dump(1) + "\n"; }

PipelineConfig load_config(const fs::path& path) {
    if (!fs::is_regular_file(path)) throw IoError("config file not found: " + path.string());
    return config_from_json(read_file(path), path.string());
}

std::uint64_t stage_seed(const PipelineConfig& config, Stage stage) {
    return derive_seed(config.seed, to_string(stage));
}

TextileModel build_model(const PipelineConfig& config) {
    TextileModel model = generate_interlock(config.weave, config.fibers, config.warp_sections(),
                                            config.weft_sections());
    if (config.target_vf) {
        model.fibers = FiberSpec::for_target_vf(mean_section_area(model), *config.target_vf,
                                                config.fibers.fiber_radius);
    }
    if (config.perturb_sigma > 0.0) {
        model = perturb_model(model, config.perturb_sigma, stage_seed(config, Stage::Generate));
    }
    return model;
}

std::vector<fs::path> cmd_generate(const PipelineConfig& config, const fs::path& out) {
    config.validate();
    return in_stage(Stage::Generate, [&] {
        ensure_dir(out);
        const TextileModel model = build_model(config);
        const fs::path path = out / "model.json";
        save_model(model, path);
        return std::vector<fs::path>{path};
    });
}

std::vector<fs::path> cmd_compact(const fs::path& model_path, double h_final, int n_steps,
                                  const fs::path& out) {
    require_file(model_path);
    const TextileModel model = load_model(model_path);
    as_config([&] {
        if (n_steps < 1) throw DomainError("compact: n_steps must be >= 1");
        if (!(h_final > 0.0) || h_final > model.thickness) {
            throw DomainError("compact: need 0 < h_final <= model thickness");
        }
    });
    return in_stage(Stage::Compact, [&] {
        ensure_dir(out);
        const auto steps = compaction_sequence(model, h_final, n_steps);
        std::vector<fs::path> files;
        for (std::size_t k = 0; k < steps.size(); ++k) {
            char name[32];
            std::snprintf(name, sizeof name, "model_%02zu.json", k + 1);
            files.push_back(out / name);
            save_model(steps[k], files.back());
        }
        return files;
    });
}

GridGeometry dims_for_extent(const Vec3& extent_um, double voxel_size_um, double unit_um) {
    const Box box = Box::from_corners(Vec3::Zero(), extent_um / unit_um);
    return grid_for_box(box, voxel_size_um, unit_um);
}

VoxelizeResult cmd_voxelize(const fs::path& model_path, double voxel_size_um, const fs::path& out,
                            bool dims_only, std::int64_t voxel_budget) {
    require_file(model_path);
    const TextileModel model = load_model(model_path);
    as_config([&] {
        if (!(voxel_size_um > 0.0)) throw DomainError("voxelize: voxel size must be > 0");
    });
    return in_stage(Stage::Voxelize, [&] {
        ensure_dir(out);
        VoxelizeResult result;
        const fs::path header = out / "labels.json";
        if (dims_only) {
            VolumeHeader h;
            h.grid = voxel_grid(model, voxel_size_um);
            h.dtype = "uint16";
            h.label_map = label_map_of(model);
            h.unit_um = model.unit_um;
            save_header(h, header);
            result.grid = h.grid;
            result.files = {header};
            return result;
        }
        RasterOptions options;
        options.voxel_budget = voxel_budget;
        const LabelVolume labels = voxelize(model, voxel_size_um, options);
        save_volume(labels, raw_for(header), header);
        result.grid = labels.grid;
        result.files = {raw_for(header), header};
        return result;
    });
}

std::vector<fs::path> cmd_render(const fs::path& labels_header, const RenderParams& params,
                                 const fs::path& out) {
    as_config([&] { params.validate(); });
    require_file(labels_header);
    const LabelVolume labels = load_label_volume(raw_for(labels_header), labels_header);
    return in_stage(Stage::Render, [&] {
        ensure_dir(out);
        const GrayVolume ct = render_pseudo_ct(labels, params);
        const fs::path header = out / "pseudo_ct.json";
        save_volume(ct, raw_for(header), header);
        return std::vector<fs::path>{raw_for(header), header};
    });
}

std::vector<fs::path> cmd_segment(const fs::path& labels_header, const std::string& axis,
                                  int min_area, const fs::path& out) {
    std::vector<SliceAxis> axes;
    as_config([&] {
        if (axis == "both") {
            axes = {SliceAxis::YZ, SliceAxis::XZ};
        } else {
            axes = {slice_axis_from_string(axis)};
        }
        if (min_area < 1) throw DomainError("segment: min_area must be >= 1");
    });
    require_file(labels_header);
    const LabelVolume labels = load_label_volume(raw_for(labels_header), labels_header);
    return in_stage(Stage::Segment, [&] {
        ensure_dir(out);
        std::vector<DetectionSet> sets;
        for (SliceAxis a : axes) sets.push_back(detect_batch(extract_slices(labels, a), min_area, true));
        const fs::path path = out / "detections.jsonl";
        write_file_atomic(path, detections_to_jsonl(sets));
        return std::vector<fs::path>{path};
    });
}

std::vector<fs::path> cmd_degrade(const fs::path& detections, const DegradeParams& params,
                                  const fs::path& out) {
    as_config([&] { params.validate(); });
    require_file(detections);
    const auto sets = detections_from_jsonl(read_file(detections), detections.string());
    return in_stage(Stage::Degrade, [&] {
        ensure_dir(out);
        std::vector<DetectionSet> degraded;
        for (const auto& s : sets) degraded.push_back(degrade(s, params));
        const fs::path path = out / "detections_degraded.jsonl";
        write_file_atomic(path, detections_to_jsonl(degraded));
        return std::vector<fs::path>{path};
    });
}

namespace {

VolumeMesh merge(const std::vector<VolumeMesh>& meshes) {
    VolumeMesh all;
    for (const auto& m : meshes) {
        const auto base = static_cast<std::int64_t>(all.vertices.size());
        const auto conn = static_cast<std::int64_t>(all.connectivity.size());
        all.vertices.insert(all.vertices.end(), m.vertices.begin(), m.vertices.end());
        for (auto id : m.connectivity) all.connectivity.push_back(base + id);
        for (auto o : m.offsets) all.offsets.push_back(conn + o);
        all.cell_types.insert(all.cell_types.end(), m.cell_types.begin(), m.cell_types.end());
        all.cell_labels.insert(all.cell_labels.end(), m.cell_labels.begin(), m.cell_labels.end());
    }
    return all;
}

}  // namespace

std::vector<fs::path> cmd_reconstruct(const fs::path& detections, const fs::path& labels_header,
                                      const PipelineConfig& config, const fs::path& out) {
    config.validate();
    require_file(detections);
    require_file(labels_header);
    const auto sets = detections_from_jsonl(read_file(detections), detections.string());
    const VolumeHeader header = load_header(labels_header);
    return in_stage(Stage::Reconstruct, [&] {
        ensure_dir(out);
        ReconstructSummary summary;
        const auto yarns = reconstruct_yarns(sets, header.grid,
                                             config.reconstruct_options(header.grid.spacing), &summary);
        std::vector<NamedSurface> surfaces;
        std::vector<VolumeMesh> volumes;
        for (const auto& y : yarns) {
            surfaces.push_back({"yarn_" + std::to_string(y.id), build_surface_mesh(y)});
            volumes.push_back(build_volume_mesh(y));
        }
        const auto& g = header.grid;
        const Box box = Box::from_corners(
            g.origin, g.origin + g.spacing * Vec3(g.dims[0], g.dims[1], g.dims[2]));
        const VolumeMesh composite = build_composite_mesh(
            yarns, box, g.voxel_size_um * config.composite_factor, header.unit_um, config.voxel_budget);

        json gaps = json::array();
        for (const auto& r : summary.boundary_gaps) gaps.push_back({r.first, r.last});
        const json log = {{"tracks", summary.tracks},
                          {"discarded_tracks", summary.discarded},
                          {"filled_sections", summary.filled_sections},
                          {"boundary_gaps", gaps}};

        std::vector<fs::path> files = {out / "yarns.json", out / "yarns.obj", out / "yarns_volume.vtk",
                                       out / "composite.vtk", out / "reconstruct_log.json"};
        write_file_atomic(files[0], yarns_to_json(yarns));
        write_file_atomic(files[1], write_obj(surfaces));
        write_file_atomic(files[2], write_vtk(merge(volumes), "reconstructed yarns"));
        write_file_atomic(files[3], write_vtk(composite, "composite"));
        write_file_atomic(files[4], log.dump(1) + "\n");
        return files;
    });
}

std::vector<fs::path> cmd_validate(const fs::path& model_path, const fs::path& yarns_path,
                                   const PipelineConfig& config, const fs::path& out) {
    config.validate();
    require_file(model_path);
    require_file(yarns_path);
    const TextileModel model = load_model(model_path);
    const auto yarns = yarns_from_json(read_file(yarns_path), yarns_path.string());
    return in_stage(Stage::Validate, [&] {
        ensure_dir(out);
        ValidationReport report;
        PathOptions options;
        options.resample_n = config.resample_n;
        report.paths = match_and_assess_paths(model, yarns, config.voxel_size_um, options);
        report.vf = vf_distribution(yarns, model.fibers, config.n_bins);
        std::vector<fs::path> files = {out / "report.json", out / "paths.txt", out / "vf.txt",
                                       out / "vf_histogram.csv"};
        write_file_atomic(files[0], report_to_json(report));
        write_file_atomic(files[1], path_table(report.paths));
        write_file_atomic(files[2], vf_table(report.vf));
        write_file_atomic(files[3], histogram_csv(report.vf));
        return files;
    });
}

std::string manifest_to_json(const RunManifest& m) {
    json timings = json::array();
    for (const auto& t : m.timings) timings.push_back({{"stage", t.stage}, {"seconds", t.seconds}});
    json files = json::array();
    for (const auto& f : m.files) files.push_back({{"path", f.path}, {"bytes", f.bytes}, {"sha256", f.sha256}});
    json config = m.config_json.empty() ? json::object() : json::parse(m.config_json);
    return json{{"tool", "textile"}, {"version", m.version}, {"config", config},
                {"timings", timings}, {"files", files}}
               .dump(1) + "\n";
}

RunManifest manifest_from_json(const std::string& text, const std::string& source) {
    const json doc = detail::parse_document(text, source);
    const Field root(doc, source, "");
    RunManifest m;
    m.version = root["version"].string();
    m.config_json = root["config"].raw().dump(1) + "\n";
    const Field t = root["timings"];
    for (std::size_t i = 0; i < t.size(); ++i) {
        m.timings.push_back({t.item(i)["stage"].string(), t.item(i)["seconds"].number()});
    }
    const Field f = root["files"];
    for (std::size_t i = 0; i < f.size(); ++i) {
        m.files.push_back({f.item(i)["path"].string(),
                           static_cast<std::uintmax_t>(f.item(i)["bytes"].unsigned_integer()),
                           f.item(i)["sha256"].string()});
    }
    return m;
}

RunManifest cmd_pipeline(const PipelineConfig& config) {
    config.validate();
    const fs::path out = config.output_dir;
    ensure_dir(out);

    RunManifest manifest;
    manifest.version = version();
    manifest.config_json = config_to_json(config);
    std::vector<fs::path> files;
    auto timed = [&](Stage stage, auto&& body) {
        const auto t0 = std::chrono::steady_clock::now();
        auto produced = body();
        const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
        manifest.timings.push_back({to_string(stage), dt.count()});
        files.insert(files.end(), produced.begin(), produced.end());
        return produced;
    };

    const fs::path config_path = out / "config.json";
    write_file_atomic(config_path, manifest.config_json);
    files.push_back(config_path);

    fs::path model = timed(Stage::Generate, [&] { return cmd_generate(config, out); }).front();
    if (config.compaction_steps > 0) {
        model = timed(Stage::Compact, [&] {
                    return cmd_compact(model, config.compaction_h_final, config.compaction_steps,
                                       out / "compaction");
                }).back();
    }
    const fs::path labels = timed(Stage::Voxelize, [&] {
                                return cmd_voxelize(model, config.voxel_size_um, out, false,
                                                    config.voxel_budget)
                                    .files;
                            }).back();
    RenderParams render = config.render;
    render.seed = stage_seed(config, Stage::Render);
    timed(Stage::Render, [&] { return cmd_render(labels, render, out); });
    const fs::path detections = timed(Stage::Segment, [&] {
                                    return cmd_segment(labels, "both", config.min_component_area, out);
                                }).front();
    DegradeParams degrade_params = config.degrade;
    degrade_params.seed = stage_seed(config, Stage::Degrade);
    const fs::path degraded =
        timed(Stage::Degrade, [&] { return cmd_degrade(detections, degrade_params, out); }).front();
    const fs::path yarns =
        timed(Stage::Reconstruct, [&] { return cmd_reconstruct(degraded, labels, config, out); }).front();
    timed(Stage::Validate, [&] { return cmd_validate(model, yarns, config, out); });

    for (const auto& f : files) {
        RunManifest::File entry;
        entry.path = fs::relative(f, out).generic_string();
        entry.bytes = fs::file_size(f);
        entry.sha256 = sha256_file(f);
        manifest.files.push_back(entry);
    }
    write_file_atomic(out / "manifest.json", manifest_to_json(manifest));
    return manifest;
}

}  // namespace textile
