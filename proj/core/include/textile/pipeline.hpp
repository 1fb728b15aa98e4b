#ifndef TEXTILE_PIPELINE_HPP
#define TEXTILE_PIPELINE_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "textile/error.hpp"
#include "textile/reconstruct.hpp"
#include "textile/render.hpp"
#include "textile/segmenter.hpp"
#include "textile/synthgen.hpp"

namespace textile {

enum class Stage : int {
    Generate = 1,
    Compact = 2,
    Voxelize = 3,
    Render = 4,
    Segment = 5,
    Degrade = 6,
    Reconstruct = 7,
    Validate = 8,
};

const char* to_string(Stage stage) noexcept;

// A failure inside one stage; the CLI exits with 10 + stage.
class StageError : public Error {
public:
    StageError(Stage stage, ErrorKind cause, const std::string& what)
        : Error(cause, std::string(to_string(stage)) + ": " + what), stage_(stage) {}

    Stage stage() const noexcept { return stage_; }

private:
    Stage stage_;
};

// 0 success, 2 config, 3 IO or malformed input, 10 + k stage k, 1 otherwise.
int exit_code_for(const std::exception& error) noexcept;

struct PipelineConfig {
    WeaveSpec weave;
    FiberSpec fibers;
    std::optional<double> target_vf = 0.6;  // when set, fibers_per_yarn is derived
    int sections_warp = 0;                  // 0: 8 sections per weft column, plus 1
    int sections_weft = 0;
    double perturb_sigma = 0.0;
    double compaction_h_final = 0.0;
    int compaction_steps = 0;               // 0: no compaction
    double voxel_size_um = 20.0;
    std::int64_t voxel_budget = std::int64_t{1} << 28;
    RenderParams render;
    DegradeParams degrade;
    double d_gate = 0.0;                    // 0: derived from the yarn size
    int min_track_length = 4;
    int max_gap = 10;
    int spline_controls = 0;                // 0: max(4, S / 4)
    int spline_window = 4;
    int composite_factor = 4;               // composite voxel = factor x voxel_size
    int min_component_area = 12;
    int resample_n = 200;
    int n_bins = 20;
    std::filesystem::path output_dir = "textile_run";
    std::uint64_t seed = 0;

    void validate() const;  // throws ConfigError

    int warp_sections() const;
    int weft_sections() const;
    ReconstructOptions reconstruct_options(double grid_spacing) const;
};

// Missing keys keep their defaults; unknown keys and invalid values raise
// ConfigError naming the field. An empty document is a valid config.
PipelineConfig config_from_json(const std::string& text, const std::string& source = "<config>");
std::string config_to_json(const PipelineConfig& config);
PipelineConfig load_config(const std::filesystem::path& path);

// Stable per-stage seed.
std::uint64_t stage_seed(const PipelineConfig& config, Stage stage);


// Builds the configured model; with target_vf the fiber count is chosen
// from the mean ground-truth section area.
TextileModel build_model(const PipelineConfig& config);

// Stage commands. Each returns the files it wrote.
std::vector<std::filesystem::path> cmd_generate(const PipelineConfig& config,
                                                const std::filesystem::path& out);
std::vector<std::filesystem::path> cmd_compact(const std::filesystem::path& model, double h_final,
                                               int n_steps, const std::filesystem::path& out);

struct VoxelizeResult {
    std::vector<std::filesystem::path> files;
    GridGeometry grid;
};
VoxelizeResult cmd_voxelize(const std::filesystem::path& model, double voxel_size_um,
                            const std::filesystem::path& out, bool dims_only = false,
                            std::int64_t voxel_budget = std::int64_t{1} << 28);
// Header for a box given by its extents in micrometres (no model needed).
GridGeometry dims_for_extent(const Vec3& extent_um, double voxel_size_um, double unit_um = 20.0);

std::vector<std::filesystem::path> cmd_render(const std::filesystem::path& labels_header,
                                              const RenderParams& params,
                                              const std::filesystem::path& out);
// axis: "XZ", "YZ" or "both".
std::vector<std::filesystem::path> cmd_segment(const std::filesystem::path& labels_header,
                                               const std::string& axis, int min_area,
                                               const std::filesystem::path& out);
std::vector<std::filesystem::path> cmd_degrade(const std::filesystem::path& detections,
                                               const DegradeParams& params,
                                               const std::filesystem::path& out);
std::vector<std::filesystem::path> cmd_reconstruct(const std::filesystem::path& detections,
                                                   const std::filesystem::path& labels_header,
                                                   const PipelineConfig& config,
                                                   const std::filesystem::path& out);
std::vector<std::filesystem::path> cmd_validate(const std::filesystem::path& model,
                                                const std::filesystem::path& yarns,
                                                const PipelineConfig& config,
                                                const std::filesystem::path& out);

struct StageTiming {
    std::string stage;
    double seconds = 0.0;
};

struct RunManifest {
    std::string config_json;
    std::vector<StageTiming> timings;
    struct File {
        std::string path;  // relative to the output directory
        std::uintmax_t bytes = 0;
        std::string sha256;
    };
    std::vector<File> files;
    std::string version;
};

std::string manifest_to_json(const RunManifest& manifest);
RunManifest manifest_from_json(const std::string& text, const std::string& source = "<manifest>");

// Every stage in order, then manifest.json. Returns the manifest.
RunManifest cmd_pipeline(const PipelineConfig& config);

const char* version() noexcept;

}  // namespace textile

#endif  // TEXTILE_PIPELINE_HPP
