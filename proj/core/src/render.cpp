#include "textile/render.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "textile/error.hpp"
#include "textile/parallel.hpp"
#include "textile/random.hpp"

namespace textile {

void RenderParams::validate() const {
    auto level = [](double v, const char* name) {
        if (!(v >= 0.0 && v <= 1.0)) {
            throw DomainError(std::string("render: ") + name + " must lie in [0, 1]");
        }
    };
    level(matrix_level, "matrix_level");
    level(yarn_level, "yarn_level");
    level(warp_contrast, "warp_contrast");
    level(weft_contrast, "weft_contrast");
    if (!(noise_sigma >= 0.0)) throw DomainError("render: noise_sigma must be >= 0");
    if (!(fiber_texture_period > 0.0)) throw DomainError("render: fiber_texture_period must be > 0");
    if (!(ring_amplitude >= 0.0)) throw DomainError("render: ring_amplitude must be >= 0");
    if (!(ring_period > 0.0)) throw DomainError("render: ring_period must be > 0");
}

namespace {

struct Shader {
    const RenderParams& params;
    const LabelMap& label_map;
    double cx, cy;  // ring center in voxel indices

    // (i, j, k) are global voxel indices
    double shade(std::uint16_t label, double i, double j, double k) const {
        double value = params.matrix_level;
        if (label != 0) {
            const auto it = label_map.find(label);
            const Family family = it != label_map.end() ? it->second : Family::Warp;
            // stripes are constant along the fiber direction
            const double across = family == Family::Warp ? j + k : i + k;
            const double contrast =
                family == Family::Warp ? params.warp_contrast : params.weft_contrast;
            const double phase = 2.0 * std::numbers::pi * across / params.fiber_texture_period;
            value = params.yarn_level + contrast * (1.0 + 0.5 * std::sin(phase));
        }
        if (params.ring_amplitude > 0.0) {
            const double r = std::hypot(i - cx, j - cy);
            value += params.ring_amplitude *
                     std::sin(2.0 * std::numbers::pi * r / params.ring_period);
        }
        return value;
    }
};

// noise stream per (slice orientation independent) z-layer and row so that
// slice and volume renders agree. Each row also needs its own distribution:
// normal_distribution caches a spare draw.
std::mt19937_64 row_rng(std::uint64_t seed, std::int64_t j, std::int64_t k) {
    return std::mt19937_64(derive_seed(derive_seed(seed, static_cast<std::uint64_t>(k)),
                                       static_cast<std::uint64_t>(j)));
}

}  // namespace

GrayVolume render_pseudo_ct(const LabelVolume& labels, const RenderParams& params) {
    params.validate();
    const auto& g = labels.grid;
    GrayVolume out;
    out.grid = g;
    out.label_map = labels.label_map;
    out.voxels.resize(labels.voxels.size());
    const Shader shader{params, labels.label_map, 0.5 * g.dims[0], 0.5 * g.dims[1]};

    parallel_chunks(0, g.dims[2], [&](std::int64_t k0, std::int64_t k1) {
        for (std::int64_t k = k0; k < k1; ++k) {
            for (std::int64_t j = 0; j < g.dims[1]; ++j) {
                auto rng = row_rng(params.seed, j, k);
                std::normal_distribution<double> noise(0.0, params.noise_sigma);
                for (std::int64_t i = 0; i < g.dims[0]; ++i) {
                    const std::size_t idx = g.index(i, j, k);
                    double v = shader.shade(labels.voxels[idx], i + 0.5, j + 0.5, k + 0.5);
                    if (params.noise_sigma > 0.0) v += noise(rng);
                    out.voxels[idx] = static_cast<float>(std::clamp(v, 0.0, 1.0));
                }
            }
        }
    });
    return out;
}

GraySlice render_pseudo_ct(const LabelSlice& labels, SliceAxis axis, int slice_index,
                           const LabelMap& label_map, const RenderParams& params,
                           std::int64_t slice_count) {
    params.validate();
    GraySlice out;
    out.width = labels.width;
    out.height = labels.height;
    out.pixels.resize(labels.pixels.size());
    const double half_u = 0.5 * labels.width;
    const double half_s = 0.5 * static_cast<double>(slice_count);
    const Shader shader{params, label_map,
                        axis == SliceAxis::XZ ? half_u : half_s,
                        axis == SliceAxis::YZ ? half_u : half_s};
    for (int v = 0; v < labels.height; ++v) {
        if (axis == SliceAxis::XZ) {
            // a row of constant (j, k) runs along u = i
            auto rng = row_rng(params.seed, slice_index, v);
            std::normal_distribution<double> noise(0.0, params.noise_sigma);
            for (int u = 0; u < labels.width; ++u) {
                double val = shader.shade(labels.at(u, v), u + 0.5, slice_index + 0.5, v + 0.5);
                if (params.noise_sigma > 0.0) val += noise(rng);
                out.at(u, v) = static_cast<float>(std::clamp(val, 0.0, 1.0));
            }
        } else {
            for (int u = 0; u < labels.width; ++u) {
                // voxel (slice_index, u, v): advance the (u, v) row stream to column slice_index
                auto rng = row_rng(params.seed, u, v);
                std::normal_distribution<double> noise(0.0, params.noise_sigma);
                double n = 0.0;
                if (params.noise_sigma > 0.0) {
                    for (int skip = 0; skip <= slice_index; ++skip) n = noise(rng);
                }
                double val = shader.shade(labels.at(u, v), slice_index + 0.5, u + 0.5, v + 0.5);
                out.at(u, v) = static_cast<float>(std::clamp(val + n, 0.0, 1.0));
            }
        }
    }
    return out;
}

}  // namespace textile
