#ifndef TEXTILE_VOLUME_HPP
#define TEXTILE_VOLUME_HPP

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "textile/geometry.hpp"
#include "textile/synthgen.hpp"

namespace textile {

// Regular voxel grid over a box. Voxel (i, j, k) has its center at
// origin + (i + 1/2, j + 1/2, k + 1/2) * spacing; x varies fastest in storage.
struct GridGeometry {
    std::array<std::int64_t, 3> dims{0, 0, 0};
    Vec3 origin = Vec3::Zero();
    double spacing = 1.0;        // model units per voxel
    double voxel_size_um = 20.0; // physical voxel edge

    std::int64_t count() const { return dims[0] * dims[1] * dims[2]; }
    Vec3 voxel_center(std::int64_t i, std::int64_t j, std::int64_t k) const {
        return origin + spacing * Vec3(i + 0.5, j + 0.5, k + 0.5);
    }
    std::size_t index(std::int64_t i, std::int64_t j, std::int64_t k) const {
        return static_cast<std::size_t>(i + dims[0] * (j + dims[1] * k));
    }

    bool operator==(const GridGeometry&) const = default;
};

// dims = max(1, round(extent / voxel size)) per axis. Nothing is allocated, so
// full-scale boxes can be checked directly.
GridGeometry grid_for_box(const Box& box, double voxel_size_um, double unit_um);

using LabelMap = std::map<int, Family>;

template <typename T>
struct Volume {
    GridGeometry grid;
    std::vector<T> voxels;
    LabelMap label_map;

    T at(std::int64_t i, std::int64_t j, std::int64_t k) const { return voxels[grid.index(i, j, k)]; }
    T& at(std::int64_t i, std::int64_t j, std::int64_t k) { return voxels[grid.index(i, j, k)]; }

    bool operator==(const Volume&) const = default;
};

using LabelVolume = Volume<std::uint16_t>;
using GrayVolume = Volume<float>;

enum class SliceAxis { XZ, YZ };

const char* to_string(SliceAxis axis) noexcept;
SliceAxis slice_axis_from_string(const std::string& name);

// The yarn family whose cross sections a slice orientation cuts: YZ slices
// (constant x) cut warp yarns, XZ slices (constant y) cut weft yarns.
Family sectioned_family(SliceAxis axis) noexcept;

// 2D image; u is the in-slice horizontal axis (x for XZ, y for YZ), v is z.
template <typename T>
struct Slice {
    int width = 0;
    int height = 0;
    std::vector<T> pixels;

    T at(int u, int v) const { return pixels[static_cast<std::size_t>(u + width * v)]; }
    T& at(int u, int v) { return pixels[static_cast<std::size_t>(u + width * v)]; }

    bool operator==(const Slice&) const = default;
};

template <typename T>
struct SliceDataset {
    SliceAxis axis = SliceAxis::XZ;
    std::vector<Slice<T>> slices;
    int index_origin = 0;
    GridGeometry grid;
    LabelMap label_map;
};

using LabelSlice = Slice<std::uint16_t>;
using LabelDataset = SliceDataset<std::uint16_t>;
using GraySlice = Slice<float>;

// Number of slices each orientation yields for a grid.
std::int64_t slice_count(const GridGeometry& grid, SliceAxis axis);

template <typename T>
SliceDataset<T> extract_slices(const Volume<T>& volume, SliceAxis axis);

template <typename T>
Volume<T> restack(const SliceDataset<T>& dataset);

std::map<int, std::int64_t> label_histogram(const LabelVolume& volume);

// 3D position of an in-slice coordinate (pixel centers at +1/2).
Vec3 lift_point(const GridGeometry& grid, SliceAxis axis, int slice_index, const Vec2& uv);

// Raw little-endian arrays plus a JSON sidecar. Round trips are bit-exact.
void save_volume(const LabelVolume& volume, const std::filesystem::path& raw,
                 const std::filesystem::path& header);
void save_volume(const GrayVolume& volume, const std::filesystem::path& raw,
                 const std::filesystem::path& header);
LabelVolume load_label_volume(const std::filesystem::path& raw, const std::filesystem::path& header);
GrayVolume load_gray_volume(const std::filesystem::path& raw, const std::filesystem::path& header);

// Header only (dimension-check mode and metadata reads).
struct VolumeHeader {
    GridGeometry grid;
    std::string dtype;
    LabelMap label_map;
    double unit_um = 20.0;
};
void save_header(const VolumeHeader& header, const std::filesystem::path& path);
VolumeHeader load_header(const std::filesystem::path& path);

}  // namespace textile

#endif  // TEXTILE_VOLUME_HPP
