#include <gtest/gtest.h>

#include <random>

#include "fixtures.hpp"
#include "textile/error.hpp"
#include "textile/volume.hpp"

using namespace textile;

namespace {

LabelVolume random_volume(std::array<std::int64_t, 3> dims, std::uint64_t seed) {
    LabelVolume v;
    v.grid.dims = dims;
    v.grid.origin = Vec3(1.5, -2, 0.25);
    v.grid.spacing = 2.0;
    v.grid.voxel_size_um = 40.0;
    v.label_map = {{1, Family::Warp}, {2, Family::Weft}, {3, Family::Weft}};
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> d(0, 3);
    v.voxels.resize(static_cast<std::size_t>(v.grid.count()));
    for (auto& x : v.voxels) x = static_cast<std::uint16_t>(d(rng));
    return v;
}

}  // namespace

TEST(GridForBox, ReferenceDimensions) {
    // acquired sample and simulated cell extents in micrometres, 20 um voxels
    const Box acquired = Box::from_corners(Vec3::Zero(), Vec3(1698, 1814, 402));
    const GridGeometry g = grid_for_box(acquired, 20.0, 20.0);
    EXPECT_EQ(g.dims, (std::array<std::int64_t, 3>{1698, 1814, 402}));
    const Box cell = Box::from_corners(Vec3::Zero(), Vec3(28020, 28020, 6420) / 20.0);
    EXPECT_EQ(grid_for_box(cell, 20.0, 20.0).dims, (std::array<std::int64_t, 3>{1401, 1401, 321}));
    EXPECT_EQ(slice_count(g, SliceAxis::XZ), 1814);
    EXPECT_EQ(slice_count(g, SliceAxis::YZ), 1698);
}

TEST(GridForBox, RoundingAndCoarserVoxels) {
    const Box b = Box::from_corners(Vec3::Zero(), Vec3(10.4, 10.6, 0.2));
    const GridGeometry g = grid_for_box(b, 20.0, 20.0);
    EXPECT_EQ(g.dims, (std::array<std::int64_t, 3>{10, 11, 1}));
    EXPECT_EQ(grid_for_box(b, 40.0, 20.0).dims, (std::array<std::int64_t, 3>{5, 5, 1}));
    EXPECT_THROW(grid_for_box(b, 0.0, 20.0), DomainError);
    EXPECT_THROW(grid_for_box(Box{}, 20.0, 20.0), DomainError);
}

TEST(ExtractSlices, ShapesAndCounts) {
    const LabelVolume v = random_volume({4, 5, 6}, 1);
    const LabelDataset xz = extract_slices(v, SliceAxis::XZ);
    ASSERT_EQ(xz.slices.size(), 5u);
    for (const auto& s : xz.slices) {
        EXPECT_EQ(s.width, 4);
        EXPECT_EQ(s.height, 6);
    }
    const LabelDataset yz = extract_slices(v, SliceAxis::YZ);
    ASSERT_EQ(yz.slices.size(), 4u);
    EXPECT_EQ(yz.slices[0].width, 5);
    EXPECT_EQ(yz.slices[0].height, 6);
    // pixel (u, v) of XZ slice j is voxel (u, j, v)
    EXPECT_EQ(xz.slices[3].at(2, 4), v.at(2, 3, 4));
    EXPECT_EQ(yz.slices[1].at(3, 5), v.at(1, 3, 5));
}

TEST(ExtractSlices, RestackIsBitExact) {
    for (std::uint64_t seed : {2u, 3u, 4u}) {
        const LabelVolume v = random_volume({7, 3, 5}, seed);
        for (SliceAxis a : {SliceAxis::XZ, SliceAxis::YZ}) EXPECT_EQ(restack(extract_slices(v, a)), v);
    }
}

TEST(LabelHistogram, CountsSumToVoxelCount) {
    LabelVolume zero;
    zero.grid.dims = {3, 4, 5};
    zero.voxels.assign(60, 0);
    EXPECT_EQ(label_histogram(zero), (std::map<int, std::int64_t>{{0, 60}}));
    for (std::uint64_t seed = 10; seed < 15; ++seed) {
        const LabelVolume v = random_volume({6, 7, 8}, seed);
        std::int64_t total = 0;
        const auto h = label_histogram(v);
        for (const auto& [label, n] : h) total += n;
        EXPECT_EQ(total, 6 * 7 * 8);
        std::int64_t ones = 0;
        for (auto x : v.voxels) ones += x == 1;
        EXPECT_EQ(h.at(1), ones);
    }
}

TEST(LiftPoint, PixelCentersMapToVoxelCenters) {
    const LabelVolume v = random_volume({4, 5, 6}, 1);
    EXPECT_EQ(lift_point(v.grid, SliceAxis::XZ, 2, Vec2(1.5, 3.5)), v.grid.voxel_center(1, 2, 3));
    EXPECT_EQ(lift_point(v.grid, SliceAxis::YZ, 3, Vec2(0.5, 5.5)), v.grid.voxel_center(3, 0, 5));
}

TEST(SliceAxis, FamilyAndNames) {
    EXPECT_EQ(sectioned_family(SliceAxis::YZ), Family::Warp);
    EXPECT_EQ(sectioned_family(SliceAxis::XZ), Family::Weft);
    EXPECT_EQ(slice_axis_from_string(to_string(SliceAxis::YZ)), SliceAxis::YZ);
    EXPECT_THROW(slice_axis_from_string("XY"), Error);
}

TEST(VolumeIo, RoundTripIsBitExact) {
    const auto dir = fixtures::temp_dir("volume_io");
    const LabelVolume v = random_volume({5, 6, 7}, 9);
    save_volume(v, dir / "l.raw", dir / "l.json");
    EXPECT_EQ(load_label_volume(dir / "l.raw", dir / "l.json"), v);

    GrayVolume g;
    g.grid = v.grid;
    g.label_map = v.label_map;
    for (auto x : v.voxels) g.voxels.push_back(static_cast<float>(x) / 3.0f + 1e-7f);
    save_volume(g, dir / "g.raw", dir / "g.json");
    EXPECT_EQ(load_gray_volume(dir / "g.raw", dir / "g.json"), g);

    const VolumeHeader h = load_header(dir / "l.json");
    EXPECT_EQ(h.grid, v.grid);
    EXPECT_EQ(h.label_map, v.label_map);
}

TEST(VolumeIo, TruncatedRawIsRejected) {
    const auto dir = fixtures::temp_dir("volume_trunc");
    const LabelVolume v = random_volume({5, 6, 7}, 9);
    save_volume(v, dir / "l.raw", dir / "l.json");
    std::filesystem::resize_file(dir / "l.raw", 10);
    EXPECT_THROW(load_label_volume(dir / "l.raw", dir / "l.json"), Error);
    EXPECT_THROW(load_label_volume(dir / "missing.raw", dir / "l.json"), IoError);
}
