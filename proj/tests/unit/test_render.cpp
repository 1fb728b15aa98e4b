#include <gtest/gtest.h>

#include <cmath>

#include "fixtures.hpp"
#include "textile/error.hpp"
#include "textile/render.hpp"
#include "textile/voxelizer.hpp"

using namespace textile;

namespace {

const LabelVolume& desk_labels() {
    static const LabelVolume v =
        voxelize(generate_interlock(fixtures::desk_weave(), FiberSpec{}, 33, 33), 20.0);
    return v;
}

}  // namespace

TEST(Render, OutputRangeIsUnitInterval) {
    RenderParams p;
    p.noise_sigma = 0.5;  // heavy noise forces clamping
    p.ring_amplitude = 0.3;
    const GrayVolume g = render_pseudo_ct(desk_labels(), p);
    ASSERT_EQ(g.voxels.size(), desk_labels().voxels.size());
    for (float x : g.voxels) {
        EXPECT_GE(x, 0.0f);
        EXPECT_LE(x, 1.0f);
    }
}

TEST(Render, NoiselessEmptySliceIsMatrixLevel) {
    LabelSlice s;
    s.width = 17;
    s.height = 9;
    s.pixels.assign(17 * 9, 0);
    RenderParams p;
    p.noise_sigma = 0;
    const GraySlice g = render_pseudo_ct(s, SliceAxis::XZ, 0, {}, p);
    for (float x : g.pixels) EXPECT_EQ(x, static_cast<float>(p.matrix_level));
}

TEST(Render, SeedDeterminismAndNoiseStatistics) {
    RenderParams p;
    p.noise_sigma = 0.03;
    p.seed = 1;
    const GrayVolume a = render_pseudo_ct(desk_labels(), p);
    EXPECT_EQ(render_pseudo_ct(desk_labels(), p), a);
    p.seed = 2;
    const GrayVolume b = render_pseudo_ct(desk_labels(), p);
    // the difference of two independent draws has sigma * sqrt(2)
    double sum = 0, sq = 0;
    const auto n = static_cast<double>(a.voxels.size());
    for (std::size_t i = 0; i < a.voxels.size(); ++i) {
        const double d = static_cast<double>(a.voxels[i]) - b.voxels[i];
        sum += d;
        sq += d * d;
    }
    const double sd = std::sqrt(sq / n - (sum / n) * (sum / n)) / std::sqrt(2.0);
    EXPECT_NEAR(sd, p.noise_sigma, 0.15 * p.noise_sigma);
}

TEST(Render, FamilyContrastsAreDistinguishable) {
    RenderParams p;
    p.noise_sigma = 0;
    const LabelVolume& labels = desk_labels();
    const GrayVolume g = render_pseudo_ct(labels, p);
    std::map<int, std::pair<double, int>> acc;
    for (std::size_t i = 0; i < g.voxels.size(); ++i) {
        auto& a = acc[labels.voxels[i]];
        a.first += g.voxels[i];
        a.second += 1;
    }
    const double half = 0.5 * std::abs(p.warp_contrast - p.weft_contrast);
    for (const auto& [la, va] : acc) {
        for (const auto& [lb, vb] : acc) {
            if (la == 0 || lb == 0 || la >= lb) continue;
            if (labels.label_map.at(la) == labels.label_map.at(lb)) continue;
            const double ma = va.first / va.second;
            const double mb = vb.first / vb.second;
            EXPECT_GE(std::abs(ma - mb), half) << la << " vs " << lb;
        }
    }
    EXPECT_NEAR(acc[0].first / acc[0].second, p.matrix_level, 1e-6);
}

TEST(Render, SliceRenderMatchesVolume) {
    RenderParams p;
    p.seed = 77;
    p.ring_amplitude = 0.05;
    const LabelVolume& labels = desk_labels();
    const GrayVolume g = render_pseudo_ct(labels, p);
    for (SliceAxis axis : {SliceAxis::XZ, SliceAxis::YZ}) {
        const LabelDataset ds = extract_slices(labels, axis);
        const auto gs = extract_slices(g, axis);
        for (int s : {0, 7, static_cast<int>(ds.slices.size()) - 1}) {
            const GraySlice one = render_pseudo_ct(ds.slices[s], axis, s, labels.label_map, p,
                                                   static_cast<std::int64_t>(ds.slices.size()));
            EXPECT_EQ(one, gs.slices[s]) << to_string(axis) << " " << s;
        }
    }
}

TEST(Render, InvalidParamsThrow) {
    RenderParams p;
    p.noise_sigma = -0.1;
    EXPECT_THROW(p.validate(), DomainError);
    p = RenderParams{};
    p.matrix_level = 1.5;
    EXPECT_THROW(p.validate(), DomainError);
}
