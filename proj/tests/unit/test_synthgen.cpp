#include <gtest/gtest.h>

#include <cmath>

#include "fixtures.hpp"
#include "textile/error.hpp"
#include "textile/synthgen.hpp"

using namespace textile;

namespace {

int count_family(const TextileModel& m, Family f) {
    int n = 0;
    for (const auto& y : m.yarns) n += y.family == f;
    return n;
}

}  // namespace

TEST(WeaveSpec, ReferenceConfigurationsCount) {
    const WeaveSpec acquired = acquired_sample_weave();
    EXPECT_EQ(acquired.warp_count(), 39);
    EXPECT_EQ(acquired.weft_count(), 36);
    const WeaveSpec cell = simulated_cell_weave();
    EXPECT_EQ(cell.warp_count(), 28);
    EXPECT_EQ(cell.weft_count(), 36);
}

TEST(WeaveSpec, HandCountedSequences) {
    EXPECT_EQ(sequence_total({4, 3}, 1), 4);
    EXPECT_EQ(sequence_total({4, 3}, 2), 7);
    EXPECT_EQ(sequence_total({4, 3}, 5), 4 + 3 + 4 + 3 + 4);
    EXPECT_EQ(sequence_total({1, 2, 3}, 4), 1 + 2 + 3 + 1);
}

TEST(WeaveSpec, ValidateRejectsBadValues) {
    WeaveSpec s;
    s.n_warp_columns = 0;
    EXPECT_THROW(s.validate(), DomainError);
    s = WeaveSpec{};
    s.crimp_amplitude = -1;
    EXPECT_THROW(s.validate(), DomainError);
    s = WeaveSpec{};
    s.yarn_spacing.z() = 0;
    EXPECT_THROW(s.validate(), DomainError);
}

TEST(GenerateInterlock, FullScaleYarnCounts) {
    const TextileModel acquired = generate_interlock(acquired_sample_weave(), FiberSpec{}, 5, 5);
    EXPECT_EQ(acquired.yarns.size(), 75u);
    EXPECT_EQ(count_family(acquired, Family::Warp), 39);
    EXPECT_EQ(count_family(acquired, Family::Weft), 36);
    const TextileModel cell = generate_interlock(simulated_cell_weave(), FiberSpec{}, 5, 5);
    EXPECT_EQ(cell.yarns.size(), 64u);
    EXPECT_EQ(count_family(cell, Family::Warp), 28);
}

TEST(GenerateInterlock, DeskModelIsValid) {
    const TextileModel m = generate_interlock(fixtures::desk_weave(), FiberSpec{}, 33, 33);
    EXPECT_NO_THROW(m.validate());
    ASSERT_EQ(m.yarns.size(), 16u);
    for (std::size_t i = 0; i < m.yarns.size(); ++i) {
        EXPECT_EQ(m.yarns[i].id, static_cast<int>(i) + 1);
        EXPECT_EQ(m.yarns[i].sections.size(), 33u);
    }
    // sections are ellipses with the spec's axes: 10-gon area of a 14 x 5 ellipse
    const CrossSection ref = ellipse_section(Vec3::Zero(), Vec3::UnitZ(), 14, 5, Vec3::UnitX());
    for (const auto& y : m.yarns)
        for (const auto& s : y.sections) EXPECT_NEAR(section_area(s), section_area(ref), 1e-6);
}

TEST(GenerateInterlock, ZeroCrimpGivesStraightPerpendicularYarns) {
    WeaveSpec s;
    s.n_warp_columns = 1;
    s.n_weft_columns = 1;
    s.warp_sequence = {1};
    s.weft_sequence = {1};
    s.crimp_amplitude = 0;
    const TextileModel m = generate_interlock(s, FiberSpec{}, 6, 6);
    ASSERT_EQ(m.yarns.size(), 2u);
    const auto& warp = m.yarns[0];
    const auto& weft = m.yarns[1];
    ASSERT_EQ(warp.family, Family::Warp);
    for (const auto& sec : warp.sections) EXPECT_EQ(sec.center.z(), warp.sections[0].center.z());
    const Vec3 dw = warp.sections.back().center - warp.sections.front().center;
    const Vec3 df = weft.sections.back().center - weft.sections.front().center;
    EXPECT_NEAR(dw.normalized().dot(df.normalized()), 0.0, 1e-12);
}

TEST(GenerateInterlock, CrimpUndulates) {
    const TextileModel m = generate_interlock(fixtures::desk_weave(), FiberSpec{}, 33, 33);
    const auto& warp = m.yarns[0];
    double lo = 1e9, hi = -1e9;
    for (const auto& s : warp.sections) {
        lo = std::min(lo, s.center.z());
        hi = std::max(hi, s.center.z());
    }
    EXPECT_NEAR(hi - lo, 2 * m.weave.crimp_amplitude, 0.5);
}

TEST(GenerateInterlock, CollidingAxesAreInfeasible) {
    WeaveSpec s;
    s.yarn_spacing.z() = 3.0;
    s.crimp_amplitude = 1.0;
    EXPECT_THROW(generate_interlock(s, FiberSpec{}, 9, 9), InfeasibleWeaveError);
}

TEST(Compaction, ThicknessScheduleAndFinalValue) {
    const TextileModel m = generate_interlock(fixtures::desk_weave(), FiberSpec{}, 17, 17);
    const double h0 = m.thickness;
    const double hf = 0.8 * h0;
    const auto seq = compaction_sequence(m, hf, 12);
    ASSERT_EQ(seq.size(), 12u);
    for (int k = 1; k <= 12; ++k) EXPECT_NEAR(seq[k - 1].thickness, h0 - k * (h0 - hf) / 12, 1e-12);
    EXPECT_EQ(seq.back().thickness, hf);

    const auto two = compaction_sequence(m, h0 / 2, 2);
    EXPECT_NEAR(two[0].thickness, 0.75 * h0, 1e-12);
}

TEST(Compaction, NoOpWhenFinalEqualsInitial) {
    const TextileModel m = generate_interlock(fixtures::desk_weave(), FiberSpec{}, 9, 9);
    for (const auto& step : compaction_sequence(m, m.thickness, 12)) EXPECT_EQ(step, m);
}

TEST(Compaction, PreservesIdsCountsAndAreas) {
    const TextileModel m = generate_interlock(fixtures::desk_weave(), FiberSpec{}, 17, 17);
    const auto seq = compaction_sequence(m, 0.8 * m.thickness, 12);
    const TextileModel* prev = &m;
    for (const auto& step : seq) {
        ASSERT_EQ(step.yarns.size(), m.yarns.size());
        EXPECT_NO_THROW(step.validate());
        for (std::size_t y = 0; y < m.yarns.size(); ++y) {
            EXPECT_EQ(step.yarns[y].id, m.yarns[y].id);
            ASSERT_EQ(step.yarns[y].sections.size(), m.yarns[y].sections.size());
            for (std::size_t s = 0; s < m.yarns[y].sections.size(); ++s) {
                const double a0 = section_area(prev->yarns[y].sections[s]);
                const double a1 = section_area(step.yarns[y].sections[s]);
                EXPECT_LE(std::abs(a1 - a0) / a0, 0.01);
            }
        }
        prev = &step;
    }
}

TEST(Compaction, MidPlaneIsFixed) {
    const TextileModel m = generate_interlock(fixtures::desk_weave(), FiberSpec{}, 17, 17);
    const double zmid = 0.5 * (m.bbox.min.z() + m.bbox.max.z());
    const auto seq = compaction_sequence(m, 0.7 * m.thickness, 12);
    for (const auto& step : seq) {
        EXPECT_LT(std::abs(0.5 * (step.bbox.min.z() + step.bbox.max.z()) - zmid), 1e-9);
        // control points: z - zmid scales by H_k / H_0
        const double f = step.thickness / m.thickness;
        for (std::size_t y = 0; y < m.yarns.size(); ++y) {
            const auto& c0 = m.yarns[y].path.control_points();
            const auto& c1 = step.yarns[y].path.control_points();
            for (std::size_t i = 0; i < c0.size(); ++i) {
                EXPECT_NEAR(c1[i].z() - zmid, f * (c0[i].z() - zmid), 1e-9);
            }
        }
    }
}

TEST(Compaction, InvalidTargetsThrow) {
    const TextileModel m = generate_interlock(fixtures::desk_weave(), FiberSpec{}, 9, 9);
    EXPECT_THROW(compaction_sequence(m, 0.0, 12), DomainError);
    EXPECT_THROW(compaction_sequence(m, m.thickness * 1.01, 12), DomainError);
    EXPECT_THROW(compaction_sequence(m, m.thickness * 0.5, 0), DomainError);
}

TEST(Perturb, ZeroSigmaIsIdentityAndSeedDeterministic) {
    const TextileModel m = generate_interlock(fixtures::desk_weave(), FiberSpec{}, 17, 17);
    EXPECT_EQ(perturb_model(m, 0.0, 5), m);
    EXPECT_EQ(perturb_model(m, 0.3, 5), perturb_model(m, 0.3, 5));
    EXPECT_NE(perturb_model(m, 0.3, 5), perturb_model(m, 0.3, 6));
    EXPECT_THROW(perturb_model(m, -1.0, 5), DomainError);
}

TEST(Perturb, CenterDisplacementStatistics) {
    const TextileModel m = generate_interlock(fixtures::desk_weave(), FiberSpec{}, 65, 65);
    const TextileModel p = perturb_model(m, 0.5, 1234);
    double sum = 0, sq = 0;
    int n = 0;
    for (std::size_t y = 0; y < m.yarns.size(); ++y) {
        for (std::size_t s = 0; s < m.yarns[y].sections.size(); ++s) {
            const Vec3 d = p.yarns[y].sections[s].center - m.yarns[y].sections[s].center;
            for (int c = 0; c < 3; ++c) {
                sum += d[c];
                sq += d[c] * d[c];
                ++n;
            }
        }
    }
    ASSERT_GE(n, 1000);
    const double mean = sum / n;
    const double sd = std::sqrt(sq / n - mean * mean);
    EXPECT_NEAR(sd, 0.5, 0.05);
    EXPECT_LT(std::abs(mean), 4 * 0.5 / std::sqrt(n));
    EXPECT_NO_THROW(p.validate());
}

TEST(FiberSpec, TargetVfCount) {
    const FiberSpec f = FiberSpec::for_target_vf(200.0, 0.6, 0.35);
    EXPECT_EQ(f.fibers_per_yarn, std::lround(0.6 * 200.0 / (fixtures::kPi * 0.35 * 0.35)));
}
