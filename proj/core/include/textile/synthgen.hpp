#ifndef TEXTILE_SYNTHGEN_HPP
#define TEXTILE_SYNTHGEN_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "textile/bspline.hpp"
#include "textile/section.hpp"

namespace textile {

enum class Family { Warp, Weft };

const char* to_string(Family family) noexcept;
Family family_from_string(const std::string& name);

// Layer-to-layer angle-interlock layout. Warp columns sit at y = (j + 1/2)
// * spacing.y and run along X; weft columns sit at x = (i + 1/2) * spacing.x
// and run along Y. Column counts alternate through the sequences.
struct WeaveSpec {
    int n_warp_columns = 4;
    int n_weft_columns = 4;
    std::vector<int> warp_sequence{2};
    std::vector<int> weft_sequence{2};
    Vec3 yarn_spacing{40.0, 40.0, 24.0};  // weft pitch, warp pitch, layer pitch
    double crimp_amplitude = 6.0;
    double ellipse_a = 14.0;  // in-plane half width
    double ellipse_b = 5.0;   // half thickness
    std::uint64_t seed = 0;

    void validate() const;  // throws DomainError

    int warp_count() const;
    int weft_count() const;

    bool operator==(const WeaveSpec&) const = default;
};

// Acquired sample: 11 warp planes alternating 4/3, 8 weft columns
// alternating 5/4.
WeaveSpec acquired_sample_weave();
// Simulated cell: 8 warp planes alternating 4/3, 8 weft columns 5/4.
WeaveSpec simulated_cell_weave();

struct FiberSpec {
    double fiber_radius = 0.35;  // model units (7 um at 20 um per unit)
    int fibers_per_yarn = 1000;

    void validate() const;

    // Fiber count giving `target` fiber volume fraction on sections of the
    // given area (rounded to the nearest integer count).
    static FiberSpec for_target_vf(double section_area, double target, double fiber_radius);

    bool operator==(const FiberSpec&) const = default;
};

struct YarnModel {
    int id = 0;
    Family family = Family::Warp;
    BSplineCurve path;
    std::vector<CrossSection> sections;

    bool operator==(const YarnModel&) const = default;
};

struct TextileModel {
    std::vector<YarnModel> yarns;
    WeaveSpec weave;
    FiberSpec fibers;
    Box bbox;
    double thickness = 0.0;
    double unit_um = 20.0;  // micrometres per model unit

    // Throws on: id gaps, section count < 2, non-increasing stations,
    // section invariants, centers further than path_tolerance from the
    // path, keypoints outside bbox.
    void validate(const SectionTolerances& tol = {}, double path_tolerance = 1.0) const;

    bool operator==(const TextileModel&) const = default;
};

int sequence_total(const std::vector<int>& sequence, int columns);

// Throws InfeasibleWeaveError when two yarn axes come closer than ellipse_b.
TextileModel generate_interlock(const WeaveSpec& spec, const FiberSpec& fibers,
                                int n_sections_warp, int n_sections_weft);

// n_steps models; step k has thickness H_init - k (H_init - H_final) / n_steps.
std::vector<TextileModel> compaction_sequence(const TextileModel& model, double h_final,
                                              int n_steps);

TextileModel perturb_model(const TextileModel& model, double jitter_sigma, std::uint64_t seed);

// Mean 10-gon area over all sections of the model.
double mean_section_area(const TextileModel& model);

// Dense polyline of a yarn path (for distance computations).
Polyline path_polyline(const BSplineCurve& path, int samples = 512);

}  // namespace textile

#endif  // TEXTILE_SYNTHGEN_HPP
