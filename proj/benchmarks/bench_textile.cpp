#include <benchmark/benchmark.h>

#include <random>

#include "textile/reconstruct.hpp"
#include "textile/segmenter.hpp"
#include "textile/synthgen.hpp"
#include "textile/validate.hpp"
#include "textile/voxelizer.hpp"

using namespace textile;

namespace {

const TextileModel& desk_model() {
    static const TextileModel m = generate_interlock(WeaveSpec{}, FiberSpec{}, 33, 33);
    return m;
}

const LabelVolume& desk_labels() {
    static const LabelVolume v = voxelize(desk_model(), 20.0);
    return v;
}

}  // namespace

static void BM_Generate(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(generate_interlock(WeaveSpec{}, FiberSpec{}, 33, 33));
}
BENCHMARK(BM_Generate)->Unit(benchmark::kMillisecond);

// argument: voxel size in micrometres
static void BM_Voxelize(benchmark::State& state) {
    const double vs = static_cast<double>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(voxelize(desk_model(), vs));
}
BENCHMARK(BM_Voxelize)->Arg(40)->Arg(20)->Unit(benchmark::kMillisecond);

static void BM_DetectYZ(benchmark::State& state) {
    const auto slices = extract_slices(desk_labels(), SliceAxis::YZ);
    for (auto _ : state) benchmark::DoNotOptimize(detect_batch(slices));
}
BENCHMARK(BM_DetectYZ)->Unit(benchmark::kMillisecond);

static void BM_Reconstruct(benchmark::State& state) {
    const auto& v = desk_labels();
    const std::vector<DetectionSet> sets{detect_batch(extract_slices(v, SliceAxis::YZ)),
                                         detect_batch(extract_slices(v, SliceAxis::XZ))};
    ReconstructOptions o;
    o.tracking.d_gate = default_gate(desk_model().weave, v.grid.spacing);
    for (auto _ : state) benchmark::DoNotOptimize(reconstruct_yarns(sets, v.grid, o));
}
BENCHMARK(BM_Reconstruct)->Unit(benchmark::kMillisecond);

// argument: sample count along each path
static void BM_Fit(benchmark::State& state) {
    const auto n = static_cast<int>(state.range(0));
    std::mt19937_64 rng(1);
    std::normal_distribution<double> g(0, 0.3);
    Polyline samples;
    for (int i = 0; i < n; ++i) samples.emplace_back(i, 4 * std::sin(i * 0.1) + g(rng), g(rng));
    for (auto _ : state) benchmark::DoNotOptimize(bspline_fit(samples, 3, std::max(4, n / 4)));
}
BENCHMARK(BM_Fit)->Arg(40)->Arg(160)->Unit(benchmark::kMillisecond);

// argument: resample count
static void BM_Hausdorff(benchmark::State& state) {
    const auto n = static_cast<int>(state.range(0));
    const Polyline a = path_polyline(desk_model().yarns[0].path);
    const Polyline b = path_polyline(desk_model().yarns[1].path);
    for (auto _ : state) benchmark::DoNotOptimize(hausdorff(a, b, n));
}
BENCHMARK(BM_Hausdorff)->Arg(200)->Arg(1000)->Unit(benchmark::kMicrosecond);
BENCHMARK_MAIN();
