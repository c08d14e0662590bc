// Microbenchmarks for the hot paths: envelope integration, form factors,
// amplitude quadrature, and rate curves.

#include <benchmark/benchmark.h>

#include <complex>
#include <vector>

#include "twistrad/emission.hpp"
#include "twistrad/ermakov.hpp"
#include "twistrad/field.hpp"
#include "twistrad/quantum.hpp"
#include "twistrad/units.hpp"

using namespace twistrad;

namespace {

const BeamKinematics& kin() {
    static const BeamKinematics k = derive_kinematics(100.0, 1.0);
    return k;
}

const TransitionContext& free_ctx() {
    static const TransitionContext ctx = [] {
        auto traj = integrate_centered(FieldProfile::zero(), 1.14, 0.0, 0.0, -15.0,
                                       15.0, 1e-10);
        return make_context(ModeLabel{1, 0}, ModeLabel{0, 0}, kin(), 30.0,
                            std::move(traj));
    }();
    return ctx;
}

void BM_ErmakovIntegrateFlatTop(benchmark::State& state) {
    const auto profile = FieldProfile::flat_top(2.0, 10.0);
    for (auto _ : state) {
        auto traj = integrate(profile, 1.2, 0.1, -9.0, 9.0, 1e-10);
        benchmark::DoNotOptimize(traj.b(0.0));
    }
}
BENCHMARK(BM_ErmakovIntegrateFlatTop);

void BM_TrajectoryDenseEval(benchmark::State& state) {
    const auto traj = integrate(FieldProfile::flat_top(2.0, 10.0), 1.2, 0.1, -9.0,
                                9.0, 1e-10);
    double z = -9.0;
    for (auto _ : state) {
        z += 0.37;
        if (z > 9.0) z -= 18.0;
        benchmark::DoNotOptimize(traj.b(z));
        benchmark::DoNotOptimize(traj.lewis_phase(z));
    }
}
BENCHMARK(BM_TrajectoryDenseEval);

void BM_FormFactor(benchmark::State& state) {
    const std::complex<double> kappa{0.4, 0.7};
    const int n = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(form_factor(n, n - 2, kappa));
}
BENCHMARK(BM_FormFactor)->Arg(4)->Arg(16)->Arg(64);

void BM_AmplitudeIntegral(benchmark::State& state) {
    const auto& ctx = free_ctx();
    for (auto _ : state)
        benchmark::DoNotOptimize(amplitude_integral(ctx, 0.9, 0.0, 1, true).value);
}
BENCHMARK(BM_AmplitudeIntegral);

void BM_FieldfreeRateCurve(benchmark::State& state) {
    std::vector<double> thetas(501);
    for (int i = 0; i <= 500; ++i) thetas[i] = 3.14159265358979 * i / 500.0;
    for (auto _ : state) {
        auto curve = fieldfree_rate_curve(thetas, 30.0, 1.14, 1, kin());
        benchmark::DoNotOptimize(curve.rate_norm.back());
    }
}
BENCHMARK(BM_FieldfreeRateCurve);

void BM_GeneralRateSingleAngle(benchmark::State& state) {
    const auto& ctx = free_ctx();
    for (auto _ : state) {
        auto curve = general_rate_curve(ctx, {1.1}, 1, true);
        benchmark::DoNotOptimize(curve.rate_norm[0]);
    }
}
BENCHMARK(BM_GeneralRateSingleAngle);

} // namespace

BENCHMARK_MAIN();
