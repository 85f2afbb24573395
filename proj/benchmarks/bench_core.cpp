#include <benchmark/benchmark.h>

#include <cmath>

#include "fracsing/energy.hpp"
#include "fracsing/extension.hpp"
#include "fracsing/fracops.hpp"
#include "fracsing/kelvin.hpp"
#include "fracsing/quadrature.hpp"
#include "fracsing/specfun.hpp"

using namespace fracsing;

namespace {

const Params& base() {
  static const Params p = validate_params(3, 0.5, 1.8);
  return p;
}

void BM_AsymptoticConstant(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(asymptotic_constant(base()));
}
BENCHMARK(BM_AsymptoticConstant);

void BM_HemisphereRule(benchmark::State& st) {
  const int k = static_cast<int>(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(hemisphere_rule(3, 0.3, k));
}
BENCHMARK(BM_HemisphereRule)->Arg(32)->Arg(128)->Arg(512);

void BM_FracLaplacianPV(benchmark::State& st) {
  const auto u = singular_solution_trace(base());
  for (auto _ : st) benchmark::DoNotOptimize(frac_laplacian_radial(u, 1.0, base()).value);
}
BENCHMARK(BM_FracLaplacianPV)->Unit(benchmark::kMillisecond);

void BM_PoissonExtensionPoint(benchmark::State& st) {
  const auto U = extend_trace(singular_solution_trace(base()), make_kernel_spec(3, 0.5), {});
  double t = 0.1;
  for (auto _ : st) benchmark::DoNotOptimize(U(1.0, t));
}
BENCHMARK(BM_PoissonExtensionPoint)->Unit(benchmark::kMillisecond);

void BM_EnergyExact(benchmark::State& st) {
  const auto U = singular_extension(base());
  const auto rule = energy_rule(base(), static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(energy_at(U, 1.0, base(), rule));
}
BENCHMARK(BM_EnergyExact)->Arg(64)->Arg(128)->Arg(256);

void BM_SolveAnnulus(benchmark::State& st) {
  const auto E = singular_extension(base());
  DirichletData d{[E](double th) { return 0.95 * E.polar_evaluator(0.2, th).U; },
                  [E](double th) { return 0.95 * E.polar_evaluator(2.5, th).U; }};
  SolveOptions o;
  o.n_xi = static_cast<int>(st.range(0));
  o.n_eta = o.n_xi / 2;
  for (auto _ : st) benchmark::DoNotOptimize(solve_nonlinear_annulus(base(), 0.2, 2.5, d, o).report.final_residual);
}
BENCHMARK(BM_SolveAnnulus)->Arg(32)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_EnergyGrid(benchmark::State& st) {
  const auto E = singular_extension(base());
  DirichletData d{[E](double th) { return E.polar_evaluator(0.2, th).U; },
                  [E](double th) { return E.polar_evaluator(2.5, th).U; }};
  SolveOptions o;
  o.n_xi = 128;
  o.n_eta = 64;
  const auto U = solve_nonlinear_annulus(base(), 0.2, 2.5, d, o).field;
  const auto rule = energy_rule(base());
  for (auto _ : st) benchmark::DoNotOptimize(energy_at(U, 1.0, base(), rule));
}
BENCHMARK(BM_EnergyGrid);

void BM_MovingSphereScan(benchmark::State& st) {
  const auto u = singular_solution_trace(base());
  std::vector<double> grid;
  for (int k = 1; k <= 100; ++k) grid.push_back(k / 100.0);
  for (auto _ : st) benchmark::DoNotOptimize(moving_sphere_scan(u, 3, 0.5, {1.0, 0.0, 0.0}, grid).lambda_bar);
}
BENCHMARK(BM_MovingSphereScan)->Unit(benchmark::kMillisecond);

void BM_BlowupLimit(benchmark::State& st) {
  const auto u = singular_solution_trace(base());
  for (auto _ : st) benchmark::DoNotOptimize(blowup_limit(u, base()).A_hat);
}
BENCHMARK(BM_BlowupLimit)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
