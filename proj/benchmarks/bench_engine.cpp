#include <benchmark/benchmark.h>

#include "compint/contour.hpp"
#include "compint/engine.hpp"
#include "compint/expr.hpp"
#include "compint/residue.hpp"
#include "compint/scalar.hpp"

using namespace compint;

namespace {

const Expr& square_expr() {
  static const Expr e = parse_expr("z^2");
  return e;
}

const Expr& decay_expr() {
  static const Expr e = parse_expr("exp(-z)");
  return e;
}

}  // namespace

static void BM_RiemannPass(benchmark::State& state) {
  const Integrand phi = integrand_of(square_expr());
  const Contour loop = make_circle(Cplx{0, 0}, 1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        riemann_partial(phi, loop, Cplx{0.2, 0}, state.range(0)));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_RiemannPass)->Arg(1024)->Arg(8192);

static void BM_DoublingLimit(benchmark::State& state) {
  const Integrand phi = integrand_of(decay_expr());
  const Contour seg = make_segment(Cplx{0, 0}, Cplx{1, 0});
  for (auto _ : state) {
    benchmark::DoNotOptimize(comp_integral(phi, seg, Cplx{0.3, 0.1}));
  }
}
BENCHMARK(BM_DoublingLimit);

static void BM_OdeFlow(benchmark::State& state) {
  const Integrand phi = integrand_of(decay_expr());
  const Contour seg = make_segment(Cplx{0, 0}, Cplx{1, 0});
  for (auto _ : state) {
    benchmark::DoNotOptimize(comp_integral_ode(phi, seg, Cplx{0.3, 0.1}));
  }
}
BENCHMARK(BM_OdeFlow);

static void BM_ResidualLoop(benchmark::State& state) {
  const Expr f = parse_expr("z^2/s");
  const PoleSpec pole{Cplx{0, 0}, 1, ""};
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        compositional_residual(f, pole, Cplx{1, 0}, 0.5));
  }
}
BENCHMARK(BM_ResidualLoop);

static void BM_AdditiveLoop(benchmark::State& state) {
  const Contour loop = make_circle(Cplx{0, 0}, 1.0);
  const auto f = [](Cplx s) { return 1.0 / s; };
  for (auto _ : state) {
    benchmark::DoNotOptimize(additive_contour_integral(f, loop));
  }
}
BENCHMARK(BM_AdditiveLoop);

static void BM_Grid(benchmark::State& state) {
  const Integrand phi = integrand_of(decay_expr());
  const Contour down = make_segment(Cplx{1, 0}, Cplx{0, 0});
  const GridSpec grid{-1.0, 1.0, -3.0, 3.0, 16, 16};
  EngineConfig cfg;
  cfg.tol = 1e-6;
  const int threads = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        classify_grid(phi, down, grid, cfg, Method::Riemann, threads));
  }
  state.SetItemsProcessed(state.iterations() * grid.nx * grid.ny);
}
BENCHMARK(BM_Grid)->Arg(1)->Arg(0);

BENCHMARK_MAIN();
