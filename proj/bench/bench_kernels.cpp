// Serial against OpenMP row-parallel kernels on the same density matrix.

#include <benchmark/benchmark.h>

#include "tdlhf/tdlhf_grid.hpp"

namespace {

using namespace tdlhf::grid;

struct Fixture {
  Grid1D g;
  Mat w;
  DensityMatrix dm;
  Vec n;

  explicit Fixture(int points) : g(Grid1D::make(-20.0, 20.0, points)) {
    w = Interaction{}.matrix(g);
    StaticPotential v;
    v.depth = 4.0;
    const auto ep = lowest_eigenpairs(g, v.sample(g), 2);
    OrbitalSet orbs;
    orbs.psi = ep.vectors.cast<cd>();
    orbs.occupations = {2, 2};
    dm = DensityMatrix::from(orbs);
    n = dm.density();
  }
};

const Fixture &fixture(int points) {
  static Fixture f200(200), f400(400), f800(800);
  return points == 200 ? f200 : points == 400 ? f400 : f800;
}

void BM_kernel_serial(benchmark::State &st) {
  const auto &f = fixture(static_cast<int>(st.range(0)));
  for (auto _ : st)
    benchmark::DoNotOptimize(assemble_kernel_serial(f.dm, f.w, f.g.dx));
}

void BM_kernel_parallel(benchmark::State &st) {
  const auto &f = fixture(static_cast<int>(st.range(0)));
  for (auto _ : st)
    benchmark::DoNotOptimize(assemble_kernel_parallel(f.dm, f.w, f.g.dx));
}

void BM_hartree_serial(benchmark::State &st) {
  const auto &f = fixture(static_cast<int>(st.range(0)));
  for (auto _ : st)
    benchmark::DoNotOptimize(hartree_serial(f.n, f.w, f.g.dx));
}

void BM_hartree_parallel(benchmark::State &st) {
  const auto &f = fixture(static_cast<int>(st.range(0)));
  for (auto _ : st)
    benchmark::DoNotOptimize(hartree_parallel(f.n, f.w, f.g.dx));
}

void BM_solve_vx(benchmark::State &st) {
  const auto &f = fixture(static_cast<int>(st.range(0)));
  for (auto _ : st)
    benchmark::DoNotOptimize(solve_vx(f.dm, f.n, f.w, f.g));
}

} // namespace

BENCHMARK(BM_kernel_serial)->Arg(200)->Arg(400)->Arg(800)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_kernel_parallel)->Arg(200)->Arg(400)->Arg(800)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_hartree_serial)->Arg(200)->Arg(400)->Arg(800)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_hartree_parallel)->Arg(200)->Arg(400)->Arg(800)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_solve_vx)->Arg(200)->Arg(400)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
