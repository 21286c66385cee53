#include <benchmark/benchmark.h>

#include "jcsta/kernels.hpp"
#include "jcsta/observables.hpp"

using namespace jcsta;

namespace {

Matrix random_density(int dim) {
  Matrix x = Matrix::Random(dim, dim);
  Matrix rho = x * x.adjoint();
  return rho / rho.trace();
}

const JcCoefficients kCoeffs{1.2, 1.0, 0.2, 0.05, 0.0};
const NoiseRates kRates{1e-3, 1e-3, 1e-3, 1e-3};

void BM_LindbladStructured(benchmark::State& st) {
  const SpaceSpec space{static_cast<int>(st.range(0)), 1.0};
  const Matrix rho = random_density(space.dim());
  Matrix out(space.dim(), space.dim());
  for (auto _ : st) {
    lindblad_rhs(kCoeffs, kRates, space, rho, out);
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_LindbladStructured)->Arg(10)->Arg(20)->Arg(40);

void BM_LindbladDense(benchmark::State& st) {
  const SpaceSpec space{static_cast<int>(st.range(0)), 1.0};
  const OperatorTable ops = build_operators(space);
  const Matrix h = dense_h(kCoeffs, ops);
  const auto jumps = jump_operators(kRates, ops);
  const Matrix rho = random_density(space.dim());
  for (auto _ : st) benchmark::DoNotOptimize(lindblad_rhs_reference(h, jumps, rho).data());
}
BENCHMARK(BM_LindbladDense)->Arg(10)->Arg(20)->Arg(40);

void BM_ApplyH(benchmark::State& st) {
  const SpaceSpec space{static_cast<int>(st.range(0)), 1.0};
  const Vector psi = Vector::Random(space.dim()).normalized();
  Vector out(space.dim());
  for (auto _ : st) {
    apply_h(kCoeffs, space, psi, out);
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_ApplyH)->Arg(40);

void BM_WignerParallel(benchmark::State& st) {
  const Vector psi = coherent_amplitudes(0.75, 40);
  const WignerSpec spec{5.0, static_cast<int>(st.range(0))};
  for (auto _ : st) benchmark::DoNotOptimize(wigner(psi, spec).values.data());
}
BENCHMARK(BM_WignerParallel)->Arg(51)->Arg(101)->Unit(benchmark::kMillisecond);

void BM_WignerReference(benchmark::State& st) {
  const Vector psi = coherent_amplitudes(0.75, 40);
  const Matrix rho = psi * psi.adjoint();
  const WignerSpec spec{5.0, static_cast<int>(st.range(0))};
  for (auto _ : st) benchmark::DoNotOptimize(wigner_reference(rho, spec).values.data());
}
BENCHMARK(BM_WignerReference)->Arg(51)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
