// serial reference vs OpenMP kernels
#include "hexcone/berry.hpp"
#include "hexcone/planewave.hpp"

#include <benchmark/benchmark.h>

using namespace hexcone;

namespace {

const BlochOperator& sixcell_op() {
  static const BlochOperator H =
      assemble(build_preset("sixcell", {{"q1", std::sqrt(3.0)}, {"q2", 0.0}, {"r", std::sqrt(7.0)}}).graph);
  return H;
}

template <bool Parallel>
void BM_sweep(benchmark::State& st) {
  const GridSpec g = GridSpec::uniform_grid(static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(Parallel ? sweep(sixcell_op(), g) : sweep_serial(sixcell_op(), g));
}

template <bool Parallel>
void BM_cone_fit(benchmark::State& st) {
  const double lambda = spectrum(sixcell_op(), kstar())(0);
  ConeFitOptions opt;
  opt.directions = static_cast<int>(st.range(0));
  for (auto _ : st)
    benchmark::DoNotOptimize(Parallel ? cone_fit(sixcell_op(), kstar(), lambda, opt)
                                      : cone_fit_serial(sixcell_op(), kstar(), lambda, opt));
}

template <bool Parallel>
void BM_contour(benchmark::State& st) {
  const Contour c = circle_contour(kstar(), 0.25, static_cast<int>(st.range(0)), 0);
  for (auto _ : st)
    benchmark::DoNotOptimize(Parallel ? contour_eigenvectors(sixcell_op(), c)
                                      : contour_eigenvectors_serial(sixcell_op(), c));
}

template <bool Parallel>
void BM_search(benchmark::State& st) {
  SearchOptions opt;
  opt.coarse = static_cast<int>(st.range(0));
  for (auto _ : st)
    benchmark::DoNotOptimize(Parallel ? degeneracy_search_ex(sixcell_op(), {}, 0, 1e-9, opt)
                                      : degeneracy_search_serial(sixcell_op(), {}, 0, 1e-9, opt));
}

template <bool Parallel>
void BM_epsilon_sweep(benchmark::State& st) {
  const FourierPotential q = shell_potential(0.3, 1.0, 0.7, -0.45);
  const std::vector<double> eps{0.0, 0.01, 0.02, 0.05, 0.1, 0.2, 0.3, 0.5};
  const int cutoff = static_cast<int>(st.range(0));
  for (auto _ : st)
    benchmark::DoNotOptimize(Parallel ? epsilon_sweep(q, eps, cutoff) : epsilon_sweep_serial(q, eps, cutoff));
}

}  // namespace

BENCHMARK(BM_sweep<false>)->Arg(64);
BENCHMARK(BM_sweep<true>)->Arg(64);
BENCHMARK(BM_cone_fit<false>)->Arg(24);
BENCHMARK(BM_cone_fit<true>)->Arg(24);
BENCHMARK(BM_contour<false>)->Arg(256);
BENCHMARK(BM_contour<true>)->Arg(256);
BENCHMARK(BM_search<false>)->Arg(48);
BENCHMARK(BM_search<true>)->Arg(48);
BENCHMARK(BM_epsilon_sweep<false>)->Arg(6);
BENCHMARK(BM_epsilon_sweep<true>)->Arg(6);

BENCHMARK_MAIN();
