// Compares the OpenMP convolution against the serial reference on dense
// integer series of increasing order.

#include <benchmark/benchmark.h>

#include "eftlab/modforms.hpp"
#include "eftlab/qseries.hpp"

namespace {

using namespace eftlab;

QSeries dense_operand(long order) {
  // delta^{-1} has dense, fast-growing coefficients: a realistic operand
  return delta_inv(mpq_class(order));
}

void bm_mul_serial(benchmark::State& state) {
  QSeries a = dense_operand(state.range(0));
  QSeries b = eta(mpq_class(state.range(0))).pow(24);
  for (auto _ : state) {
    QSeries c = qs_mul_serial(a, b);
    benchmark::DoNotOptimize(c);
  }
}

void bm_mul_openmp(benchmark::State& state) {
  QSeries a = dense_operand(state.range(0));
  QSeries b = eta(mpq_class(state.range(0))).pow(24);
  for (auto _ : state) {
    QSeries c = qs_mul(a, b);
    benchmark::DoNotOptimize(c);
  }
}

BENCHMARK(bm_mul_serial)->Arg(64)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_mul_openmp)->Arg(64)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
