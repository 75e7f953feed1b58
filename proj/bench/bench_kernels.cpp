// Serial reference against OpenMP kernels. Arguments after the size are the
// thread count (1 = serial path where a dedicated one exists).

#include <benchmark/benchmark.h>

#include <random>

#include "d3/divisor.hpp"
#include "d3/identities.hpp"
#include "d3/trace_fn.hpp"
#include "d3/windows.hpp"

using namespace d3;

namespace {

trace::PeriodicFunction random_function(ff::Prime p) {
  std::mt19937_64 rng(p.value());
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<std::complex<double>> v(p.value());
  for (auto& z : v) z = {u(rng), u(rng)};
  return trace::PeriodicFunction(p, v);
}

const divisor::DivisorTable& table() {
  static const auto t = divisor::sieve_dk(2'000'000, 3);
  return t;
}

void BM_Fourier(benchmark::State& st) {
  const auto K = random_function(ff::Prime(static_cast<std::uint64_t>(st.range(0))));
  const Exec exec{static_cast<int>(st.range(1))};
  for (auto _ : st) benchmark::DoNotOptimize(trace::fourier(K, exec));
}
BENCHMARK(BM_Fourier)->Args({499, 1})->Args({499, 0})->Args({2003, 1})->Args({2003, 0});

void BM_KloostermanFft(benchmark::State& st) {
  const ff::Prime p(static_cast<std::uint64_t>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(trace::kloosterman_all(3, p));
}
BENCHMARK(BM_KloostermanFft)->Arg(101)->Arg(499);

void BM_KloostermanDirect(benchmark::State& st) {
  const ff::Prime p(static_cast<std::uint64_t>(st.range(0)));
  const Exec exec{static_cast<int>(st.range(1))};
  for (auto _ : st) benchmark::DoNotOptimize(trace::kloosterman_all_direct(3, p, exec));
}
BENCHMARK(BM_KloostermanDirect)->Args({101, 1})->Args({101, 0});

void BM_BesselTableSerial(benchmark::State& st) {
  const trace::BesselTransform bt(random_function(ff::Prime(static_cast<std::uint64_t>(st.range(0)))));
  for (auto _ : st) benchmark::DoNotOptimize(bt.table_serial());
}
BENCHMARK(BM_BesselTableSerial)->Arg(53)->Arg(101);

void BM_BesselTableParallel(benchmark::State& st) {
  const trace::BesselTransform bt(random_function(ff::Prime(static_cast<std::uint64_t>(st.range(0)))));
  for (auto _ : st) benchmark::DoNotOptimize(bt.table(Exec{0}));
}
BENCHMARK(BM_BesselTableParallel)->Arg(53)->Arg(101);

void BM_ClassSumsSerial(benchmark::State& st) {
  const auto& t = table();
  for (auto _ : st) benchmark::DoNotOptimize(divisor::class_sums_serial(t, 1009));
}
BENCHMARK(BM_ClassSumsSerial);

void BM_ClassSumsParallel(benchmark::State& st) {
  const auto& t = table();
  for (auto _ : st) benchmark::DoNotOptimize(divisor::class_sums(t, 1009, Exec{0}));
}
BENCHMARK(BM_ClassSumsParallel);

void BM_CombinedFormula(benchmark::State& st) {
  const ff::Prime p(101);
  const Exec exec{static_cast<int>(st.range(0))};
  const auto w = [](int l) { return windows::partition_piece(2.0, l).window; };
  const identities::DualWindow d1(w(3), 101, 1e-11, exec), d2(w(4), 101, 1e-11, exec),
      d3(w(5), 101, 1e-11, exec);
  const auto K = trace::PeriodicFunction::delta(p, 1);
  for (auto _ : st) benchmark::DoNotOptimize(identities::compute_abcd(d1, d2, d3, K, exec));
}
BENCHMARK(BM_CombinedFormula)->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
