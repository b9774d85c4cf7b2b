#include "kvol/kvol.hpp"

#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

using namespace kvol;

namespace {

void BM_FieldMul(benchmark::State& st) {
    const int n = static_cast<int>(st.range(0));
    CycloReal a = CycloReal::phi(n) + CycloReal::rational(n, mpq_class(3, 7));
    CycloReal b = a.inverse();
    for (auto _ : st) benchmark::DoNotOptimize(a * b);
}
BENCHMARK(BM_FieldMul)->Arg(8)->Arg(12)->Arg(14);

void BM_FieldSignNearZero(benchmark::State& st) {
    const int n = 12;
    // tiny but nonzero, forces a few rungs of the precision ladder
    CycloReal phi = CycloReal::phi(n);
    CycloReal x = phi * phi - CycloReal::integer(n, 2) - CycloReal::rational(n, mpq_class("17320508075688772935/10000000000000000000"));
    for (auto _ : st) benchmark::DoNotOptimize(x.sign());
}
BENCHMARK(BM_FieldSignNearZero);

void BM_EnumerateStaircase(benchmark::State& st) {
    const int n = static_cast<int>(st.range(0));
    TranslationSurface s = build_staircase(n);
    const double L = static_cast<double>(st.range(1)) * staircase_lengths(n).l_m.to_double();
    std::size_t count = 0;
    for (auto _ : st) count = enumerate_saddle_connections(s, L).size();
    st.counters["connections"] = static_cast<double>(count);
}
BENCHMARK(BM_EnumerateStaircase)->Args({8, 10})->Args({8, 30})->Args({12, 10})->Unit(benchmark::kMillisecond);

void BM_MaxRatio(benchmark::State& st) {
    const int n = static_cast<int>(st.range(0));
    TranslationSurface s = build_staircase(n);
    const double L = 30 * staircase_lengths(n).l_m.to_double();
    auto conns = enumerate_saddle_connections(s, L);
    CurveSet cs = closed_curves(s, conns, L);
    IntersectionForm form = intersection_form(s);
    for (auto _ : st) benchmark::DoNotOptimize(max_ratio(cs, form).ratio);
    st.counters["curves"] = static_cast<double>(cs.curves.size());
}
BENCHMARK(BM_MaxRatio)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_DistToGmax(benchmark::State& st) {
    const int n = 8;
    std::mt19937 rng(1);
    std::uniform_real_distribution<double> ux(-0.9, 0.9), uy(0.05, 3);
    std::vector<HPoint> pts;
    for (int i = 0; i < 256; ++i) pts.push_back({ux(rng), uy(rng)});
    dist_to_Gmax(n, {0, 1});  // table build is not timed
    std::size_t i = 0;
    for (auto _ : st) benchmark::DoNotOptimize(dist_to_Gmax(n, pts[i++ % pts.size()]).distance);
}
BENCHMARK(BM_DistToGmax)->Unit(benchmark::kMicrosecond);

void BM_BruteforcePoint(benchmark::State& st) {
    const int n = 8;
    const Mat2 M{CycloReal::rational(n, mpq_class(10, 9)), CycloReal::rational(n, mpq_class(1, 3)),
                 CycloReal::zero(n), CycloReal::rational(n, mpq_class(9, 10))};
    const double L = static_cast<double>(st.range(0)) * staircase_lengths(n).l_m.to_double();
    for (auto _ : st) benchmark::DoNotOptimize(kvol_bruteforce(M, n, L).value);
}
BENCHMARK(BM_BruteforcePoint)->Arg(10)->Arg(30)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
