#include <benchmark/benchmark.h>

#include "varelim/consistency.hpp"
#include "varelim/engines.hpp"
#include "varelim/oracle.hpp"
#include "varelim/verify.hpp"

using namespace varelim;

namespace {

// AC closure of a random instance; range(0) is n, domain size 6, 3n constraints on average
Instance workload(std::size_t n)
{
    const double p1 = std::min(1.0, 6.0 / static_cast<double>(n - 1));
    for (std::uint64_t seed = 1;; ++seed) {
        auto I = random_instance({n, 6, p1, 0.25, seed});
        if (enforce_ac(I).sat)
            return I;
    }
}

void BM_Naive(benchmark::State& st)
{
    const auto rule = kEngineRules[st.range(1)];
    const auto I = workload(static_cast<std::size_t>(st.range(0)));
    for (auto _ : st)
        benchmark::DoNotOptimize(naive_fixpoint(I, rule));
    st.SetLabel(std::string(rule_name(rule)));
}

void BM_Engine(benchmark::State& st)
{
    const auto rule = kEngineRules[st.range(1)];
    const auto I = workload(static_cast<std::size_t>(st.range(0)));
    for (auto _ : st)
        benchmark::DoNotOptimize(run_engine(I, rule));
    st.SetLabel(std::string(rule_name(rule)));
}

void BM_Verify(benchmark::State& st)
{
    VerifyConfig cfg;
    cfg.count = 100;
    cfg.parallel = st.range(0) != 0;
    for (auto _ : st)
        benchmark::DoNotOptimize(run_verification(cfg));
    st.SetLabel(cfg.parallel ? "parallel" : "serial");
}

void engine_args(benchmark::internal::Benchmark* b)
{
    for (long n : {20, 40})
        for (long r = 0; r < 5; ++r)
            b->Args({n, r});
}

} // namespace

BENCHMARK(BM_Naive)->Apply(engine_args)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Engine)->Apply(engine_args)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Verify)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
