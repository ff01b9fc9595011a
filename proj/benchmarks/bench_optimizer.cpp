#include <benchmark/benchmark.h>
#include <moqo/optimizer.hpp>
#include <moqo/oracle.hpp>
#include <moqo/workload.hpp>


using namespace moqo;

namespace {

/** A seeded clique instance with `n` tables and `l` objectives over the standard operators. */
TestCase clique(std::size_t n, std::size_t l)
{
    Profile p;
    p.tables_min = p.tables_max = n;
    p.objectives_min = p.objectives_max = l;
    p.shapes = { QueryShape{ QueryShape::CLIQUE } };
    return generate_testcase(2, p);
}

void set_counters(benchmark::State &state, const OptimizerReport &r)
{
    state.counters["plans_total"] = double(r.plans_total);
    state.counters["plans_max_set"] = double(r.plans_max_set);
}

void BM_exa(benchmark::State &state)
{
    const TestCase t = clique(state.range(0), state.range(1));
    const ProblemInstance instance = t.instance();
    OptimizerReport r;
    for (auto _ : state) benchmark::DoNotOptimize(r = exa_optimize(instance, {}));
    set_counters(state, r);
}
BENCHMARK(BM_exa)->Args({ 4, 3 })->Args({ 5, 3 })->Args({ 5, 6 })->Unit(benchmark::kMillisecond);

/* Precision argument in hundredths. */
void BM_rta(benchmark::State &state)
{
    const TestCase t = clique(state.range(0), state.range(1));
    const ProblemInstance instance(t.search_space(), t.weights, t.bounds, Precision(state.range(2) / 100.0));
    OptimizerReport r;
    for (auto _ : state) benchmark::DoNotOptimize(r = rta_optimize(instance, {}));
    set_counters(state, r);
}
BENCHMARK(BM_rta)
    ->Args({ 5, 3, 115 })
    ->Args({ 5, 3, 150 })
    ->Args({ 5, 3, 200 })
    ->Args({ 6, 6, 150 })
    ->Args({ 7, 6, 150 })
    ->Unit(benchmark::kMillisecond);

void BM_ira(benchmark::State &state)
{
    Profile p;
    p.tables_min = p.tables_max = state.range(0);
    p.objectives_min = p.objectives_max = 3;
    p.shapes = { QueryShape{ QueryShape::CHAIN } };
    p.bound_probability = 1;
    p.runs = { RunSpec{ Algorithm::IRA, 1.5 } };
    const TestCase t = generate_testcase(3, p);
    const ProblemInstance instance = t.instance();
    OptimizerReport r;
    for (auto _ : state) benchmark::DoNotOptimize(r = ira_optimize(instance, {}));
    set_counters(state, r);
    state.counters["iterations"] = double(r.iterations.size());
}
BENCHMARK(BM_ira)->Arg(4)->Arg(5)->Unit(benchmark::kMillisecond);

void BM_true_pareto(benchmark::State &state)
{
    const TestCase t = clique(state.range(0), 3);
    SearchSpace space = t.search_space();
    space.operators = OperatorSpace::uniform(2);
    for (auto _ : state) benchmark::DoNotOptimize(true_pareto(space));
}
BENCHMARK(BM_true_pareto)->Arg(3)->Arg(4)->Unit(benchmark::kMillisecond);

}

BENCHMARK_MAIN();
