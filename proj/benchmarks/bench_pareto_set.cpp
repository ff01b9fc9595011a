#include <benchmark/benchmark.h>
#include <cmath>
#include <moqo/pareto_set.hpp>
#include <random>
#include <vector>


using namespace moqo;

namespace {

/** Random positive cost vectors for `objectives`. */
std::vector<std::vector<double>> random_costs(ObjectiveList objectives, std::size_t count)
{
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0, 1);
    std::vector<std::vector<double>> v(count, std::vector<double>(objectives.size()));
    for (auto &c : v)
        for (double &x : c) x = std::pow(10.0, 4 * u(rng));
    return v;
}

/* Inserts 10⁴ random vectors; the range argument is α in hundredths, 100 meaning exact. */
void BM_prune(benchmark::State &state)
{
    const ObjectiveList objectives{ Objective::total_time, Objective::energy, Objective::buffer_footprint };
    const auto costs = random_costs(objectives, 10'000);
    const PruneMode mode = state.range(0) == 100 ? PruneMode::exact()
                                                 : PruneMode::approx(Precision(state.range(0) / 100.0));
    std::size_t kept = 0;
    for (auto _ : state) {
        PlanSet set(TableSet(1), objectives);
        for (std::size_t i = 0; i != costs.size(); ++i)
            if (set.accepts(costs[i].data(), mode)) set.insert(PlanId(i), costs[i].data());
        kept = set.size();
        benchmark::DoNotOptimize(set);
    }
    state.counters["kept"] = double(kept);
    state.SetItemsProcessed(state.iterations() * std::int64_t(costs.size()));
}
BENCHMARK(BM_prune)->Arg(100)->Arg(115)->Arg(150)->Arg(200);

}
