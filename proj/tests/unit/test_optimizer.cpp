#include <doctest.h>

#include "helpers.hpp"
#include <chrono>
#include <cmath>
#include <moqo/error.hpp>
#include <moqo/optimizer.hpp>


using namespace moqo;
using namespace moqo::test;

namespace {

const ObjectiveList TIME_LOSS{ Objective::total_time, Objective::tuple_loss };

/** One table of 1000 tuples: its six access paths trade time against tuple loss. */
ProblemInstance single_table(std::vector<std::optional<double>> bounds, double alpha = 2)
{
    SearchSpace space(make_graph({ { "T", 1000 } }), TIME_LOSS);
    return ProblemInstance(space, WeightVector(TIME_LOSS, { 1.0, 0.0 }), BoundVector(TIME_LOSS, bounds),
                           Precision(alpha));
}

PlanSet set_of(ObjectiveList objs, std::initializer_list<std::initializer_list<double>> costs)
{
    PlanSet s(TableSet::singleton(0), objs);
    std::uint32_t id = 0;
    for (auto &c : costs) {
        const CostVector v(objs, c);
        s.insert(PlanId(id++), v.data());
    }
    return s;
}

SearchSpace three_tables(ObjectiveList objs, std::size_t j)
{
    return SearchSpace(make_graph({ { "A", 1000 }, { "B", 200, true }, { "C", 50 } },
                                  { { "A", "B", 0.01 }, { "B", "C", 0.2 } }),
                       objs, OperatorSpace::uniform(j));
}

}


/*======================================================================================================================
 * find_pareto_plans
 *====================================================================================================================*/

TEST_CASE("single table keeps every access path")
{
    const SearchSpace space(make_graph({ { "T", 1000 } }), TIME_LOSS);
    const auto plans = find_pareto_plans(space, PruneMode::exact());
    CHECK(plans[TableSet::singleton(0)].size() == 6);
    CHECK(plans[TableSet::singleton(0)].is_dominance_free());
}

TEST_CASE("two tables with one join configuration")
{
    const SearchSpace space(make_graph({ { "A", 10 }, { "B", 20 } }), TIME_LOSS, OperatorSpace::uniform(1));
    const auto plans = find_pareto_plans(space, PruneMode::exact());
    CHECK(plans.candidates == 2 + 2); // two access paths, both operand orders
}

TEST_CASE("approximate pruning with precision one is exact pruning")
{
    const ObjectiveList objs{ Objective::total_time, Objective::buffer_footprint, Objective::energy };
    const SearchSpace space = three_tables(objs, 3);
    const auto exact = find_pareto_plans(space, PruneMode::exact());
    const auto approx = find_pareto_plans(space, PruneMode::approx(Precision(1)));
    REQUIRE(exact.sets.size() == approx.sets.size());
    for (std::size_t i = 0; i != exact.sets.size(); ++i)
        CHECK(sorted_costs(exact.sets[i]) == sorted_costs(approx.sets[i]));
}

TEST_CASE("single objective keeps one plan per table set")
{
    const SearchSpace space(make_graph({ { "A", 1000 }, { "B", 200, true }, { "C", 50 }, { "D", 7 } },
                                       { { "A", "B", 0.01 }, { "B", "C", 0.2 }, { "C", "D", 0.5 } }),
                            ObjectiveList{ Objective::energy });
    const auto plans = find_pareto_plans(space, PruneMode::exact());
    for (std::uint32_t bits = 1; bits != plans.sets.size(); ++bits) CHECK(plans.sets[bits].size() == 1);
}

TEST_CASE("connected splits only")
{
    SearchSpace space(make_graph({ { "A", 10 }, { "B", 20 }, { "C", 30 } }, { { "A", "B", 0.1 }, { "B", "C", 0.1 } }),
                      TIME_LOSS, OperatorSpace::uniform(2));
    space.cross_products = false;
    const auto plans = find_pareto_plans(space, PruneMode::exact());
    CHECK(plans[TableSet::singleton(0) | TableSet::singleton(2)].empty());
    CHECK_FALSE(plans[space.graph.all_tables()].empty());
}

TEST_CASE("expired deadline degrades to one plan per table set")
{
    const ObjectiveList objs{ Objective::total_time, Objective::energy, Objective::tuple_loss };
    const SearchSpace space = three_tables(objs, 4);
    const WeightVector w(objs, { 1.0, 0.5, 10.0 });
    const auto plans = find_pareto_plans(space, PruneMode::exact(), Deadline::after(std::chrono::nanoseconds(0)), &w);
    CHECK(plans.timed_out);
    for (std::uint32_t bits = 1; bits != plans.sets.size(); ++bits) CHECK(plans.sets[bits].size() == 1);

    /* Deterministic: a second degraded run picks the same plans. */
    const auto again = find_pareto_plans(space, PruneMode::exact(), Deadline::after(std::chrono::nanoseconds(0)), &w);
    for (std::uint32_t bits = 1; bits != plans.sets.size(); ++bits)
        CHECK(plans.sets[bits].cost(0) == again.sets[bits].cost(0));

    const auto full = find_pareto_plans(space, PruneMode::exact(), Deadline::after(std::chrono::hours(1)), &w);
    CHECK_FALSE(full.timed_out);
}


/*======================================================================================================================
 * select_best
 *====================================================================================================================*/

TEST_CASE("select best")
{
    const ObjectiveList two{ Objective::total_time, Objective::energy };
    const PlanSet s = set_of(two, { { 3, 1 }, { 1.3, 2 }, { 0.5, 3.2 } });
    const WeightVector w(two, { 1.0, 1.0 });
    CHECK(select_best(s, w, BoundVector(two, std::vector<std::optional<double>>{ 2.0, 3.0 })) == PlanId(1));
    CHECK(select_best(s, w, BoundVector(two, std::vector<std::optional<double>>{ 0.1, 0.1 })) == PlanId(1));
    CHECK(select_best(set_of(two, { { 9, 9 } }), w, BoundVector(two)) == PlanId(0));
    CHECK_THROWS_AS(select_best(PlanSet(TableSet::singleton(0), two), w, BoundVector(two)), StructuralError);

    const PlanSet example = set_of(two, { { 6, 5 }, { 7, 3 } });
    CHECK(select_best(example, WeightVector(two, { 1.0, 2.0 }), BoundVector(two)) == PlanId(1));

    /* Equal weighted cost: lexicographically smaller cost vector wins. */
    const PlanSet tie = set_of(two, { { 2, 1 }, { 1, 2 } });
    CHECK(select_best(tie, w, BoundVector(two)) == PlanId(1));
}


/*======================================================================================================================
 * Algorithms
 *====================================================================================================================*/

TEST_CASE("algorithm names")
{
    for (Algorithm a : { Algorithm::EXA, Algorithm::RTA, Algorithm::IRA }) CHECK(parse_algorithm(algorithm_name(a)) == a);
    CHECK_FALSE(parse_algorithm("greedy"));
}

TEST_CASE("exact algorithm")
{
    const ObjectiveList objs{ Objective::total_time, Objective::cores, Objective::energy };
    const ProblemInstance instance(three_tables(objs, 3), WeightVector(objs, { 1.0, 100.0, 0.5 }), BoundVector(objs));
    const auto report = exa_optimize(instance);
    CHECK(report.ok());
    CHECK_FALSE(report.timed_out);
    CHECK(report.iterations.size() == 1);
    CHECK(report.plans_per_set.size() == 8);
    bool found = false;
    for (auto &f : report.frontier) found |= f.cost == report.chosen_cost and f.plan == report.chosen_plan;
    CHECK(found);
    for (auto &f : report.frontier) CHECK(weighted_cost(f.cost, instance.weights) >= report.chosen_weighted_cost);
}

TEST_CASE("representative-tradeoffs internal precision")
{
    const ObjectiveList objs{ Objective::total_time, Objective::energy };
    const SearchSpace two(make_graph({ { "A", 10 }, { "B", 20 } }), objs, OperatorSpace::uniform(2));
    const auto r2 = rta_optimize(ProblemInstance(two, WeightVector::uniform(objs), BoundVector(objs), Precision(1.44)));
    CHECK(r2.iterations.at(0).internal_alpha == doctest::Approx(1.2));

    const SearchSpace four(make_graph({ { "A", 10 }, { "B", 20 }, { "C", 30 }, { "D", 40 } }), objs,
                           OperatorSpace::uniform(2));
    const auto r4 = rta_optimize(ProblemInstance(four, WeightVector::uniform(objs), BoundVector(objs), Precision(2)));
    CHECK(r4.iterations.at(0).internal_alpha == doctest::Approx(1.18921).epsilon(1e-5));
}

TEST_CASE("representative-tradeoffs with precision one is exact")
{
    const ObjectiveList objs{ Objective::total_time, Objective::buffer_footprint, Objective::tuple_loss };
    const ProblemInstance instance(three_tables(objs, 3), WeightVector(objs, { 1.0, 1.0, 1000.0 }), BoundVector(objs));
    const auto exa = exa_optimize(instance);
    const auto rta = rta_optimize(instance);
    CHECK(rta.chosen_cost == exa.chosen_cost);
    CHECK(rta.frontier.size() == exa.frontier.size());
    CHECK(rta.plans_total == exa.plans_total);
}

TEST_CASE("representative-tradeoffs refuses bounds")
{
    CHECK_THROWS_AS(rta_optimize(single_table({ 100.0, std::nullopt })), ContractError);
}

TEST_CASE("iterative-refinement precision schedule")
{
    CHECK(ira_precision(3, Precision(2), 3).value() == doctest::Approx(1.6325).epsilon(1e-4));
    CHECK(ira_precision(6, Precision(2), 3).value() == doctest::Approx(std::sqrt(2.0)));
    CHECK(ira_precision(1000, Precision(2), 3).value() == doctest::Approx(1.0));
    CHECK_THROWS_AS(ira_precision(1, Precision(2), 1), ContractError);
    CHECK_THROWS_AS(ira_precision(0, Precision(2), 2), ContractError);
    for (std::size_t l = 2; l <= 9; ++l) {
        double previous = 2;
        for (unsigned i = 1; i <= 40; ++i) {
            const double a = ira_precision(i, Precision(2), l).value();
            CHECK(a < previous);
            CHECK(a <= 2);
            previous = a;
        }
    }
}

TEST_CASE("iterative refinement refuses a single objective")
{
    const ObjectiveList one{ Objective::total_time };
    SearchSpace space(make_graph({ { "T", 10 } }), one);
    CHECK_THROWS_AS(ira_optimize(ProblemInstance(space, WeightVector::uniform(one), BoundVector(one))), ContractError);
}

TEST_CASE("iterative refinement refines until a near-optimal plan is certain")
{
    /* Coarse plan sets hold only the full scan and the 1% sample; the feasible cheap 5% sample appears only once the
     * relaxed bound stops admitting the 1% sample. */
    const auto instance = single_table({ std::nullopt, 0.955 });
    const auto report = ira_optimize(instance);
    CHECK(report.ok());
    CHECK(report.iterations.size() >= 2);
    CHECK(report.chosen_plan == "SampleScan(T,0.05)");
    CHECK(respects_bounds(report.chosen_cost, instance.bounds));
    for (std::size_t i = 1; i < report.iterations.size(); ++i)
        CHECK(report.iterations[i].alpha < report.iterations[i - 1].alpha);
}

TEST_CASE("iterative refinement does not stop on an infeasible plan while a feasible one exists")
{
    const auto instance = single_table({ 60.0, 0.955 });
    const Precision alpha_user(2);
    const double alpha = 1.733;
    const PlanSet coarse = set_of(TIME_LOSS, { { 1000, 0 }, { 10, 0.99 } });
    const CostVector chosen(TIME_LOSS, { 10, 0.99 });
    CHECK(select_best(coarse, instance.weights, instance.bounds) == PlanId(1));
    CHECK_FALSE(ira_should_stop(coarse, chosen, instance.weights, instance.bounds, alpha, alpha_user));

    const auto report = ira_optimize(instance);
    CHECK(report.ok());
    CHECK(respects_bounds(report.chosen_cost, instance.bounds));
    CHECK(report.chosen_plan == "SampleScan(T,0.05)");
}

TEST_CASE("iterative refinement with infeasible bounds minimizes weighted cost")
{
    const auto instance = single_table({ 5.0, 0.5 });
    const auto report = ira_optimize(instance);
    CHECK(report.ok());
    CHECK(report.chosen_plan == "SampleScan(T,0.01)");
}

TEST_CASE("degenerate single-table query")
{
    const auto instance = single_table({ std::nullopt, std::nullopt }, 1.5);
    for (Algorithm a : { Algorithm::EXA, Algorithm::RTA, Algorithm::IRA }) {
        const auto report = run_algorithm(a, instance);
        CHECK(report.chosen_plan == "SampleScan(T,0.01)");
    }
}

TEST_CASE("iteration cap is reported")
{
    const auto instance = single_table({ std::nullopt, 0.955 });
    OptimizerOptions options;
    options.max_iterations = 1;
    const auto report = ira_optimize(instance, options);
    CHECK(report.status == RunStatus::ITERATION_CAP_REACHED);
    CHECK_FALSE(report.ok());
    CHECK(report.iterations.size() == 1);
}

TEST_CASE("custom refinement policy")
{
    struct Fixed : RefinementPolicy
    {
        Algorithm algorithm() const override { return Algorithm::IRA; }
        double precision(unsigned i) const override { return 1.0 + 1.0 / i; }
        bool done(const PlanSet&, PlanId, double alpha) const override { return alpha < 1.3; }
    };
    const auto report = optimize(single_table({ std::nullopt, std::nullopt }), Fixed());
    REQUIRE(report.iterations.size() == 4);
    CHECK(report.iterations[3].alpha == 1.25);
}
