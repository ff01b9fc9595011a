#include <doctest.h>

#include <cmath>
#include <limits>
#include <moqo/cost.hpp>
#include <moqo/error.hpp>
#include <random>


using namespace moqo;

namespace {

const ObjectiveList TWO{ Objective::total_time, Objective::energy };

CostVector cv(double a, double b) { return CostVector(TWO, { a, b }); }

CostVector random_vector(std::mt19937_64 &rng)
{
    std::uniform_int_distribution<int> d(0, 4);
    return cv(d(rng), d(rng));
}

}


/*======================================================================================================================
 * Objectives
 *====================================================================================================================*/

TEST_CASE("objective names round-trip")
{
    for (Objective o : ALL_OBJECTIVES) CHECK(parse_objective(objective_name(o)) == o);
    CHECK_FALSE(parse_objective("latency"));
}

TEST_CASE("objective list")
{
    const ObjectiveList l{ Objective::tuple_loss, Objective::total_time, Objective::cores };
    CHECK(l.size() == 3);
    CHECK(l[0] == Objective::tuple_loss);
    CHECK(l[2] == Objective::cores);
    CHECK(l.index_of(Objective::total_time) == 1u);
    CHECK_FALSE(l.contains(Objective::energy));
    CHECK(l != ObjectiveList{ Objective::total_time, Objective::tuple_loss, Objective::cores });

    const std::vector<Objective> all(ALL_OBJECTIVES.begin(), ALL_OBJECTIVES.end());
    CHECK(ObjectiveList(all).size() == 9);
    CHECK(ObjectiveList(all).to_vector() == all);

    CHECK_THROWS_AS(ObjectiveList({ Objective::cores, Objective::cores }), InvalidInput);
    CHECK_THROWS_AS(ObjectiveList(std::span<const Objective>()), InvalidInput);
}


/*======================================================================================================================
 * Vectors
 *====================================================================================================================*/

TEST_CASE("cost vector validation")
{
    CHECK_THROWS_AS(cv(-1, 0), InvalidInput);
    CHECK_THROWS_AS(cv(std::numeric_limits<double>::infinity(), 0), InvalidInput);
    CHECK_THROWS_AS(cv(std::nan(""), 0), InvalidInput);
    CHECK_THROWS_AS(CostVector(ObjectiveList{ Objective::tuple_loss }, { 1.5 }), InvalidInput);
    CHECK_THROWS_AS(CostVector(TWO, { 1.0 }), StructuralError);
    CHECK(cv(1, 2) == cv(1, 2));
    CHECK(cv(1, 2) != cv(1, 3));
    CHECK(lex_less(cv(1, 3), cv(2, 0)));
    CHECK(lex_less(cv(1, 2), cv(1, 3)));
    CHECK_FALSE(lex_less(cv(1, 2), cv(1, 2)));
}

TEST_CASE("weight and bound vectors")
{
    CHECK_THROWS_AS(WeightVector(TWO, { 0.0, 0.0 }), InvalidInput);
    CHECK_THROWS_AS(WeightVector(TWO, { -1.0, 2.0 }), InvalidInput);
    CHECK(WeightVector::uniform(TWO)[1] == 1);

    BoundVector b(TWO);
    CHECK_FALSE(b.any_bounded());
    CHECK(b[0] == std::numeric_limits<double>::infinity());
    b.set(1, 4);
    CHECK(b.any_bounded());
    CHECK(b.get(1) == 4.0);
    CHECK_FALSE(b.get(0));
    CHECK_THROWS_AS(b.set(0, -1), InvalidInput);
}

TEST_CASE("precision")
{
    CHECK(Precision().value() == 1);
    CHECK(Precision(1.5).value() == 1.5);
    CHECK_THROWS_WITH_AS(Precision(0.9), "alpha must be ≥ 1", InvalidInput);
    CHECK_THROWS_AS(Precision(std::nan("")), InvalidInput);
}


/*======================================================================================================================
 * Relations
 *====================================================================================================================*/

TEST_CASE("compare")
{
    CHECK(compare(cv(1, 2), cv(1, 3), CompareMode::dominates()));
    CHECK_FALSE(compare(cv(1, 2), cv(1, 2), CompareMode::strict()));
    CHECK(compare(cv(1, 2), cv(1, 3), CompareMode::strict()));
    CHECK(compare(cv(2, 2), cv(1.5, 1.5), CompareMode::approx(Precision(1.5))));
    CHECK_FALSE(compare(cv(2, 2), cv(1.5, 1.5), CompareMode::approx(Precision(1.3))));
    CHECK_THROWS_AS(compare(cv(1, 2), CostVector(ObjectiveList{ Objective::cores }, { 1.0 }), CompareMode::dominates()),
                    StructuralError);
}

TEST_CASE("weighted cost")
{
    const WeightVector w(TWO, { 1.0, 2.0 });
    CHECK(weighted_cost(cv(7, 3), w) == 13);
    CHECK(weighted_cost(cv(6, 5), w) == 16);
    CHECK(weighted_cost(cv(0, 0), w) == 0);
}

TEST_CASE("respects bounds")
{
    const BoundVector b(TWO, std::vector<std::optional<double>>{ 2.0, 3.0 });
    CHECK_FALSE(respects_bounds(cv(3, 1), b));
    CHECK(respects_bounds(cv(3, 1), b, Precision(1.5)));
    CHECK(respects_bounds(cv(5, 5), BoundVector::unbounded(TWO)));
    CHECK(respects_bounds(cv(5, 5), BoundVector::unbounded(TWO), Precision(3)));
}

TEST_CASE("relative cost")
{
    const WeightVector w(TWO, { 1.0, 2.0 });
    const BoundVector none = BoundVector::unbounded(TWO);
    CHECK(relative_cost(cv(7, 3), w, none, cv(7, 3), true).value == 1.0);
    CHECK(relative_cost(cv(6, 5), w, none, cv(7, 3), true).value == doctest::Approx(1.2308).epsilon(1e-4));
    CHECK(relative_cost(cv(6, 5), w, none, cv(7, 3), true).value == 16.0 / 13.0);

    const BoundVector b(TWO, std::vector<std::optional<double>>{ 6.5, std::nullopt });
    CHECK(relative_cost(cv(7, 3), w, b, cv(6, 5), true).is_infinite());
    CHECK(relative_cost(cv(7, 3), w, b, cv(6, 5), false).value == 13.0 / 16.0);

    const auto zero = relative_cost(cv(0, 0), w, none, cv(0, 0), true);
    CHECK(zero.value == 1.0);
    CHECK_FALSE(zero.degenerate);
    const auto degenerate = relative_cost(cv(1, 0), w, none, cv(0, 0), true);
    CHECK(degenerate.is_infinite());
    CHECK(degenerate.degenerate);
}

TEST_CASE("dominance is a partial order")
{
    std::mt19937_64 rng(1);
    for (int trial = 0; trial != 2000; ++trial) {
        const auto a = random_vector(rng), b = random_vector(rng), c = random_vector(rng);
        CHECK(dominates(a, a));
        if (dominates(a, b) and dominates(b, a)) CHECK(a == b);
        if (dominates(a, b) and dominates(b, c)) CHECK(dominates(a, c));
    }
}

TEST_CASE("approximate dominance properties")
{
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> alpha_dist(1, 3), weight(0, 1);
    for (int trial = 0; trial != 2000; ++trial) {
        const auto a = random_vector(rng), b = random_vector(rng);
        CHECK(approx_dominates(a, b, Precision()) == dominates(a, b));
        const double a1 = alpha_dist(rng), a2 = a1 + alpha_dist(rng) - 1;
        if (approx_dominates(a, b, Precision(a1))) CHECK(approx_dominates(a, b, Precision(a2)));

        const WeightVector w(TWO, { weight(rng), weight(rng) + 1e-3 });
        if (dominates(a, b)) CHECK(weighted_cost(a, w) <= weighted_cost(b, w));
        if (approx_dominates(a, b, Precision(a1)))
            CHECK(weighted_cost(a, w) <= a1 * weighted_cost(b, w) * (1 + 1e-12));
    }
}
