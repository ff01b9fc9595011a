#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <functional>
#include <moqo/cost.hpp>
#include <moqo/error.hpp>
#include <moqo/optimizer.hpp>
#include <moqo/plan.hpp>
#include <string>
#include <vector>


namespace moqo {

using BigInt = boost::multiprecision::cpp_int;

/** Number of bushy plans joining `n` tables when each of `j` operator configurations applies to every scan and every
 * join: j^(2n−1)·(2(n−1))!/(n−1)!.  Throws `InvalidInput` for j = 0 or n = 0. */
BigInt count_bushy(unsigned j, unsigned n);

/** Number of plans `enumerate_all_plans` visits for `space`, honouring operator applicability. */
BigInt count_plans(const SearchSpace &space);

/** Largest query the brute-force enumeration accepts by default. */
inline constexpr std::size_t DEFAULT_ENUMERATION_CAP = 6;

/** Refusal to enumerate a query above the cap.  Carries the number of plans enumeration would have produced. */
struct EnumerationCapExceeded : InvalidInput
{
    BigInt plan_count;
    std::size_t tables;

    EnumerationCapExceeded(std::size_t tables, std::size_t cap, BigInt plan_count);
};

/** Receives one complete plan.  The plan's operands, if any, are registered in `subplans`; the plan itself is not. */
using PlanVisitor = std::function<void(const PlanRecord &plan, const PlanRegistry &subplans)>;

/** Visits every bushy plan over every operator assignment exactly once.  Plans of proper subsets are materialized;
 * plans of the whole query are streamed.  Returns the number of plans visited.  Throws `EnumerationCapExceeded` if
 * the query has more than `cap` tables. */
std::uint64_t enumerate_all_plans(const SearchSpace &space, const PlanVisitor &visit,
                                  std::size_t cap = DEFAULT_ENUMERATION_CAP);

/** The exact Pareto frontier of a query by exhaustive enumeration. */
struct TrueFrontier
{
    std::vector<CostVector> costs; ///< mutually non-dominated, distinct, in lexicographic order
    std::vector<std::string> plans; ///< one witness plan per cost vector
    std::uint64_t plans_enumerated = 0;
};

TrueFrontier true_pareto(const SearchSpace &space, std::size_t cap = DEFAULT_ENUMERATION_CAP);

/** Optimum of a bounded-weighted instance: least weighted cost among the plans respecting the bounds, or among all
 * plans if none does. */
struct OracleOptimum
{
    CostVector cost;
    double weighted_cost;
    bool feasible_exists;
    std::string plan;
};

/** Computed over `frontier`, which must be the true Pareto frontier of the instance's query. */
OracleOptimum constrained_optimum(const TrueFrontier &frontier, const WeightVector &weights,
                                  const BoundVector &bounds);
OracleOptimum constrained_optimum(const ProblemInstance &instance, std::size_t cap = DEFAULT_ENUMERATION_CAP);

/** Per-objective minimum over all plans of the frontier's query, in the frontier's objective order. */
std::vector<double> objective_minima(const TrueFrontier &frontier);

struct GuaranteeCheck
{
    double rho; ///< relative cost of the reported plan, possibly +∞
    bool degenerate; ///< the optimum has weighted cost zero while the plan does not
    bool pass; ///< ρ ≤ α_U, with relative tolerance 10⁻⁹
    OracleOptimum optimum;
};

/** Relative cost tolerance of `check_guarantee`. */
inline constexpr double GUARANTEE_TOLERANCE = 1e-9;

GuaranteeCheck check_guarantee(const OptimizerReport &report, const ProblemInstance &instance,
                               std::size_t cap = DEFAULT_ENUMERATION_CAP);
GuaranteeCheck check_guarantee(const CostVector &chosen, const ProblemInstance &instance, const OracleOptimum &optimum);

}
