#pragma once

#include <chrono>
#include <cstdint>
#include <moqo/catalog.hpp>
#include <moqo/cost.hpp>
#include <moqo/pareto_set.hpp>
#include <moqo/plan.hpp>
#include <optional>
#include <string>
#include <string_view>
#include <vector>


namespace moqo {

/*======================================================================================================================
 * Problem description
 *====================================================================================================================*/

/** The plan space of one query: which plans exist and what they cost. */
struct SearchSpace
{
    JoinGraph graph;
    ObjectiveList objectives;
    OperatorSpace operators = OperatorSpace::standard();
    CostModel model;
    bool cross_products = true; ///< whether splits without a connecting predicate are enumerated

    SearchSpace(JoinGraph graph, ObjectiveList objectives) : graph(std::move(graph)), objectives(objectives) { }
    SearchSpace(JoinGraph graph, ObjectiveList objectives, OperatorSpace operators, CostModel model = {})
        : graph(std::move(graph)), objectives(objectives), operators(std::move(operators)), model(model) { }

    std::size_t num_tables() const { return graph.num_tables(); }
};

/** A bounded-weighted MOQO instance ⟨Q, W, B⟩ with user precision α_U.  Weighted MOQO has all bounds UNBOUNDED. */
struct ProblemInstance
{
    SearchSpace space;
    WeightVector weights;
    BoundVector bounds;
    Precision alpha_user;

    /** Throws `StructuralError` if weights or bounds use a different objective list than the search space. */
    ProblemInstance(SearchSpace space, WeightVector weights, BoundVector bounds, Precision alpha_user = {});
};

/** A point in time after which optimization degrades; default-constructed deadlines never expire. */
class Deadline
{
    using clock = std::chrono::steady_clock;
    std::optional<clock::time_point> at_;

    public:
    Deadline() = default;
    static Deadline never() { return {}; }
    static Deadline after(std::chrono::nanoseconds budget) {
        Deadline d;
        d.at_ = clock::now() + budget;
        return d;
    }

    bool is_set() const { return at_.has_value(); }
    bool expired() const { return at_ and clock::now() >= *at_; }
};


/*======================================================================================================================
 * Pareto plan generation
 *====================================================================================================================*/

/** Plan sets for every table set of a query, plus the registry their members live in. */
struct ParetoPlans
{
    PlanRegistry registry;
    std::vector<PlanSet> sets; ///< indexed by table-set bits
    bool timed_out = false;
    std::uint64_t candidates = 0; ///< plans generated before pruning

    const PlanSet & operator[](TableSet s) const { return sets[s.bits()]; }
    /** Stored plans summed over all table sets. */
    std::size_t total_stored() const;
    /** Largest plan set over all table sets. */
    std::size_t max_stored() const;
};

/** Bottom-up dynamic programming over table sets of increasing size.  Singletons receive every access path; every
 * other set combines the plans of all ordered splits (q₁, q₂) with every join operator, pruning with `mode`.
 *
 * Once `deadline` expires, every table set not yet completed keeps only the single generated candidate of least
 * weighted cost under `degrade_weights` (uniform weights if null) and `timed_out` is set. */
ParetoPlans find_pareto_plans(const SearchSpace &space, PruneMode mode, Deadline deadline = {},
                              const WeightVector *degrade_weights = nullptr);

/** Among the members respecting `bounds`, the one of least weighted cost; if none respects them, the one of least
 * weighted cost overall.  Ties go to the lexicographically smaller cost vector, then the smaller plan id.  Throws
 * `StructuralError` for an empty set. */
PlanId select_best(const PlanSet &frontier, const WeightVector &weights, const BoundVector &bounds);


/*======================================================================================================================
 * Algorithms
 *====================================================================================================================*/

enum class Algorithm { EXA, RTA, IRA };

std::string_view algorithm_name(Algorithm a);
std::optional<Algorithm> parse_algorithm(std::string_view name);

struct FrontierEntry
{
    PlanId id;
    CostVector cost;
    std::string plan;
};

struct IterationRecord
{
    unsigned iteration;
    double alpha;          ///< approximation precision of the generated plan set
    double internal_alpha; ///< precision of the insertion test
    std::size_t plans_total;
    std::size_t plans_max_set;
    std::size_t frontier_size;
    double wall_ms;
};

enum class RunStatus
{
    OK,
    ITERATION_CAP_REACHED, ///< the IRA did not meet its stopping condition within the iteration cap
};

struct OptimizerReport
{
    Algorithm algorithm;
    ObjectiveList objectives;

    PlanId chosen_id = NO_PLAN;
    std::string chosen_plan;
    CostVector chosen_cost;
    double chosen_weighted_cost = 0;

    std::vector<FrontierEntry> frontier; ///< the plan set for the whole query
    std::vector<std::size_t> plans_per_set; ///< stored plans, indexed by table-set bits
    std::size_t plans_total = 0;
    std::size_t plans_max_set = 0;
    std::uint64_t candidates = 0;

    double wall_ms = 0;
    std::vector<IterationRecord> iterations;
    bool timed_out = false;
    RunStatus status = RunStatus::OK;

    bool ok() const { return status == RunStatus::OK; }
};

struct OptimizerOptions
{
    Deadline deadline;
    unsigned max_iterations = 64; ///< IRA iteration cap
};

/** Placeholders of the iterative optimization template.  An algorithm chooses, per iteration, the precision of the
 * approximate Pareto set to generate (X1), the insertion test used while generating it (X3), and whether the selected
 * plan is good enough to stop (X2). */
class RefinementPolicy
{
    public:
    virtual ~RefinementPolicy() = default;

    virtual Algorithm algorithm() const = 0;
    /** X1: target precision α of the plan set generated in iteration `i` ≥ 1. */
    virtual double precision(unsigned i) const = 0;
    /** X3: the insertion test that yields an α-approximate Pareto set for a query with `n` tables. */
    virtual PruneMode insertion_test(double alpha, std::size_t n) const;
    /** X2: whether `chosen` may be returned. */
    virtual bool done(const PlanSet &frontier, PlanId chosen, double alpha) const = 0;
};

/** Runs the template loop until the policy's termination test passes, the iteration cap is hit, or the deadline
 * expires. */
OptimizerReport optimize(const ProblemInstance &instance, const RefinementPolicy &policy,
                         const OptimizerOptions &options = {});

/** Exact algorithm: Pareto set under exact pruning, then the best plan. */
OptimizerReport exa_optimize(const ProblemInstance &instance, const OptimizerOptions &options = {});

/** Representative-tradeoffs algorithm: one pass with internal precision α_U^(1/n).  Throws `ContractError` if any
 * bound is finite. */
OptimizerReport rta_optimize(const ProblemInstance &instance, const OptimizerOptions &options = {});

/** Iterative-refinement algorithm for bounded-weighted instances.  Throws `ContractError` for a single objective. */
OptimizerReport ira_optimize(const ProblemInstance &instance, const OptimizerOptions &options = {});

OptimizerReport run_algorithm(Algorithm algorithm, const ProblemInstance &instance,
                              const OptimizerOptions &options = {});

/** α_U^(2^(−i/(3l−3))): precision of the IRA's i-th iteration.  Throws `ContractError` for l = 1 and i = 0. */
Precision ira_precision(unsigned i, Precision alpha_user, std::size_t l);

/** Termination test of the IRA, given the plan set of the last iteration with precision α and its best plan.  Continues
 * while some plan within the relaxed bounds α·B has C_W/α < C_W(chosen)/α_U, or while the chosen plan violates B
 * although some plan respects α·B. */
bool ira_should_stop(const PlanSet &frontier, const CostVector &chosen, const WeightVector &weights,
                     const BoundVector &bounds, double alpha, Precision alpha_user);

}
