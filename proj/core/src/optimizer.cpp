#include <moqo/optimizer.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <moqo/error.hpp>


using namespace moqo;


ProblemInstance::ProblemInstance(SearchSpace space_, WeightVector weights_, BoundVector bounds_, Precision alpha)
    : space(std::move(space_)), weights(weights_), bounds(bounds_), alpha_user(alpha)
{
    if (weights.objectives() != space.objectives)
        throw StructuralError("weights use a different objective list than the search space");
    if (bounds.objectives() != space.objectives)
        throw StructuralError("bounds use a different objective list than the search space");
}


/*======================================================================================================================
 * Pareto plan generation
 *====================================================================================================================*/

std::size_t ParetoPlans::total_stored() const
{
    std::size_t n = 0;
    for (auto &s : sets) n += s.size();
    return n;
}

std::size_t ParetoPlans::max_stored() const
{
    std::size_t n = 0;
    for (auto &s : sets) n = std::max(n, s.size());
    return n;
}

namespace {

constexpr std::uint64_t DEADLINE_CHECK_INTERVAL = 1024;

/** Builds the plan set of one table set.  In pruning mode, returns false as soon as the deadline expires; in degraded
 * mode, keeps only the candidate of least weighted cost. */
class SetBuilder
{
    const SearchSpace &space_;
    PruneMode mode_;
    Deadline deadline_;
    const double *weights_;
    ParetoPlans &plans_;
    const std::size_t l_;

    bool degraded_ = false;
    PlanSet *target_ = nullptr;

    /* Best candidate so far in degraded mode. */
    bool have_best_ = false;
    double best_weighted_ = 0;
    std::array<double, NUM_OBJECTIVES> best_cost_{};
    PlanRecord best_;

    double weighted(const double *c) const {
        double sum = 0;
        for (std::size_t i = 0; i != l_; ++i) sum += c[i] * weights_[i];
        return sum;
    }

    bool better_than_best(const double *c) const {
        if (not have_best_) return true;
        const double w = weighted(c);
        if (w != best_weighted_) return w < best_weighted_;
        return std::lexicographical_compare(c, c + l_, best_cost_.data(), best_cost_.data() + l_);
    }

    /** Offers one candidate.  `make` produces its record on demand.  Returns false if the deadline expired. */
    template<typename Make>
    bool offer(const double *cost, Make &&make) {
        const std::uint64_t count = ++plans_.candidates;
        if (degraded_) {
            if (better_than_best(cost)) {
                have_best_ = true;
                best_weighted_ = weighted(cost);
                std::copy(cost, cost + l_, best_cost_.data());
                best_ = make();
            }
            return true;
        }
        if (target_->accepts(cost, mode_)) {
            const PlanId id = plans_.registry.add(make());
            target_->insert(id, cost);
        }
        return count % DEADLINE_CHECK_INTERVAL != 0 or not deadline_.expired();
    }

    bool build_scans(TableSet s) {
        const std::size_t t = s.lowest();
        for (const ScanOperator &op : space_.operators.scans) {
            PlanRecord p = scan_plan(space_.graph, space_.model, space_.objectives, t, op);
            if (not offer(p.cost.data(), [&] { return p; })) return false;
        }
        return true;
    }

    bool build_joins(TableSet s) {
        const JoinGraph &graph = space_.graph;
        const double card_s = cost_cardinality(graph, s);
        std::array<double, NUM_OBJECTIVES> buf{};

        /* Every ordered split (q1, q2) with q1 ⊎ q2 = s; both q1 and q2 non-empty. */
        const std::uint32_t bits = s.bits();
        for (std::uint32_t sub = (bits - 1) & bits; sub != 0; sub = (sub - 1) & bits) {
            const TableSet q1(sub), q2 = s - q1;
            if (not space_.cross_products and not graph.connected(q1, q2)) continue;
            const PlanSet &left_set = plans_.sets[q1.bits()];
            const PlanSet &right_set = plans_.sets[q2.bits()];
            const double card_l = cost_cardinality(graph, q1), card_r = cost_cardinality(graph, q2);
            const double selectivity = graph.crossing_selectivity(q1, q2);

            for (const JoinOperator &op : space_.operators.joins) {
                const JoinTerms terms = space_.model.join_terms(op, card_l, card_r, card_s);
                for (std::size_t ri = 0; ri != right_set.size(); ++ri) {
                    const PlanId right_id = right_set.id(ri);
                    if (not join_applicable(graph, op, plans_.registry[right_id])) continue;
                    /* Registering plans may reallocate the registry; keep values, not references. */
                    const double right_card = plans_.registry[right_id].out_card;
                    for (std::size_t li = 0; li != left_set.size(); ++li) {
                        space_.model.combine_cost(space_.objectives, terms, left_set.cost_data(li),
                                                  right_set.cost_data(ri), buf.data());
                        const PlanId left_id = left_set.id(li);
                        const bool ok = offer(buf.data(), [&] {
                            PlanRecord p;
                            p.op = op;
                            p.left = left_id;
                            p.right = right_id;
                            p.tables = s;
                            p.out_card = join_cardinality(plans_.registry[left_id].out_card, right_card, selectivity);
                            p.cost = CostVector::unchecked(space_.objectives, buf.data());
                            return p;
                        });
                        if (not ok) return false;
                    }
                }
            }
        }
        return true;
    }

    public:
    /** Reduces the completed set `s` to its candidate of least weighted cost. */
    void collapse(TableSet s) {
        PlanSet &set = plans_.sets[s.bits()];
        if (set.size() <= 1) return;
        have_best_ = false;
        PlanId best_id = set.id(0);
        for (std::size_t i = 0; i != set.size(); ++i) {
            const double *c = set.cost_data(i);
            if (better_than_best(c)) {
                have_best_ = true;
                best_weighted_ = weighted(c);
                std::copy(c, c + l_, best_cost_.data());
                best_id = set.id(i);
            }
        }
        set.assign_single(best_id, best_cost_.data());
    }

    SetBuilder(const SearchSpace &space, PruneMode mode, Deadline deadline, const double *weights,
               ParetoPlans &plans)
        : space_(space), mode_(mode), deadline_(deadline), weights_(weights), plans_(plans),
          l_(space.objectives.size()) { }

    /** Fills the plan set of `s`.  Returns false if the deadline expired before it was complete. */
    bool build(TableSet s, bool degraded) {
        degraded_ = degraded;
        have_best_ = false;
        target_ = &plans_.sets[s.bits()];
        target_->clear();
        const bool complete = s.size() == 1 ? build_scans(s) : build_joins(s);
        if (degraded_ and have_best_) {
            const PlanId id = plans_.registry.add(best_);
            target_->assign_single(id, best_cost_.data());
        }
        return complete;
    }
};

}

ParetoPlans moqo::find_pareto_plans(const SearchSpace &space, PruneMode mode, Deadline deadline,
                                    const WeightVector *degrade_weights)
{
    const std::size_t n = space.num_tables();
    const std::size_t num_sets = std::size_t(1) << n;

    const WeightVector uniform = WeightVector::uniform(space.objectives);
    const WeightVector &weights = degrade_weights ? *degrade_weights : uniform;
    if (weights.objectives() != space.objectives)
        throw StructuralError("degrade weights use a different objective list than the search space");

    ParetoPlans plans;
    plans.sets.reserve(num_sets);
    for (std::uint32_t bits = 0; bits != num_sets; ++bits) plans.sets.emplace_back(TableSet(bits), space.objectives);

    /* Table sets by increasing cardinality, then by bit pattern. */
    std::vector<TableSet> order;
    order.reserve(num_sets - 1);
    for (std::uint32_t bits = 1; bits != num_sets; ++bits) order.emplace_back(bits);
    std::stable_sort(order.begin(), order.end(), [](TableSet a, TableSet b) { return a.size() < b.size(); });

    SetBuilder builder(space, mode, deadline, weights.data(), plans);
    for (std::size_t k = 0; k != order.size(); ++k) {
        const TableSet s = order[k];
        if (not plans.timed_out) {
            if (not deadline.expired() and builder.build(s, false)) continue;
            /* Past the deadline every set holds at most one plan. */
            plans.timed_out = true;
            for (std::size_t done = 0; done != k; ++done) builder.collapse(order[done]);
        }
        builder.build(s, true);
    }
    return plans;
}

PlanId moqo::select_best(const PlanSet &frontier, const WeightVector &weights, const BoundVector &bounds)
{
    if (frontier.empty()) throw StructuralError("cannot select from an empty plan set");

    std::size_t best = 0;
    bool best_feasible = false;
    double best_weighted = 0;
    for (std::size_t i = 0; i != frontier.size(); ++i) {
        const CostVector c = frontier.cost(i);
        const bool feasible = respects_bounds(c, bounds);
        const double w = weighted_cost(c, weights);
        bool take;
        if (i == 0 or feasible != best_feasible) {
            take = i == 0 or feasible;
        } else if (w != best_weighted) {
            take = w < best_weighted;
        } else {
            const CostVector b = frontier.cost(best);
            take = lex_less(c, b) or (not lex_less(b, c) and frontier.id(i) < frontier.id(best));
        }
        if (take) {
            best = i;
            best_feasible = feasible;
            best_weighted = w;
        }
    }
    return frontier.id(best);
}


/*======================================================================================================================
 * Algorithms
 *====================================================================================================================*/

std::string_view moqo::algorithm_name(Algorithm a)
{
    switch (a) {
        case Algorithm::EXA: return "exa";
        case Algorithm::RTA: return "rta";
        case Algorithm::IRA: return "ira";
    }
    return "?";
}

std::optional<Algorithm> moqo::parse_algorithm(std::string_view name)
{
    for (Algorithm a : { Algorithm::EXA, Algorithm::RTA, Algorithm::IRA })
        if (algorithm_name(a) == name) return a;
    return std::nullopt;
}

PruneMode RefinementPolicy::insertion_test(double alpha, std::size_t n) const
{
    if (alpha == 1.0) return PruneMode::exact();
    return PruneMode::approx(Precision(std::pow(alpha, 1.0 / double(n))));
}

namespace {

double elapsed_ms(std::chrono::steady_clock::time_point since)
{
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since).count();
}

std::size_t frontier_index(const PlanSet &frontier, PlanId id)
{
    for (std::size_t i = 0; i != frontier.size(); ++i)
        if (frontier.id(i) == id) return i;
    throw StructuralError("chosen plan is not a member of the plan set");
}

class ExaPolicy : public RefinementPolicy
{
    public:
    Algorithm algorithm() const override { return Algorithm::EXA; }
    double precision(unsigned) const override { return 1.0; }
    bool done(const PlanSet&, PlanId, double) const override { return true; }
};

class RtaPolicy : public RefinementPolicy
{
    double alpha_user_;

    public:
    explicit RtaPolicy(Precision alpha_user) : alpha_user_(alpha_user.value()) { }
    Algorithm algorithm() const override { return Algorithm::RTA; }
    double precision(unsigned) const override { return alpha_user_; }
    bool done(const PlanSet&, PlanId, double) const override { return true; }
};

class IraPolicy : public RefinementPolicy
{
    const ProblemInstance &instance_;

    public:
    explicit IraPolicy(const ProblemInstance &instance) : instance_(instance) { }
    Algorithm algorithm() const override { return Algorithm::IRA; }
    double precision(unsigned i) const override {
        return ira_precision(i, instance_.alpha_user, instance_.space.objectives.size()).value();
    }
    bool done(const PlanSet &frontier, PlanId chosen, double alpha) const override {
        return ira_should_stop(frontier, frontier.cost(frontier_index(frontier, chosen)), instance_.weights,
                               instance_.bounds, alpha, instance_.alpha_user);
    }
};

}

OptimizerReport moqo::optimize(const ProblemInstance &instance, const RefinementPolicy &policy,
                               const OptimizerOptions &options)
{
    const auto start = std::chrono::steady_clock::now();
    const SearchSpace &space = instance.space;
    const std::size_t n = space.num_tables();

    OptimizerReport report;
    report.algorithm = policy.algorithm();
    report.objectives = space.objectives;

    for (unsigned i = 1;; ++i) {
        const auto iteration_start = std::chrono::steady_clock::now();
        const double alpha = policy.precision(i);
        const PruneMode mode = policy.insertion_test(alpha, n);
        ParetoPlans plans = find_pareto_plans(space, mode, options.deadline, &instance.weights);
        const PlanSet &frontier = plans[space.graph.all_tables()];
        const PlanId chosen = select_best(frontier, instance.weights, instance.bounds);

        const bool stop = plans.timed_out or policy.done(frontier, chosen, alpha);
        report.iterations.push_back({ i, alpha, mode.alpha(), plans.total_stored(), plans.max_stored(),
                                      frontier.size(), elapsed_ms(iteration_start) });

        if (stop or i >= options.max_iterations) {
            const PlanRecord &record = plans.registry[chosen];
            report.chosen_id = chosen;
            report.chosen_plan = serialize_plan(chosen, plans.registry, space.graph);
            report.chosen_cost = record.cost;
            report.chosen_weighted_cost = weighted_cost(record.cost, instance.weights);
            report.frontier.reserve(frontier.size());
            for (std::size_t k = 0; k != frontier.size(); ++k)
                report.frontier.push_back(
                    { frontier.id(k), frontier.cost(k), serialize_plan(frontier.id(k), plans.registry, space.graph) });
            report.plans_per_set.reserve(plans.sets.size());
            for (auto &s : plans.sets) report.plans_per_set.push_back(s.size());
            report.plans_total = plans.total_stored();
            report.plans_max_set = plans.max_stored();
            report.candidates = plans.candidates;
            report.timed_out = plans.timed_out;
            if (not stop) report.status = RunStatus::ITERATION_CAP_REACHED;
            break;
        }
    }
    report.wall_ms = elapsed_ms(start);
    return report;
}

OptimizerReport moqo::exa_optimize(const ProblemInstance &instance, const OptimizerOptions &options)
{
    return optimize(instance, ExaPolicy(), options);
}

OptimizerReport moqo::rta_optimize(const ProblemInstance &instance, const OptimizerOptions &options)
{
    if (instance.bounds.any_bounded())
        throw ContractError("RTA solves weighted MOQO only; use IRA for instances with bounds");
    return optimize(instance, RtaPolicy(instance.alpha_user), options);
}

OptimizerReport moqo::ira_optimize(const ProblemInstance &instance, const OptimizerOptions &options)
{
    if (instance.space.objectives.size() < 2)
        throw ContractError("IRA precision schedule is undefined for a single objective; use EXA or RTA");
    return optimize(instance, IraPolicy(instance), options);
}

OptimizerReport moqo::run_algorithm(Algorithm algorithm, const ProblemInstance &instance,
                                    const OptimizerOptions &options)
{
    switch (algorithm) {
        case Algorithm::EXA: return exa_optimize(instance, options);
        case Algorithm::RTA: return rta_optimize(instance, options);
        case Algorithm::IRA: return ira_optimize(instance, options);
    }
    throw StructuralError("unknown algorithm");
}

Precision moqo::ira_precision(unsigned i, Precision alpha_user, std::size_t l)
{
    if (l < 2) throw ContractError("IRA precision schedule is undefined for a single objective");
    if (i == 0) throw ContractError("IRA iterations are numbered from 1");
    const double exponent = std::exp2(-double(i) / (3.0 * double(l) - 3.0));
    return Precision(std::pow(alpha_user.value(), exponent));
}

bool moqo::ira_should_stop(const PlanSet &frontier, const CostVector &chosen, const WeightVector &weights,
                           const BoundVector &bounds, double alpha, Precision alpha_user)
{
    const Precision relax(alpha);
    const double threshold = weighted_cost(chosen, weights) / alpha_user.value();
    bool relaxed_feasible = false;
    for (std::size_t i = 0; i != frontier.size(); ++i) {
        const CostVector c = frontier.cost(i);
        if (not respects_bounds(c, bounds, relax)) continue;
        relaxed_feasible = true;
        if (weighted_cost(c, weights) / alpha < threshold) return false;
    }
    return respects_bounds(chosen, bounds) or not relaxed_feasible;
}
