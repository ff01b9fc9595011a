#include <moqo/oracle.hpp>

#include <algorithm>


using namespace moqo;


BigInt moqo::count_bushy(unsigned j, unsigned n)
{
    if (j == 0 or n == 0) throw InvalidInput("plan counts need at least one operator and one table");
    BigInt count = boost::multiprecision::pow(BigInt(j), 2 * n - 1);
    for (unsigned k = n; k <= 2 * (n - 1); ++k) count *= k; // (2(n−1))!/(n−1)!
    return count;
}

namespace {

/** Plans per table set, split by whether they are an access path on an indexed table (valid right operands of an
 * index nested-loop join). */
struct PlanCounts
{
    BigInt all;
    BigInt indexed_scans;
};

}

BigInt moqo::count_plans(const SearchSpace &space)
{
    const std::size_t n = space.num_tables();
    const std::uint32_t num_sets = std::uint32_t(1) << n;
    std::vector<PlanCounts> counts(num_sets);

    std::size_t index_joins = 0;
    for (auto &op : space.operators.joins) index_joins += op.kind == JoinOperator::INDEX_NESTED_LOOP;
    const std::size_t other_joins = space.operators.joins.size() - index_joins;

    for (std::uint32_t bits = 1; bits != num_sets; ++bits) {
        const TableSet s(bits);
        PlanCounts &c = counts[bits];
        if (s.size() == 1) {
            c.all = space.operators.scans.size();
            if (space.graph.has_index(s.lowest())) c.indexed_scans = c.all;
            continue;
        }
        for (std::uint32_t sub = (bits - 1) & bits; sub != 0; sub = (sub - 1) & bits) {
            const TableSet q1(sub), q2 = s - q1;
            if (not space.cross_products and not space.graph.connected(q1, q2)) continue;
            c.all += counts[q1.bits()].all * counts[q2.bits()].all * other_joins;
            c.all += counts[q1.bits()].all * counts[q2.bits()].indexed_scans * index_joins;
        }
    }
    return counts[num_sets - 1].all;
}

EnumerationCapExceeded::EnumerationCapExceeded(std::size_t tables_, std::size_t cap, BigInt plan_count_)
    : InvalidInput("refusing to enumerate " + plan_count_.str() + " plans: query has " + std::to_string(tables_) +
                   " tables, enumeration cap is " + std::to_string(cap)),
      plan_count(std::move(plan_count_)), tables(tables_)
{ }

std::uint64_t moqo::enumerate_all_plans(const SearchSpace &space, const PlanVisitor &visit, std::size_t cap)
{
    const std::size_t n = space.num_tables();
    if (n > cap) throw EnumerationCapExceeded(n, cap, count_plans(space));

    const JoinGraph &graph = space.graph;
    const TableSet all = graph.all_tables();
    const std::uint32_t num_sets = std::uint32_t(1) << n;

    PlanRegistry registry;
    std::vector<std::vector<PlanId>> members(num_sets);
    std::uint64_t visited = 0;

    auto emit = [&](TableSet s, PlanRecord record) {
        if (s == all) {
            ++visited;
            visit(record, registry);
        } else {
            members[s.bits()].push_back(registry.add(std::move(record)));
        }
    };

    /* Subsets in increasing numeric order: every proper subset of s precedes s. */
    for (std::uint32_t bits = 1; bits != num_sets; ++bits) {
        const TableSet s(bits);
        if (s.size() == 1) {
            for (auto &op : space.operators.scans)
                emit(s, scan_plan(graph, space.model, space.objectives, s.lowest(), op));
            continue;
        }
        for (std::uint32_t sub = (bits - 1) & bits; sub != 0; sub = (sub - 1) & bits) {
            const TableSet q1(sub), q2 = s - q1;
            if (not space.cross_products and not graph.connected(q1, q2)) continue;
            for (auto &op : space.operators.joins)
                for (PlanId l : members[q1.bits()])
                    for (PlanId r : members[q2.bits()])
                        if (auto joined = combine_plans(graph, space.model, op, registry[l], registry[r]))
                            emit(s, std::move(*joined));
        }
    }
    return visited;
}

namespace {

/** Running set of mutually non-dominated cost vectors with one witness each. */
class NondominatedFilter
{
    std::vector<CostVector> costs_;
    std::vector<std::string> plans_;

    static bool leq(const CostVector &a, const CostVector &b) {
        for (std::size_t i = 0; i != a.size(); ++i)
            if (a[i] > b[i]) return false;
        return true;
    }

    public:
    /** Whether a vector with cost `c` would be kept. */
    bool admits(const CostVector &c) const {
        return std::none_of(costs_.begin(), costs_.end(), [&](const CostVector &m) { return leq(m, c); });
    }

    void add(const CostVector &c, std::string plan) {
        std::size_t kept = 0;
        for (std::size_t i = 0; i != costs_.size(); ++i) {
            if (leq(c, costs_[i])) continue;
            if (kept != i) {
                costs_[kept] = costs_[i];
                plans_[kept] = std::move(plans_[i]);
            }
            ++kept;
        }
        costs_.resize(kept);
        plans_.resize(kept);
        costs_.push_back(c);
        plans_.push_back(std::move(plan));
    }

    TrueFrontier finish(std::uint64_t enumerated) && {
        std::vector<std::size_t> order(costs_.size());
        for (std::size_t i = 0; i != order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](auto a, auto b) { return lex_less(costs_[a], costs_[b]); });
        TrueFrontier f;
        f.plans_enumerated = enumerated;
        for (auto i : order) {
            f.costs.push_back(costs_[i]);
            f.plans.push_back(std::move(plans_[i]));
        }
        return f;
    }
};

}

TrueFrontier moqo::true_pareto(const SearchSpace &space, std::size_t cap)
{
    NondominatedFilter filter;
    const auto enumerated = enumerate_all_plans(space, [&](const PlanRecord &p, const PlanRegistry &subplans) {
        if (filter.admits(p.cost)) filter.add(p.cost, serialize_plan(p, subplans, space.graph));
    }, cap);
    return std::move(filter).finish(enumerated);
}

OracleOptimum moqo::constrained_optimum(const TrueFrontier &frontier, const WeightVector &weights,
                                        const BoundVector &bounds)
{
    if (frontier.costs.empty()) throw StructuralError("empty frontier has no optimum");
    /* A plan dominating a feasible plan is feasible and no more expensive, so the frontier holds the optimum. */
    std::optional<std::size_t> best;
    bool best_feasible = false;
    double best_weighted = 0;
    for (std::size_t i = 0; i != frontier.costs.size(); ++i) {
        const bool feasible = respects_bounds(frontier.costs[i], bounds);
        const double w = weighted_cost(frontier.costs[i], weights);
        if (not best or (feasible and not best_feasible) or (feasible == best_feasible and w < best_weighted)) {
            best = i;
            best_feasible = feasible;
            best_weighted = w;
        }
    }
    return { frontier.costs[*best], best_weighted, best_feasible, frontier.plans[*best] };
}

OracleOptimum moqo::constrained_optimum(const ProblemInstance &instance, std::size_t cap)
{
    return constrained_optimum(true_pareto(instance.space, cap), instance.weights, instance.bounds);
}

std::vector<double> moqo::objective_minima(const TrueFrontier &frontier)
{
    if (frontier.costs.empty()) throw StructuralError("empty frontier has no minima");
    std::vector<double> minima(frontier.costs.front().entries().begin(), frontier.costs.front().entries().end());
    for (auto &c : frontier.costs)
        for (std::size_t i = 0; i != minima.size(); ++i) minima[i] = std::min(minima[i], c[i]);
    return minima;
}

GuaranteeCheck moqo::check_guarantee(const CostVector &chosen, const ProblemInstance &instance,
                                     const OracleOptimum &optimum)
{
    const RelativeCost rho =
        relative_cost(chosen, instance.weights, instance.bounds, optimum.cost, optimum.feasible_exists);
    const bool pass = not rho.is_infinite() and rho.value <= instance.alpha_user.value() * (1.0 + GUARANTEE_TOLERANCE);
    return { rho.value, rho.degenerate, pass, optimum };
}

GuaranteeCheck moqo::check_guarantee(const OptimizerReport &report, const ProblemInstance &instance, std::size_t cap)
{
    return check_guarantee(report.chosen_cost, instance, constrained_optimum(instance, cap));
}
