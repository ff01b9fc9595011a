#include <moqo/pareto_set.hpp>

#include <cassert>
#include <cmath>
#include <moqo/error.hpp>


using namespace moqo;


void PlanSet::insert(PlanId id, const double *cost)
{
    const std::size_t l = objectives_.size();
    std::size_t kept = 0;
    for (std::size_t i = 0, end = size(); i != end; ++i) {
        const double *c = costs_.data() + i * l;
        if (detail::dominates(cost, c, l)) continue; // evicted
        if (kept != i) {
            std::copy(c, c + l, costs_.data() + kept * l);
            ids_[kept] = ids_[i];
        }
        ++kept;
    }
    ids_.resize(kept);
    costs_.resize(kept * l);
    ids_.push_back(id);
    costs_.insert(costs_.end(), cost, cost + l);
#ifdef MOQO_PARANOID_CHECKS
    if (not is_dominance_free()) throw StructuralError("plan set lost dominance-freeness");
#endif
}

void PlanSet::assign_single(PlanId id, const double *cost)
{
    clear();
    ids_.push_back(id);
    costs_.assign(cost, cost + objectives_.size());
}

bool PlanSet::is_dominance_free() const
{
    const std::size_t l = objectives_.size();
    for (std::size_t i = 0; i != size(); ++i)
        for (std::size_t j = 0; j != size(); ++j)
            if (i != j and detail::dominates(cost_data(i), cost_data(j), l)) return false;
    return true;
}

bool moqo::prune(PlanSet &set, const PlanRecord &new_plan, PruneMode mode)
{
    if (new_plan.tables != set.tables()) throw StructuralError("plan covers a different table set than the plan set");
    if (new_plan.cost.objectives() != set.objectives())
        throw StructuralError("plan cost and plan set use different objective lists");
    if (not set.accepts(new_plan.cost.data(), mode)) return false;
    set.insert(new_plan.id, new_plan.cost.data());
    return true;
}

GridBucket moqo::grid_bucket(const CostVector &c, Precision alpha)
{
    if (alpha.value() == 1.0) throw InvalidInput("grid bucket undefined for alpha = 1");
    const double log_alpha = std::log(alpha.value());
    GridBucket bucket;
    bucket.reserve(c.size());
    for (std::size_t i = 0; i != c.size(); ++i) {
        if (c[i] == 0)
            bucket.emplace_back(std::nullopt);
        else
            bucket.emplace_back(std::int64_t(std::floor(std::log(c[i]) / log_alpha)));
    }
    return bucket;
}
