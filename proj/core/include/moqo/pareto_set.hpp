#pragma once

#include <cstdint>
#include <moqo/catalog.hpp>
#include <moqo/cost.hpp>
#include <moqo/plan.hpp>
#include <optional>
#include <vector>


namespace moqo {

/** Insertion test of a plan set: exact dominance, or approximate dominance with internal precision αᵢ. */
class PruneMode
{
    public:
    enum Kind { EXACT, APPROX };

    private:
    Kind kind_ = EXACT;
    double alpha_ = 1.0;

    PruneMode(Kind kind, double alpha) : kind_(kind), alpha_(alpha) { }

    public:
    PruneMode() = default;
    static PruneMode exact() { return { EXACT, 1.0 }; }
    static PruneMode approx(Precision alpha) { return { APPROX, alpha.value() }; }

    Kind kind() const { return kind_; }
    double alpha() const { return alpha_; }
};

/** The plans kept for one table set.  No member's cost vector dominates another member's.
 *
 * Cost vectors are stored contiguously with stride `objectives().size()`; the members are scanned linearly. */
class PlanSet
{
    TableSet tables_;
    ObjectiveList objectives_;
    std::vector<double> costs_;
    std::vector<PlanId> ids_;

    public:
    PlanSet() = default;
    PlanSet(TableSet tables, ObjectiveList objectives) : tables_(tables), objectives_(objectives) { }

    TableSet tables() const { return tables_; }
    ObjectiveList objectives() const { return objectives_; }
    std::size_t size() const { return ids_.size(); }
    bool empty() const { return ids_.empty(); }

    PlanId id(std::size_t i) const { return ids_[i]; }
    const double * cost_data(std::size_t i) const { return costs_.data() + i * objectives_.size(); }
    CostVector cost(std::size_t i) const { return CostVector::unchecked(objectives_, cost_data(i)); }

    /** Whether a plan with cost `cost` passes the insertion test: no member dominates it (EXACT) or approximately
     * dominates it with precision αᵢ (APPROX). */
    bool accepts(const double *cost, PruneMode mode) const {
        const std::size_t l = objectives_.size();
        const double *c = costs_.data();
        if (mode.kind() == PruneMode::EXACT) {
            for (std::size_t i = 0, end = size(); i != end; ++i, c += l)
                if (detail::dominates(c, cost, l)) return false;
        } else {
            const double alpha = mode.alpha();
            for (std::size_t i = 0, end = size(); i != end; ++i, c += l)
                if (detail::approx_dominates(c, cost, l, alpha)) return false;
        }
        return true;
    }

    /** Adds a member and removes every member whose cost the new cost dominates.  Only plain dominance evicts, in
     * both modes. */
    void insert(PlanId id, const double *cost);

    /** Replaces the contents with the single plan given. */
    void assign_single(PlanId id, const double *cost);

    void clear() { costs_.clear(); ids_.clear(); }

    /** Checks the class invariant in O(size²). */
    bool is_dominance_free() const;
};

/** Inserts `new_plan` if it passes the insertion test and evicts the members it dominates.  Returns whether the plan
 * was inserted.  Throws `StructuralError` if the plan covers a different table set. */
bool prune(PlanSet &set, const PlanRecord &new_plan, PruneMode mode);

/** Per-objective cell ⌊log_α(cᵒ)⌋ of the coarsening grid; `std::nullopt` marks a zero entry. */
using GridBucket = std::vector<std::optional<std::int64_t>>;

/** Throws `InvalidInput` for α = 1, for which the grid is undefined. */
GridBucket grid_bucket(const CostVector &c, Precision alpha);

}
