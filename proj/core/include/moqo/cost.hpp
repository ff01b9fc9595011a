#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>


namespace moqo {

/*======================================================================================================================
 * Objectives
 *====================================================================================================================*/

/** The cost objectives supported by the cost model. */
enum class Objective : std::uint8_t
{
    total_time,
    startup_time,
    io_load,
    cpu_load,
    cores,
    disc_footprint,
    buffer_footprint,
    energy,
    tuple_loss,
};

inline constexpr std::size_t NUM_OBJECTIVES = 9;

/** All objectives in canonical order. */
inline constexpr std::array<Objective, NUM_OBJECTIVES> ALL_OBJECTIVES = {
    Objective::total_time,   Objective::startup_time,   Objective::io_load,
    Objective::cpu_load,     Objective::cores,          Objective::disc_footprint,
    Objective::buffer_footprint, Objective::energy,     Objective::tuple_loss,
};

std::string_view objective_name(Objective o);
std::optional<Objective> parse_objective(std::string_view name);

/** Ordered list of the active objectives of a problem, packed into a single word so that it can be carried by every
 * cost vector and compared in O(1).  Holds between 1 and 9 distinct kinds. */
class ObjectiveList
{
    std::uint64_t packed_ = 0; ///< 4 bits per kind; size in the top nibble

    public:
    ObjectiveList() = default;
    ObjectiveList(std::initializer_list<Objective> kinds) : ObjectiveList(std::span(kinds.begin(), kinds.size())) { }
    explicit ObjectiveList(std::span<const Objective> kinds);

    std::size_t size() const { return packed_ >> 60; }
    bool empty() const { return size() == 0; }
    Objective operator[](std::size_t i) const { return Objective((packed_ >> (4 * i)) & 0xF); }

    std::optional<std::size_t> index_of(Objective o) const {
        for (std::size_t i = 0, end = size(); i != end; ++i)
            if ((*this)[i] == o) return i;
        return std::nullopt;
    }
    bool contains(Objective o) const { return index_of(o).has_value(); }
    std::vector<Objective> to_vector() const;

    friend bool operator==(ObjectiveList, ObjectiveList) = default;
};

std::string to_string(ObjectiveList objectives);


/*======================================================================================================================
 * Cost, weight, and bound vectors
 *====================================================================================================================*/

/** A vector of non-negative, finite cost values, one per active objective.  Tuple-loss entries lie in [0,1]. */
class CostVector
{
    ObjectiveList objectives_;
    std::array<double, NUM_OBJECTIVES> entries_{};

    public:
    CostVector() = default;
    CostVector(ObjectiveList objectives, std::span<const double> entries);
    CostVector(ObjectiveList objectives, std::initializer_list<double> entries)
        : CostVector(objectives, std::span(entries.begin(), entries.size())) { }

    /** Builds a vector without validating the entries.  For hot paths whose inputs are valid by construction. */
    static CostVector unchecked(ObjectiveList objectives, const double *entries) {
        CostVector c;
        c.objectives_ = objectives;
        for (std::size_t i = 0, end = objectives.size(); i != end; ++i) c.entries_[i] = entries[i];
        return c;
    }

    ObjectiveList objectives() const { return objectives_; }
    std::size_t size() const { return objectives_.size(); }
    double operator[](std::size_t i) const { return entries_[i]; }
    const double * data() const { return entries_.data(); }
    std::span<const double> entries() const { return { entries_.data(), size() }; }

    /** Exact equality of objective lists and entries. */
    friend bool operator==(const CostVector &a, const CostVector &b) {
        if (a.objectives_ != b.objectives_) return false;
        for (std::size_t i = 0, end = a.size(); i != end; ++i)
            if (a.entries_[i] != b.entries_[i]) return false;
        return true;
    }

    /** Lexicographic order on the entries; used for deterministic tie-breaking and output. */
    friend bool lex_less(const CostVector &a, const CostVector &b);
};

bool lex_less(const CostVector &a, const CostVector &b);
std::string to_string(const CostVector &c);

/** Non-negative preference weights, at least one positive. */
class WeightVector
{
    ObjectiveList objectives_;
    std::array<double, NUM_OBJECTIVES> weights_{};

    public:
    WeightVector() = default;
    WeightVector(ObjectiveList objectives, std::span<const double> weights);
    WeightVector(ObjectiveList objectives, std::initializer_list<double> weights)
        : WeightVector(objectives, std::span(weights.begin(), weights.size())) { }

    /** All weights equal to one. */
    static WeightVector uniform(ObjectiveList objectives);

    ObjectiveList objectives() const { return objectives_; }
    std::size_t size() const { return objectives_.size(); }
    double operator[](std::size_t i) const { return weights_[i]; }
    const double * data() const { return weights_.data(); }
};

/** Per-objective upper bounds.  An entry is either a non-negative real or UNBOUNDED, which compares as +∞ and stays
 * +∞ under scaling. */
class BoundVector
{
    ObjectiveList objectives_;
    std::array<double, NUM_OBJECTIVES> bounds_{};
    std::array<bool, NUM_OBJECTIVES> bounded_{};

    public:
    BoundVector() = default;
    /** All entries UNBOUNDED. */
    explicit BoundVector(ObjectiveList objectives) : objectives_(objectives) { }
    BoundVector(ObjectiveList objectives, std::span<const std::optional<double>> bounds);

    static BoundVector unbounded(ObjectiveList objectives) { return BoundVector(objectives); }

    ObjectiveList objectives() const { return objectives_; }
    std::size_t size() const { return objectives_.size(); }
    bool is_bounded(std::size_t i) const { return bounded_[i]; }
    bool any_bounded() const;
    /** The bound for entry `i`; +∞ when unbounded. */
    double operator[](std::size_t i) const {
        return bounded_[i] ? bounds_[i] : std::numeric_limits<double>::infinity();
    }
    std::optional<double> get(std::size_t i) const {
        return bounded_[i] ? std::optional<double>(bounds_[i]) : std::nullopt;
    }
    void set(std::size_t i, double bound);
};

/** An approximation precision α ≥ 1. */
class Precision
{
    double alpha_ = 1.0;

    public:
    Precision() = default;
    explicit Precision(double alpha);

    static Precision exact() { return Precision(); }
    double value() const { return alpha_; }
    friend bool operator==(Precision, Precision) = default;
};


/*======================================================================================================================
 * Relations
 *====================================================================================================================*/

/** Dominance relation used by `compare()`. */
class CompareMode
{
    public:
    enum Kind { DOMINATES, STRICT, APPROX };

    private:
    Kind kind_;
    double alpha_;

    CompareMode(Kind kind, double alpha) : kind_(kind), alpha_(alpha) { }

    public:
    static CompareMode dominates() { return { DOMINATES, 1.0 }; }
    static CompareMode strict() { return { STRICT, 1.0 }; }
    static CompareMode approx(Precision alpha) { return { APPROX, alpha.value() }; }

    Kind kind() const { return kind_; }
    double alpha() const { return alpha_; }
};

namespace detail {

inline bool dominates(const double *a, const double *b, std::size_t n) {
    for (std::size_t i = 0; i != n; ++i)
        if (a[i] > b[i]) return false;
    return true;
}

inline bool approx_dominates(const double *a, const double *b, std::size_t n, double alpha) {
    for (std::size_t i = 0; i != n; ++i)
        if (a[i] > b[i] * alpha) return false;
    return true;
}

}

/** DOMINATES: ∀o: c1ᵒ ≤ c2ᵒ.  STRICT: DOMINATES and c1 ≠ c2.  APPROX(α): ∀o: c1ᵒ ≤ c2ᵒ·α.
 * Throws `StructuralError` if the objective lists differ. */
bool compare(const CostVector &c1, const CostVector &c2, CompareMode mode);

inline bool dominates(const CostVector &c1, const CostVector &c2) { return compare(c1, c2, CompareMode::dominates()); }
inline bool strictly_dominates(const CostVector &c1, const CostVector &c2) {
    return compare(c1, c2, CompareMode::strict());
}
inline bool approx_dominates(const CostVector &c1, const CostVector &c2, Precision alpha) {
    return compare(c1, c2, CompareMode::approx(alpha));
}

/** C_W(c) = Σ cᵒ·Wᵒ. */
double weighted_cost(const CostVector &c, const WeightVector &w);

/** ∀o: cᵒ ≤ Bᵒ·relax, UNBOUNDED entries always satisfied. */
bool respects_bounds(const CostVector &c, const BoundVector &b, Precision relax = Precision::exact());

struct RelativeCost
{
    double value; ///< ρ, possibly +∞
    bool degenerate; ///< the optimum has weighted cost zero while the plan does not

    bool is_infinite() const { return value == std::numeric_limits<double>::infinity(); }
};

/** ρ = C_W(plan) / C_W(opt); +∞ for a bound violator if a feasible plan exists.  0/0 is defined as 1; x/0 with x > 0 is
 * +∞ and flagged degenerate. */
RelativeCost relative_cost(const CostVector &plan_cost, const WeightVector &w, const BoundVector &b,
                           const CostVector &opt_cost, bool feasible_exists);

}
