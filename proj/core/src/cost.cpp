#include <moqo/cost.hpp>

#include <cmath>
#include <moqo/error.hpp>
#include <sstream>


using namespace moqo;


namespace {

constexpr std::array<std::string_view, NUM_OBJECTIVES> OBJECTIVE_NAMES = {
    "total_time", "startup_time", "io_load", "cpu_load", "cores",
    "disc_footprint", "buffer_footprint", "energy", "tuple_loss",
};

void check_same_objectives(ObjectiveList a, ObjectiveList b, const char *what)
{
    if (a != b)
        throw StructuralError(std::string(what) + ": objective lists differ (" + to_string(a) + " vs " + to_string(b) +
                              ")");
}

}


/*======================================================================================================================
 * Objectives
 *====================================================================================================================*/

std::string_view moqo::objective_name(Objective o) { return OBJECTIVE_NAMES.at(std::size_t(o)); }

std::optional<Objective> moqo::parse_objective(std::string_view name)
{
    for (std::size_t i = 0; i != NUM_OBJECTIVES; ++i)
        if (OBJECTIVE_NAMES[i] == name) return Objective(i);
    return std::nullopt;
}

ObjectiveList::ObjectiveList(std::span<const Objective> kinds)
{
    if (kinds.empty() or kinds.size() > NUM_OBJECTIVES)
        throw InvalidInput("objective list must hold between 1 and 9 objectives, got " + std::to_string(kinds.size()));
    unsigned seen = 0;
    for (std::size_t i = 0; i != kinds.size(); ++i) {
        const auto k = unsigned(kinds[i]);
        if (k >= NUM_OBJECTIVES) throw InvalidInput("invalid objective id " + std::to_string(k));
        if (seen & (1u << k))
            throw InvalidInput("duplicate objective " + std::string(objective_name(kinds[i])));
        seen |= 1u << k;
        packed_ |= std::uint64_t(k) << (4 * i);
    }
    packed_ |= std::uint64_t(kinds.size()) << 60;
}

std::vector<Objective> ObjectiveList::to_vector() const
{
    std::vector<Objective> v;
    for (std::size_t i = 0; i != size(); ++i) v.push_back((*this)[i]);
    return v;
}

std::string moqo::to_string(ObjectiveList objectives)
{
    std::string s = "[";
    for (std::size_t i = 0; i != objectives.size(); ++i) {
        if (i) s += ",";
        s += objective_name(objectives[i]);
    }
    return s + "]";
}


/*======================================================================================================================
 * Vectors
 *====================================================================================================================*/

CostVector::CostVector(ObjectiveList objectives, std::span<const double> entries)
    : objectives_(objectives)
{
    if (entries.size() != objectives.size())
        throw StructuralError("cost vector has " + std::to_string(entries.size()) + " entries for " +
                              std::to_string(objectives.size()) + " objectives");
    for (std::size_t i = 0; i != entries.size(); ++i) {
        const double v = entries[i];
        if (not std::isfinite(v) or v < 0)
            throw InvalidInput("cost entry for " + std::string(objective_name(objectives[i])) +
                               " must be finite and non-negative");
        if (objectives[i] == Objective::tuple_loss and v > 1)
            throw InvalidInput("tuple_loss cost entry must lie in [0,1]");
        entries_[i] = v;
    }
}

bool moqo::lex_less(const CostVector &a, const CostVector &b)
{
    check_same_objectives(a.objectives(), b.objectives(), "lex_less");
    for (std::size_t i = 0; i != a.size(); ++i) {
        if (a[i] < b[i]) return true;
        if (b[i] < a[i]) return false;
    }
    return false;
}

std::string moqo::to_string(const CostVector &c)
{
    std::ostringstream os;
    os.precision(17);
    os << '(';
    for (std::size_t i = 0; i != c.size(); ++i) {
        if (i) os << ',';
        os << c[i];
    }
    os << ')';
    return os.str();
}

WeightVector::WeightVector(ObjectiveList objectives, std::span<const double> weights)
    : objectives_(objectives)
{
    if (weights.size() != objectives.size())
        throw StructuralError("weight vector has " + std::to_string(weights.size()) + " entries for " +
                              std::to_string(objectives.size()) + " objectives");
    bool any_positive = false;
    for (std::size_t i = 0; i != weights.size(); ++i) {
        const double w = weights[i];
        if (not std::isfinite(w) or w < 0)
            throw InvalidInput("weight for " + std::string(objective_name(objectives[i])) +
                               " must be finite and non-negative");
        any_positive |= w > 0;
        weights_[i] = w;
    }
    if (not any_positive) throw InvalidInput("at least one weight must be positive");
}

WeightVector WeightVector::uniform(ObjectiveList objectives)
{
    std::vector<double> ones(objectives.size(), 1.0);
    return WeightVector(objectives, ones);
}

BoundVector::BoundVector(ObjectiveList objectives, std::span<const std::optional<double>> bounds)
    : objectives_(objectives)
{
    if (bounds.size() != objectives.size())
        throw StructuralError("bound vector has " + std::to_string(bounds.size()) + " entries for " +
                              std::to_string(objectives.size()) + " objectives");
    for (std::size_t i = 0; i != bounds.size(); ++i)
        if (bounds[i]) set(i, *bounds[i]);
}

void BoundVector::set(std::size_t i, double bound)
{
    if (i >= size()) throw StructuralError("bound index out of range");
    if (std::isnan(bound) or bound < 0)
        throw InvalidInput("bound for " + std::string(objective_name(objectives_[i])) + " must be non-negative");
    if (std::isinf(bound)) {
        bounded_[i] = false;
        return;
    }
    bounds_[i] = bound;
    bounded_[i] = true;
}

bool BoundVector::any_bounded() const
{
    for (std::size_t i = 0; i != size(); ++i)
        if (bounded_[i]) return true;
    return false;
}

Precision::Precision(double alpha) : alpha_(alpha)
{
    if (not (alpha >= 1.0) or std::isinf(alpha)) throw InvalidInput("alpha must be ≥ 1");
}


/*======================================================================================================================
 * Relations
 *====================================================================================================================*/

bool moqo::compare(const CostVector &c1, const CostVector &c2, CompareMode mode)
{
    check_same_objectives(c1.objectives(), c2.objectives(), "compare");
    switch (mode.kind()) {
        case CompareMode::DOMINATES:
            return detail::dominates(c1.data(), c2.data(), c1.size());
        case CompareMode::STRICT:
            return detail::dominates(c1.data(), c2.data(), c1.size()) and not (c1 == c2);
        case CompareMode::APPROX:
            return detail::approx_dominates(c1.data(), c2.data(), c1.size(), mode.alpha());
    }
    return false;
}

double moqo::weighted_cost(const CostVector &c, const WeightVector &w)
{
    check_same_objectives(c.objectives(), w.objectives(), "weighted_cost");
    double sum = 0;
    for (std::size_t i = 0; i != c.size(); ++i) sum += c[i] * w[i];
    return sum;
}

bool moqo::respects_bounds(const CostVector &c, const BoundVector &b, Precision relax)
{
    check_same_objectives(c.objectives(), b.objectives(), "respects_bounds");
    for (std::size_t i = 0; i != c.size(); ++i)
        if (b.is_bounded(i) and c[i] > b[i] * relax.value()) return false;
    return true;
}

RelativeCost moqo::relative_cost(const CostVector &plan_cost, const WeightVector &w, const BoundVector &b,
                                 const CostVector &opt_cost, bool feasible_exists)
{
    constexpr double INF = std::numeric_limits<double>::infinity();
    if (feasible_exists and not respects_bounds(plan_cost, b)) return { INF, false };
    const double plan = weighted_cost(plan_cost, w);
    const double opt = weighted_cost(opt_cost, w);
    if (opt == 0) {
        if (plan == 0) return { 1.0, false };
        return { INF, true };
    }
    return { plan / opt, false };
}
