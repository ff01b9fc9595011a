#include <moqo/catalog.hpp>

#include <algorithm>
#include <cmath>
#include <moqo/error.hpp>
#include <set>
#include <unordered_set>


using namespace moqo;


const Table * TableCatalog::find(const std::string &name) const
{
    auto it = std::find_if(tables_.begin(), tables_.end(), [&](const Table &t) { return t.name == name; });
    return it == tables_.end() ? nullptr : &*it;
}

std::uint64_t TableCatalog::max_cardinality() const
{
    std::uint64_t m = 0;
    for (auto &t : tables_) m = std::max(m, t.cardinality);
    return m;
}

void moqo::validate_catalog(const TableCatalog &catalog, const Query &query)
{
    std::unordered_set<std::string> names;
    for (auto &t : catalog.tables()) {
        if (t.name.empty()) throw InvalidInput("empty table name");
        if (t.name.find_first_of("(),[]\"") != std::string::npos)
            throw InvalidInput("table name " + t.name + " contains a reserved character");
        if (not names.insert(t.name).second) throw InvalidInput("duplicate table name " + t.name);
        if (t.cardinality == 0) throw InvalidInput("zero cardinality for table " + t.name);
    }

    if (query.tables.empty()) throw InvalidInput("query must join at least one table");
    std::unordered_set<std::string> in_query;
    for (auto &name : query.tables) {
        if (not names.contains(name)) throw InvalidInput("unknown table " + name);
        if (not in_query.insert(name).second) throw InvalidInput("table " + name + " listed twice in query");
    }

    std::set<std::pair<std::string, std::string>> pairs;
    for (auto &p : query.predicates) {
        if (p.left == p.right) throw InvalidInput("self-join predicate on " + p.left);
        for (auto *end : { &p.left, &p.right }) {
            if (not names.contains(*end)) throw InvalidInput("unknown table " + *end);
            if (not in_query.contains(*end)) throw InvalidInput("predicate endpoint " + *end + " not in query");
        }
        if (not (p.selectivity > 0 and p.selectivity <= 1))
            throw InvalidInput("selectivity of predicate (" + p.left + "," + p.right + ") must lie in (0,1]");
        auto key = std::minmax(p.left, p.right);
        if (not pairs.emplace(key.first, key.second).second)
            throw InvalidInput("duplicate predicate between " + p.left + " and " + p.right);
    }
}


/*======================================================================================================================
 * JoinGraph
 *====================================================================================================================*/

JoinGraph::JoinGraph(const TableCatalog &catalog, const Query &query)
{
    validate_catalog(catalog, query);
    const std::size_t n = query.tables.size();
    if (n > MAX_TABLES)
        throw InvalidInput("query joins " + std::to_string(n) + " tables, at most " + std::to_string(MAX_TABLES) +
                           " are supported");

    for (auto &name : query.tables) {
        const Table *t = catalog.find(name);
        names_.push_back(t->name);
        cardinalities_.push_back(double(t->cardinality));
        indexed_.push_back(t->has_index);
    }
    selectivity_.assign(n * n, 1.0);
    neighbours_.assign(n, 0);
    for (auto &p : query.predicates) {
        const std::size_t l = *position(p.left), r = *position(p.right);
        selectivity_[l * n + r] = selectivity_[r * n + l] = p.selectivity;
        neighbours_[l] |= 1u << r;
        neighbours_[r] |= 1u << l;
    }

    /* card(S) = card(S - {i}) · tᵢ · Π σ(i, j) for j ∈ S - {i}, with i the lowest member */
    set_cardinality_.assign(std::size_t(1) << n, 1.0);
    for (std::uint32_t bits = 1; bits < (std::uint32_t(1) << n); ++bits) {
        const TableSet s(bits);
        const std::size_t i = s.lowest();
        const TableSet rest = s - TableSet::singleton(i);
        set_cardinality_[bits] =
            set_cardinality_[rest.bits()] * cardinalities_[i] * crossing_selectivity(TableSet::singleton(i), rest);
    }
}

std::optional<std::size_t> JoinGraph::position(const std::string &name) const
{
    auto it = std::find(names_.begin(), names_.end(), name);
    if (it == names_.end()) return std::nullopt;
    return std::size_t(it - names_.begin());
}

double JoinGraph::crossing_selectivity(TableSet left, TableSet right) const
{
    double sel = 1.0;
    for (auto l = left.bits(); l; l &= l - 1) {
        const std::size_t i = std::countr_zero(l);
        for (auto r = neighbours_[i] & right.bits(); r; r &= r - 1)
            sel *= selectivity(i, std::countr_zero(r));
    }
    return sel;
}

bool JoinGraph::connected(TableSet left, TableSet right) const
{
    for (auto l = left.bits(); l; l &= l - 1)
        if (neighbours_[std::countr_zero(l)] & right.bits()) return true;
    return false;
}

double JoinGraph::max_cardinality() const
{
    return cardinalities_.empty() ? 0.0 : *std::max_element(cardinalities_.begin(), cardinalities_.end());
}
