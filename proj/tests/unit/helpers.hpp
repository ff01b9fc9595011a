#pragma once

#include <algorithm>
#include <initializer_list>
#include <moqo/catalog.hpp>
#include <moqo/optimizer.hpp>
#include <string>
#include <tuple>
#include <vector>


namespace moqo::test {

struct TableSpec
{
    std::string name;
    std::uint64_t cardinality;
    bool index = false;
};

inline JoinGraph make_graph(std::initializer_list<TableSpec> tables,
                            std::initializer_list<std::tuple<std::string, std::string, double>> predicates = {})
{
    TableCatalog catalog;
    Query query;
    for (auto &t : tables) {
        catalog.add({ t.name, t.cardinality, t.index });
        query.tables.push_back(t.name);
    }
    for (auto &[l, r, s] : predicates) query.predicates.push_back({ l, r, s });
    return JoinGraph(catalog, query);
}

/** Cost vectors of a plan set, sorted lexicographically. */
inline std::vector<CostVector> sorted_costs(const PlanSet &set)
{
    std::vector<CostVector> v;
    for (std::size_t i = 0; i != set.size(); ++i) v.push_back(set.cost(i));
    std::sort(v.begin(), v.end(), [](auto &a, auto &b) { return lex_less(a, b); });
    return v;
}

}
