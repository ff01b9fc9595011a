#include <doctest.h>

#include "helpers.hpp"
#include <moqo/catalog.hpp>
#include <moqo/error.hpp>


using namespace moqo;
using namespace moqo::test;

namespace {

TableCatalog ab_catalog()
{
    TableCatalog c;
    c.add({ "A", 1000, false });
    c.add({ "B", 500, true });
    return c;
}

}

TEST_CASE("table sets")
{
    const TableSet s = TableSet::singleton(0) | TableSet::singleton(2);
    CHECK(s.size() == 2);
    CHECK(s.contains(2));
    CHECK_FALSE(s.contains(1));
    CHECK(s.lowest() == 0);
    CHECK(TableSet::singleton(2).is_subset_of(s));
    CHECK((s - TableSet::singleton(0)) == TableSet::singleton(2));
    CHECK(TableSet::all(3).bits() == 0b111u);
    CHECK(s.members() == std::vector<std::size_t>{ 0, 2 });
}

TEST_CASE("validate catalog")
{
    const TableCatalog c = ab_catalog();
    CHECK_NOTHROW(validate_catalog(c, Query{ { "A", "B" }, { { "A", "B", 0.01 } } }));
    CHECK_THROWS_WITH_AS(validate_catalog(c, Query{ { "A", "C" }, {} }), "unknown table C", InvalidInput);
    CHECK_THROWS_WITH_AS(validate_catalog(c, Query{ { "A" }, { { "A", "A", 0.5 } } }), "self-join predicate on A",
                         InvalidInput);
    CHECK_THROWS_AS(validate_catalog(c, Query{ { "A", "B" }, { { "A", "B", 0.0 } } }), InvalidInput);
    CHECK_THROWS_AS(validate_catalog(c, Query{ { "A", "B" }, { { "A", "B", 1.5 } } }), InvalidInput);
    CHECK_THROWS_AS(validate_catalog(c, Query{ { "A", "B" }, { { "A", "B", 0.1 }, { "B", "A", 0.1 } } }),
                    InvalidInput);
    CHECK_THROWS_AS(validate_catalog(c, Query{ { "A" }, { { "A", "B", 0.1 } } }), InvalidInput);
    CHECK_THROWS_AS(validate_catalog(c, Query{ {}, {} }), InvalidInput);

    TableCatalog dup = ab_catalog();
    dup.add({ "A", 3, false });
    CHECK_THROWS_WITH_AS(validate_catalog(dup, Query{ { "A" }, {} }), "duplicate table name A", InvalidInput);
    TableCatalog zero;
    zero.add({ "Z", 0, false });
    CHECK_THROWS_WITH_AS(validate_catalog(zero, Query{ { "Z" }, {} }), "zero cardinality for table Z", InvalidInput);
    TableCatalog reserved;
    reserved.add({ "x,y", 3, false });
    CHECK_THROWS_AS(validate_catalog(reserved, Query{ { "x,y" }, {} }), InvalidInput);
}

TEST_CASE("join cardinality")
{
    CHECK(join_cardinality(1000, 500, 0.001) == doctest::Approx(500));
    CHECK(join_cardinality(10, 20, 1) == 200);
    CHECK(join_cardinality(100, 100, 0.1 * 0.5) == doctest::Approx(500));
    CHECK(join_cardinality(3, 7, 0.2) == join_cardinality(7, 3, 0.2));
    CHECK(join_cardinality(3, 7, 0.2) <= 3 * 7);
}

TEST_CASE("join graph")
{
    const JoinGraph g = make_graph({ { "A", 100 }, { "B", 100 }, { "C", 10, true } },
                                   { { "A", "B", 0.1 }, { "A", "C", 0.5 } });
    CHECK(g.num_tables() == 3);
    CHECK(g.position("C") == 2u);
    CHECK_FALSE(g.position("D"));
    CHECK(g.has_index(2));
    CHECK(g.selectivity(0, 1) == 0.1);
    CHECK(g.selectivity(1, 0) == 0.1);
    CHECK(g.selectivity(1, 2) == 1.0);

    const TableSet a = TableSet::singleton(0), b = TableSet::singleton(1), c = TableSet::singleton(2);
    CHECK(g.crossing_selectivity(a, b | c) == doctest::Approx(0.05));
    CHECK(g.cardinality(a | b) == doctest::Approx(1000));
    CHECK(g.cardinality(a | b | c) == doctest::Approx(100 * 100 * 10 * 0.05));
    CHECK(g.connected(a, b));
    CHECK_FALSE(g.connected(b, c));
    CHECK(g.max_cardinality() == 100);
}
