#pragma once

#include <bit>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>


namespace moqo {

/** A set of query tables, addressed by their position in the query.  Subsets of a query are enumerated by iterating
 * the underlying bit pattern. */
class TableSet
{
    std::uint32_t bits_ = 0;

    public:
    static constexpr std::size_t CAPACITY = 32;

    constexpr TableSet() = default;
    constexpr explicit TableSet(std::uint32_t bits) : bits_(bits) { }

    static constexpr TableSet singleton(std::size_t i) { return TableSet(std::uint32_t(1) << i); }
    static constexpr TableSet all(std::size_t n) {
        return TableSet(n >= 32 ? ~std::uint32_t(0) : (std::uint32_t(1) << n) - 1);
    }

    constexpr std::uint32_t bits() const { return bits_; }
    constexpr std::size_t size() const { return std::popcount(bits_); }
    constexpr bool empty() const { return bits_ == 0; }
    constexpr bool contains(std::size_t i) const { return bits_ >> i & 1; }
    /** Position of the lowest member.  Undefined for the empty set. */
    constexpr std::size_t lowest() const { return std::countr_zero(bits_); }
    constexpr bool is_subset_of(TableSet other) const { return (bits_ & ~other.bits_) == 0; }
    constexpr bool intersects(TableSet other) const { return (bits_ & other.bits_) != 0; }

    friend constexpr TableSet operator|(TableSet a, TableSet b) { return TableSet(a.bits_ | b.bits_); }
    friend constexpr TableSet operator&(TableSet a, TableSet b) { return TableSet(a.bits_ & b.bits_); }
    friend constexpr TableSet operator-(TableSet a, TableSet b) { return TableSet(a.bits_ & ~b.bits_); }
    friend constexpr auto operator<=>(TableSet, TableSet) = default;

    /** Positions of the members in increasing order. */
    std::vector<std::size_t> members() const {
        std::vector<std::size_t> v;
        for (auto b = bits_; b; b &= b - 1) v.push_back(std::countr_zero(b));
        return v;
    }
};


/*======================================================================================================================
 * Catalog and query
 *====================================================================================================================*/

struct Table
{
    std::string name;
    std::uint64_t cardinality; ///< number of tuples, ≥ 1
    bool has_index = false;
};

class TableCatalog
{
    std::vector<Table> tables_;

    public:
    TableCatalog() = default;
    explicit TableCatalog(std::vector<Table> tables) : tables_(std::move(tables)) { }

    void add(Table t) { tables_.push_back(std::move(t)); }
    const std::vector<Table> & tables() const { return tables_; }
    std::size_t size() const { return tables_.size(); }
    const Table * find(const std::string &name) const;
    /** m: the largest base-table cardinality. */
    std::uint64_t max_cardinality() const;
};

struct Predicate
{
    std::string left;
    std::string right;
    double selectivity; ///< in (0,1]
};

/** A join query: the set of tables to join and binary join predicates between them. */
struct Query
{
    std::vector<std::string> tables;
    std::vector<Predicate> predicates;
};

/** Checks that the catalog is well formed and that the query only references catalog tables.  Throws `InvalidInput`
 * naming the offending identifier. */
void validate_catalog(const TableCatalog &catalog, const Query &query);

/** card_left · card_right · crossing_selectivity. */
inline double join_cardinality(double card_left, double card_right, double crossing_selectivity) {
    return card_left * card_right * crossing_selectivity;
}


/*======================================================================================================================
 * JoinGraph
 *====================================================================================================================*/

/** A validated query resolved against its catalog.  Tables are addressed by query position.  Cardinality estimates use
 * the independence assumption: the cardinality of a table set is the product of its base cardinalities and of the
 * selectivities of all predicates inside it. */
class JoinGraph
{
    public:
    static constexpr std::size_t MAX_TABLES = 20;

    private:
    std::vector<std::string> names_;
    std::vector<double> cardinalities_;
    std::vector<bool> indexed_;
    std::vector<double> selectivity_; ///< n×n, 1 where no predicate
    std::vector<std::uint32_t> neighbours_;
    std::vector<double> set_cardinality_; ///< indexed by table-set bits

    public:
    /** Validates and resolves.  Throws `InvalidInput`. */
    JoinGraph(const TableCatalog &catalog, const Query &query);

    std::size_t num_tables() const { return names_.size(); }
    TableSet all_tables() const { return TableSet::all(num_tables()); }
    const std::string & name(std::size_t i) const { return names_[i]; }
    std::optional<std::size_t> position(const std::string &name) const;
    double cardinality(std::size_t i) const { return cardinalities_[i]; }
    bool has_index(std::size_t i) const { return indexed_[i]; }
    /** Selectivity of the predicate between tables `i` and `j`, 1 if there is none. */
    double selectivity(std::size_t i, std::size_t j) const { return selectivity_[i * num_tables() + j]; }

    /** Product of the selectivities of all predicates with one endpoint in each of the two sets. */
    double crossing_selectivity(TableSet left, TableSet right) const;
    /** Whether some predicate connects the two sets. */
    bool connected(TableSet left, TableSet right) const;
    /** Estimated result cardinality of joining all tables in `s`. */
    double cardinality(TableSet s) const { return set_cardinality_[s.bits()]; }
    /** m: the largest base-table cardinality. */
    double max_cardinality() const;
};

}
