#pragma once

#include <algorithm>
#include <cstdint>
#include <moqo/catalog.hpp>
#include <moqo/cost.hpp>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>


namespace moqo {

/*======================================================================================================================
 * Operators
 *====================================================================================================================*/

/** Sampling rates a sample scan may use. */
inline constexpr std::array<double, 5> SAMPLING_RATES = { 0.01, 0.02, 0.03, 0.04, 0.05 };

struct ScanOperator
{
    enum Kind : std::uint8_t { FULL_SCAN, SAMPLE_SCAN };

    Kind kind = FULL_SCAN;
    double rate = 1.0; ///< fraction of the table read; 1 for a full scan

    static ScanOperator full() { return {}; }
    /** Throws `InvalidInput` unless `rate` is one of `SAMPLING_RATES`. */
    static ScanOperator sample(double rate);

    friend bool operator==(const ScanOperator&, const ScanOperator&) = default;
};

struct JoinOperator
{
    enum Kind : std::uint8_t { HASH, SORT_MERGE, NESTED_LOOP, INDEX_NESTED_LOOP };

    Kind kind = HASH;
    std::uint8_t dop = 1; ///< degree of parallelism, 1..4

    /** Throws `InvalidInput` unless 1 ≤ dop ≤ 4. */
    static JoinOperator make(Kind kind, unsigned dop);

    friend bool operator==(const JoinOperator&, const JoinOperator&) = default;
};

std::string_view join_kind_name(JoinOperator::Kind kind);

/** The operator configurations available to the optimizer. */
struct OperatorSpace
{
    std::vector<ScanOperator> scans;
    std::vector<JoinOperator> joins;

    /** Full scan, five sampling rates, four join algorithms at DOP 1, 2, and 4. */
    static OperatorSpace standard();
    /** `j` scan and `j` join configurations that apply to every operand (no index nested-loop join), for 1 ≤ j ≤ 6. */
    static OperatorSpace uniform(std::size_t j);
};


/*======================================================================================================================
 * Cost model
 *====================================================================================================================*/

/** Coefficients of the cost model.  Every coefficient is a non-negative constant, so that all per-objective formulas
 * are compositions of sum, max, and scaling and therefore satisfy the principle of near-optimality. */
struct CostConfig
{
    double scan_time_per_tuple = 1;
    double scan_io_per_tuple = 1;
    double scan_cpu_per_tuple = 1;
    double scan_energy_per_tuple = 1;
    double scan_cores = 1;
    double scan_buffer = 1;

    double hash_work_left = 1;
    double hash_work_right = 1;
    double hash_work_out = 1;
    double sort_merge_work_sort = 1;
    double sort_merge_work_left = 1;
    double sort_merge_work_right = 1;
    double sort_merge_work_out = 1;
    double nested_loop_work_product = 1;
    double nested_loop_work_out = 1;
    double index_nested_loop_work_lookup = 1;
    double index_nested_loop_work_out = 1;

    double hash_spill_right = 1;
    double sort_merge_spill_left = 1;
    double sort_merge_spill_right = 1;

    double hash_buffer_right = 1;
    double sort_merge_buffer_left = 1;
    double sort_merge_buffer_right = 1;
    double nested_loop_buffer = 1;
    double index_nested_loop_buffer = 1;

    double hash_startup_build = 1;
    double sort_merge_startup_sort = 1;

    double energy_parallel_overhead = 0.2;

    /** Parses a flat `key=value` file.  Blank lines and `#` comments are ignored; absent keys keep their default.
     * Throws `InvalidInput` on unknown keys, malformed lines, or negative values. */
    static CostConfig parse(std::string_view text);
    static CostConfig load(const std::string &path);
    /** The `key=value` form of every coefficient. */
    std::string to_string() const;
};

/** 1 − (1−a)(1−b), with 0 as identity. */
inline double combine_tuple_loss(double a, double b) {
    if (a == 0) return b;
    if (b == 0) return a;
    return 1.0 - (1.0 - a) * (1.0 - b);
}


/** Cardinality-only terms of one join, shared by every pair of operand plans for the same split and operator. */
struct JoinTerms
{
    JoinOperator op;
    double time;          ///< work / dop
    double work;
    double energy;        ///< work scaled by the parallel overhead
    double spill;         ///< tuples written to disc
    double buffer;        ///< operator buffer
    double startup_left;  ///< blocking work on the left input before the first result
    double startup_right; ///< blocking work on the right input before the first result
};

/** The synthetic multi-objective cost model.  Every objective of a join is computed from the same objective of the
 * operands plus terms that depend only on the operator and on cardinalities. */
class CostModel
{
    CostConfig config_;

    public:
    CostModel() = default;
    explicit CostModel(CostConfig config) : config_(config) { }

    const CostConfig & config() const { return config_; }

    /** Tuples processed by the join itself. */
    double work(JoinOperator op, double card_left, double card_right, double card_out) const;

    /** Cost of scanning a table with `table_card` tuples.  Writes one entry per active objective. */
    void scan_cost(ObjectiveList objectives, ScanOperator op, double table_card, double *out) const;
    CostVector scan_cost(ObjectiveList objectives, ScanOperator op, double table_card) const;

    JoinTerms join_terms(JoinOperator op, double card_left, double card_right, double card_out) const;

    /** Recursive cost of a join whose operands cost `left` and `right`.  Writes one entry per active objective. */
    void combine_cost(ObjectiveList objectives, const JoinTerms &terms, const double *left, const double *right,
                      double *out) const {
        for (std::size_t i = 0, end = objectives.size(); i != end; ++i) {
            const double l = left[i], r = right[i];
            switch (objectives[i]) {
                case Objective::total_time:       out[i] = std::max(l, r) + terms.time; break;
                case Objective::startup_time:
                    out[i] = std::max(l + terms.startup_left, r + terms.startup_right);
                    break;
                case Objective::io_load:
                case Objective::disc_footprint:   out[i] = l + r + terms.spill; break;
                case Objective::cpu_load:         out[i] = l + r + terms.work; break;
                case Objective::cores:            out[i] = std::max(l + r, double(terms.op.dop)); break;
                case Objective::buffer_footprint: out[i] = std::max(l, r) + terms.buffer; break;
                case Objective::energy:           out[i] = l + r + terms.energy; break;
                case Objective::tuple_loss:       out[i] = combine_tuple_loss(l, r); break;
            }
        }
    }
    /** Throws `StructuralError` if the operands' objective lists differ. */
    CostVector combine_cost(JoinOperator op, const CostVector &left, const CostVector &right,
                            double card_left, double card_right, double card_out) const;

    /** A positive constant such that every non-zero cost of objective `o` produced by this model is at least this
     * large. */
    double objective_floor(Objective o) const;
};

/*======================================================================================================================
 * Plan records
 *====================================================================================================================*/

enum class PlanId : std::uint32_t {};
inline constexpr PlanId NO_PLAN{ ~std::uint32_t(0) };

/** A node of the shared plan DAG.  Joins reference their operands by identifier. */
struct PlanRecord
{
    PlanId id = NO_PLAN;
    std::variant<ScanOperator, JoinOperator> op;
    PlanId left = NO_PLAN;
    PlanId right = NO_PLAN;
    TableSet tables;
    double out_card = 0; ///< expected number of result tuples, after sampling
    CostVector cost;

    bool is_scan() const { return std::holds_alternative<ScanOperator>(op); }
};

/** Append-only store of plan records.  Not synchronized; confined to one optimizer run. */
class PlanRegistry
{
    std::vector<PlanRecord> records_;

    public:
    /** Stores `record`, assigning and returning its identifier. */
    PlanId add(PlanRecord record) {
        record.id = PlanId(records_.size());
        records_.push_back(std::move(record));
        return records_.back().id;
    }

    std::size_t size() const { return records_.size(); }
    bool contains(PlanId id) const { return std::uint32_t(id) < records_.size(); }
    const PlanRecord & operator[](PlanId id) const { return records_[std::uint32_t(id)]; }
    /** Throws `StructuralError` for an unknown identifier. */
    const PlanRecord & at(PlanId id) const;
    void reserve(std::size_t n) { records_.reserve(n); }
};

/** Cardinality the cost formulas use for table set `s`: the sampling-independent estimate, clamped to at least one
 * tuple.  Shared by all plans of a table set. */
inline double cost_cardinality(const JoinGraph &graph, TableSet s) { return std::max(1.0, graph.cardinality(s)); }

/** Access path for the table at query position `table`. */
PlanRecord scan_plan(const JoinGraph &graph, const CostModel &model, ObjectiveList objectives, std::size_t table,
                     ScanOperator op);

/** Joins two plans.  Returns `std::nullopt` if the operator is not applicable to the operands (index nested-loop join
 * needs an indexed base table on the right).  Throws `StructuralError` if the operands' table sets overlap. */
std::optional<PlanRecord> combine_plans(const JoinGraph &graph, const CostModel &model, JoinOperator op,
                                        const PlanRecord &left, const PlanRecord &right);

/** Whether `op` may join `left` and `right`. */
bool join_applicable(const JoinGraph &graph, JoinOperator op, const PlanRecord &right);

/** Textual form, e.g. `HashJ[d=2](FullScan(A),IdxNL[d=1](FullScan(B),SampleScan(C,0.02)))`.  Throws `StructuralError`
 * on dangling identifiers. */
std::string serialize_plan(PlanId plan, const PlanRegistry &registry, const JoinGraph &graph);
/** Textual form of a record that need not be registered itself; its operands must be. */
std::string serialize_plan(const PlanRecord &plan, const PlanRegistry &registry, const JoinGraph &graph);

/** Rebuilds a plan from its textual form, registering every node and recomputing costs.  Throws `InvalidInput` on
 * syntax errors or unknown tables, `StructuralError` for overlapping operands or inapplicable operators. */
PlanId parse_plan(std::string_view text, const JoinGraph &graph, const CostModel &model, ObjectiveList objectives,
                  PlanRegistry &registry);

}
