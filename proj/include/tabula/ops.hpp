#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tabula/frame.hpp"

namespace tabula {

/// Aggregation operators. Sum, Mean, Std and Median require a numeric
/// column (I32, I64, F32, DD); the rest accept any type. All of them see
/// only the non-missing values; Count counts them. Std is the sample
/// standard deviation (n-1 denominator, 0 when a single value remains).
enum class AggOp { Sum, Mean, Min, Max, Count, Std, Median, First, Last };

const char* agg_op_name(AggOp op);
std::optional<AggOp> agg_op_from_name(std::string_view name);
bool agg_requires_numeric(AggOp op);
/// Column type of the aggregate result for a source column type.
ColType agg_result_type(ColType source, AggOp op);

enum class JoinKind { Inner, Left };
enum class DropHow { Any, All };
enum class SortOrder { Ascending, Descending };

struct FillStrategy {
  enum class Kind { Constant, Mean, Median, ForwardFill };
  Kind kind = Kind::ForwardFill;
  CellValue value;  // Constant only

  static FillStrategy constant(CellValue v) {
    return {Kind::Constant, std::move(v)};
  }
  static FillStrategy mean() { return {Kind::Mean, {}}; }
  static FillStrategy median() { return {Kind::Median, {}}; }
  static FillStrategy forward_fill() { return {Kind::ForwardFill, {}}; }
};

/// Lightweight view of one frame row, for predicates and calculated
/// columns. Valid only while the underlying frame is alive.
class RowView {
 public:
  RowView(const Frame& frame, std::size_t row) : frame_(&frame), row_(row) {}
  const CellValue& operator[](std::string_view name) const {
    return frame_->cell_at(row_, name);
  }
  const CellValue& at(std::size_t col) const {
    return frame_->cell_at(row_, col);
  }
  const CellValue& label() const { return frame_->index()[row_]; }
  std::size_t row() const noexcept { return row_; }
  const Frame& frame() const noexcept { return *frame_; }

 private:
  const Frame* frame_;
  std::size_t row_;
};

using RowPredicate = std::function<bool(const RowView&)>;
using RowFunction = std::function<CellValue(const RowView&)>;
using AggSpec = std::vector<std::pair<std::string, AggOp>>;
using SortSpec = std::vector<std::pair<std::string, SortOrder>>;

Frame add_column(const Frame& frame, std::string name,
                 std::vector<CellValue> values);

/// Appends a column computed once per row, in index order.
Frame add_calculated_column(const Frame& frame, std::string name,
                            const RowFunction& fn);

Frame insert_row(const Frame& frame, std::size_t at,
                 const std::vector<CellValue>& values, CellValue label);

/// Any: drop rows with at least one Missing among the subset columns
/// (default all); All: drop rows whose subset cells are all Missing.
Frame drop_missing(const Frame& frame, DropHow how = DropHow::Any,
                   const std::optional<std::vector<std::string>>& subset = {});

Frame fill_missing(const Frame& frame, const std::string& col,
                   const FillStrategy& strategy);

/// Whole-frame aggregation; result order follows the spec order.
std::vector<std::pair<std::string, CellValue>> aggregate(const Frame& frame,
                                                         const AggSpec& spec);

Frame filter(const Frame& frame, const RowPredicate& pred);
/// Complement of filter: keeps rows where the predicate is false.
Frame remove_rows(const Frame& frame, const RowPredicate& pred);

/// Stable lexicographic sort. Missing sorts first under Ascending and
/// last under Descending; index labels travel with their rows.
Frame sort_by(const Frame& frame, const SortSpec& keys);

/// Result of group_by: groups ordered by first appearance of their key.
class GroupedFrame {
 public:
  struct Group {
    std::vector<CellValue> key;
    std::vector<std::size_t> source_rows;  // positions in the source frame
    Frame rows;
  };

  GroupedFrame(Frame source, std::vector<std::string> keys,
               std::vector<Group> groups)
      : source_(std::move(source)),
        keys_(std::move(keys)),
        groups_(std::move(groups)) {}

  const Frame& source() const noexcept { return source_; }
  const std::vector<std::string>& keys() const noexcept { return keys_; }
  const std::vector<Group>& groups() const noexcept { return groups_; }
  std::size_t size() const noexcept { return groups_.size(); }

 private:
  Frame source_;
  std::vector<std::string> keys_;
  std::vector<Group> groups_;
};

/// Group rows by 1-3 key columns; Missing is a valid key value.
GroupedFrame group_by(const Frame& frame, std::vector<std::string> keys);

/// One row per group: key columns, then one "<col>_<op>" column per spec
/// entry.
Frame group_aggregate(const GroupedFrame& grouped, const AggSpec& spec);

/// Trailing-window rolling aggregate within each group. The result is the
/// source frame plus a "<col>_roll_<op>" column aligned with source rows;
/// the first window-1 rows of each group are Missing.
Frame group_rolling(const GroupedFrame& grouped, const std::string& col,
                    std::size_t window, AggOp op);

/// Hash join on equal key tuples. Output columns are all left columns then
/// the right non-key columns ("_2" suffix on name collisions). Missing
/// keys never match.
Frame join(const Frame& left, const Frame& right,
           const std::vector<std::string>& on, JoinKind kind);

}  // namespace tabula
