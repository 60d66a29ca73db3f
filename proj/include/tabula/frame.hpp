#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tabula/cell.hpp"

namespace tabula {

/// One indexed value column: the time-series view of a frame column.
struct Series {
  std::vector<CellValue> index;
  std::string name;
  ColType type = ColType::DD;
  std::vector<CellValue> values;

  std::size_t size() const noexcept { return values.size(); }

  /// All values as doubles. Throws DomainError when a Missing cell is
  /// present and TypeError when the series is not numeric.
  std::vector<double> numeric_values() const;

  /// Build a DD series over a default 0..n-1 integer index.
  static Series from_doubles(std::string name, const std::vector<double>& v);
  static Series from_doubles(std::string name, const std::vector<double>& v,
                             std::vector<CellValue> index);
};

/// Row selector for Frame::select.
struct RowSel {
  enum class Kind { All, Positions, Labels, Head, Tail };
  Kind kind = Kind::All;
  std::vector<std::size_t> positions;
  std::vector<CellValue> labels;
  std::size_t count = 0;

  static RowSel all() { return {}; }
  static RowSel at(std::vector<std::size_t> pos) {
    return {Kind::Positions, std::move(pos), {}, 0};
  }
  static RowSel with_labels(std::vector<CellValue> lab) {
    return {Kind::Labels, {}, std::move(lab), 0};
  }
  static RowSel head(std::size_t n) { return {Kind::Head, {}, {}, n}; }
  static RowSel tail(std::size_t n) { return {Kind::Tail, {}, {}, n}; }
};

/// Column selector for Frame::select.
struct ColSel {
  enum class Kind { All, Names, Positions };
  Kind kind = Kind::All;
  std::vector<std::string> names;
  std::vector<std::size_t> positions;

  static ColSel all() { return {}; }
  static ColSel with_names(std::vector<std::string> n) {
    return {Kind::Names, std::move(n), {}};
  }
  static ColSel at(std::vector<std::size_t> pos) {
    return {Kind::Positions, {}, std::move(pos)};
  }
};

/// Columnar table: unique named typed columns, a row label list, and one
/// value vector per column, all of equal length.
///
/// Frames are immutable after construction; every operation returns a new
/// Frame, so concurrent reads of one Frame are safe.
class Frame {
 public:
  Frame() = default;

  /// Build from row-major flat values, e.g. {a0,b0,a1,b1} for columns
  /// {a,b} and row_count 2. Column types are taken from the cell tags;
  /// a column may not mix non-missing tags.
  static Frame from_lists(std::vector<std::string> columns,
                          std::size_t row_count,
                          const std::vector<CellValue>& row_major);

  /// Build from (name, column values) pairs; order of pairs is kept.
  static Frame from_dict(
      const std::vector<std::pair<std::string, std::vector<CellValue>>>& pairs);

  /// Internal-ish constructor from ready column vectors. Validates the
  /// structural invariants and cell/type conformance.
  static Frame from_columns(std::vector<std::string> names,
                            std::vector<ColType> types,
                            std::vector<std::vector<CellValue>> data,
                            std::vector<CellValue> index);

  std::size_t row_count() const noexcept { return index_.size(); }
  std::size_t col_count() const noexcept { return names_.size(); }

  const std::vector<std::string>& column_names() const noexcept {
    return names_;
  }
  const std::vector<ColType>& column_types() const noexcept { return types_; }
  const std::vector<CellValue>& index() const noexcept { return index_; }

  bool has_column(std::string_view name) const noexcept;
  /// Position of a named column; throws LookupError when absent.
  std::size_t column_index(std::string_view name) const;
  ColType column_type(std::size_t col) const;
  ColType column_type(std::string_view name) const {
    return types_[column_index(name)];
  }
  const std::vector<CellValue>& column(std::size_t col) const;
  const std::vector<CellValue>& column(std::string_view name) const {
    return data_[column_index(name)];
  }

  const CellValue& cell_at(std::size_t row, std::size_t col) const;
  const CellValue& cell_at(std::size_t row, std::string_view name) const {
    return cell_at(row, column_index(name));
  }

  Frame select(const RowSel& rows, const ColSel& cols) const;
  Frame head(std::size_t n) const { return select(RowSel::head(n), {}); }
  Frame tail(std::size_t n) const { return select(RowSel::tail(n), {}); }

  Series to_series(std::string_view name) const;

  /// Same data under a caller-provided label list.
  Frame with_index(std::vector<CellValue> index) const;

 private:
  std::vector<std::string> names_;
  std::vector<ColType> types_;
  std::vector<CellValue> index_;
  std::vector<std::vector<CellValue>> data_;  // column-major

  friend class FrameBuilder;
};

/// Mutable staging area used by operations that assemble a frame row by
/// row or column by column before freezing it into an immutable Frame.
class FrameBuilder {
 public:
  FrameBuilder() = default;
  explicit FrameBuilder(const Frame& schema_source);  // copies schema only

  void add_column(std::string name, ColType type);
  void reserve_rows(std::size_t n);
  /// Append a whole row plus its label; cells must conform to the types.
  void push_row(std::vector<CellValue> cells, CellValue label);
  /// Append one cell to a column (caller keeps lengths consistent).
  void push_cell(std::size_t col, CellValue v);
  void push_label(CellValue label);

  std::size_t col_count() const noexcept { return names_.size(); }

  Frame build() &&;

 private:
  std::vector<std::string> names_;
  std::vector<ColType> types_;
  std::vector<CellValue> index_;
  std::vector<std::vector<CellValue>> data_;
};

/// Default dense integer labels 0..n-1.
std::vector<CellValue> default_index(std::size_t n);

/// The unique non-missing tag of a value list (STR for all-missing or
/// empty). Throws TypeError when two non-missing tags disagree.
ColType infer_column_type(const std::vector<CellValue>& values,
                          std::string_view column_name);

}  // namespace tabula
