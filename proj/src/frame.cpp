#include "tabula/frame.hpp"

#include <algorithm>
#include <unordered_set>

namespace tabula {

namespace {

void check_unique_names(const std::vector<std::string>& names) {
  std::unordered_set<std::string_view> seen;
  for (const auto& n : names)
    if (!seen.insert(n).second)
      throw SchemaError("duplicate column name \"" + n + "\"");
}

}  // namespace

std::vector<CellValue> default_index(std::size_t n) {
  std::vector<CellValue> idx;
  idx.reserve(n);
  for (std::size_t i = 0; i < n; ++i)
    idx.emplace_back(static_cast<std::int64_t>(i));
  return idx;
}

ColType infer_column_type(const std::vector<CellValue>& values,
                          std::string_view column_name) {
  std::optional<ColType> tag;
  for (const auto& v : values) {
    if (v.is_missing()) continue;
    const auto t = *v.tag();
    if (!tag) {
      tag = t;
    } else if (*tag != t) {
      throw TypeError("column \"" + std::string(column_name) +
                      "\" mixes value types " + col_type_name(*tag) + " and " +
                      col_type_name(t));
    }
  }
  return tag.value_or(ColType::STR);
}

std::vector<double> Series::numeric_values() const {
  std::vector<double> out;
  out.reserve(values.size());
  for (const auto& v : values) {
    if (v.is_missing())
      throw DomainError("series \"" + name + "\" contains missing values");
    out.push_back(v.as_double());
  }
  return out;
}

Series Series::from_doubles(std::string name, const std::vector<double>& v) {
  return from_doubles(std::move(name), v, default_index(v.size()));
}

Series Series::from_doubles(std::string name, const std::vector<double>& v,
                            std::vector<CellValue> index) {
  if (index.size() != v.size())
    throw DimensionError("series index length " + std::to_string(index.size()) +
                         " != value length " + std::to_string(v.size()));
  Series s;
  s.name = std::move(name);
  s.type = ColType::DD;
  s.index = std::move(index);
  s.values.reserve(v.size());
  for (double x : v) s.values.emplace_back(x);
  return s;
}

Frame Frame::from_lists(std::vector<std::string> columns,
                        std::size_t row_count,
                        const std::vector<CellValue>& row_major) {
  const std::size_t ncol = columns.size();
  if (row_major.size() != row_count * ncol)
    throw DimensionError("expected " + std::to_string(row_count * ncol) +
                         " values for " + std::to_string(row_count) + "x" +
                         std::to_string(ncol) + " frame, got " +
                         std::to_string(row_major.size()));
  std::vector<std::vector<CellValue>> data(ncol);
  for (auto& col : data) col.reserve(row_count);
  for (std::size_t r = 0; r < row_count; ++r)
    for (std::size_t c = 0; c < ncol; ++c)
      data[c].push_back(row_major[r * ncol + c]);

  std::vector<ColType> types;
  types.reserve(ncol);
  for (std::size_t c = 0; c < ncol; ++c)
    types.push_back(infer_column_type(data[c], columns[c]));
  return from_columns(std::move(columns), std::move(types), std::move(data),
                      default_index(row_count));
}

Frame Frame::from_dict(
    const std::vector<std::pair<std::string, std::vector<CellValue>>>& pairs) {
  std::vector<std::string> names;
  std::vector<ColType> types;
  std::vector<std::vector<CellValue>> data;
  std::size_t rows = pairs.empty() ? 0 : pairs.front().second.size();
  for (const auto& [name, values] : pairs) {
    if (values.size() != rows)
      throw DimensionError("column \"" + name + "\" has " +
                           std::to_string(values.size()) + " values, expected " +
                           std::to_string(rows));
    names.push_back(name);
    types.push_back(infer_column_type(values, name));
    data.push_back(values);
  }
  return from_columns(std::move(names), std::move(types), std::move(data),
                      default_index(rows));
}

Frame Frame::from_columns(std::vector<std::string> names,
                          std::vector<ColType> types,
                          std::vector<std::vector<CellValue>> data,
                          std::vector<CellValue> index) {
  check_unique_names(names);
  if (types.size() != names.size() || data.size() != names.size())
    throw DimensionError("names/types/data length mismatch");
  for (std::size_t c = 0; c < data.size(); ++c) {
    if (data[c].size() != index.size())
      throw DimensionError("column \"" + names[c] + "\" has " +
                           std::to_string(data[c].size()) +
                           " values, index has " +
                           std::to_string(index.size()));
    for (const auto& v : data[c])
      if (!conforms(v, types[c]))
        throw TypeError("value " + to_string(v) +
                        " does not conform to column \"" + names[c] + "\" (" +
                        col_type_name(types[c]) + ")");
  }
  Frame f;
  f.names_ = std::move(names);
  f.types_ = std::move(types);
  f.data_ = std::move(data);
  f.index_ = std::move(index);
  return f;
}

bool Frame::has_column(std::string_view name) const noexcept {
  return std::find(names_.begin(), names_.end(), name) != names_.end();
}

std::size_t Frame::column_index(std::string_view name) const {
  auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end())
    throw LookupError("unknown column \"" + std::string(name) + "\"");
  return static_cast<std::size_t>(it - names_.begin());
}

ColType Frame::column_type(std::size_t col) const {
  if (col >= types_.size())
    throw LookupError("column position " + std::to_string(col) +
                      " out of range (" + std::to_string(types_.size()) + ")");
  return types_[col];
}

const std::vector<CellValue>& Frame::column(std::size_t col) const {
  if (col >= data_.size())
    throw LookupError("column position " + std::to_string(col) +
                      " out of range (" + std::to_string(data_.size()) + ")");
  return data_[col];
}

const CellValue& Frame::cell_at(std::size_t row, std::size_t col) const {
  const auto& c = column(col);
  if (row >= c.size())
    throw LookupError("row position " + std::to_string(row) +
                      " out of range (" + std::to_string(c.size()) + ")");
  return c[row];
}

Frame Frame::select(const RowSel& rows, const ColSel& cols) const {
  // Resolve column positions first so lookup errors surface before work.
  std::vector<std::size_t> cpos;
  switch (cols.kind) {
    case ColSel::Kind::All:
      cpos.resize(col_count());
      for (std::size_t i = 0; i < cpos.size(); ++i) cpos[i] = i;
      break;
    case ColSel::Kind::Names:
      cpos.reserve(cols.names.size());
      for (const auto& n : cols.names) cpos.push_back(column_index(n));
      break;
    case ColSel::Kind::Positions:
      for (auto p : cols.positions)
        if (p >= col_count())
          throw LookupError("column position " + std::to_string(p) +
                            " out of range (" + std::to_string(col_count()) +
                            ")");
      cpos = cols.positions;
      break;
  }

  std::vector<std::size_t> rpos;
  switch (rows.kind) {
    case RowSel::Kind::All:
      rpos.resize(row_count());
      for (std::size_t i = 0; i < rpos.size(); ++i) rpos[i] = i;
      break;
    case RowSel::Kind::Positions:
      for (auto p : rows.positions)
        if (p >= row_count())
          throw LookupError("row position " + std::to_string(p) +
                            " out of range (" + std::to_string(row_count()) +
                            ")");
      rpos = rows.positions;
      break;
    case RowSel::Kind::Labels:
      for (const auto& lab : rows.labels) {
        bool found = false;
        for (std::size_t i = 0; i < index_.size(); ++i) {
          if (index_[i] == lab) {
            rpos.push_back(i);
            found = true;
          }
        }
        if (!found)
          throw LookupError("row label " + to_string(lab) + " not found");
      }
      break;
    case RowSel::Kind::Head: {
      const std::size_t n = std::min(rows.count, row_count());
      rpos.resize(n);
      for (std::size_t i = 0; i < n; ++i) rpos[i] = i;
      break;
    }
    case RowSel::Kind::Tail: {
      const std::size_t n = std::min(rows.count, row_count());
      rpos.resize(n);
      for (std::size_t i = 0; i < n; ++i) rpos[i] = row_count() - n + i;
      break;
    }
  }

  std::vector<std::string> names;
  std::vector<ColType> types;
  std::vector<std::vector<CellValue>> data;
  names.reserve(cpos.size());
  for (auto c : cpos) {
    names.push_back(names_[c]);
    types.push_back(types_[c]);
    std::vector<CellValue> col;
    col.reserve(rpos.size());
    for (auto r : rpos) col.push_back(data_[c][r]);
    data.push_back(std::move(col));
  }
  std::vector<CellValue> index;
  index.reserve(rpos.size());
  for (auto r : rpos) index.push_back(index_[r]);
  return from_columns(std::move(names), std::move(types), std::move(data),
                      std::move(index));
}

Series Frame::to_series(std::string_view name) const {
  const std::size_t c = column_index(name);
  Series s;
  s.index = index_;
  s.name = names_[c];
  s.type = types_[c];
  s.values = data_[c];
  return s;
}

Frame Frame::with_index(std::vector<CellValue> index) const {
  if (index.size() != row_count())
    throw DimensionError("index length " + std::to_string(index.size()) +
                         " != row count " + std::to_string(row_count()));
  Frame f = *this;
  f.index_ = std::move(index);
  return f;
}

FrameBuilder::FrameBuilder(const Frame& schema_source)
    : names_(schema_source.column_names()),
      types_(schema_source.column_types()),
      data_(schema_source.col_count()) {}

void FrameBuilder::add_column(std::string name, ColType type) {
  names_.push_back(std::move(name));
  types_.push_back(type);
  data_.emplace_back();
}

void FrameBuilder::reserve_rows(std::size_t n) {
  index_.reserve(n);
  for (auto& col : data_) col.reserve(n);
}

void FrameBuilder::push_row(std::vector<CellValue> cells, CellValue label) {
  if (cells.size() != data_.size())
    throw DimensionError("row has " + std::to_string(cells.size()) +
                         " cells, frame has " + std::to_string(data_.size()) +
                         " columns");
  for (std::size_t c = 0; c < cells.size(); ++c)
    data_[c].push_back(std::move(cells[c]));
  index_.push_back(std::move(label));
}

void FrameBuilder::push_cell(std::size_t col, CellValue v) {
  data_[col].push_back(std::move(v));
}

void FrameBuilder::push_label(CellValue label) {
  index_.push_back(std::move(label));
}

Frame FrameBuilder::build() && {
  return Frame::from_columns(std::move(names_), std::move(types_),
                             std::move(data_), std::move(index_));
}

}  // namespace tabula
