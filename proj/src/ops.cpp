#include "tabula/ops.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

namespace tabula {

namespace {

bool is_numeric_type(ColType t) {
  return t == ColType::I32 || t == ColType::I64 || t == ColType::F32 ||
         t == ColType::DD;
}

bool is_integral_type(ColType t) {
  return t == ColType::I32 || t == ColType::I64;
}

void check_agg_type(const std::string& col, ColType t, AggOp op) {
  if (agg_requires_numeric(op) && !is_numeric_type(t))
    throw TypeError("aggregate " + std::string(agg_op_name(op)) +
                    " requires a numeric column, \"" + col + "\" is " +
                    col_type_name(t));
}

double median_of_sorted(std::vector<double>& v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  if (n % 2 == 1) return v[n / 2];
  return (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

// Aggregate over the non-missing cells among `rows` of one column.
CellValue agg_cells(const std::vector<CellValue>& column,
                    const std::vector<std::size_t>& rows, ColType type,
                    AggOp op) {
  std::vector<std::size_t> live;
  live.reserve(rows.size());
  for (auto r : rows)
    if (!column[r].is_missing()) live.push_back(r);

  if (op == AggOp::Count)
    return CellValue(static_cast<std::int64_t>(live.size()));
  if (live.empty()) return CellValue::missing();

  switch (op) {
    case AggOp::Sum:
      if (is_integral_type(type)) {
        std::int64_t s = 0;
        for (auto r : live)
          s += column[r].holds<std::int32_t>()
                   ? column[r].get<std::int32_t>()
                   : column[r].get<std::int64_t>();
        return CellValue(s);
      } else {
        double s = 0;
        for (auto r : live) s += column[r].as_double();
        return CellValue(s);
      }
    case AggOp::Mean: {
      double s = 0;
      for (auto r : live) s += column[r].as_double();
      return CellValue(s / static_cast<double>(live.size()));
    }
    case AggOp::Std: {
      const std::size_t n = live.size();
      if (n == 1) return CellValue(0.0);
      double mean = 0;
      for (auto r : live) mean += column[r].as_double();
      mean /= static_cast<double>(n);
      double ss = 0;
      for (auto r : live) {
        const double d = column[r].as_double() - mean;
        ss += d * d;
      }
      return CellValue(std::sqrt(ss / static_cast<double>(n - 1)));
    }
    case AggOp::Median: {
      std::vector<double> v;
      v.reserve(live.size());
      for (auto r : live) v.push_back(column[r].as_double());
      return CellValue(median_of_sorted(v));
    }
    case AggOp::Min: {
      std::size_t best = live.front();
      for (auto r : live)
        if (compare_cells(column[r], column[best]) < 0) best = r;
      return column[best];
    }
    case AggOp::Max: {
      std::size_t best = live.front();
      for (auto r : live)
        if (compare_cells(column[r], column[best]) > 0) best = r;
      return column[best];
    }
    case AggOp::First:
      return column[live.front()];
    case AggOp::Last:
      return column[live.back()];
    default:
      break;
  }
  throw ArgumentError("unhandled aggregate operator");
}

std::vector<std::size_t> all_rows(const Frame& f) {
  std::vector<std::size_t> rows(f.row_count());
  std::iota(rows.begin(), rows.end(), 0);
  return rows;
}

struct KeyHash {
  std::size_t operator()(const std::vector<CellValue>& key) const noexcept {
    std::size_t h = key.size();
    CellHash ch;
    for (const auto& k : key)
      h ^= ch(k) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
  }
};

}  // namespace

const char* agg_op_name(AggOp op) {
  switch (op) {
    case AggOp::Sum: return "sum";
    case AggOp::Mean: return "mean";
    case AggOp::Min: return "min";
    case AggOp::Max: return "max";
    case AggOp::Count: return "count";
    case AggOp::Std: return "std";
    case AggOp::Median: return "median";
    case AggOp::First: return "first";
    case AggOp::Last: return "last";
  }
  return "?";
}

std::optional<AggOp> agg_op_from_name(std::string_view name) {
  static constexpr std::pair<std::string_view, AggOp> k[] = {
      {"sum", AggOp::Sum},     {"mean", AggOp::Mean},
      {"min", AggOp::Min},     {"max", AggOp::Max},
      {"count", AggOp::Count}, {"std", AggOp::Std},
      {"median", AggOp::Median}, {"first", AggOp::First},
      {"last", AggOp::Last},
  };
  for (auto [n, op] : k)
    if (n == name) return op;
  return std::nullopt;
}

bool agg_requires_numeric(AggOp op) {
  return op == AggOp::Sum || op == AggOp::Mean || op == AggOp::Std ||
         op == AggOp::Median;
}

ColType agg_result_type(ColType source, AggOp op) {
  switch (op) {
    case AggOp::Sum:
      return is_integral_type(source) ? ColType::I64 : ColType::DD;
    case AggOp::Mean:
    case AggOp::Std:
    case AggOp::Median:
      return ColType::DD;
    case AggOp::Count:
      return ColType::I64;
    default:
      return source;
  }
}

Frame add_column(const Frame& frame, std::string name,
                 std::vector<CellValue> values) {
  if (frame.has_column(name))
    throw SchemaError("column \"" + name + "\" already exists");
  if (values.size() != frame.row_count())
    throw DimensionError("column \"" + name + "\" has " +
                         std::to_string(values.size()) + " values, frame has " +
                         std::to_string(frame.row_count()) + " rows");
  std::vector<std::string> names = frame.column_names();
  std::vector<ColType> types = frame.column_types();
  std::vector<std::vector<CellValue>> data;
  data.reserve(frame.col_count() + 1);
  for (std::size_t c = 0; c < frame.col_count(); ++c)
    data.push_back(frame.column(c));
  types.push_back(infer_column_type(values, name));
  names.push_back(std::move(name));
  data.push_back(std::move(values));
  return Frame::from_columns(std::move(names), std::move(types),
                             std::move(data), frame.index());
}

Frame add_calculated_column(const Frame& frame, std::string name,
                            const RowFunction& fn) {
  std::vector<CellValue> values;
  values.reserve(frame.row_count());
  for (std::size_t r = 0; r < frame.row_count(); ++r)
    values.push_back(fn(RowView(frame, r)));
  return add_column(frame, std::move(name), std::move(values));
}

Frame insert_row(const Frame& frame, std::size_t at,
                 const std::vector<CellValue>& values, CellValue label) {
  if (at > frame.row_count())
    throw RangeError("insert position " + std::to_string(at) +
                     " out of range (" + std::to_string(frame.row_count()) +
                     ")");
  if (values.size() != frame.col_count())
    throw DimensionError("row has " + std::to_string(values.size()) +
                         " cells, frame has " +
                         std::to_string(frame.col_count()) + " columns");
  for (std::size_t c = 0; c < values.size(); ++c)
    if (!conforms(values[c], frame.column_type(c)))
      throw TypeError("value " + to_string(values[c]) +
                      " does not conform to column \"" +
                      frame.column_names()[c] + "\" (" +
                      col_type_name(frame.column_type(c)) + ")");

  std::vector<std::vector<CellValue>> data;
  data.reserve(frame.col_count());
  for (std::size_t c = 0; c < frame.col_count(); ++c) {
    auto col = frame.column(c);
    col.insert(col.begin() + static_cast<std::ptrdiff_t>(at), values[c]);
    data.push_back(std::move(col));
  }
  auto index = frame.index();
  index.insert(index.begin() + static_cast<std::ptrdiff_t>(at),
               std::move(label));
  return Frame::from_columns(frame.column_names(), frame.column_types(),
                             std::move(data), std::move(index));
}

Frame drop_missing(const Frame& frame, DropHow how,
                   const std::optional<std::vector<std::string>>& subset) {
  std::vector<std::size_t> cols;
  if (subset) {
    for (const auto& name : *subset) cols.push_back(frame.column_index(name));
  } else {
    cols = std::vector<std::size_t>(frame.col_count());
    std::iota(cols.begin(), cols.end(), 0);
  }
  std::vector<std::size_t> keep;
  for (std::size_t r = 0; r < frame.row_count(); ++r) {
    std::size_t missing = 0;
    for (auto c : cols)
      if (frame.cell_at(r, c).is_missing()) ++missing;
    const bool drop = how == DropHow::Any ? missing > 0
                                          : !cols.empty() && missing == cols.size();
    if (!drop) keep.push_back(r);
  }
  return frame.select(RowSel::at(std::move(keep)), {});
}

Frame fill_missing(const Frame& frame, const std::string& col,
                   const FillStrategy& strategy) {
  const std::size_t c = frame.column_index(col);
  const ColType type = frame.column_type(c);
  auto values = frame.column(c);
  ColType out_type = type;

  switch (strategy.kind) {
    case FillStrategy::Kind::Constant: {
      if (!conforms(strategy.value, type))
        throw TypeError("fill value " + to_string(strategy.value) +
                        " does not conform to column \"" + col + "\" (" +
                        col_type_name(type) + ")");
      for (auto& v : values)
        if (v.is_missing()) v = strategy.value;
      break;
    }
    case FillStrategy::Kind::Mean:
    case FillStrategy::Kind::Median: {
      if (!is_numeric_type(type))
        throw TypeError("fill strategy requires a numeric column, \"" + col +
                        "\" is " + col_type_name(type));
      std::vector<double> live;
      for (const auto& v : values)
        if (!v.is_missing()) live.push_back(v.as_double());
      if (live.empty())
        throw DomainError("column \"" + col +
                          "\" has no values to fill from");
      double fill;
      if (strategy.kind == FillStrategy::Kind::Mean) {
        fill = std::accumulate(live.begin(), live.end(), 0.0) /
               static_cast<double>(live.size());
      } else {
        fill = median_of_sorted(live);
      }
      // A fractional fill cannot live in an integer column; the whole
      // column is widened to DD in that case.
      if (is_integral_type(type)) {
        out_type = ColType::DD;
        for (auto& v : values)
          if (!v.is_missing()) v = CellValue(v.as_double());
      } else if (type == ColType::F32) {
        out_type = ColType::F32;
      }
      for (auto& v : values) {
        if (!v.is_missing()) continue;
        v = out_type == ColType::F32 ? CellValue(static_cast<float>(fill))
                                     : CellValue(fill);
      }
      break;
    }
    case FillStrategy::Kind::ForwardFill: {
      const CellValue* prev = nullptr;
      for (auto& v : values) {
        if (v.is_missing()) {
          if (prev) v = *prev;  // leading Missing stays
        } else {
          prev = &v;
        }
      }
      break;
    }
  }

  std::vector<std::vector<CellValue>> data;
  std::vector<ColType> types = frame.column_types();
  types[c] = out_type;
  data.reserve(frame.col_count());
  for (std::size_t i = 0; i < frame.col_count(); ++i)
    data.push_back(i == c ? values : frame.column(i));
  return Frame::from_columns(frame.column_names(), std::move(types),
                             std::move(data), frame.index());
}

std::vector<std::pair<std::string, CellValue>> aggregate(const Frame& frame,
                                                         const AggSpec& spec) {
  std::vector<std::pair<std::string, CellValue>> out;
  out.reserve(spec.size());
  const auto rows = all_rows(frame);
  for (const auto& [col, op] : spec) {
    const std::size_t c = frame.column_index(col);
    check_agg_type(col, frame.column_type(c), op);
    out.emplace_back(col, agg_cells(frame.column(c), rows,
                                    frame.column_type(c), op));
  }
  return out;
}

Frame filter(const Frame& frame, const RowPredicate& pred) {
  std::vector<std::size_t> keep;
  for (std::size_t r = 0; r < frame.row_count(); ++r)
    if (pred(RowView(frame, r))) keep.push_back(r);
  return frame.select(RowSel::at(std::move(keep)), {});
}

Frame remove_rows(const Frame& frame, const RowPredicate& pred) {
  return filter(frame, [&pred](const RowView& row) { return !pred(row); });
}

Frame sort_by(const Frame& frame, const SortSpec& keys) {
  if (keys.empty()) throw ArgumentError("sort_by requires at least one key");
  std::vector<std::size_t> cols;
  cols.reserve(keys.size());
  for (const auto& [name, _] : keys) cols.push_back(frame.column_index(name));

  std::vector<std::size_t> perm = all_rows(frame);
  std::stable_sort(perm.begin(), perm.end(),
                   [&](std::size_t a, std::size_t b) {
                     for (std::size_t k = 0; k < keys.size(); ++k) {
                       const auto& col = frame.column(cols[k]);
                       int c = compare_cells(col[a], col[b]);
                       if (keys[k].second == SortOrder::Descending) c = -c;
                       if (c != 0) return c < 0;
                     }
                     return false;
                   });
  return frame.select(RowSel::at(std::move(perm)), {});
}

GroupedFrame group_by(const Frame& frame, std::vector<std::string> keys) {
  if (keys.empty() || keys.size() > 3)
    throw ArgumentError("group_by takes one, two or three key columns, got " +
                        std::to_string(keys.size()));
  std::vector<std::size_t> key_cols;
  key_cols.reserve(keys.size());
  for (const auto& name : keys) key_cols.push_back(frame.column_index(name));

  std::unordered_map<std::vector<CellValue>, std::size_t, KeyHash> lookup;
  std::vector<std::vector<CellValue>> group_keys;
  std::vector<std::vector<std::size_t>> group_rows;
  for (std::size_t r = 0; r < frame.row_count(); ++r) {
    std::vector<CellValue> key;
    key.reserve(key_cols.size());
    for (auto c : key_cols) key.push_back(frame.cell_at(r, c));
    auto [it, inserted] = lookup.try_emplace(key, group_keys.size());
    if (inserted) {
      group_keys.push_back(std::move(key));
      group_rows.emplace_back();
    }
    group_rows[it->second].push_back(r);
  }

  std::vector<GroupedFrame::Group> groups;
  groups.reserve(group_keys.size());
  for (std::size_t g = 0; g < group_keys.size(); ++g)
    groups.push_back({std::move(group_keys[g]), group_rows[g],
                      frame.select(RowSel::at(group_rows[g]), {})});
  return GroupedFrame(frame, std::move(keys), std::move(groups));
}

Frame group_aggregate(const GroupedFrame& grouped, const AggSpec& spec) {
  const Frame& src = grouped.source();

  FrameBuilder out;
  for (const auto& key : grouped.keys())
    out.add_column(key, src.column_type(src.column_index(key)));
  for (const auto& [col, op] : spec) {
    const std::size_t c = src.column_index(col);
    check_agg_type(col, src.column_type(c), op);
    out.add_column(col + "_" + agg_op_name(op),
                   agg_result_type(src.column_type(c), op));
  }

  out.reserve_rows(grouped.size());
  std::int64_t row = 0;
  for (const auto& group : grouped.groups()) {
    std::vector<CellValue> cells = group.key;
    for (const auto& [col, op] : spec) {
      const std::size_t c = src.column_index(col);
      cells.push_back(agg_cells(src.column(c), group.source_rows,
                                src.column_type(c), op));
    }
    out.push_row(std::move(cells), CellValue(row++));
  }
  return std::move(out).build();
}

Frame group_rolling(const GroupedFrame& grouped, const std::string& col,
                    std::size_t window, AggOp op) {
  if (window == 0) throw ArgumentError("rolling window must be at least 1");
  const Frame& src = grouped.source();
  const std::size_t c = src.column_index(col);
  check_agg_type(col, src.column_type(c), op);

  std::vector<CellValue> rolled(src.row_count());
  for (const auto& group : grouped.groups()) {
    const auto& rows = group.source_rows;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (i + 1 < window) continue;  // unfilled window -> Missing
      std::vector<std::size_t> win(rows.begin() + static_cast<std::ptrdiff_t>(i + 1 - window),
                                   rows.begin() + static_cast<std::ptrdiff_t>(i + 1));
      rolled[rows[i]] = agg_cells(src.column(c), win, src.column_type(c), op);
    }
  }

  std::vector<std::string> names = src.column_names();
  std::vector<ColType> types = src.column_types();
  std::vector<std::vector<CellValue>> data;
  data.reserve(src.col_count() + 1);
  for (std::size_t i = 0; i < src.col_count(); ++i)
    data.push_back(src.column(i));
  names.push_back(col + "_roll_" + agg_op_name(op));
  types.push_back(agg_result_type(src.column_type(c), op));
  data.push_back(std::move(rolled));
  return Frame::from_columns(std::move(names), std::move(types),
                             std::move(data), src.index());
}

Frame join(const Frame& left, const Frame& right,
           const std::vector<std::string>& on, JoinKind kind) {
  if (on.empty()) throw ArgumentError("join requires at least one key column");
  std::vector<std::size_t> lk, rk;
  for (const auto& name : on) {
    lk.push_back(left.column_index(name));
    rk.push_back(right.column_index(name));
    if (left.column_type(lk.back()) != right.column_type(rk.back()))
      throw SchemaError("join key \"" + name + "\" has type " +
                        col_type_name(left.column_type(lk.back())) +
                        " on the left and " +
                        col_type_name(right.column_type(rk.back())) +
                        " on the right");
  }

  // Right columns that are not keys, in right order.
  std::vector<std::size_t> rcols;
  for (std::size_t c = 0; c < right.col_count(); ++c)
    if (std::find(rk.begin(), rk.end(), c) == rk.end()) rcols.push_back(c);

  FrameBuilder out;
  std::vector<std::string> out_names = left.column_names();
  for (std::size_t c = 0; c < left.col_count(); ++c)
    out.add_column(left.column_names()[c], left.column_type(c));
  for (auto c : rcols) {
    std::string name = right.column_names()[c];
    if (std::find(out_names.begin(), out_names.end(), name) != out_names.end())
      name += "_2";
    if (std::find(out_names.begin(), out_names.end(), name) != out_names.end())
      throw SchemaError("join output column \"" + name +
                        "\" collides after suffixing");
    out_names.push_back(name);
    out.add_column(name, right.column_type(c));
  }

  // Build side: right rows keyed by tuple; Missing keys never match.
  std::unordered_map<std::vector<CellValue>, std::vector<std::size_t>, KeyHash>
      table;
  for (std::size_t r = 0; r < right.row_count(); ++r) {
    std::vector<CellValue> key;
    key.reserve(rk.size());
    bool has_missing = false;
    for (auto c : rk) {
      const auto& v = right.cell_at(r, c);
      if (v.is_missing()) {
        has_missing = true;
        break;
      }
      key.push_back(v);
    }
    if (!has_missing) table[std::move(key)].push_back(r);
  }

  std::int64_t row = 0;
  auto emit = [&](std::size_t lrow, std::optional<std::size_t> rrow) {
    std::vector<CellValue> cells;
    cells.reserve(left.col_count() + rcols.size());
    for (std::size_t c = 0; c < left.col_count(); ++c)
      cells.push_back(left.cell_at(lrow, c));
    for (auto c : rcols)
      cells.push_back(rrow ? right.cell_at(*rrow, c) : CellValue::missing());
    out.push_row(std::move(cells), CellValue(row++));
  };

  for (std::size_t l = 0; l < left.row_count(); ++l) {
    std::vector<CellValue> key;
    key.reserve(lk.size());
    bool has_missing = false;
    for (auto c : lk) {
      const auto& v = left.cell_at(l, c);
      if (v.is_missing()) {
        has_missing = true;
        break;
      }
      key.push_back(v);
    }
    const std::vector<std::size_t>* matches = nullptr;
    if (!has_missing) {
      auto it = table.find(key);
      if (it != table.end()) matches = &it->second;
    }
    if (matches) {
      for (auto r : *matches) emit(l, r);
    } else if (kind == JoinKind::Left) {
      emit(l, std::nullopt);
    }
  }
  return std::move(out).build();
}

}  // namespace tabula
