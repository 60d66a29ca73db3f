#include "tabula/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "tabula/http.hpp"
#include "tabula/stats.hpp"
#include "tabula/tsa.hpp"

namespace tabula {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
    s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
    s.remove_suffix(1);
  return s;
}

std::vector<std::string> split_list(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    std::size_t next = s.find(sep, pos);
    if (next == std::string_view::npos) next = s.size();
    out.emplace_back(trim(s.substr(pos, next - pos)));
    pos = next + 1;
  }
  if (!out.empty() && out.back().empty() && s.empty()) out.clear();
  return out;
}

std::string to_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out)
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::size_t parse_count(const std::string& text, const char* what) {
  std::size_t v = 0;
  std::size_t i = 0;
  if (text.empty()) throw ArgumentError(std::string(what) + " is empty");
  for (; i < text.size(); ++i) {
    if (text[i] < '0' || text[i] > '9')
      throw ArgumentError(std::string(what) + " must be a non-negative integer, got \"" +
                          text + "\"");
    v = v * 10 + static_cast<std::size_t>(text[i] - '0');
  }
  return v;
}

bool parse_flag(const std::string& text, const char* what) {
  const std::string t = to_lower(text);
  if (t == "true" || t == "1" || t == "yes") return true;
  if (t == "false" || t == "0" || t == "no") return false;
  throw ArgumentError(std::string(what) + " must be true or false, got \"" +
                      text + "\"");
}

bool is_numeric_type(ColType t) {
  return t == ColType::I32 || t == ColType::I64 || t == ColType::F32 ||
         t == ColType::DD;
}

// ---------------------------------------------------------------------
// Filter expression parsing

struct Cursor {
  std::string_view s;
  std::size_t pos = 0;

  void skip_ws() {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos])))
      ++pos;
  }
  bool at_end() const { return pos >= s.size(); }
};

bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' ||
         c == '-';
}

std::string read_column_name(Cursor& cur) {
  cur.skip_ws();
  if (cur.at_end())
    throw ParseError("expected column name at offset " +
                     std::to_string(cur.pos));
  if (cur.s[cur.pos] == '`') {
    const std::size_t start = ++cur.pos;
    const std::size_t end = cur.s.find('`', start);
    if (end == std::string_view::npos)
      throw ParseError("unterminated back-quoted name at offset " +
                       std::to_string(start - 1));
    cur.pos = end + 1;
    return std::string(cur.s.substr(start, end - start));
  }
  const std::size_t start = cur.pos;
  while (cur.pos < cur.s.size() && ident_char(cur.s[cur.pos])) ++cur.pos;
  if (cur.pos == start)
    throw ParseError("expected column name at offset " +
                     std::to_string(cur.pos));
  return std::string(cur.s.substr(start, cur.pos - start));
}

FilterClause::Op read_operator(Cursor& cur) {
  cur.skip_ws();
  const auto rest = cur.s.substr(cur.pos);
  auto take = [&](std::string_view tok, FilterClause::Op op) {
    cur.pos += tok.size();
    return op;
  };
  if (rest.rfind("==", 0) == 0) return take("==", FilterClause::Op::Eq);
  if (rest.rfind("!=", 0) == 0) return take("!=", FilterClause::Op::Ne);
  if (rest.rfind("<=", 0) == 0) return take("<=", FilterClause::Op::Le);
  if (rest.rfind(">=", 0) == 0) return take(">=", FilterClause::Op::Ge);
  if (rest.rfind("<", 0) == 0) return take("<", FilterClause::Op::Lt);
  if (rest.rfind(">", 0) == 0) return take(">", FilterClause::Op::Gt);
  if (rest.rfind("contains", 0) == 0 &&
      (rest.size() == 8 || !ident_char(rest[8])))
    return take("contains", FilterClause::Op::Contains);
  throw ParseError("expected comparison operator at offset " +
                   std::to_string(cur.pos));
}

std::string read_literal(Cursor& cur) {
  cur.skip_ws();
  if (cur.at_end())
    throw ParseError("expected literal at offset " + std::to_string(cur.pos));
  if (cur.s[cur.pos] == '"') {
    std::string out;
    ++cur.pos;
    while (true) {
      if (cur.at_end())
        throw ParseError("unterminated string literal at offset " +
                         std::to_string(cur.pos));
      const char c = cur.s[cur.pos++];
      if (c == '"') break;
      if (c == '\\' && !cur.at_end()) {
        out.push_back(cur.s[cur.pos++]);
        continue;
      }
      out.push_back(c);
    }
    return out;
  }
  const std::size_t start = cur.pos;
  while (cur.pos < cur.s.size() &&
         !std::isspace(static_cast<unsigned char>(cur.s[cur.pos])))
    ++cur.pos;
  return std::string(cur.s.substr(start, cur.pos - start));
}

const ColumnSchema& schema_lookup(const Schema& schema,
                                  const std::string& name) {
  for (const auto& col : schema)
    if (col.name == name) return col;
  throw LookupError("unknown column \"" + name + "\"");
}

void type_clause(FilterClause& clause, ColType type) {
  if (clause.op == FilterClause::Op::Contains) {
    if (type != ColType::STR && type != ColType::IN)
      throw TypeError("contains requires a string column, \"" + clause.column +
                      "\" is " + col_type_name(type));
    clause.literal = CellValue(clause.literal_text);
    clause.typed = true;
    return;
  }
  auto cell = parse_cell(clause.literal_text, type);
  if (!cell)
    throw TypeError("literal \"" + clause.literal_text +
                    "\" does not parse as " + col_type_name(type) +
                    " for column \"" + clause.column + "\"");
  clause.literal = std::move(*cell);
  clause.typed = true;
}

// ---------------------------------------------------------------------
// Step argument access

const std::string* find_arg(const PipelineStep& step, const char* key) {
  auto it = step.kv.find(key);
  return it == step.kv.end() ? nullptr : &it->second;
}

std::string require_arg(const PipelineStep& step, const char* key) {
  if (const auto* v = find_arg(step, key)) return *v;
  throw ArgumentError(step.name + " requires " + key + "=...");
}

std::string list_arg_or_rest(const PipelineStep& step, const char* key) {
  if (const auto* v = find_arg(step, key)) return *v;
  if (!step.rest.empty()) return step.rest;
  throw ArgumentError(step.name + " requires " + key + "=... or a positional list");
}

SortSpec parse_sort_spec(const PipelineStep& step) {
  SortSpec spec;
  for (const auto& item : split_list(list_arg_or_rest(step, "by"), ',')) {
    if (item.empty()) throw ArgumentError("empty sort key");
    const std::size_t colon = item.rfind(':');
    std::string name = item;
    SortOrder order = SortOrder::Ascending;
    if (colon != std::string::npos) {
      const std::string suffix = to_lower(trim(item.substr(colon + 1)));
      if (suffix == "asc" || suffix == "desc") {
        name = std::string(trim(item.substr(0, colon)));
        order = suffix == "desc" ? SortOrder::Descending : SortOrder::Ascending;
      }
    }
    spec.emplace_back(name, order);
  }
  if (spec.empty()) throw ArgumentError("sort requires at least one key");
  return spec;
}

std::pair<std::vector<std::string>, AggSpec> parse_groupby_spec(
    const PipelineStep& step) {
  auto keys = split_list(require_arg(step, "by"), ',');
  AggSpec agg;
  for (const auto& item : split_list(require_arg(step, "agg"), ',')) {
    const std::size_t colon = item.rfind(':');
    if (colon == std::string::npos)
      throw ArgumentError("agg entry \"" + item + "\" must be column:op");
    const std::string col(trim(item.substr(0, colon)));
    const std::string opname = to_lower(trim(item.substr(colon + 1)));
    const auto op = agg_op_from_name(opname);
    if (!op) throw ArgumentError("unknown aggregate op \"" + opname + "\"");
    agg.emplace_back(col, *op);
  }
  if (agg.empty()) throw ArgumentError("groupby requires agg=col:op,...");
  return {std::move(keys), std::move(agg)};
}

struct FillArgs {
  std::string col;
  FillStrategy::Kind kind = FillStrategy::Kind::ForwardFill;
  std::string value_text;
};

FillArgs parse_fill_args(const PipelineStep& step) {
  FillArgs args;
  args.col = require_arg(step, "col");
  const std::string strategy = to_lower(require_arg(step, "strategy"));
  if (strategy == "mean") {
    args.kind = FillStrategy::Kind::Mean;
  } else if (strategy == "median") {
    args.kind = FillStrategy::Kind::Median;
  } else if (strategy == "ffill" || strategy == "forward") {
    args.kind = FillStrategy::Kind::ForwardFill;
  } else if (strategy == "const" || strategy == "constant") {
    args.kind = FillStrategy::Kind::Constant;
    args.value_text = require_arg(step, "value");
  } else {
    throw ArgumentError("unknown fill strategy \"" + strategy + "\"");
  }
  return args;
}

struct JoinArgs {
  std::string path;
  std::vector<std::string> on;
  JoinKind kind = JoinKind::Inner;
  char sep = ',';
};

JoinArgs parse_join_args(const PipelineStep& step) {
  JoinArgs args;
  args.path = require_arg(step, "with");
  args.on = split_list(require_arg(step, "on"), ',');
  if (const auto* k = find_arg(step, "kind")) {
    const std::string kind = to_lower(*k);
    if (kind == "inner")
      args.kind = JoinKind::Inner;
    else if (kind == "left")
      args.kind = JoinKind::Left;
    else
      throw ArgumentError("join kind must be inner or left, got \"" + *k + "\"");
  }
  if (const auto* s = find_arg(step, "sep")) {
    if (s->size() != 1)
      throw ArgumentError("join sep must be a single character");
    args.sep = (*s)[0];
  }
  return args;
}

std::vector<std::vector<std::size_t>> parse_groups(const std::string& text) {
  std::vector<std::vector<std::size_t>> groups;
  for (const auto& g : split_list(text, ';')) {
    std::vector<std::size_t> idx;
    for (const auto& item : split_list(g, ','))
      if (!item.empty()) idx.push_back(parse_count(item, "eigentriple index"));
    groups.push_back(std::move(idx));
  }
  if (groups.empty()) throw ArgumentError("ssa requires groups=i,j;k,...");
  return groups;
}

StlParams parse_stl_params(const PipelineStep& step) {
  StlParams p;
  p.period = parse_count(require_arg(step, "period"), "period");
  if (const auto* v = find_arg(step, "robust")) p.robust = parse_flag(*v, "robust");
  if (const auto* v = find_arg(step, "ns"))
    p.seasonal_smoother = parse_count(*v, "ns");
  if (const auto* v = find_arg(step, "nt")) p.trend_smoother = parse_count(*v, "nt");
  if (const auto* v = find_arg(step, "nl"))
    p.lowpass_smoother = parse_count(*v, "nl");
  if (const auto* v = find_arg(step, "ni"))
    p.inner_iterations = parse_count(*v, "ni");
  if (const auto* v = find_arg(step, "no")) p.outer_iterations = parse_count(*v, "no");
  return p;
}

bool is_analysis_step(const std::string& name) {
  return name == "ssa" || name == "stl" || name == "describe" || name == "ma";
}

// Numeric column to analyze: col= argument, or the only numeric column.
// Validation against a partially-typed schema may have to defer the
// choice to runtime; it then gets an empty name back.
std::string pick_numeric_column(const Schema& schema, const PipelineStep& step,
                                bool types_complete) {
  if (const auto* c = find_arg(step, "col")) {
    const auto& col = schema_lookup(schema, *c);
    if (col.type && !is_numeric_type(*col.type))
      throw TypeError("column \"" + *c + "\" is " + col_type_name(*col.type) +
                      ", expected a numeric column");
    return *c;
  }
  std::vector<std::string> numeric;
  for (const auto& col : schema)
    if (col.type && is_numeric_type(*col.type)) numeric.push_back(col.name);
  if (!types_complete) {
    for (const auto& col : schema)
      if (!col.type) return "";  // undecidable before data is read
  }
  if (numeric.size() == 1) return numeric.front();
  if (numeric.empty())
    throw TypeError(step.name + " found no numeric column");
  throw ArgumentError(step.name + " requires col=... (several numeric columns)");
}

// ---------------------------------------------------------------------
// Schema-level validation (the dry-run path)

Schema validate_step(const Schema& schema, const PipelineStep& step) {
  const std::string name = step.name;
  if (name == "head") {
    parse_count(step.kv.count("n") ? step.kv.at("n") : step.rest, "head count");
    return schema;
  }
  if (name == "select") {
    Schema out;
    for (const auto& col : split_list(list_arg_or_rest(step, "cols"), ','))
      out.push_back(schema_lookup(schema, col));
    if (out.empty()) throw ArgumentError("select requires at least one column");
    return out;
  }
  if (name == "filter") {
    if (trim(step.rest).empty())
      throw ArgumentError("filter requires an expression");
    parse_filter(step.rest, schema);
    return schema;
  }
  if (name == "dropna") {
    if (const auto* how = find_arg(step, "how")) {
      const std::string h = to_lower(*how);
      if (h != "any" && h != "all")
        throw ArgumentError("dropna how must be any or all");
    }
    if (const auto* cols = find_arg(step, "cols"))
      for (const auto& col : split_list(*cols, ','))
        schema_lookup(schema, col);
    return schema;
  }
  if (name == "fillna") {
    const auto args = parse_fill_args(step);
    const auto& col = schema_lookup(schema, args.col);
    Schema out = schema;
    if (col.type) {
      if ((args.kind == FillStrategy::Kind::Mean ||
           args.kind == FillStrategy::Kind::Median)) {
        if (!is_numeric_type(*col.type))
          throw TypeError("fill strategy requires a numeric column, \"" +
                          args.col + "\" is " + col_type_name(*col.type));
        if (*col.type == ColType::I32 || *col.type == ColType::I64)
          for (auto& c : out)
            if (c.name == args.col) c.type = ColType::DD;
      }
      if (args.kind == FillStrategy::Kind::Constant &&
          !parse_cell(args.value_text, *col.type))
        throw TypeError("fill value \"" + args.value_text +
                        "\" does not parse as " + col_type_name(*col.type));
    }
    return out;
  }
  if (name == "sort") {
    for (const auto& [col, _] : parse_sort_spec(step))
      schema_lookup(schema, col);
    return schema;
  }
  if (name == "groupby") {
    const auto [keys, agg] = parse_groupby_spec(step);
    if (keys.empty() || keys.size() > 3)
      throw ArgumentError("groupby takes one, two or three key columns, got " +
                          std::to_string(keys.size()));
    Schema out;
    for (const auto& key : keys) out.push_back(schema_lookup(schema, key));
    for (const auto& [col, op] : agg) {
      const auto& src = schema_lookup(schema, col);
      if (src.type && agg_requires_numeric(op) && !is_numeric_type(*src.type))
        throw TypeError("aggregate " + std::string(agg_op_name(op)) +
                        " requires a numeric column, \"" + col + "\" is " +
                        col_type_name(*src.type));
      ColumnSchema result;
      result.name = col + "_" + agg_op_name(op);
      if (src.type) {
        result.type = agg_result_type(*src.type, op);
      } else if (op == AggOp::Count) {
        result.type = ColType::I64;
      } else if (op == AggOp::Mean || op == AggOp::Std || op == AggOp::Median) {
        result.type = ColType::DD;
      }
      out.push_back(std::move(result));
    }
    return out;
  }
  if (name == "join") {
    const auto args = parse_join_args(step);
    if (args.on.empty())
      throw ArgumentError("join requires at least one key column");
    Schema right = [&] {
      Schema r;
      for (const auto& col : read_csv_header(args.path, args.sep))
        r.push_back({col, std::nullopt});
      return r;
    }();
    for (const auto& key : args.on) {
      schema_lookup(schema, key);
      schema_lookup(right, key);
    }
    Schema out = schema;
    auto exists = [&](const std::string& n) {
      return std::any_of(out.begin(), out.end(),
                         [&](const ColumnSchema& c) { return c.name == n; });
    };
    for (const auto& col : right) {
      if (std::find(args.on.begin(), args.on.end(), col.name) != args.on.end())
        continue;
      std::string n = col.name;
      if (exists(n)) n += "_2";
      if (exists(n))
        throw SchemaError("join output column \"" + n +
                          "\" collides after suffixing");
      out.push_back({n, col.type});
    }
    return out;
  }
  if (name == "describe") {
    bool any_numeric_possible = false;
    for (const auto& col : schema)
      if (!col.type || is_numeric_type(*col.type)) any_numeric_possible = true;
    if (!any_numeric_possible) throw TypeError("describe found no numeric column");
    return {{"column", ColType::STR}, {"count", ColType::I64},
            {"mean", ColType::DD},    {"std", ColType::DD},
            {"min", ColType::DD},     {"q25", ColType::DD},
            {"median", ColType::DD},  {"q75", ColType::DD},
            {"max", ColType::DD}};
  }
  if (name == "ma") {
    const std::size_t window = parse_count(require_arg(step, "window"), "window");
    if (window < 1) throw ArgumentError("window must be at least 1");
    const std::string col = pick_numeric_column(schema, step, false);
    if (col.empty())
      return {{"label", std::nullopt}, {"observed", std::nullopt},
              {"ma", ColType::DD}};
    const auto& src = schema_lookup(schema, col);
    return {{"label", std::nullopt},
            {"observed", src.type},
            {col + "_ma", ColType::DD}};
  }
  if (name == "ssa") {
    if (const auto* w = find_arg(step, "window")) {
      if (parse_count(*w, "window") < 2)
        throw ArgumentError("ssa window must be at least 2");
    }
    const auto groups = parse_groups(require_arg(step, "groups"));
    {
      std::vector<std::size_t> seen;
      for (const auto& g : groups)
        for (auto i : g) {
          if (std::find(seen.begin(), seen.end(), i) != seen.end())
            throw ArgumentError("eigentriple index " + std::to_string(i) +
                                " appears in more than one group");
          seen.push_back(i);
        }
    }
    const std::string col = pick_numeric_column(schema, step, false);
    Schema out = {{"label", std::nullopt},
                  {"observed",
                   col.empty() ? std::nullopt : schema_lookup(schema, col).type}};
    for (std::size_t g = 0; g < groups.size(); ++g)
      out.push_back({"group_" + std::to_string(g), ColType::DD});
    return out;
  }
  if (name == "stl") {
    const StlParams p = parse_stl_params(step);
    if (p.period < 2) throw ArgumentError("stl period must be at least 2");
    if (p.seasonal_smoother < 7 || p.seasonal_smoother % 2 == 0)
      throw ArgumentError("ns must be odd and at least 7");
    for (const auto& [v, what] :
         {std::pair(p.trend_smoother, "nt"), std::pair(p.lowpass_smoother, "nl")})
      if (v && (*v < 3 || *v % 2 == 0))
        throw ArgumentError(std::string(what) + " must be odd and at least 3");
    if (p.inner_iterations < 1)
      throw ArgumentError("ni must be at least 1");
    const std::string col = pick_numeric_column(schema, step, false);
    return {{"label", std::nullopt},
            {"observed",
             col.empty() ? std::nullopt : schema_lookup(schema, col).type},
            {"trend", ColType::DD},
            {"seasonal", ColType::DD},
            {"remainder", ColType::DD}};
  }
  throw ArgumentError("unknown step \"" + name + "\"");
}

// ---------------------------------------------------------------------
// Execution

Frame apply_step(const Frame& frame, const PipelineStep& step) {
  const Schema schema = schema_of(frame);
  const std::string& name = step.name;
  if (name == "head")
    return frame.head(parse_count(
        step.kv.count("n") ? step.kv.at("n") : step.rest, "head count"));
  if (name == "select")
    return frame.select(RowSel::all(),
                        ColSel::with_names(split_list(
                            list_arg_or_rest(step, "cols"), ',')));
  if (name == "filter")
    return filter(frame,
                  filter_predicate(parse_filter(step.rest, schema), frame));
  if (name == "dropna") {
    DropHow how = DropHow::Any;
    if (const auto* h = find_arg(step, "how"))
      how = to_lower(*h) == "all" ? DropHow::All : DropHow::Any;
    std::optional<std::vector<std::string>> subset;
    if (const auto* cols = find_arg(step, "cols"))
      subset = split_list(*cols, ',');
    return drop_missing(frame, how, subset);
  }
  if (name == "fillna") {
    const auto args = parse_fill_args(step);
    FillStrategy strategy;
    switch (args.kind) {
      case FillStrategy::Kind::Mean: strategy = FillStrategy::mean(); break;
      case FillStrategy::Kind::Median: strategy = FillStrategy::median(); break;
      case FillStrategy::Kind::ForwardFill:
        strategy = FillStrategy::forward_fill();
        break;
      case FillStrategy::Kind::Constant: {
        const ColType type = frame.column_type(args.col);
        auto cell = parse_cell(args.value_text, type);
        if (!cell)
          throw TypeError("fill value \"" + args.value_text +
                          "\" does not parse as " + col_type_name(type));
        strategy = FillStrategy::constant(std::move(*cell));
        break;
      }
    }
    return fill_missing(frame, args.col, strategy);
  }
  if (name == "sort") return sort_by(frame, parse_sort_spec(step));
  if (name == "groupby") {
    const auto [keys, agg] = parse_groupby_spec(step);
    return group_aggregate(group_by(frame, keys), agg);
  }
  if (name == "join") {
    const auto args = parse_join_args(step);
    CsvOptions opts;
    opts.separator = args.sep;
    return join(frame, from_csv_file(args.path, opts), args.on, args.kind);
  }
  if (name == "describe") {
    FrameBuilder out;
    out.add_column("column", ColType::STR);
    out.add_column("count", ColType::I64);
    for (const char* c : {"mean", "std", "min", "q25", "median", "q75", "max"})
      out.add_column(c, ColType::DD);
    std::int64_t row = 0;
    for (std::size_t c = 0; c < frame.col_count(); ++c) {
      if (!is_numeric_type(frame.column_type(c))) continue;
      const auto d = describe(frame.to_series(frame.column_names()[c]));
      out.push_row({CellValue(frame.column_names()[c]),
                    CellValue(static_cast<std::int64_t>(d.count)),
                    CellValue(d.mean), CellValue(d.std_dev), CellValue(d.min),
                    CellValue(d.q25), CellValue(d.median), CellValue(d.q75),
                    CellValue(d.max)},
                   CellValue(row++));
    }
    if (row == 0) throw TypeError("describe found no numeric column");
    return std::move(out).build();
  }
  if (name == "ma") {
    const std::size_t window = parse_count(require_arg(step, "window"), "window");
    const std::string col = pick_numeric_column(schema, step, true);
    const Series s = frame.to_series(col);
    const Series m = moving_average(s, window);
    FrameBuilder out;
    out.add_column("label", infer_column_type(m.index, "label"));
    out.add_column("observed", s.type);
    out.add_column(col + "_ma", ColType::DD);
    out.reserve_rows(m.size());
    for (std::size_t i = 0; i < m.size(); ++i)
      out.push_row({m.index[i], s.values[window - 1 + i], m.values[i]},
                   CellValue(static_cast<std::int64_t>(i)));
    return std::move(out).build();
  }
  if (name == "ssa") {
    const std::string col = pick_numeric_column(schema, step, true);
    const Series s = frame.to_series(col);
    std::optional<std::size_t> window;
    if (const auto* w = find_arg(step, "window"))
      window = parse_count(*w, "window");
    const auto groups = parse_groups(require_arg(step, "groups"));
    const SsaModel model = ssa_decompose(s, window);
    return decomposition_to_frame(s, ssa_reconstruct(model, groups));
  }
  if (name == "stl") {
    const std::string col = pick_numeric_column(schema, step, true);
    const Series s = frame.to_series(col);
    return decomposition_to_frame(s, stl_decompose(s, parse_stl_params(step)));
  }
  throw ArgumentError("unknown step \"" + name + "\"");
}

// ---------------------------------------------------------------------
// Output

nlohmann::ordered_json cell_to_json(const CellValue& v) {
  switch (v.storage().index()) {
    case 0: return nullptr;
    case 1: return v.get<bool>();
    case 2: return v.get<std::int32_t>();
    case 3: return v.get<std::int64_t>();
    case 4: return static_cast<double>(v.get<float>());
    case 5: return v.get<double>();
    case 6: return v.get<std::string>();
    case 7: return format_datetime(v.get<DateTime>());
  }
  return nullptr;
}

void write_output(const Frame& frame, const PipelineSpec& spec) {
  namespace fs = std::filesystem;
  const fs::path out_path(spec.out_path);
  fs::path tmp_path = out_path;
  tmp_path += ".tmp";

  {
    std::ofstream out(tmp_path, std::ios::binary);
    if (!out) throw IoError("cannot open \"" + tmp_path.string() + "\" for writing");
    if (spec.format == OutputFormat::Csv) {
      to_csv(out, frame, spec.options);
    } else {
      nlohmann::ordered_json rows = nlohmann::ordered_json::array();
      for (std::size_t r = 0; r < frame.row_count(); ++r) {
        nlohmann::ordered_json obj = nlohmann::ordered_json::object();
        for (std::size_t c = 0; c < frame.col_count(); ++c)
          obj[frame.column_names()[c]] = cell_to_json(frame.cell_at(r, c));
        rows.push_back(std::move(obj));
      }
      out << rows.dump(2) << '\n';
    }
    out.close();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp_path, ec);
      throw IoError("failed to write \"" + tmp_path.string() + "\"");
    }
  }

  std::error_code ec;
  fs::rename(tmp_path, out_path, ec);
  if (ec) {
    std::error_code ec2;
    fs::remove(tmp_path, ec2);
    throw IoError("cannot move output into place: " + ec.message());
  }
}

Frame load_source(const PipelineSpec& spec) {
  if (spec.source.rfind("http://", 0) == 0 ||
      spec.source.rfind("https://", 0) == 0)
    return from_web(spec.source, spec.options);
  return from_csv_file(spec.source, spec.options);
}

std::string step_prefix(const PipelineStep& step) {
  return "step " + std::to_string(step.number) + " (" + step.name + ")";
}

std::optional<std::string> first_validation_error(const PipelineSpec& spec) {
  Schema schema;
  try {
    schema = source_schema(spec);
  } catch (const Error& e) {
    return "load: " + std::string(e.kind()) + ": " + e.what();
  }
  for (std::size_t i = 0; i < spec.steps.size(); ++i) {
    const auto& step = spec.steps[i];
    try {
      if (is_analysis_step(step.name) && i + 1 != spec.steps.size())
        throw ArgumentError("analysis step must be the last step");
      schema = validate_step(schema, step);
    } catch (const Error& e) {
      return step_prefix(step) + ": " + e.kind() + ": " + e.what();
    }
  }
  if (spec.out_path.empty()) return std::string("output: no path given");
  return std::nullopt;
}

}  // namespace

Schema schema_of(const Frame& frame) {
  Schema s;
  s.reserve(frame.col_count());
  for (std::size_t c = 0; c < frame.col_count(); ++c)
    s.push_back({frame.column_names()[c], frame.column_type(c)});
  return s;
}

FilterExpression parse_filter(std::string_view text, const Schema& schema) {
  FilterExpression expr;
  Cursor cur{text};
  while (true) {
    FilterClause clause;
    clause.column = read_column_name(cur);
    const auto& col = schema_lookup(schema, clause.column);
    clause.op = read_operator(cur);
    clause.literal_text = read_literal(cur);
    if (col.type) type_clause(clause, *col.type);
    expr.clauses.push_back(std::move(clause));

    cur.skip_ws();
    if (cur.at_end()) break;
    const auto rest = cur.s.substr(cur.pos);
    if (rest.rfind("and", 0) == 0 && (rest.size() == 3 || !ident_char(rest[3]))) {
      cur.pos += 3;
      continue;
    }
    throw ParseError("expected 'and' at offset " + std::to_string(cur.pos));
  }
  return expr;
}

RowPredicate filter_predicate(const FilterExpression& expr,
                              const Frame& frame) {
  struct Bound {
    std::size_t col;
    FilterClause::Op op;
    CellValue literal;
  };
  std::vector<Bound> bound;
  bound.reserve(expr.clauses.size());
  for (const auto& clause : expr.clauses) {
    Bound b;
    b.col = frame.column_index(clause.column);
    b.op = clause.op;
    FilterClause typed = clause;
    type_clause(typed, frame.column_type(b.col));
    b.literal = std::move(typed.literal);
    bound.push_back(std::move(b));
  }
  return [bound = std::move(bound)](const RowView& row) {
    for (const auto& b : bound) {
      const CellValue& cell = row.at(b.col);
      if (cell.is_missing()) return false;
      if (b.op == FilterClause::Op::Contains) {
        if (cell.get<std::string>().find(b.literal.get<std::string>()) ==
            std::string::npos)
          return false;
        continue;
      }
      const int c = compare_cells(cell, b.literal);
      bool ok = false;
      switch (b.op) {
        case FilterClause::Op::Eq: ok = c == 0; break;
        case FilterClause::Op::Ne: ok = c != 0; break;
        case FilterClause::Op::Lt: ok = c < 0; break;
        case FilterClause::Op::Le: ok = c <= 0; break;
        case FilterClause::Op::Gt: ok = c > 0; break;
        case FilterClause::Op::Ge: ok = c >= 0; break;
        case FilterClause::Op::Contains: break;
      }
      if (!ok) return false;
    }
    return true;
  };
}

std::vector<PipelineStep> parse_steps(std::string_view pipe_text) {
  std::vector<PipelineStep> steps;
  std::size_t pos = 0;
  while (pos <= pipe_text.size()) {
    std::size_t next = pipe_text.find('|', pos);
    if (next == std::string_view::npos) next = pipe_text.size();
    const auto text = trim(pipe_text.substr(pos, next - pos));
    pos = next + 1;
    if (text.empty()) continue;

    PipelineStep step;
    step.number = steps.size() + 1;
    step.text = std::string(text);
    const std::size_t name_end = text.find_first_of(" \t");
    step.name = to_lower(text.substr(0, name_end));
    const auto args = name_end == std::string_view::npos
                          ? std::string_view{}
                          : trim(text.substr(name_end + 1));
    if (step.name == "filter") {
      step.rest = std::string(args);
    } else {
      // key=value tokens; a token without '=' extends the previous value
      // (so lists may contain spaces) or the positional remainder.
      std::string* last_value = nullptr;
      std::size_t p = 0;
      while (p < args.size()) {
        while (p < args.size() &&
               std::isspace(static_cast<unsigned char>(args[p])))
          ++p;
        const std::size_t start = p;
        while (p < args.size() &&
               !std::isspace(static_cast<unsigned char>(args[p])))
          ++p;
        if (start == p) break;
        const auto token = args.substr(start, p - start);
        const std::size_t eq = token.find('=');
        if (eq != std::string_view::npos && eq > 0) {
          auto [it, _] = step.kv.insert_or_assign(
              to_lower(token.substr(0, eq)), std::string(token.substr(eq + 1)));
          last_value = &it->second;
        } else if (last_value) {
          *last_value += ' ';
          *last_value += token;
        } else {
          if (!step.rest.empty()) step.rest += ' ';
          step.rest += token;
        }
      }
    }
    steps.push_back(std::move(step));
  }
  return steps;
}

std::vector<PipelineStep> parse_steps_config(std::istream& config) {
  std::string pipe;
  std::string line;
  while (std::getline(config, line)) {
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    const auto t = trim(line);
    if (t.empty()) continue;
    if (!pipe.empty()) pipe += " | ";
    pipe += std::string(t);
  }
  return parse_steps(pipe);
}

Schema source_schema(const PipelineSpec& spec) {
  std::vector<std::string> names;
  if (spec.options.has_header) {
    if (spec.source.rfind("http://", 0) == 0 ||
        spec.source.rfind("https://", 0) == 0)
      throw ArgumentError(
          "dry-run validation of a URL source is not supported; use a file");
    names = read_csv_header(spec.source, spec.options.separator);
  } else if (spec.options.explicit_types) {
    for (std::size_t c = 0; c < spec.options.explicit_types->size(); ++c)
      names.push_back("C" + std::to_string(c));
  } else {
    throw ArgumentError(
        "cannot validate a header-less source without explicit types");
  }
  Schema schema;
  if (spec.options.explicit_types &&
      spec.options.explicit_types->size() != names.size())
    throw DimensionError("explicit types count " +
                         std::to_string(spec.options.explicit_types->size()) +
                         " != column count " + std::to_string(names.size()));
  for (std::size_t c = 0; c < names.size(); ++c)
    schema.push_back({names[c], spec.options.explicit_types
                                    ? std::optional((*spec.options.explicit_types)[c])
                                    : std::nullopt});
  return schema;
}

void validate_pipeline(const PipelineSpec& spec) {
  if (auto err = first_validation_error(spec))
    throw ArgumentError(*err);
}

int dry_run_pipeline(const PipelineSpec& spec, std::ostream& diag) {
  if (auto err = first_validation_error(spec)) {
    diag << "error: " << *err << "\n";
    return 2;
  }
  return 0;
}

int run_pipeline(const PipelineSpec& spec, std::ostream& diag) {
  if (auto err = first_validation_error(spec)) {
    diag << "error: " << *err << "\n";
    return 1;
  }

  Frame frame;
  try {
    frame = load_source(spec);
  } catch (const Error& e) {
    diag << "error: load: " << e.kind() << ": " << e.what() << "\n";
    return 1;
  }

  for (const auto& step : spec.steps) {
    try {
      frame = apply_step(frame, step);
    } catch (const Error& e) {
      diag << "error: " << step_prefix(step) << ": " << e.kind() << ": "
           << e.what() << "\n";
      return 1;
    }
  }

  try {
    write_output(frame, spec);
  } catch (const Error& e) {
    diag << "error: output: " << e.kind() << ": " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace tabula
