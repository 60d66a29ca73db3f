#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tabula/csv.hpp"
#include "tabula/ops.hpp"

namespace tabula {

/// Column schema visible to pipeline validation. Types are unknown until
/// data is read unless the caller supplied explicit types.
struct ColumnSchema {
  std::string name;
  std::optional<ColType> type;
};
using Schema = std::vector<ColumnSchema>;

Schema schema_of(const Frame& frame);

/// One clause of a conjunctive filter: `column op literal`.
struct FilterClause {
  enum class Op { Eq, Ne, Lt, Le, Gt, Ge, Contains };
  std::string column;
  Op op = Op::Eq;
  std::string literal_text;
  CellValue literal;   // resolved when the column type is known
  bool typed = false;  // literal has been parsed under the column type
};

struct FilterExpression {
  std::vector<FilterClause> clauses;  // conjunction
};

/// Parse `col op literal [and col op literal]*`. Column names with spaces
/// are back-quoted; literals may be double-quoted. Columns must exist in
/// the schema; literals are typed against the column type when it is
/// known. Syntax errors report a character offset.
FilterExpression parse_filter(std::string_view text, const Schema& schema);

/// Bind a parsed expression to a concrete frame (resolving any literals
/// left untyped) and return the row predicate. A Missing cell fails every
/// clause.
RowPredicate filter_predicate(const FilterExpression& expr, const Frame& frame);

/// One pipeline step: a name plus key=value arguments and/or a positional
/// remainder (e.g. the whole filter expression).
struct PipelineStep {
  std::size_t number = 0;  // 1-based position in the pipe
  std::string name;
  std::string text;  // step as written
  std::map<std::string, std::string> kv;
  std::string rest;
};

enum class OutputFormat { Csv, Json };

struct PipelineSpec {
  std::string source;  // path or http(s) URL
  CsvOptions options;
  std::vector<PipelineStep> steps;
  std::string out_path;
  OutputFormat format = OutputFormat::Csv;
};

/// Split a `|`-separated pipe string into steps.
std::vector<PipelineStep> parse_steps(std::string_view pipe_text);
/// Config-file form: one step per line, blank lines and `#` comments
/// ignored.
std::vector<PipelineStep> parse_steps_config(std::istream& config);

/// Schema of the source as visible without reading data rows: the header
/// record plus any explicit types.
Schema source_schema(const PipelineSpec& spec);

/// Validate every step against the evolving schema. Throws on the first
/// invalid step with a message naming it.
void validate_pipeline(const PipelineSpec& spec);

/// Validate only; exit status 0 (valid) or 2. Reads no data rows.
int dry_run_pipeline(const PipelineSpec& spec, std::ostream& diag);

/// Validate, execute and write the output atomically. Exit status 0 on
/// success, 1 on any failure (one diagnostic line is written to `diag`).
int run_pipeline(const PipelineSpec& spec, std::ostream& diag);

}  // namespace tabula
