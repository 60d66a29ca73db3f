#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tabula/frame.hpp"

namespace tabula {

struct CsvOptions {
  char separator = ',';
  bool has_header = true;
  /// Field texts read back as Missing. The empty field is always included.
  std::vector<std::string> missing_tokens = {"", "NaN", "null",
                                             "NULL", "?",   "*"};
  /// When set, each field parses directly as the given type, skipping
  /// the inference scan (the fast path). Length must match the file's
  /// column count.
  std::optional<std::vector<ColType>> explicit_types;

  bool is_missing_token(std::string_view field) const {
    for (const auto& t : missing_tokens)
      if (field == t) return true;
    return false;
  }
};

/// Narrowest type in the chain I2 -> I32 -> I64 -> DD -> DT -> STR accepted
/// by every field of a column. Inputs are the non-missing field texts per
/// column; an empty list yields STR. Inference never returns F32 or IN.
std::vector<ColType> infer_types(
    const std::vector<std::vector<std::string>>& fields_per_column);

Frame from_csv(std::string_view text, const CsvOptions& options = {});
Frame from_csv(std::istream& in, const CsvOptions& options = {});
Frame from_csv_file(const std::string& path, const CsvOptions& options = {});

/// Column names from the first record of a file, without reading data
/// rows (at most the first 64 KiB are scanned).
std::vector<std::string> read_csv_header(const std::string& path, char sep);

void to_csv(std::ostream& out, const Frame& frame,
            const CsvOptions& options = {});
std::string to_csv_string(const Frame& frame, const CsvOptions& options = {});
void to_csv_file(const std::string& path, const Frame& frame,
                 const CsvOptions& options = {});

}  // namespace tabula
