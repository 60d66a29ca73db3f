#include "tabula/csv.hpp"

#include <array>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace tabula {

namespace {

struct Field {
  std::string text;
  bool quoted = false;
};

// RFC-4180 record scanner over an in-memory buffer. Quoted fields may
// contain separators, doubled quotes and newlines; records end at LF,
// CRLF, CR or end of input.
class RecordReader {
 public:
  RecordReader(std::string_view text, char sep) : text_(text), sep_(sep) {}

  bool next(std::vector<Field>& fields, std::size_t& record_line) {
    if (pos_ >= text_.size()) return false;
    record_line = line_;
    fields.clear();
    while (true) {
      fields.emplace_back();
      read_field(fields.back());
      if (pos_ < text_.size() && text_[pos_] == sep_) {
        ++pos_;
        continue;
      }
      consume_terminator();
      return true;
    }
  }

 private:
  void read_field(Field& f) {
    f.text.clear();
    f.quoted = false;
    if (pos_ < text_.size() && text_[pos_] == '"') {
      f.quoted = true;
      ++pos_;
      while (true) {
        if (pos_ >= text_.size())
          throw ParseError("line " + std::to_string(line_) +
                               ": unterminated quoted field",
                           line_);
        const char c = text_[pos_++];
        if (c == '"') {
          if (pos_ < text_.size() && text_[pos_] == '"') {
            f.text.push_back('"');
            ++pos_;
            continue;
          }
          break;
        }
        if (c == '\n') ++line_;
        f.text.push_back(c);
      }
      if (pos_ < text_.size() && text_[pos_] != sep_ && text_[pos_] != '\n' &&
          text_[pos_] != '\r')
        throw ParseError("line " + std::to_string(line_) +
                             ": unexpected character after closing quote",
                         line_);
      return;
    }
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == sep_ || c == '\n' || c == '\r') break;
      f.text.push_back(c);
      ++pos_;
    }
  }

  void consume_terminator() {
    if (pos_ >= text_.size()) return;
    if (text_[pos_] == '\r') {
      ++pos_;
      if (pos_ < text_.size() && text_[pos_] == '\n') ++pos_;
      ++line_;
    } else if (text_[pos_] == '\n') {
      ++pos_;
      ++line_;
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  char sep_;
};

bool field_accepts(std::string_view text, ColType t) {
  return parse_cell(text, t).has_value();
}

// Inference chain; STR is the universal fallback and always last.
constexpr std::array<ColType, 5> kInferChain = {
    ColType::I2, ColType::I32, ColType::I64, ColType::DD, ColType::DT};

CellValue convert_field(const Field& f, ColType type, std::size_t line,
                        std::size_t col, const std::string& col_name,
                        const CsvOptions& opt) {
  if (!f.quoted && opt.is_missing_token(f.text)) return CellValue::missing();
  auto cell = parse_cell(f.text, type);
  if (!cell)
    throw ParseError("line " + std::to_string(line) + ", column " +
                         std::to_string(col + 1) + " (" + col_name +
                         "): field \"" + f.text + "\" does not parse as " +
                         col_type_name(type),
                     line, col + 1);
  return std::move(*cell);
}

void write_field(std::ostream& out, const std::string& text, char sep,
                 const CsvOptions& opt, bool force_quotes) {
  bool needs_quotes = force_quotes;
  if (!needs_quotes)
    for (char c : text)
      if (c == sep || c == '"' || c == '\n' || c == '\r') {
        needs_quotes = true;
        break;
      }
  // Quote non-missing fields that would otherwise read back as Missing.
  if (!needs_quotes && opt.is_missing_token(text)) needs_quotes = true;
  if (!needs_quotes) {
    out << text;
    return;
  }
  out << '"';
  for (char c : text) {
    if (c == '"') out << '"';
    out << c;
  }
  out << '"';
}

}  // namespace

std::vector<ColType> infer_types(
    const std::vector<std::vector<std::string>>& fields_per_column) {
  std::vector<ColType> out;
  out.reserve(fields_per_column.size());
  for (const auto& fields : fields_per_column) {
    ColType chosen = ColType::STR;
    for (ColType cand : kInferChain) {
      bool ok = true;
      for (const auto& f : fields)
        if (!field_accepts(f, cand)) {
          ok = false;
          break;
        }
      if (ok && !fields.empty()) {
        chosen = cand;
        break;
      }
    }
    out.push_back(chosen);
  }
  return out;
}

Frame from_csv(std::string_view text, const CsvOptions& opt) {
  RecordReader reader(text, opt.separator);
  std::vector<Field> rec;
  std::size_t line = 0;

  std::vector<std::string> names;
  bool have_schema = false;
  if (opt.has_header) {
    if (!reader.next(rec, line))
      throw ParseError("empty input: missing header record", 1);
    for (const auto& f : rec) names.push_back(f.text);
    {
      std::vector<std::string> seen;
      for (const auto& n : names) {
        for (const auto& s : seen)
          if (s == n) throw SchemaError("duplicate column name \"" + n + "\"");
        seen.push_back(n);
      }
    }
    have_schema = true;
  }

  const bool typed = opt.explicit_types.has_value();
  std::vector<ColType> types;
  std::vector<std::vector<CellValue>> data;       // typed path
  std::vector<std::vector<Field>> raw_columns;    // inference path
  std::size_t ncol = names.size();
  std::size_t nrow = 0;

  auto init_schema = [&](std::size_t n) {
    ncol = n;
    if (names.empty())
      for (std::size_t c = 0; c < ncol; ++c) names.push_back("C" + std::to_string(c));
    if (typed) {
      if (opt.explicit_types->size() != ncol)
        throw DimensionError("explicit_types has " +
                             std::to_string(opt.explicit_types->size()) +
                             " entries, file has " + std::to_string(ncol) +
                             " columns");
      types = *opt.explicit_types;
      data.assign(ncol, {});
    } else {
      raw_columns.assign(ncol, {});
    }
    have_schema = true;
  };
  if (have_schema) init_schema(ncol);

  while (reader.next(rec, line)) {
    if (!have_schema) init_schema(rec.size());
    if (rec.size() != ncol)
      throw ParseError("line " + std::to_string(line) + ": expected " +
                           std::to_string(ncol) + " fields, got " +
                           std::to_string(rec.size()),
                       line);
    if (typed) {
      for (std::size_t c = 0; c < ncol; ++c)
        data[c].push_back(convert_field(rec[c], types[c], line, c, names[c], opt));
    } else {
      for (std::size_t c = 0; c < ncol; ++c)
        raw_columns[c].push_back(rec[c]);
    }
    ++nrow;
  }

  if (!have_schema) init_schema(0);

  if (!typed) {
    types.resize(ncol, ColType::STR);
    data.assign(ncol, {});
    for (std::size_t c = 0; c < ncol; ++c) {
      ColType chosen = ColType::STR;
      bool any_value = false;
      for (ColType cand : kInferChain) {
        bool ok = true;
        any_value = false;
        for (const auto& f : raw_columns[c]) {
          if (!f.quoted && opt.is_missing_token(f.text)) continue;
          any_value = true;
          if (!field_accepts(f.text, cand)) {
            ok = false;
            break;
          }
        }
        if (ok && any_value) {
          chosen = cand;
          break;
        }
        if (!any_value) break;  // all missing -> STR
      }
      types[c] = chosen;
      data[c].reserve(nrow);
      for (std::size_t r = 0; r < raw_columns[c].size(); ++r)
        data[c].push_back(convert_field(raw_columns[c][r], chosen, 0, c,
                                        names[c], opt));
    }
  }

  return Frame::from_columns(std::move(names), std::move(types),
                             std::move(data), default_index(nrow));
}

Frame from_csv(std::istream& in, const CsvOptions& opt) {
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("failed to read input stream");
  return from_csv(std::string_view(buf.view()), opt);
}

Frame from_csv_file(const std::string& path, const CsvOptions& opt) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open \"" + path + "\" for reading");
  return from_csv(in, opt);
}

std::vector<std::string> read_csv_header(const std::string& path, char sep) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open \"" + path + "\" for reading");
  std::string head(64 * 1024, '\0');
  in.read(head.data(), static_cast<std::streamsize>(head.size()));
  head.resize(static_cast<std::size_t>(in.gcount()));

  RecordReader reader(head, sep);
  std::vector<Field> rec;
  std::size_t line = 0;
  if (!reader.next(rec, line))
    throw ParseError("empty input: missing header record", 1);
  std::vector<std::string> names;
  names.reserve(rec.size());
  for (const auto& f : rec) names.push_back(f.text);
  return names;
}

void to_csv(std::ostream& out, const Frame& frame, const CsvOptions& opt) {
  const auto& names = frame.column_names();
  for (std::size_t c = 0; c < names.size(); ++c) {
    if (c) out << opt.separator;
    write_field(out, names[c], opt.separator, opt, false);
  }
  out << '\n';
  for (std::size_t r = 0; r < frame.row_count(); ++r) {
    for (std::size_t c = 0; c < frame.col_count(); ++c) {
      if (c) out << opt.separator;
      const CellValue& v = frame.cell_at(r, c);
      if (v.is_missing()) continue;  // empty field
      write_field(out, to_string(v), opt.separator, opt, false);
    }
    out << '\n';
  }
  if (!out) throw IoError("failed to write CSV output");
}

std::string to_csv_string(const Frame& frame, const CsvOptions& opt) {
  std::ostringstream out;
  to_csv(out, frame, opt);
  return std::move(out).str();
}

void to_csv_file(const std::string& path, const Frame& frame,
                 const CsvOptions& opt) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open \"" + path + "\" for writing");
  to_csv(out, frame, opt);
  out.close();
  if (!out) throw IoError("failed to write \"" + path + "\"");
}

}  // namespace tabula
