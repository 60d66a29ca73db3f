#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "tabula/error.hpp"

namespace tabula {

/// Column type tags. IN is a categorical string: it shares the string
/// storage of STR and differs only in its semantic tag.
enum class ColType { I2, I32, I64, F32, DD, STR, IN, DT };

const char* col_type_name(ColType t);
std::optional<ColType> col_type_from_name(std::string_view name);

/// UTC instant, milliseconds since the Unix epoch.
struct DateTime {
  std::int64_t ms = 0;
  auto operator<=>(const DateTime&) const = default;
};

/// ISO-8601 text <-> DateTime. Accepted forms are "YYYY-MM-DD" and
/// "YYYY-MM-DDThh:mm:ss" with optional ".fff" fraction and optional
/// trailing "Z". Anything else is rejected.
std::optional<DateTime> parse_datetime(std::string_view text);
std::string format_datetime(DateTime dt);

/// One cell of a frame: a typed scalar or the Missing marker.
///
/// The payload alternatives map onto column types as
/// bool=I2, int32=I32, int64=I64, float=F32, double=DD,
/// string=STR/IN, DateTime=DT. Missing carries no payload.
class CellValue {
 public:
  using Storage = std::variant<std::monostate, bool, std::int32_t,
                               std::int64_t, float, double, std::string,
                               DateTime>;

  CellValue() noexcept = default;  // Missing
  CellValue(bool v) : v_(v) {}
  CellValue(std::int32_t v) : v_(v) {}
  CellValue(std::int64_t v) : v_(v) {}
  CellValue(float v) : v_(v) {}
  CellValue(double v) : v_(v) {}
  CellValue(std::string v) : v_(std::move(v)) {}
  CellValue(std::string_view v) : v_(std::string(v)) {}
  CellValue(const char* v) : v_(std::string(v)) {}
  CellValue(DateTime v) : v_(v) {}

  static CellValue missing() noexcept { return CellValue(); }

  bool is_missing() const noexcept {
    return std::holds_alternative<std::monostate>(v_);
  }
  /// True for I32/I64/F32/DD payloads (bool is not numeric).
  bool is_numeric() const noexcept;

  template <class T>
  bool holds() const noexcept {
    return std::holds_alternative<T>(v_);
  }
  template <class T>
  const T& get() const {
    return std::get<T>(v_);
  }

  const Storage& storage() const noexcept { return v_; }

  /// The ColType this cell's payload belongs to; nullopt for Missing.
  /// Strings report STR (a column may still tag them IN).
  std::optional<ColType> tag() const noexcept;

  /// Payload as double. Throws TypeError for non-numeric cells.
  double as_double() const;

 private:
  Storage v_;
};

/// Tag-then-payload equality; Missing equals only Missing.
bool operator==(const CellValue& a, const CellValue& b);
inline bool operator!=(const CellValue& a, const CellValue& b) {
  return !(a == b);
}

/// Total order used by sorting: Missing before every non-missing value,
/// numeric kinds compared by value, otherwise natural order within a kind
/// and kind rank across kinds. Returns <0, 0, >0.
int compare_cells(const CellValue& a, const CellValue& b);

struct CellHash {
  std::size_t operator()(const CellValue& v) const noexcept;
};

/// True when the cell may be stored in a column of the given type.
/// Missing conforms to every type; strings conform to STR and IN.
bool conforms(const CellValue& v, ColType t);

/// Canonical text of a cell: the CSV field form. Missing -> "".
std::string to_string(const CellValue& v);

/// Parse a non-missing field under an explicit column type.
/// Returns nullopt when the text does not parse as that type.
std::optional<CellValue> parse_cell(std::string_view text, ColType t);

}  // namespace tabula
