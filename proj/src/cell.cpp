#include "tabula/cell.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <functional>

namespace tabula {

namespace {

// Days between 1970-01-01 and the given civil date (proleptic Gregorian).
std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, std::int64_t& y, unsigned& m,
                     unsigned& d) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  y = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  d = doy - (153 * mp + 2) / 5 + 1;
  m = mp + (mp < 10 ? 3 : -9);
  y += m <= 2;
}

bool is_leap(std::int64_t y) {
  return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
}

unsigned days_in_month(std::int64_t y, unsigned m) {
  static constexpr std::array<unsigned, 12> k = {31, 28, 31, 30, 31, 30,
                                                 31, 31, 30, 31, 30, 31};
  if (m == 2 && is_leap(y)) return 29;
  return k[m - 1];
}

bool parse_fixed_uint(std::string_view s, std::size_t pos, std::size_t len,
                      unsigned& out) {
  if (pos + len > s.size()) return false;
  unsigned v = 0;
  for (std::size_t i = 0; i < len; ++i) {
    char c = s[pos + i];
    if (c < '0' || c > '9') return false;
    v = v * 10 + static_cast<unsigned>(c - '0');
  }
  out = v;
  return true;
}

template <class Int>
std::optional<Int> parse_int(std::string_view s) {
  Int v{};
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') ++first;  // from_chars rejects a leading '+'
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) return std::nullopt;
  return v;
}

template <class Float>
std::optional<Float> parse_float(std::string_view s) {
  Float v{};
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) return std::nullopt;
  return v;
}

bool iequals(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    char x = a[i], y = b[i];
    if (x >= 'A' && x <= 'Z') x = static_cast<char>(x - 'A' + 'a');
    if (y >= 'A' && y <= 'Z') y = static_cast<char>(y - 'A' + 'a');
    if (x != y) return false;
  }
  return true;
}

template <class Float>
std::string format_float(Float v) {
  std::array<char, 64> buf;
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

constexpr std::int64_t kMsPerDay = 86'400'000;

std::size_t hash_mix(std::size_t seed, std::size_t h) {
  return seed ^ (h + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

}  // namespace

const char* col_type_name(ColType t) {
  switch (t) {
    case ColType::I2: return "I2";
    case ColType::I32: return "I32";
    case ColType::I64: return "I64";
    case ColType::F32: return "F32";
    case ColType::DD: return "DD";
    case ColType::STR: return "STR";
    case ColType::IN: return "IN";
    case ColType::DT: return "DT";
  }
  return "?";
}

std::optional<ColType> col_type_from_name(std::string_view name) {
  static constexpr std::array<std::pair<std::string_view, ColType>, 8> k = {{
      {"I2", ColType::I2},
      {"I32", ColType::I32},
      {"I64", ColType::I64},
      {"F32", ColType::F32},
      {"DD", ColType::DD},
      {"STR", ColType::STR},
      {"IN", ColType::IN},
      {"DT", ColType::DT},
  }};
  for (auto [n, t] : k)
    if (n == name) return t;
  return std::nullopt;
}

std::optional<DateTime> parse_datetime(std::string_view text) {
  // Date part: YYYY-MM-DD
  unsigned yu, mo, dy;
  if (text.size() < 10) return std::nullopt;
  if (!parse_fixed_uint(text, 0, 4, yu) || text[4] != '-' ||
      !parse_fixed_uint(text, 5, 2, mo) || text[7] != '-' ||
      !parse_fixed_uint(text, 8, 2, dy))
    return std::nullopt;
  const std::int64_t yr = yu;
  if (mo < 1 || mo > 12 || dy < 1 || dy > days_in_month(yr, mo))
    return std::nullopt;

  unsigned hh = 0, mi = 0, ss = 0, frac = 0;
  std::size_t pos = 10;
  if (pos < text.size() && text[pos] == 'T') {
    if (!parse_fixed_uint(text, pos + 1, 2, hh) || text.size() < pos + 9 ||
        text[pos + 3] != ':' || !parse_fixed_uint(text, pos + 4, 2, mi) ||
        text[pos + 6] != ':' || !parse_fixed_uint(text, pos + 7, 2, ss))
      return std::nullopt;
    if (hh > 23 || mi > 59 || ss > 59) return std::nullopt;
    pos += 9;
    if (pos < text.size() && text[pos] == '.') {
      ++pos;
      std::size_t ndig = 0;
      while (pos + ndig < text.size() && text[pos + ndig] >= '0' &&
             text[pos + ndig] <= '9')
        ++ndig;
      if (ndig < 1 || ndig > 3) return std::nullopt;
      parse_fixed_uint(text, pos, ndig, frac);
      for (std::size_t i = ndig; i < 3; ++i) frac *= 10;
      pos += ndig;
    }
  }
  if (pos < text.size() && text[pos] == 'Z') ++pos;
  if (pos != text.size()) return std::nullopt;

  const std::int64_t days = days_from_civil(yr, mo, dy);
  return DateTime{days * kMsPerDay +
                  (static_cast<std::int64_t>(hh) * 3600 + mi * 60 + ss) * 1000 +
                  frac};
}

std::string format_datetime(DateTime dt) {
  std::int64_t days = dt.ms / kMsPerDay;
  std::int64_t rem = dt.ms % kMsPerDay;
  if (rem < 0) {
    rem += kMsPerDay;
    --days;
  }
  std::int64_t yr;
  unsigned mo, dy;
  civil_from_days(days, yr, mo, dy);
  const unsigned hh = static_cast<unsigned>(rem / 3'600'000);
  const unsigned mi = static_cast<unsigned>(rem / 60'000 % 60);
  const unsigned ss = static_cast<unsigned>(rem / 1000 % 60);
  const unsigned ms = static_cast<unsigned>(rem % 1000);
  char buf[40];
  if (ms != 0)
    std::snprintf(buf, sizeof buf, "%04lld-%02u-%02uT%02u:%02u:%02u.%03uZ",
                  static_cast<long long>(yr), mo, dy, hh, mi, ss, ms);
  else
    std::snprintf(buf, sizeof buf, "%04lld-%02u-%02uT%02u:%02u:%02uZ",
                  static_cast<long long>(yr), mo, dy, hh, mi, ss);
  return buf;
}

bool CellValue::is_numeric() const noexcept {
  return holds<std::int32_t>() || holds<std::int64_t>() || holds<float>() ||
         holds<double>();
}

std::optional<ColType> CellValue::tag() const noexcept {
  switch (v_.index()) {
    case 1: return ColType::I2;
    case 2: return ColType::I32;
    case 3: return ColType::I64;
    case 4: return ColType::F32;
    case 5: return ColType::DD;
    case 6: return ColType::STR;
    case 7: return ColType::DT;
    default: return std::nullopt;
  }
}

double CellValue::as_double() const {
  switch (v_.index()) {
    case 2: return static_cast<double>(get<std::int32_t>());
    case 3: return static_cast<double>(get<std::int64_t>());
    case 4: return static_cast<double>(get<float>());
    case 5: return get<double>();
    default:
      throw TypeError("cell is not numeric: " + to_string(*this));
  }
}

bool operator==(const CellValue& a, const CellValue& b) {
  return a.storage() == b.storage();
}

int compare_cells(const CellValue& a, const CellValue& b) {
  const auto ia = a.storage().index();
  const auto ib = b.storage().index();
  if (ia == 0 || ib == 0) {
    if (ia == ib) return 0;
    return ia == 0 ? -1 : 1;  // Missing first
  }
  auto rank_cmp = [&] { return ia < ib ? -1 : (ia > ib ? 1 : 0); };
  if (ia == ib) {
    switch (ia) {
      case 1: {
        bool x = a.get<bool>(), y = b.get<bool>();
        return x == y ? 0 : (x < y ? -1 : 1);
      }
      case 6: return a.get<std::string>().compare(b.get<std::string>());
      case 7: {
        auto x = a.get<DateTime>().ms, y = b.get<DateTime>().ms;
        return x == y ? 0 : (x < y ? -1 : 1);
      }
      default: break;  // numeric, fall through below
    }
  }
  if (a.is_numeric() && b.is_numeric()) {
    // Exact for same-width integers, value-based across widths.
    if (ia == 3 && ib == 3) {
      auto x = a.get<std::int64_t>(), y = b.get<std::int64_t>();
      return x == y ? 0 : (x < y ? -1 : 1);
    }
    const double x = a.as_double();
    const double y = b.as_double();
    if (x < y) return -1;
    if (x > y) return 1;
    return rank_cmp();
  }
  return rank_cmp();
}

std::size_t CellHash::operator()(const CellValue& v) const noexcept {
  std::size_t seed = v.storage().index();
  switch (v.storage().index()) {
    case 1: return hash_mix(seed, std::hash<bool>{}(v.get<bool>()));
    case 2: return hash_mix(seed, std::hash<std::int32_t>{}(v.get<std::int32_t>()));
    case 3: return hash_mix(seed, std::hash<std::int64_t>{}(v.get<std::int64_t>()));
    case 4: return hash_mix(seed, std::hash<float>{}(v.get<float>()));
    case 5: return hash_mix(seed, std::hash<double>{}(v.get<double>()));
    case 6: return hash_mix(seed, std::hash<std::string>{}(v.get<std::string>()));
    case 7: return hash_mix(seed, std::hash<std::int64_t>{}(v.get<DateTime>().ms));
    default: return seed;
  }
}

bool conforms(const CellValue& v, ColType t) {
  if (v.is_missing()) return true;
  const auto tag = *v.tag();
  if (tag == ColType::STR) return t == ColType::STR || t == ColType::IN;
  return tag == t;
}

std::string to_string(const CellValue& v) {
  switch (v.storage().index()) {
    case 0: return "";
    case 1: return v.get<bool>() ? "true" : "false";
    case 2: return std::to_string(v.get<std::int32_t>());
    case 3: return std::to_string(v.get<std::int64_t>());
    case 4: return format_float(v.get<float>());
    case 5: return format_float(v.get<double>());
    case 6: return v.get<std::string>();
    case 7: return format_datetime(v.get<DateTime>());
  }
  return "";
}

std::optional<CellValue> parse_cell(std::string_view text, ColType t) {
  switch (t) {
    case ColType::I2:
      if (iequals(text, "true")) return CellValue(true);
      if (iequals(text, "false")) return CellValue(false);
      return std::nullopt;
    case ColType::I32:
      if (auto v = parse_int<std::int32_t>(text)) return CellValue(*v);
      return std::nullopt;
    case ColType::I64:
      if (auto v = parse_int<std::int64_t>(text)) return CellValue(*v);
      return std::nullopt;
    case ColType::F32:
      if (auto v = parse_float<float>(text)) return CellValue(*v);
      return std::nullopt;
    case ColType::DD:
      if (auto v = parse_float<double>(text)) return CellValue(*v);
      return std::nullopt;
    case ColType::STR:
    case ColType::IN:
      return CellValue(std::string(text));
    case ColType::DT:
      if (auto v = parse_datetime(text)) return CellValue(*v);
      return std::nullopt;
  }
  return std::nullopt;
}

}  // namespace tabula
