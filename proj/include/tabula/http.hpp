#pragma once

#include <string>

#include "tabula/csv.hpp"

namespace tabula {

/// GET a CSV document and parse it. Follows up to 5 redirects, times out
/// after 30 seconds, sends "Accept: text/csv, text/plain, */*".
/// Non-2xx responses and network failures raise TransportError carrying
/// the HTTP status (0 when no response was received).
Frame from_web(const std::string& url, const CsvOptions& options = {});

}  // namespace tabula
