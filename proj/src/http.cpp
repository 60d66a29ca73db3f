#include "tabula/http.hpp"

#define CPPHTTPLIB_REDIRECT_MAX_COUNT 5
#include <httplib.h>

namespace tabula {

namespace {

struct UrlParts {
  std::string origin;  // scheme://host[:port]
  std::string target;  // path + query, "/" at minimum
};

UrlParts split_url(const std::string& url) {
  std::size_t scheme_end;
  if (url.rfind("http://", 0) == 0)
    scheme_end = 7;
  else if (url.rfind("https://", 0) == 0)
    scheme_end = 8;
  else
    throw ArgumentError("url must start with http:// or https://: " + url);
  const std::size_t path_start = url.find('/', scheme_end);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

}  // namespace

Frame from_web(const std::string& url, const CsvOptions& options) {
  const UrlParts parts = split_url(url);
  httplib::Client client(parts.origin);
  client.set_follow_location(true);
  client.set_connection_timeout(30, 0);
  client.set_read_timeout(30, 0);

  httplib::Headers headers = {{"Accept", "text/csv, text/plain, */*"}};
  auto res = client.Get(parts.target, headers);
  if (!res)
    throw TransportError("GET " + url + " failed: " + httplib::to_string(res.error()));
  if (res->status < 200 || res->status >= 300)
    throw TransportError("GET " + url + " returned status " +
                             std::to_string(res->status),
                         res->status);
  return from_csv(std::string_view(res->body), options);
}

}  // namespace tabula
