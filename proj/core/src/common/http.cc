#include "common/http.h"

#include <httplib.h>

#include "strata/common/error.h"

namespace strata::detail {
namespace {

std::pair<std::string, std::string> split_url(const std::string& url) {
  const auto scheme = url.find("://");
  const auto path_start = url.find('/', scheme == std::string::npos ? 0 : scheme + 3);
  if (scheme == std::string::npos) throw BackendError("endpoint URL needs a scheme: '" + url + "'");
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

}  // namespace

nlohmann::json post_json(const std::string& url, const nlohmann::json& body, const std::string& bearer_token,
                         double timeout_seconds) {
  const auto [base, path] = split_url(url);
  httplib::Client client(base);
  const auto seconds = static_cast<time_t>(timeout_seconds);
  client.set_connection_timeout(seconds, 0);
  client.set_read_timeout(seconds, 0);
  client.set_write_timeout(seconds, 0);
  httplib::Headers headers;
  if (!bearer_token.empty()) headers.emplace("Authorization", "Bearer " + bearer_token);

  auto response = client.Post(path, headers, body.dump(), "application/json");
  if (!response) throw BackendError("request to " + url + " failed: " + httplib::to_string(response.error()));
  if (response->status < 200 || response->status >= 300) {
    throw BackendError("request to " + url + " returned HTTP " + std::to_string(response->status));
  }
  try {
    return nlohmann::json::parse(response->body);
  } catch (const nlohmann::json::exception& e) {
    throw BackendError("unparsable reply from " + url + ": " + e.what());
  }
}

}  // namespace strata::detail
