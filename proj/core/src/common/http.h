#pragma once

#include <string>
#include <utility>

#include <nlohmann/json.hpp>

namespace strata::detail {

// POSTs a JSON body to `url` and returns the parsed JSON reply. Throws
// BackendError on transport errors, non-2xx statuses and unparsable bodies.
nlohmann::json post_json(const std::string& url, const nlohmann::json& body,
                         const std::string& bearer_token, double timeout_seconds);

}  // namespace strata::detail
