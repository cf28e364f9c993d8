#pragma once

#include <optional>
#include <string_view>

#include <nlohmann/json.hpp>

namespace strata {

// Finds the first balanced top-level JSON value opening with `open` ('{' or
// '[') inside free text and parses it. String literals are honoured while
// matching brackets. Returns nullopt when nothing parses.
std::optional<nlohmann::json> first_json(std::string_view text, char open);

}  // namespace strata
