#pragma once

#include <optional>
#include <string_view>

namespace strata::assets {

// Looks up an asset compiled in from core/assets (prompts and banks).
std::optional<std::string_view> find(std::string_view name);

}  // namespace strata::assets
