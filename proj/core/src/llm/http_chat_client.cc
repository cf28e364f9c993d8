#include <nlohmann/json.hpp>

#include "common/http.h"
#include "strata/common/error.h"
#include "strata/llm/chat_client.h"

namespace strata::llm {

HttpChatClient::HttpChatClient(ChatEndpoint endpoint) : endpoint_(std::move(endpoint)) {
  if (endpoint_.url.empty()) throw InputError("chat endpoint URL is empty");
}

std::string HttpChatClient::identity() const { return "http-chat/" + endpoint_.model; }

std::string HttpChatClient::do_complete(std::string_view system, std::string_view user) {
  nlohmann::json messages = nlohmann::json::array();
  if (!system.empty()) messages.push_back({{"role", "system"}, {"content", system}});
  messages.push_back({{"role", "user"}, {"content", user}});
  const nlohmann::json body{{"model", endpoint_.model}, {"temperature", kTemperature}, {"messages", messages}};

  const nlohmann::json reply = detail::post_json(endpoint_.url, body, endpoint_.api_key, endpoint_.timeout_seconds);
  try {
    const auto& content = reply.at("choices").at(0).at("message").at("content");
    if (!content.is_string()) throw BackendError("chat reply content is not a string");
    return content.get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw BackendError(std::string("unexpected chat reply shape: ") + e.what());
  }
}

}  // namespace strata::llm
